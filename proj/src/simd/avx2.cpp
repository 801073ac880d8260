// AVX2 kernels. Compiled for the baseline target; only the functions below
// carry the avx2 target attribute, so nothing AVX2-encoded leaks into
// shared inline code.

#include "backends.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define CWSK_HAVE_AVX2_BACKEND 1
#include <immintrin.h>
#endif

namespace cwsk::simd::detail {

#ifdef CWSK_HAVE_AVX2_BACKEND
namespace {

#define CWSK_AVX2 __attribute__((target("avx2")))

CWSK_AVX2 MinMaxSums min_max_block(const double* u, const double* v, std::size_t n) {
    __m256d lo0 = _mm256_setzero_pd();
    __m256d lo1 = _mm256_setzero_pd();
    __m256d hi0 = _mm256_setzero_pd();
    __m256d hi1 = _mm256_setzero_pd();
    const std::size_t n8 = n - n % 8;
    for (std::size_t i = 0; i < n8; i += 8) {
        const __m256d a0 = _mm256_loadu_pd(u + i);
        const __m256d b0 = _mm256_loadu_pd(v + i);
        const __m256d a1 = _mm256_loadu_pd(u + i + 4);
        const __m256d b1 = _mm256_loadu_pd(v + i + 4);
        lo0 = _mm256_add_pd(lo0, _mm256_min_pd(a0, b0));
        hi0 = _mm256_add_pd(hi0, _mm256_max_pd(a0, b0));
        lo1 = _mm256_add_pd(lo1, _mm256_min_pd(a1, b1));
        hi1 = _mm256_add_pd(hi1, _mm256_max_pd(a1, b1));
    }
    alignas(32) double lo[4];
    alignas(32) double hi[4];
    _mm256_store_pd(lo, _mm256_add_pd(lo0, lo1));
    _mm256_store_pd(hi, _mm256_add_pd(hi0, hi1));
    double smin = (lo[0] + lo[1]) + (lo[2] + lo[3]);
    double smax = (hi[0] + hi[1]) + (hi[2] + hi[3]);
    for (std::size_t i = n8; i < n; ++i) {
        smin += u[i] < v[i] ? u[i] : v[i];
        smax += u[i] < v[i] ? v[i] : u[i];
    }
    return {smin, smax};
}

CWSK_AVX2 CwsArgmin cws_argmin(const double* log_u, const double* r, const double* log_c,
                               const double* beta, std::size_t n) {
    const std::size_t n4 = n - n % 4;
    CwsArgmin best{0, 0.0, 0.0};
    bool have = false;
    if (n4 > 0) {
        __m256d best_val = _mm256_set1_pd(__builtin_inf());
        __m256d best_pos = _mm256_setzero_pd();
        __m256d best_t = _mm256_setzero_pd();
        __m256d pos = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
        const __m256d step = _mm256_set1_pd(4.0);
        for (std::size_t i = 0; i < n4; i += 4) {
            const __m256d rv = _mm256_loadu_pd(r + i);
            const __m256d bv = _mm256_loadu_pd(beta + i);
            const __m256d t = _mm256_floor_pd(_mm256_add_pd(_mm256_div_pd(_mm256_loadu_pd(log_u + i), rv), bv));
            __m256d la = _mm256_sub_pd(_mm256_loadu_pd(log_c + i), _mm256_mul_pd(rv, t));
            la = _mm256_add_pd(la, _mm256_mul_pd(rv, bv));
            la = _mm256_sub_pd(la, rv);
            const __m256d lt = _mm256_cmp_pd(la, best_val, _CMP_LT_OQ);
            best_val = _mm256_blendv_pd(best_val, la, lt);
            best_pos = _mm256_blendv_pd(best_pos, pos, lt);
            best_t = _mm256_blendv_pd(best_t, t, lt);
            pos = _mm256_add_pd(pos, step);
        }
        alignas(32) double vals[4];
        alignas(32) double poss[4];
        alignas(32) double ts[4];
        _mm256_store_pd(vals, best_val);
        _mm256_store_pd(poss, best_pos);
        _mm256_store_pd(ts, best_t);
        std::size_t w = 0;
        for (std::size_t l = 1; l < 4; ++l) {
            if (vals[l] < vals[w] || (vals[l] == vals[w] && poss[l] < poss[w])) w = l;
        }
        best = {static_cast<std::size_t>(poss[w]), ts[w], vals[w]};
        have = true;
    }
    for (std::size_t i = n4; i < n; ++i) {
        const double t = __builtin_floor(log_u[i] / r[i] + beta[i]);
        const double la = log_c[i] - r[i] * t + r[i] * beta[i] - r[i];
        if (!have || la < best.log_a) {
            best = {i, t, la};
            have = true;
        }
    }
    return best;
}

CWSK_AVX2 std::size_t count_masked_matches(const std::uint32_t* ia, const std::uint32_t* ib,
                                           const std::int64_t* ta, const std::int64_t* tb,
                                           std::size_t n, std::uint32_t index_mask,
                                           std::uint64_t level_mask) {
    const __m128i imask = _mm_set1_epi32(static_cast<int>(index_mask));
    const __m256i tmask = _mm256_set1_epi64x(static_cast<long long>(level_mask));
    const __m128i zero4 = _mm_setzero_si128();
    const __m256i zero8 = _mm256_setzero_si256();
    std::size_t count = 0;
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m128i a = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ia + i));
        const __m128i b = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ib + i));
        const __m128i ei = _mm_cmpeq_epi32(_mm_and_si128(_mm_xor_si128(a, b), imask), zero4);
        const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(ta + i));
        const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(tb + i));
        const __m256i et = _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_xor_si256(x, y), tmask), zero8);
        const __m256i both = _mm256_and_si256(_mm256_cvtepi32_epi64(ei), et);
        count += static_cast<std::size_t>(__builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(both)))));
    }
    for (std::size_t i = n4; i < n; ++i) {
        const bool same_index = ((ia[i] ^ ib[i]) & index_mask) == 0;
        const auto dt = static_cast<std::uint64_t>(ta[i]) ^ static_cast<std::uint64_t>(tb[i]);
        count += (same_index && (dt & level_mask) == 0) ? 1 : 0;
    }
    return count;
}

CWSK_AVX2 std::size_t count_equal(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
    std::size_t count = 0;
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        const __m256i eq = _mm256_cmpeq_epi64(x, y);
        count += static_cast<std::size_t>(__builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(eq)))));
    }
    for (std::size_t i = n4; i < n; ++i) count += a[i] == b[i] ? 1 : 0;
    return count;
}

#undef CWSK_AVX2

}  // namespace

const Kernels* avx2_kernels() {
    static const Kernels k{min_max_block, cws_argmin, count_masked_matches, count_equal};
    return &k;
}

#else

const Kernels* avx2_kernels() { return nullptr; }

#endif

}  // namespace cwsk::simd::detail

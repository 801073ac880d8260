// AArch64 NEON kernels (Advanced SIMD is part of the AArch64 baseline).

#include "backends.hpp"

#if defined(__aarch64__)
#define CWSK_HAVE_NEON_BACKEND 1
#include <arm_neon.h>
#endif

namespace cwsk::simd::detail {

#ifdef CWSK_HAVE_NEON_BACKEND
namespace {

MinMaxSums min_max_block(const double* u, const double* v, std::size_t n) {
    float64x2_t lo[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
    float64x2_t hi[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
    const std::size_t n8 = n - n % 8;
    for (std::size_t i = 0; i < n8; i += 8) {
        for (int q = 0; q < 4; ++q) {
            const float64x2_t a = vld1q_f64(u + i + 2 * q);
            const float64x2_t b = vld1q_f64(v + i + 2 * q);
            lo[q] = vaddq_f64(lo[q], vminq_f64(a, b));
            hi[q] = vaddq_f64(hi[q], vmaxq_f64(a, b));
        }
    }
    // lo[0] holds lanes 0,1; lo[1] lanes 2,3; lo[2] lanes 4,5; lo[3] lanes 6,7.
    const float64x2_t lo04 = vaddq_f64(lo[0], lo[2]);
    const float64x2_t lo26 = vaddq_f64(lo[1], lo[3]);
    const float64x2_t hi04 = vaddq_f64(hi[0], hi[2]);
    const float64x2_t hi26 = vaddq_f64(hi[1], hi[3]);
    double smin = (vgetq_lane_f64(lo04, 0) + vgetq_lane_f64(lo04, 1)) +
                  (vgetq_lane_f64(lo26, 0) + vgetq_lane_f64(lo26, 1));
    double smax = (vgetq_lane_f64(hi04, 0) + vgetq_lane_f64(hi04, 1)) +
                  (vgetq_lane_f64(hi26, 0) + vgetq_lane_f64(hi26, 1));
    for (std::size_t i = n8; i < n; ++i) {
        smin += u[i] < v[i] ? u[i] : v[i];
        smax += u[i] < v[i] ? v[i] : u[i];
    }
    return {smin, smax};
}

CwsArgmin cws_argmin(const double* log_u, const double* r, const double* log_c,
                     const double* beta, std::size_t n) {
    const std::size_t n2 = n - n % 2;
    CwsArgmin best{0, 0.0, 0.0};
    bool have = false;
    if (n2 > 0) {
        float64x2_t best_val = vdupq_n_f64(__builtin_inf());
        float64x2_t best_pos = vdupq_n_f64(0.0);
        float64x2_t best_t = vdupq_n_f64(0.0);
        const double init_pos[2] = {0.0, 1.0};
        float64x2_t pos = vld1q_f64(init_pos);
        const float64x2_t step = vdupq_n_f64(2.0);
        for (std::size_t i = 0; i < n2; i += 2) {
            const float64x2_t rv = vld1q_f64(r + i);
            const float64x2_t bv = vld1q_f64(beta + i);
            const float64x2_t t = vrndmq_f64(vaddq_f64(vdivq_f64(vld1q_f64(log_u + i), rv), bv));
            float64x2_t la = vsubq_f64(vld1q_f64(log_c + i), vmulq_f64(rv, t));
            la = vaddq_f64(la, vmulq_f64(rv, bv));
            la = vsubq_f64(la, rv);
            const uint64x2_t lt = vcltq_f64(la, best_val);
            best_val = vbslq_f64(lt, la, best_val);
            best_pos = vbslq_f64(lt, pos, best_pos);
            best_t = vbslq_f64(lt, t, best_t);
            pos = vaddq_f64(pos, step);
        }
        const double v0 = vgetq_lane_f64(best_val, 0), v1 = vgetq_lane_f64(best_val, 1);
        const double p0 = vgetq_lane_f64(best_pos, 0), p1 = vgetq_lane_f64(best_pos, 1);
        const bool second = v1 < v0 || (v1 == v0 && p1 < p0);
        best = second ? CwsArgmin{static_cast<std::size_t>(p1), vgetq_lane_f64(best_t, 1), v1}
                      : CwsArgmin{static_cast<std::size_t>(p0), vgetq_lane_f64(best_t, 0), v0};
        have = true;
    }
    for (std::size_t i = n2; i < n; ++i) {
        const double t = __builtin_floor(log_u[i] / r[i] + beta[i]);
        const double la = log_c[i] - r[i] * t + r[i] * beta[i] - r[i];
        if (!have || la < best.log_a) {
            best = {i, t, la};
            have = true;
        }
    }
    return best;
}

std::size_t count_masked_matches(const std::uint32_t* ia, const std::uint32_t* ib,
                                 const std::int64_t* ta, const std::int64_t* tb, std::size_t n,
                                 std::uint32_t index_mask, std::uint64_t level_mask) {
    const uint32x2_t imask = vdup_n_u32(index_mask);
    const uint64x2_t tmask = vdupq_n_u64(level_mask);
    std::size_t count = 0;
    const std::size_t n2 = n - n % 2;
    for (std::size_t i = 0; i < n2; i += 2) {
        const uint32x2_t di = vand_u32(veor_u32(vld1_u32(ia + i), vld1_u32(ib + i)), imask);
        const uint64x2_t ei = vmovl_u32(vceq_u32(di, vdup_n_u32(0)));
        const uint64x2_t dt = vandq_u64(
            veorq_u64(vreinterpretq_u64_s64(vld1q_s64(ta + i)), vreinterpretq_u64_s64(vld1q_s64(tb + i))),
            tmask);
        const uint64x2_t both = vandq_u64(ei, vceqq_u64(dt, vdupq_n_u64(0)));
        count += (vgetq_lane_u64(both, 0) != 0 ? 1 : 0) + (vgetq_lane_u64(both, 1) != 0 ? 1 : 0);
    }
    for (std::size_t i = n2; i < n; ++i) {
        const bool same_index = ((ia[i] ^ ib[i]) & index_mask) == 0;
        const auto dt = static_cast<std::uint64_t>(ta[i]) ^ static_cast<std::uint64_t>(tb[i]);
        count += (same_index && (dt & level_mask) == 0) ? 1 : 0;
    }
    return count;
}

std::size_t count_equal(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
    std::size_t count = 0;
    const std::size_t n2 = n - n % 2;
    for (std::size_t i = 0; i < n2; i += 2) {
        const uint64x2_t eq = vceqq_u64(vld1q_u64(a + i), vld1q_u64(b + i));
        count += (vgetq_lane_u64(eq, 0) != 0 ? 1 : 0) + (vgetq_lane_u64(eq, 1) != 0 ? 1 : 0);
    }
    for (std::size_t i = n2; i < n; ++i) count += a[i] == b[i] ? 1 : 0;
    return count;
}

}  // namespace

const Kernels* neon_kernels() {
    static const Kernels k{min_max_block, cws_argmin, count_masked_matches, count_equal};
    return &k;
}

#else

const Kernels* neon_kernels() { return nullptr; }

#endif

}  // namespace cwsk::simd::detail

// Scalar reference kernels. The vector backends are tested for bit-exact
// agreement with these.

#include <algorithm>
#include <cmath>

#include "backends.hpp"

namespace cwsk::simd::detail {
namespace {

MinMaxSums min_max_block(const double* u, const double* v, std::size_t n) {
    double lo[8] = {};
    double hi[8] = {};
    const std::size_t n8 = n - n % 8;
    for (std::size_t i = 0; i < n8; i += 8) {
        for (std::size_t l = 0; l < 8; ++l) {
            lo[l] += std::min(u[i + l], v[i + l]);
            hi[l] += std::max(u[i + l], v[i + l]);
        }
    }
    double smin = ((lo[0] + lo[4]) + (lo[1] + lo[5])) + ((lo[2] + lo[6]) + (lo[3] + lo[7]));
    double smax = ((hi[0] + hi[4]) + (hi[1] + hi[5])) + ((hi[2] + hi[6]) + (hi[3] + hi[7]));
    for (std::size_t i = n8; i < n; ++i) {
        smin += std::min(u[i], v[i]);
        smax += std::max(u[i], v[i]);
    }
    return {smin, smax};
}

CwsArgmin cws_argmin(const double* log_u, const double* r, const double* log_c,
                     const double* beta, std::size_t n) {
    CwsArgmin best{0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::floor(log_u[i] / r[i] + beta[i]);
        const double la = log_c[i] - r[i] * t + r[i] * beta[i] - r[i];
        if (i == 0 || la < best.log_a) best = {i, t, la};
    }
    return best;
}

std::size_t count_masked_matches(const std::uint32_t* ia, const std::uint32_t* ib,
                                 const std::int64_t* ta, const std::int64_t* tb, std::size_t n,
                                 std::uint32_t index_mask, std::uint64_t level_mask) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool same_index = ((ia[i] ^ ib[i]) & index_mask) == 0;
        const auto dt = static_cast<std::uint64_t>(ta[i]) ^ static_cast<std::uint64_t>(tb[i]);
        count += (same_index && (dt & level_mask) == 0) ? 1 : 0;
    }
    return count;
}

std::size_t count_equal(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += a[i] == b[i] ? 1 : 0;
    return count;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{min_max_block, cws_argmin, count_masked_matches, count_equal};
    return k;
}

}  // namespace cwsk::simd::detail

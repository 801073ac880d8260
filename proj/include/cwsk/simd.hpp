#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

// Data-parallel inner loops with a scalar reference and vector backends.
//
// Every backend reproduces the scalar reference bit for bit: floating-point
// reductions follow one canonical association order (see dense_min_max),
// and the arg-min kernels break ties by the smallest position. Backends are
// selected once at startup from the running CPU; CWSK_SIMD=scalar|avx2|neon
// overrides the choice.
namespace cwsk::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view name(Backend b);
bool supported(Backend b);
std::vector<Backend> supported_backends();

Backend active_backend();
// Throws UsageError if b is not supported on this CPU.
void set_backend(Backend b);

struct MinMaxSums {
    double min_sum;
    double max_sum;
};

struct CwsArgmin {
    std::size_t position;  // index into the input arrays
    double level;          // floor(log_u / r + beta) at the winner
    double log_a;          // log c - r*level + r*beta - r at the winner
};

// Function table implemented by every backend.
struct Kernels {
    // Sums of elementwise min and max over a block. Canonical order: eight
    // lanes, lane l accumulating elements i = l (mod 8) for i < n - n % 8;
    // lanes fold as ((l0+l4)+(l1+l5)) + ((l2+l6)+(l3+l7)); the remaining
    // n % 8 elements are then added left to right.
    MinMaxSums (*min_max_block)(const double* u, const double* v, std::size_t n);

    // Log-space arg-min of consistent weighted sampling over n candidates.
    // Requires n >= 1; ties resolve to the smallest position.
    CwsArgmin (*cws_argmin)(const double* log_u, const double* r, const double* log_c,
                            const double* beta, std::size_t n);

    // Number of positions where the masked low bits of both the index and
    // the level arrays agree.
    std::size_t (*count_masked_matches)(const std::uint32_t* ia, const std::uint32_t* ib,
                                        const std::int64_t* ta, const std::int64_t* tb,
                                        std::size_t n, std::uint32_t index_mask,
                                        std::uint64_t level_mask);

    // Number of positions where a[i] == b[i].
    std::size_t (*count_equal)(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
};

const Kernels& kernels(Backend b);
const Kernels& active();

// Block length for dense_min_max; block totals are combined with
// compensated summation.
inline constexpr std::size_t kMinMaxBlock = 1024;

// Sums of min and max over dense arrays of any length, using the active
// backend. Independent of the backend choice.
MinMaxSums dense_min_max(const double* u, const double* v, std::size_t n);
MinMaxSums dense_min_max(const Kernels& k, const double* u, const double* v, std::size_t n);

inline CwsArgmin cws_argmin(const double* log_u, const double* r, const double* log_c,
                            const double* beta, std::size_t n) {
    return active().cws_argmin(log_u, r, log_c, beta, n);
}

inline std::size_t count_masked_matches(const std::uint32_t* ia, const std::uint32_t* ib,
                                        const std::int64_t* ta, const std::int64_t* tb,
                                        std::size_t n, std::uint32_t index_mask,
                                        std::uint64_t level_mask) {
    return active().count_masked_matches(ia, ib, ta, tb, n, index_mask, level_mask);
}

inline std::size_t count_equal(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
    return active().count_equal(a, b, n);
}

}  // namespace cwsk::simd

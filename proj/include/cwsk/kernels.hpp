#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cwsk/sparse_vector.hpp"

namespace cwsk {

enum class KernelKind { MinMax, NMinMax, Intersection, Resemblance, Linear };

std::string_view to_string(KernelKind kind);
// Accepts minmax, nminmax, intersection, resemblance, linear.
KernelKind parse_kernel_kind(std::string_view name);

// Tolerance on the sum-to-one and unit-length preconditions.
inline constexpr double kNormalizationTolerance = 1e-9;

// sum min(u_i, v_i) / sum max(u_i, v_i). Throws DataError on dimension
// mismatch or when both vectors are empty.
double min_max(const SparseVector& u, const SparseVector& v);

// |supp u ∩ supp v| / |supp u ∪ supp v|.
double resemblance(const SparseVector& u, const SparseVector& v);

// sum min(u_i, v_i); both inputs must sum to one.
double intersection(const SparseVector& u, const SparseVector& v);

// min_max on inputs that must already sum to one.
double n_min_max(const SparseVector& u, const SparseVector& v);

// Inner product of unit-length inputs.
double linear(const SparseVector& u, const SparseVector& v);

double kernel(KernelKind kind, const SparseVector& u, const SparseVector& v);

// Throws DataError if v does not satisfy the normalization `kind` needs.
// `what` names the vector in the message.
void check_kernel_input(KernelKind kind, const SparseVector& v, std::string_view what);

struct GramMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    KernelKind kind = KernelKind::MinMax;
    std::vector<double> values;  // row-major

    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct GramOptions {
    unsigned threads = 1;
    // Densify the inputs and run the vectorized min/max loop when the
    // average fill is at least this fraction (MinMax, NMinMax,
    // Intersection only). Set above 1 to force the sparse merge path.
    double dense_fill_threshold = 0.125;
    // Upper bound on densified doubles (left + right).
    std::size_t dense_budget = std::size_t{1} << 26;
};

// values(a, b) = kernel(left[a], right[b]). Errors carry (row, col) or the
// offending vector's position.
GramMatrix gram(std::span<const SparseVector> left, std::span<const SparseVector> right,
                KernelKind kind, const GramOptions& options = {});

// LIBSVM precomputed-kernel text: "<label> 0:<serial> 1:<K> 2:<K> ...",
// serial numbers starting at 1. labels.size() must equal m.rows.
void write_precomputed(std::ostream& out, const GramMatrix& m, std::span<const int> labels);

}  // namespace cwsk

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cwsk/random.hpp"
#include "cwsk/sparse_vector.hpp"

namespace cwsk::testing {

// Random nonnegative vector with nnz in [lo, hi] and log-normal weights
// exp(sigma * N(0,1)).
inline SparseVector random_vector(SplitMix64& rng, std::uint64_t dim, std::size_t lo, std::size_t hi,
                                  double sigma = 1.0) {
    const std::size_t nnz = lo + rng.below(hi - lo + 1);
    std::vector<Index> all(dim);
    std::iota(all.begin(), all.end(), Index{0});
    for (std::size_t i = 0; i < nnz; ++i) std::swap(all[i], all[i + rng.below(dim - i)]);
    std::vector<Index> idx(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(nnz));
    std::sort(idx.begin(), idx.end());
    std::vector<double> w(nnz);
    for (auto& x : w) {
        const double z = std::sqrt(-2.0 * std::log(rng.open_unit())) * std::cos(6.283185307179586 * rng.unit());
        x = std::exp(sigma * z);
    }
    return SparseVector(dim, std::move(idx), std::move(w));
}

inline SparseVector binary_vector(std::uint64_t dim, std::vector<Index> support) {
    std::vector<double> ones(support.size(), 1.0);
    return SparseVector(dim, std::move(support), std::move(ones));
}

inline SparseVector dense(std::vector<double> values) { return SparseVector::from_dense(values); }

// Four-sigma binomial tolerance for a proportion p from n trials.
inline double four_sigma(double p, double n) { return 4.0 * std::sqrt(p * (1.0 - p) / n); }

}  // namespace cwsk::testing

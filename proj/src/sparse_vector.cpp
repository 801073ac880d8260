#include "cwsk/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cwsk/error.hpp"
#include "cwsk/numeric.hpp"

namespace cwsk {

SparseVector::SparseVector(std::uint64_t dimension) : dimension_(dimension) {}

SparseVector::SparseVector(std::uint64_t dimension, std::vector<Index> indices,
                           std::vector<double> weights)
    : dimension_(dimension), indices_(std::move(indices)), weights_(std::move(weights)) {
    if (indices_.size() != weights_.size()) {
        throw DataError("sparse vector: " + std::to_string(indices_.size()) + " indices but " +
                        std::to_string(weights_.size()) + " weights");
    }
    for (std::size_t p = 0; p < indices_.size(); ++p) {
        if (indices_[p] >= dimension_) {
            throw DataError("sparse vector: index " + std::to_string(indices_[p]) +
                            " out of range for dimension " + std::to_string(dimension_));
        }
        if (p > 0 && indices_[p] <= indices_[p - 1]) {
            throw DataError("sparse vector: indices not strictly increasing at index " +
                            std::to_string(indices_[p]));
        }
        if (!(weights_[p] > 0.0) || !std::isfinite(weights_[p])) {
            throw DataError("sparse vector: weight at index " + std::to_string(indices_[p]) +
                            " must be finite and > 0, got " + format_double(weights_[p]));
        }
    }
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
    std::vector<Index> idx;
    std::vector<double> w;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const double x = dense[i];
        if (x < 0.0 || !std::isfinite(x)) {
            throw DataError("dense vector: entry " + std::to_string(i) +
                            " must be finite and nonnegative, got " + format_double(x));
        }
        if (x > 0.0) {
            idx.push_back(static_cast<Index>(i));
            w.push_back(x);
        }
    }
    return SparseVector(dense.size(), std::move(idx), std::move(w));
}

double SparseVector::at(Index i) const {
    const auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
    if (it == indices_.end() || *it != i) return 0.0;
    return weights_[static_cast<std::size_t>(it - indices_.begin())];
}

double SparseVector::sum() const {
    CompensatedSum s;
    for (double w : weights_) s.add(w);
    return s.value();
}

double SparseVector::l2_norm() const {
    CompensatedSum s;
    for (double w : weights_) s.add(w * w);
    return std::sqrt(s.value());
}

SparseVector SparseVector::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw DataError("scale factor must be finite and > 0, got " + format_double(factor));
    }
    std::vector<double> w(weights_);
    for (double& x : w) x *= factor;
    return SparseVector(dimension_, indices_, std::move(w));
}

std::vector<double> SparseVector::to_dense() const {
    std::vector<double> d(dimension_, 0.0);
    for (std::size_t p = 0; p < indices_.size(); ++p) d[indices_[p]] = weights_[p];
    return d;
}

}  // namespace cwsk

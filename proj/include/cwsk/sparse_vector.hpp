#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cwsk {

using Index = std::uint32_t;

// Nonnegative sparse vector in R^D. Only strictly positive, finite weights
// are stored; indices are strictly increasing and below the dimension.
class SparseVector {
  public:
    SparseVector() = default;
    explicit SparseVector(std::uint64_t dimension);
    // Throws DataError if the entries violate the invariants above.
    SparseVector(std::uint64_t dimension, std::vector<Index> indices,
                 std::vector<double> weights);

    // Zeros are dropped; negative or non-finite entries throw DataError.
    static SparseVector from_dense(std::span<const double> dense);

    std::uint64_t dimension() const { return dimension_; }
    std::size_t nnz() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    std::span<const Index> indices() const { return indices_; }
    std::span<const double> weights() const { return weights_; }

    // Weight at coordinate i (0 when absent).
    double at(Index i) const;
    double sum() const;
    double l2_norm() const;

    SparseVector scaled(double factor) const;
    std::vector<double> to_dense() const;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

  private:
    std::uint64_t dimension_ = 0;
    std::vector<Index> indices_;
    std::vector<double> weights_;
};

}  // namespace cwsk

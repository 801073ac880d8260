#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cwsk/cws.hpp"

namespace cwsk {

// Bits kept of istar (bi) and of tstar (bt). Each is at most 32.
struct BitBudget {
    unsigned bi = 0;
    unsigned bt = 0;

    unsigned total() const { return bi + bt; }
    friend bool operator==(const BitBudget&, const BitBudget&) = default;
};

// Throws UsageError if bi or bt exceeds 32.
void validate(const BitBudget& budget);

// (istar mod 2^bi) * 2^bt + (tstar mod 2^bt), the second modulo Euclidean
// (always nonnegative), so one t-bit is tstar's parity.
std::uint64_t truncate(const CwsSample& sample, const BitBudget& budget);

// Sparse binary expansion of a sketch: block j of width 2^(bi+bt) holds a
// single one at offset truncate(sample j).
class EncodedVector {
  public:
    EncodedVector() = default;
    // Throws DataError unless indices[j] lies in block j for every j.
    EncodedVector(BitBudget budget, std::vector<std::uint64_t> indices);

    // Rebuilds an encoding from a 0/1 sparse row (e.g. a LIBSVM line).
    static EncodedVector from_sparse(const SparseVector& row, std::uint32_t k, BitBudget budget);

    std::uint32_t k() const { return static_cast<std::uint32_t>(indices_.size()); }
    const BitBudget& budget() const { return budget_; }
    std::uint64_t block_width() const { return std::uint64_t{1} << budget_.total(); }
    std::uint64_t dimension() const { return block_width() * indices_.size(); }
    std::span<const std::uint64_t> indices() const { return indices_; }

    friend bool operator==(const EncodedVector&, const EncodedVector&) = default;

  private:
    BitBudget budget_;
    std::vector<std::uint64_t> indices_;
};

// Throws UsageError when budget.total() == 0 or the expanded dimension
// k * 2^(bi+bt) does not fit in 63 bits.
EncodedVector encode(const Sketch& sketch, const BitBudget& budget);

// Number of repetitions whose codes agree: the inner product of the two
// binary expansions. Throws DataError when k or the budget differ.
std::uint32_t inner(const EncodedVector& a, const EncodedVector& b);

// LIBSVM sparse text: "<label> <idx>:1 ..." with 1-based indices.
void write_encoded(std::ostream& out, std::span<const EncodedVector> rows, std::span<const int> labels);

}  // namespace cwsk

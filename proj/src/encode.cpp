#include "cwsk/encode.hpp"

#include <ostream>
#include <string>

#include "cwsk/error.hpp"
#include "cwsk/simd.hpp"

namespace cwsk {
namespace {

std::uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

std::string describe(const BitBudget& b) {
    return "(bi=" + std::to_string(b.bi) + ", bt=" + std::to_string(b.bt) + ")";
}

void check_expansion(std::uint64_t k, const BitBudget& budget) {
    if (budget.total() == 0) throw UsageError("encoding needs at least one bit (bi + bt >= 1)");
    if (budget.total() >= 63 || k > (std::uint64_t{1} << (63 - budget.total()))) {
        throw UsageError("encoded dimension k * 2^(bi+bt) overflows for k=" + std::to_string(k) + " " +
                         describe(budget));
    }
}

}  // namespace

void validate(const BitBudget& budget) {
    if (budget.bi > 32 || budget.bt > 32) throw UsageError("bit budget out of range " + describe(budget));
}

std::uint64_t truncate(const CwsSample& sample, const BitBudget& budget) {
    validate(budget);
    const std::uint64_t i_bits = std::uint64_t{sample.istar} & low_mask(budget.bi);
    // Two's complement low bits are the Euclidean residue modulo 2^bt.
    const std::uint64_t t_bits = static_cast<std::uint64_t>(sample.tstar) & low_mask(budget.bt);
    return (i_bits << budget.bt) | t_bits;
}

EncodedVector::EncodedVector(BitBudget budget, std::vector<std::uint64_t> indices)
    : budget_(budget), indices_(std::move(indices)) {
    validate(budget_);
    check_expansion(indices_.size(), budget_);
    const std::uint64_t width = block_width();
    for (std::size_t j = 0; j < indices_.size(); ++j) {
        if (indices_[j] / width != j) {
            throw DataError("encoded index " + std::to_string(indices_[j]) + " is not in block " + std::to_string(j));
        }
    }
}

EncodedVector EncodedVector::from_sparse(const SparseVector& row, std::uint32_t k, BitBudget budget) {
    validate(budget);
    check_expansion(k, budget);
    if (row.nnz() != k) {
        throw DataError("encoded row has " + std::to_string(row.nnz()) + " features, expected k=" + std::to_string(k));
    }
    std::vector<std::uint64_t> idx(row.indices().begin(), row.indices().end());
    for (double w : row.weights()) {
        if (w != 1.0) throw DataError("encoded row has a non-unit feature value");
    }
    return EncodedVector(budget, std::move(idx));
}

EncodedVector encode(const Sketch& sketch, const BitBudget& budget) {
    validate(budget);
    check_expansion(sketch.k(), budget);
    std::vector<std::uint64_t> idx(sketch.k());
    const unsigned shift = budget.total();
    for (std::uint32_t j = 0; j < sketch.k(); ++j) {
        idx[j] = (std::uint64_t{j} << shift) + truncate(sketch.sample(j), budget);
    }
    return EncodedVector(budget, std::move(idx));
}

std::uint32_t inner(const EncodedVector& a, const EncodedVector& b) {
    if (a.k() != b.k() || a.budget() != b.budget()) {
        throw DataError("inner: encodings differ in k or bit budget (k=" + std::to_string(a.k()) + " " +
                        describe(a.budget()) + " vs k=" + std::to_string(b.k()) + " " + describe(b.budget()) + ")");
    }
    return static_cast<std::uint32_t>(simd::count_equal(a.indices().data(), b.indices().data(), a.k()));
}

void write_encoded(std::ostream& out, std::span<const EncodedVector> rows, std::span<const int> labels) {
    if (rows.size() != labels.size()) {
        throw DataError("encoded output: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(rows.size()) + " rows");
    }
    std::string line;
    for (std::size_t n = 0; n < rows.size(); ++n) {
        line.clear();
        line += std::to_string(labels[n]);
        for (std::uint64_t idx : rows[n].indices()) {
            line += ' ';
            line += std::to_string(idx + 1);
            line += ":1";
        }
        line += '\n';
        out << line;
    }
}

}  // namespace cwsk

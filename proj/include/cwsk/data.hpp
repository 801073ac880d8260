#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "cwsk/sparse_vector.hpp"

namespace cwsk {

// Labeled nonnegative sparse vectors sharing one dimension.
class Dataset {
  public:
    Dataset() = default;
    explicit Dataset(std::uint64_t dimension) : dimension_(dimension) {}

    // Throws DataError if v.dimension() differs from the dataset's.
    void add(int label, SparseVector v);

    std::uint64_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<SparseVector>& vectors() const { return vectors_; }
    int label(std::size_t i) const { return labels_[i]; }
    const SparseVector& vector(std::size_t i) const { return vectors_[i]; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

  private:
    std::uint64_t dimension_ = 0;
    std::vector<int> labels_;
    std::vector<SparseVector> vectors_;
};

enum class NormalizeMode { None, SumToOne, UnitL2, Binarize, ShiftHalf };

std::string_view to_string(NormalizeMode mode);
// Accepts none, sum, l2, binarize, shift-half.
NormalizeMode parse_normalize_mode(std::string_view name);

struct LoadOptions {
    // Dimension to use instead of the largest index seen. Indices beyond it
    // are an error.
    std::optional<std::uint64_t> dimension;
    // Map each listed value z in [-1, 1] to (z + 1) / 2 before validation.
    // Absent entries stay 0.
    bool shift_half = false;
};

// Parses LIBSVM sparse text: "<label> <idx>:<val> ..." with 1-based,
// strictly ascending indices. Lines starting with '#' and blank lines are
// skipped. Zero values are dropped. Errors carry the 1-based line number.
Dataset load_libsvm(std::istream& in, const LoadOptions& options = {});

// Inverse of load_libsvm; weights are written in shortest round-trip form.
void write_libsvm(std::ostream& out, const Dataset& d);

SparseVector normalize(const SparseVector& v, NormalizeMode mode);
// Row order and labels are preserved. Errors name the offending row.
Dataset normalize(const Dataset& d, NormalizeMode mode);

}  // namespace cwsk

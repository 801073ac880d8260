#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "cwsk/sparse_vector.hpp"

namespace cwsk {

// The three random variates attached to one (repetition, coordinate) cell:
// r, c ~ Gamma(2, 1) and beta ~ Uniform[0, 1).
struct CwsDraw {
    double r;
    double c;
    double beta;

    friend bool operator==(const CwsDraw&, const CwsDraw&) = default;
};

// Address of one draw. Every vector sketched under the same seed sees the
// same draw at the same (repetition, coordinate).
struct RandomStream {
    std::uint64_t seed;
    std::uint32_t repetition;
    std::uint64_t coordinate;
};

// Five uniforms from a SplitMix64 stream whose initial state is
// mix(seed ^ mix(j + 1) ^ mix((i + 1) * golden)); r = -ln(U1 U2),
// c = -ln(U3 U4) with U in (0, 1], beta = U5 in [0, 1).
CwsDraw draw(const RandomStream& stream);

// One consistent weighted sample.
struct CwsSample {
    Index istar;
    std::int64_t tstar;

    friend bool operator==(const CwsSample&, const CwsSample&) = default;
};

// k samples of one vector under one seed, stored column-wise.
class Sketch {
  public:
    Sketch() = default;
    Sketch(std::uint64_t seed, std::uint64_t dimension, std::vector<Index> istar,
           std::vector<std::int64_t> tstar);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t dimension() const { return dimension_; }
    std::uint32_t k() const { return static_cast<std::uint32_t>(istar_.size()); }
    std::span<const Index> istar() const { return istar_; }
    std::span<const std::int64_t> tstar() const { return tstar_; }
    CwsSample sample(std::uint32_t j) const { return {istar_[j], tstar_[j]}; }

    // First k samples.
    Sketch prefix(std::uint32_t k) const;

    friend bool operator==(const Sketch&, const Sketch&) = default;

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t dimension_ = 0;
    std::vector<Index> istar_;
    std::vector<std::int64_t> tstar_;
};

// Sample for repetition j. Throws DataError on an all-zero vector.
CwsSample cws_sample(const SparseVector& u, std::uint32_t j, std::uint64_t seed);

// samples[j] = cws_sample(u, j, seed) for j < k.
Sketch sketch(const SparseVector& u, std::uint32_t k, std::uint64_t seed);

// Sketches many vectors under one (seed, k, dimension). When the draw table
// fits in `table_budget` cells it is materialized once and shared; otherwise
// draws are generated on demand. Both paths give identical sketches.
class Sketcher {
  public:
    static constexpr std::size_t kDefaultTableBudget = std::size_t{1} << 22;

    Sketcher(std::uint64_t seed, std::uint32_t k, std::uint64_t dimension,
             std::size_t table_budget = kDefaultTableBudget);

    // Materializes draws only for `coordinates` (sorted, unique). Vectors
    // passed to this sketcher must be supported inside that set.
    static Sketcher for_support(std::uint64_t seed, std::uint32_t k, std::uint64_t dimension,
                                std::span<const Index> coordinates);

    std::uint64_t seed() const { return seed_; }
    std::uint32_t k() const { return k_; }
    std::uint64_t dimension() const { return dimension_; }
    bool materialized() const { return table_ != nullptr; }

    Sketch operator()(const SparseVector& u) const;
    std::vector<Sketch> sketch_all(std::span<const SparseVector> vectors, unsigned threads = 1) const;

  private:
    struct Table;
    Sketcher() = default;

    std::uint64_t seed_ = 0;
    std::uint32_t k_ = 0;
    std::uint64_t dimension_ = 0;
    std::shared_ptr<const Table> table_;
};

// Text sketch container. First line: "cwsk-sketch 1 <seed> <k> <dimension>";
// then one line per vector holding k space-separated "istar:tstar" pairs
// (istar 0-based).
void write_sketches(std::ostream& out, std::span<const Sketch> sketches, std::uint64_t seed,
                    std::uint32_t k, std::uint64_t dimension);

struct SketchFile {
    std::uint64_t seed = 0;
    std::uint32_t k = 0;
    std::uint64_t dimension = 0;
    std::vector<Sketch> sketches;
};

SketchFile read_sketches(std::istream& in);

}  // namespace cwsk

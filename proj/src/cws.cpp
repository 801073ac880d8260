#include "cwsk/cws.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <ostream>
#include <string>

#include "cwsk/error.hpp"
#include "cwsk/numeric.hpp"
#include "cwsk/parallel.hpp"
#include "cwsk/random.hpp"
#include "cwsk/simd.hpp"

namespace cwsk {
namespace {

// Smallest Gamma(2,1) variate the generator can produce naturally is about
// -ln(1 - 2^-53); clamping there only touches the U1 = U2 = 1 event and keeps
// every level within int64 range.
constexpr double kMinGamma = 0x1.0p-53;

double gamma2(SplitMix64& g) {
    const double u1 = g.open_unit();
    const double u2 = g.open_unit();
    return std::max(-std::log(u1 * u2), kMinGamma);
}

// Per-candidate inputs of the arg-min kernel.
struct Scratch {
    std::vector<double> log_u;
    std::vector<double> r;
    std::vector<double> log_c;
    std::vector<double> beta;

    void resize(std::size_t n) {
        log_u.resize(n);
        r.resize(n);
        log_c.resize(n);
        beta.resize(n);
    }
};

void fill_log_weights(const SparseVector& u, Scratch& s) {
    const auto w = u.weights();
    s.resize(w.size());
    for (std::size_t p = 0; p < w.size(); ++p) s.log_u[p] = std::log(w[p]);
}

void require_nonempty(const SparseVector& u) {
    if (u.empty()) throw DataError("consistent weighted sampling needs a vector with a nonzero entry");
}

CwsSample pick(const SparseVector& u, const Scratch& s) {
    const simd::CwsArgmin best =
        simd::cws_argmin(s.log_u.data(), s.r.data(), s.log_c.data(), s.beta.data(), s.log_u.size());
    return {u.indices()[best.position], static_cast<std::int64_t>(best.level)};
}

CwsSample sample_on_demand(const SparseVector& u, std::uint32_t j, std::uint64_t seed, Scratch& s) {
    const auto idx = u.indices();
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const CwsDraw d = draw({seed, j, idx[p]});
        s.r[p] = d.r;
        s.log_c[p] = std::log(d.c);
        s.beta[p] = d.beta;
    }
    return pick(u, s);
}

}  // namespace

CwsDraw draw(const RandomStream& stream) {
    const std::uint64_t state = mix64(stream.seed ^ mix64(std::uint64_t{stream.repetition} + 1) ^
                                      mix64((stream.coordinate + 1) * kGoldenGamma));
    SplitMix64 g(state);
    CwsDraw d{};
    d.r = gamma2(g);
    d.c = gamma2(g);
    d.beta = g.unit();
    return d;
}

Sketch::Sketch(std::uint64_t seed, std::uint64_t dimension, std::vector<Index> istar,
               std::vector<std::int64_t> tstar)
    : seed_(seed), dimension_(dimension), istar_(std::move(istar)), tstar_(std::move(tstar)) {
    if (istar_.size() != tstar_.size()) throw DataError("sketch: istar and tstar lengths differ");
    for (Index i : istar_) {
        if (i >= dimension_) {
            throw DataError("sketch: istar " + std::to_string(i) + " out of range for dimension " +
                            std::to_string(dimension_));
        }
    }
}

Sketch Sketch::prefix(std::uint32_t k) const {
    if (k > istar_.size()) throw UsageError("sketch prefix longer than the sketch");
    return Sketch(seed_, dimension_, {istar_.begin(), istar_.begin() + k}, {tstar_.begin(), tstar_.begin() + k});
}

CwsSample cws_sample(const SparseVector& u, std::uint32_t j, std::uint64_t seed) {
    require_nonempty(u);
    Scratch s;
    fill_log_weights(u, s);
    return sample_on_demand(u, j, seed, s);
}

Sketch sketch(const SparseVector& u, std::uint32_t k, std::uint64_t seed) {
    if (k == 0) throw UsageError("sketch size k must be at least 1");
    require_nonempty(u);
    Scratch s;
    fill_log_weights(u, s);
    std::vector<Index> istar(k);
    std::vector<std::int64_t> tstar(k);
    for (std::uint32_t j = 0; j < k; ++j) {
        const CwsSample smp = sample_on_demand(u, j, seed, s);
        istar[j] = smp.istar;
        tstar[j] = smp.tstar;
    }
    return Sketch(seed, u.dimension(), std::move(istar), std::move(tstar));
}

// Draws for k repetitions over m columns, repetition-major.
struct Sketcher::Table {
    std::vector<Index> coordinates;  // empty: column p is coordinate p
    std::size_t columns = 0;
    std::vector<double> r;
    std::vector<double> log_c;
    std::vector<double> beta;

    void build(std::uint64_t seed, std::uint32_t k) {
        r.resize(std::size_t{k} * columns);
        log_c.resize(r.size());
        beta.resize(r.size());
        for (std::uint32_t j = 0; j < k; ++j) {
            for (std::size_t p = 0; p < columns; ++p) {
                const std::uint64_t coord = coordinates.empty() ? p : coordinates[p];
                const CwsDraw d = draw({seed, j, coord});
                const std::size_t cell = std::size_t{j} * columns + p;
                r[cell] = d.r;
                log_c[cell] = std::log(d.c);
                beta[cell] = d.beta;
            }
        }
    }
};

Sketcher::Sketcher(std::uint64_t seed, std::uint32_t k, std::uint64_t dimension, std::size_t table_budget)
    : seed_(seed), k_(k), dimension_(dimension) {
    if (k == 0) throw UsageError("sketch size k must be at least 1");
    if (dimension > 0 && dimension <= table_budget / k) {
        auto t = std::make_shared<Table>();
        t->columns = dimension;
        t->build(seed, k);
        table_ = std::move(t);
    }
}

Sketcher Sketcher::for_support(std::uint64_t seed, std::uint32_t k, std::uint64_t dimension,
                               std::span<const Index> coordinates) {
    if (k == 0) throw UsageError("sketch size k must be at least 1");
    for (std::size_t p = 0; p < coordinates.size(); ++p) {
        if (coordinates[p] >= dimension || (p > 0 && coordinates[p] <= coordinates[p - 1])) {
            throw UsageError("support coordinates must be sorted, unique and below the dimension");
        }
    }
    Sketcher s;
    s.seed_ = seed;
    s.k_ = k;
    s.dimension_ = dimension;
    auto t = std::make_shared<Table>();
    t->coordinates.assign(coordinates.begin(), coordinates.end());
    t->columns = coordinates.size();
    t->build(seed, k);
    s.table_ = std::move(t);
    return s;
}

Sketch Sketcher::operator()(const SparseVector& u) const {
    if (u.dimension() != dimension_) {
        throw DataError("sketch: vector dimension " + std::to_string(u.dimension()) +
                        " does not match sketcher dimension " + std::to_string(dimension_));
    }
    require_nonempty(u);
    Scratch s;
    fill_log_weights(u, s);
    std::vector<Index> istar(k_);
    std::vector<std::int64_t> tstar(k_);

    if (!table_) {
        for (std::uint32_t j = 0; j < k_; ++j) {
            const CwsSample smp = sample_on_demand(u, j, seed_, s);
            istar[j] = smp.istar;
            tstar[j] = smp.tstar;
        }
        return Sketch(seed_, dimension_, std::move(istar), std::move(tstar));
    }

    const Table& t = *table_;
    const auto idx = u.indices();
    std::vector<std::size_t> column(idx.size());
    for (std::size_t p = 0; p < idx.size(); ++p) {
        if (t.coordinates.empty()) {
            column[p] = idx[p];
        } else {
            const auto it = std::lower_bound(t.coordinates.begin(), t.coordinates.end(), idx[p]);
            if (it == t.coordinates.end() || *it != idx[p]) {
                throw DataError("sketch: coordinate " + std::to_string(idx[p]) + " outside the sketcher's support");
            }
            column[p] = static_cast<std::size_t>(it - t.coordinates.begin());
        }
    }
    for (std::uint32_t j = 0; j < k_; ++j) {
        const std::size_t row = std::size_t{j} * t.columns;
        for (std::size_t p = 0; p < idx.size(); ++p) {
            s.r[p] = t.r[row + column[p]];
            s.log_c[p] = t.log_c[row + column[p]];
            s.beta[p] = t.beta[row + column[p]];
        }
        const CwsSample smp = pick(u, s);
        istar[j] = smp.istar;
        tstar[j] = smp.tstar;
    }
    return Sketch(seed_, dimension_, std::move(istar), std::move(tstar));
}

std::vector<Sketch> Sketcher::sketch_all(std::span<const SparseVector> vectors, unsigned threads) const {
    std::vector<Sketch> out(vectors.size());
    parallel_for(vectors.size(), 16, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                out[i] = (*this)(vectors[i]);
            } catch (const DataError& e) {
                throw DataError("vector " + std::to_string(i + 1) + ": " + e.what());
            }
        }
    });
    return out;
}

void write_sketches(std::ostream& out, std::span<const Sketch> sketches, std::uint64_t seed,
                    std::uint32_t k, std::uint64_t dimension) {
    out << "cwsk-sketch 1 " << seed << ' ' << k << ' ' << dimension << '\n';
    std::string line;
    for (std::size_t n = 0; n < sketches.size(); ++n) {
        const Sketch& s = sketches[n];
        if (s.seed() != seed || s.k() != k || s.dimension() != dimension) {
            throw DataError("sketch " + std::to_string(n + 1) + " does not match the file header");
        }
        line.clear();
        for (std::uint32_t j = 0; j < k; ++j) {
            if (j > 0) line += ' ';
            line += std::to_string(s.istar()[j]);
            line += ':';
            line += std::to_string(s.tstar()[j]);
        }
        line += '\n';
        out << line;
    }
}

SketchFile read_sketches(std::istream& in) {
    SketchFile f;
    std::string line;
    if (!std::getline(in, line)) throw DataError("sketch file: missing header");
    {
        std::string magic;
        std::string version;
        std::string seed;
        std::string k;
        std::string dim;
        std::string extra;
        std::istringstream hs(line);
        hs >> magic >> version >> seed >> k >> dim;
        if (magic != "cwsk-sketch" || version != "1" || !parse_int(seed, f.seed) || !parse_int(k, f.k) ||
            !parse_int(dim, f.dimension) || f.k == 0 || (hs >> extra)) {
            throw DataError("sketch file: bad header '" + line + "'");
        }
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<Index> istar;
        std::vector<std::int64_t> tstar;
        istar.reserve(f.k);
        tstar.reserve(f.k);
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && line[pos] == ' ') ++pos;
            if (pos >= line.size()) break;
            std::size_t end = line.find(' ', pos);
            if (end == std::string::npos) end = line.size();
            const std::string_view tok(line.data() + pos, end - pos);
            const auto colon = tok.find(':');
            Index i = 0;
            std::int64_t t = 0;
            if (colon == std::string_view::npos || !parse_int(tok.substr(0, colon), i) ||
                !parse_int(tok.substr(colon + 1), t)) {
                throw DataError("sketch file line " + std::to_string(lineno) + ": bad sample '" +
                                std::string(tok) + "'");
            }
            istar.push_back(i);
            tstar.push_back(t);
            pos = end;
        }
        if (istar.size() != f.k) {
            throw DataError("sketch file line " + std::to_string(lineno) + ": expected " + std::to_string(f.k) +
                            " samples, got " + std::to_string(istar.size()));
        }
        try {
            f.sketches.emplace_back(f.seed, f.dimension, std::move(istar), std::move(tstar));
        } catch (const DataError& e) {
            throw DataError("sketch file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return f;
}

}  // namespace cwsk

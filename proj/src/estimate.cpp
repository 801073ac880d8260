#include "cwsk/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cwsk/error.hpp"
#include "cwsk/kernels.hpp"
#include "cwsk/numeric.hpp"
#include "cwsk/parallel.hpp"
#include "cwsk/random.hpp"
#include "cwsk/simd.hpp"

namespace cwsk {
namespace {

constexpr std::size_t kReplicateBlock = 64;

std::uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

void check_comparable(const Sketch& a, const Sketch& b) {
    if (a.seed() != b.seed() || a.k() != b.k() || a.dimension() != b.dimension()) {
        throw DataError("sketches are not comparable: seed/k/dimension (" + std::to_string(a.seed()) + "/" +
                        std::to_string(a.k()) + "/" + std::to_string(a.dimension()) + ") vs (" +
                        std::to_string(b.seed()) + "/" + std::to_string(b.k()) + "/" +
                        std::to_string(b.dimension()) + ")");
    }
}

struct Masks {
    std::uint32_t index;
    std::uint64_t level;
};

Masks masks_for(const Scheme& scheme, std::uint64_t dimension) {
    if (scheme.mode == Scheme::Mode::Full) return {~std::uint32_t{0}, ~std::uint64_t{0}};
    const BitBudget b = scheme.resolve(dimension);
    return {static_cast<std::uint32_t>(low_mask(b.bi)), low_mask(b.bt)};
}

// Per-cell partial sums of one replicate block.
struct CellSums {
    CompensatedSum err;
    CompensatedSum sq;
};

}  // namespace

BitBudget Scheme::resolve(std::uint64_t dimension) const {
    if (!whole_istar) return budget;
    return {std::max(1u, bits_for(dimension)), budget.bt};
}

std::string Scheme::name() const {
    if (mode == Mode::Full) return "full";
    if (whole_istar) return std::to_string(budget.bt) + "bit";
    return "i" + std::to_string(budget.bi) + "t" + std::to_string(budget.bt);
}

Scheme parse_scheme(std::string_view s) {
    if (s == "full") return Scheme::full();
    unsigned a = 0;
    unsigned b = 0;
    if (s.size() > 3 && s.substr(s.size() - 3) == "bit" && parse_int(s.substr(0, s.size() - 3), a) && a <= 32) {
        return Scheme::t_bits(a);
    }
    if (s.size() > 1 && s.front() == 'i') {
        const auto t = s.find('t');
        if (t != std::string_view::npos && parse_int(s.substr(1, t - 1), a) && parse_int(s.substr(t + 1), b) &&
            a <= 32 && b <= 32 && a + b >= 1) {
            return Scheme::truncated({a, b});
        }
    }
    throw UsageError("unknown scheme '" + std::string(s) + "' (expected full, <n>bit or i<bi>t<bt>)");
}

std::uint32_t collision_count(const Sketch& a, const Sketch& b, const Scheme& scheme, std::uint32_t begin,
                              std::uint32_t end) {
    check_comparable(a, b);
    if (begin > end || end > a.k()) throw UsageError("collision_count: bad repetition range");
    const Masks m = masks_for(scheme, a.dimension());
    return static_cast<std::uint32_t>(simd::count_masked_matches(a.istar().data() + begin, b.istar().data() + begin,
                                                                 a.tstar().data() + begin, b.tstar().data() + begin,
                                                                 end - begin, m.index, m.level));
}

double collision_rate(const Sketch& a, const Sketch& b, const Scheme& scheme) {
    check_comparable(a, b);
    if (a.k() == 0) throw DataError("collision rate of empty sketches");
    return static_cast<double>(collision_count(a, b, scheme, 0, a.k())) / static_cast<double>(a.k());
}

double theoretical_variance(double kernel, std::uint32_t k) {
    if (!(kernel >= 0.0 && kernel <= 1.0)) {
        throw NumericError("kernel value must lie in [0, 1], got " + format_double(kernel));
    }
    if (k == 0) throw NumericError("k must be at least 1");
    return kernel * (1.0 - kernel) / static_cast<double>(k);
}

SimulationReport simulate(const SparseVector& u, const SparseVector& v, const SimulationConfig& config,
                          std::string pair_id) {
    if (config.k_grid.empty()) throw UsageError("simulate: empty k grid");
    if (config.schemes.empty()) throw UsageError("simulate: no schemes");
    if (config.n_reps == 0) throw UsageError("simulate: n_reps must be at least 1");
    std::vector<std::uint32_t> grid = config.k_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.front() == 0) throw UsageError("simulate: k must be at least 1");

    const double exact = min_max(u, v);
    if (u.empty() || v.empty()) throw DataError("simulate: both vectors need a nonzero entry");

    std::vector<Index> support;
    std::set_union(u.indices().begin(), u.indices().end(), v.indices().begin(), v.indices().end(),
                   std::back_inserter(support));

    const std::size_t n_schemes = config.schemes.size();
    const std::size_t n_cells = grid.size() * n_schemes;
    const std::uint32_t k_max = grid.back();
    std::vector<Masks> masks;
    for (const Scheme& s : config.schemes) masks.push_back(masks_for(s, u.dimension()));

    const std::size_t blocks = (config.n_reps + kReplicateBlock - 1) / kReplicateBlock;
    std::vector<std::vector<CellSums>> partial(blocks, std::vector<CellSums>(n_cells));

    parallel_for(config.n_reps, kReplicateBlock, config.threads, [&](std::size_t begin, std::size_t end) {
        auto& cells = partial[begin / kReplicateBlock];
        for (std::size_t rep = begin; rep < end; ++rep) {
            const Sketcher sketcher =
                Sketcher::for_support(derive_seed(config.seed, rep), k_max, u.dimension(), support);
            const Sketch su = sketcher(u);
            const Sketch sv = sketcher(v);
            for (std::size_t s = 0; s < n_schemes; ++s) {
                std::uint32_t prev = 0;
                std::size_t matches = 0;
                for (std::size_t g = 0; g < grid.size(); ++g) {
                    matches += simd::count_masked_matches(su.istar().data() + prev, sv.istar().data() + prev,
                                                          su.tstar().data() + prev, sv.tstar().data() + prev,
                                                          grid[g] - prev, masks[s].index, masks[s].level);
                    prev = grid[g];
                    const double estimate = static_cast<double>(matches) / static_cast<double>(grid[g]);
                    const double e = estimate - exact;
                    CellSums& c = cells[g * n_schemes + s];
                    c.err.add(e);
                    c.sq.add(e * e);
                }
            }
        }
    });

    SimulationReport report;
    report.pair = std::move(pair_id);
    report.kernel = exact;
    const double n = static_cast<double>(config.n_reps);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (std::size_t s = 0; s < n_schemes; ++s) {
            CompensatedSum err;
            CompensatedSum sq;
            for (const auto& block : partial) {
                err.add(block[g * n_schemes + s].err.value());
                sq.add(block[g * n_schemes + s].sq.value());
            }
            SimulationRow row;
            row.k = grid[g];
            row.scheme = config.schemes[s].name();
            row.bias = err.value() / n;
            row.mse = sq.value() / n;
            row.theoretical_variance = theoretical_variance(exact, grid[g]);
            row.n_reps = config.n_reps;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::vector<std::uint32_t> parse_k_grid(std::string_view s) {
    std::vector<std::uint32_t> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string_view::npos) comma = s.size();
        const std::string_view item = s.substr(pos, comma - pos);
        const auto dots = item.find("..");
        std::uint32_t lo = 0;
        std::uint32_t hi = 0;
        const bool ok = dots == std::string_view::npos
                            ? parse_int(item, lo) && (hi = lo, true)
                            : parse_int(item.substr(0, dots), lo) && parse_int(item.substr(dots + 2), hi);
        if (!ok || lo == 0 || hi < lo) throw UsageError("bad k grid item '" + std::string(item) + "'");
        if (hi - lo > 10'000'000) throw UsageError("k grid range too large: '" + std::string(item) + "'");
        for (std::uint32_t k = lo; k <= hi; ++k) {
            out.push_back(k);
            if (k == hi) break;
        }
        pos = comma + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void write_report_csv(std::ostream& out, std::span<const SimulationReport> reports) {
    std::string line = "pair,k,scheme,bias,mse,theoretical_var,n_reps\n";
    out << line;
    for (const auto& rep : reports) {
        for (const auto& row : rep.rows) {
            line.clear();
            line += rep.pair;
            line += ',';
            line += std::to_string(row.k);
            line += ',';
            line += row.scheme;
            line += ',';
            append_double(line, row.bias);
            line += ',';
            append_double(line, row.mse);
            line += ',';
            append_double(line, row.theoretical_variance);
            line += ',';
            line += std::to_string(row.n_reps);
            line += '\n';
            out << line;
        }
    }
}

}  // namespace cwsk

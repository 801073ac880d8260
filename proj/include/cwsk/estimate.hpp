#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cwsk/cws.hpp"
#include "cwsk/encode.hpp"
#include "cwsk/sparse_vector.hpp"

namespace cwsk {

// How two samples are compared: on all of (istar, tstar), or on truncated
// codes. With whole_istar set, bi is resolved at comparison time to the
// width that keeps istar intact for the sketch dimension; bt = 0 is then
// the "0-bit" scheme and bt = 1 the parity ("1-bit") scheme.
struct Scheme {
    enum class Mode { Full, Truncated };

    Mode mode = Mode::Full;
    BitBudget budget;
    bool whole_istar = false;

    static Scheme full() { return {}; }
    static Scheme truncated(BitBudget b) { return {Mode::Truncated, b, false}; }
    // Whole istar and the low bt bits of tstar.
    static Scheme t_bits(unsigned bt) { return {Mode::Truncated, {0, bt}, true}; }

    // Budget for sketches of the given dimension (Truncated only).
    BitBudget resolve(std::uint64_t dimension) const;
    // "full", "<bt>bit" for whole-istar schemes, else "i<bi>t<bt>".
    std::string name() const;

    friend bool operator==(const Scheme&, const Scheme&) = default;
};

// Accepts full, 0bit, 1bit, 2bit, ..., or i<bi>t<bt>.
Scheme parse_scheme(std::string_view s);

// Number of repetitions j in [begin, end) on which the two sketches agree
// under the scheme. The sketches must share seed, k and dimension.
std::uint32_t collision_count(const Sketch& a, const Sketch& b, const Scheme& scheme, std::uint32_t begin,
                              std::uint32_t end);

// Fraction of all k repetitions that collide.
double collision_rate(const Sketch& a, const Sketch& b, const Scheme& scheme);

// K (1 - K) / k. Throws NumericError unless 0 <= K <= 1 and k >= 1.
double theoretical_variance(double kernel, std::uint32_t k);

struct SimulationRow {
    std::uint32_t k = 0;
    std::string scheme;
    double bias = 0.0;
    double mse = 0.0;
    double theoretical_variance = 0.0;
    std::uint32_t n_reps = 0;
};

struct SimulationReport {
    std::string pair;
    double kernel = 0.0;  // exact min-max value of the pair
    std::vector<SimulationRow> rows;  // k-major, schemes in the given order
};

struct SimulationConfig {
    std::vector<std::uint32_t> k_grid;
    std::vector<Scheme> schemes;
    std::uint32_t n_reps = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

// Replicate r sketches u and v with seed derive_seed(config.seed, r) at
// k = max(k_grid); every grid point is evaluated on the prefix of that
// sketch pair, so each (k, scheme) cell sees n_reps independent
// estimates. Bias and MSE are taken against min_max(u, v). The result does
// not depend on config.threads.
SimulationReport simulate(const SparseVector& u, const SparseVector& v, const SimulationConfig& config,
                          std::string pair_id = "0");

// Parses "1,4,16" and inclusive ranges "1..1000" (mixable). The result is
// sorted and deduplicated; zero is rejected.
std::vector<std::uint32_t> parse_k_grid(std::string_view s);

// CSV "pair,k,scheme,bias,mse,theoretical_var,n_reps".
void write_report_csv(std::ostream& out, std::span<const SimulationReport> reports);

}  // namespace cwsk

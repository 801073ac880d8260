#include "cwsk/data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "cwsk/error.hpp"
#include "cwsk/numeric.hpp"

namespace cwsk {
namespace {

struct ParsedRow {
    int label;
    std::vector<std::uint64_t> indices;  // 0-based
    std::vector<double> weights;
};

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw DataError("line " + std::to_string(line) + ": " + msg);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

// Splits on ASCII whitespace.
std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        const std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

}  // namespace

void Dataset::add(int label, SparseVector v) {
    if (v.dimension() != dimension_) {
        throw DataError("dataset: vector dimension " + std::to_string(v.dimension()) +
                        " does not match dataset dimension " + std::to_string(dimension_));
    }
    labels_.push_back(label);
    vectors_.push_back(std::move(v));
}

std::string_view to_string(NormalizeMode mode) {
    switch (mode) {
        case NormalizeMode::None:
            return "none";
        case NormalizeMode::SumToOne:
            return "sum";
        case NormalizeMode::UnitL2:
            return "l2";
        case NormalizeMode::Binarize:
            return "binarize";
        case NormalizeMode::ShiftHalf:
            return "shift-half";
    }
    return "unknown";
}

NormalizeMode parse_normalize_mode(std::string_view name) {
    for (NormalizeMode m : {NormalizeMode::None, NormalizeMode::SumToOne, NormalizeMode::UnitL2,
                            NormalizeMode::Binarize, NormalizeMode::ShiftHalf}) {
        if (name == to_string(m)) return m;
    }
    throw UsageError("unknown normalization '" + std::string(name) +
                     "' (expected none, sum, l2, binarize or shift-half)");
}

Dataset load_libsvm(std::istream& in, const LoadOptions& options) {
    std::vector<ParsedRow> rows;
    std::uint64_t max_index = 0;  // 1-based
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.front() == '#') continue;
        const auto tok = tokens(line);
        if (tok.empty()) continue;

        ParsedRow row;
        if (!parse_int(tok[0], row.label)) fail(lineno, "bad label '" + std::string(tok[0]) + "'");
        std::uint64_t prev = 0;
        for (std::size_t t = 1; t < tok.size(); ++t) {
            const auto colon = tok[t].find(':');
            if (colon == std::string_view::npos) {
                fail(lineno, "expected <index>:<value>, got '" + std::string(tok[t]) + "'");
            }
            std::uint64_t idx = 0;
            double val = 0.0;
            if (!parse_int(tok[t].substr(0, colon), idx) || idx == 0) {
                fail(lineno, "bad feature index in '" + std::string(tok[t]) + "'");
            }
            if (!parse_double(tok[t].substr(colon + 1), val) || !std::isfinite(val)) {
                fail(lineno, "bad feature value in '" + std::string(tok[t]) + "'");
            }
            if (idx <= prev) fail(lineno, "feature indices must be strictly ascending at index " + std::to_string(idx));
            prev = idx;
            if (idx - 1 > 0xFFFFFFFFull) fail(lineno, "feature index " + std::to_string(idx) + " exceeds 2^32");
            if (options.shift_half) {
                if (val < -1.0 || val > 1.0) {
                    fail(lineno, "value at index " + std::to_string(idx) + " outside [-1, 1] for shift-half");
                }
                val = (val + 1.0) / 2.0;
            }
            if (val < 0.0) {
                fail(lineno, "negative value " + format_double(val) + " at index " + std::to_string(idx) +
                                 " (data must be nonnegative)");
            }
            if (val == 0.0) continue;
            row.indices.push_back(idx - 1);
            row.weights.push_back(val);
            max_index = std::max(max_index, idx);
        }
        rows.push_back(std::move(row));
    }

    std::uint64_t dim = max_index;
    if (options.dimension) {
        if (*options.dimension < max_index) {
            throw DataError("feature index " + std::to_string(max_index) + " exceeds dimension " +
                            std::to_string(*options.dimension));
        }
        dim = *options.dimension;
    }
    Dataset d(dim);
    for (auto& r : rows) {
        std::vector<Index> idx(r.indices.begin(), r.indices.end());
        d.add(r.label, SparseVector(dim, std::move(idx), std::move(r.weights)));
    }
    return d;
}

void write_libsvm(std::ostream& out, const Dataset& d) {
    std::string line;
    for (std::size_t i = 0; i < d.size(); ++i) {
        line.clear();
        line += std::to_string(d.label(i));
        const auto idx = d.vector(i).indices();
        const auto w = d.vector(i).weights();
        for (std::size_t p = 0; p < idx.size(); ++p) {
            line += ' ';
            line += std::to_string(std::uint64_t{idx[p]} + 1);
            line += ':';
            append_double(line, w[p]);
        }
        line += '\n';
        out << line;
    }
}

SparseVector normalize(const SparseVector& v, NormalizeMode mode) {
    std::vector<double> w(v.weights().begin(), v.weights().end());
    switch (mode) {
        case NormalizeMode::None:
            return v;
        case NormalizeMode::SumToOne: {
            if (v.empty()) throw DataError("cannot sum-normalize an all-zero vector");
            const double s = v.sum();
            for (double& x : w) x /= s;
            break;
        }
        case NormalizeMode::UnitL2: {
            if (v.empty()) throw DataError("cannot l2-normalize an all-zero vector");
            const double n = v.l2_norm();
            for (double& x : w) x /= n;
            break;
        }
        case NormalizeMode::Binarize:
            std::fill(w.begin(), w.end(), 1.0);
            break;
        case NormalizeMode::ShiftHalf:
            for (double& x : w) {
                if (x > 1.0) {
                    throw DataError("shift-half expects values in [-1, 1], got " + format_double(x));
                }
                x = (x + 1.0) / 2.0;
            }
            break;
    }
    return SparseVector(v.dimension(), std::vector<Index>(v.indices().begin(), v.indices().end()), std::move(w));
}

Dataset normalize(const Dataset& d, NormalizeMode mode) {
    Dataset out(d.dimension());
    for (std::size_t i = 0; i < d.size(); ++i) {
        try {
            out.add(d.label(i), normalize(d.vector(i), mode));
        } catch (const DataError& e) {
            throw DataError("row " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace cwsk

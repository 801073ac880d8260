#include "cwsk/kernels.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "cwsk/error.hpp"
#include "cwsk/numeric.hpp"
#include "cwsk/parallel.hpp"
#include "cwsk/simd.hpp"

namespace cwsk {
namespace {

void check_same_dimension(const SparseVector& u, const SparseVector& v) {
    if (u.dimension() != v.dimension()) {
        throw DataError("kernel: dimension mismatch (" + std::to_string(u.dimension()) + " vs " +
                        std::to_string(v.dimension()) + ")");
    }
}

struct MergedSums {
    double min_sum;
    double max_sum;
};

// Sorted merge over the union of supports; absent coordinates weigh 0.
MergedSums merge_min_max(const SparseVector& u, const SparseVector& v) {
    const auto ui = u.indices();
    const auto uw = u.weights();
    const auto vi = v.indices();
    const auto vw = v.weights();
    CompensatedSum lo;
    CompensatedSum hi;
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < ui.size() && b < vi.size()) {
        if (ui[a] == vi[b]) {
            lo.add(std::min(uw[a], vw[b]));
            hi.add(std::max(uw[a], vw[b]));
            ++a;
            ++b;
        } else if (ui[a] < vi[b]) {
            hi.add(uw[a++]);
        } else {
            hi.add(vw[b++]);
        }
    }
    for (; a < ui.size(); ++a) hi.add(uw[a]);
    for (; b < vi.size(); ++b) hi.add(vw[b]);
    return {lo.value(), hi.value()};
}

double sparse_dot(const SparseVector& u, const SparseVector& v) {
    const auto ui = u.indices();
    const auto uw = u.weights();
    const auto vi = v.indices();
    const auto vw = v.weights();
    CompensatedSum dot;
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < ui.size() && b < vi.size()) {
        if (ui[a] == vi[b]) {
            dot.add(uw[a++] * vw[b++]);
        } else if (ui[a] < vi[b]) {
            ++a;
        } else {
            ++b;
        }
    }
    return dot.value();
}

double ratio_or_throw(double num, double den) {
    if (den == 0.0) throw DataError("min-max kernel is undefined for two empty vectors");
    return num / den;
}

enum class Norm { None, SumToOne, UnitL2 };

Norm required_norm(KernelKind kind) {
    switch (kind) {
        case KernelKind::Intersection:
        case KernelKind::NMinMax:
            return Norm::SumToOne;
        case KernelKind::Linear:
            return Norm::UnitL2;
        default:
            return Norm::None;
    }
}

}  // namespace

std::string_view to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::MinMax:
            return "minmax";
        case KernelKind::NMinMax:
            return "nminmax";
        case KernelKind::Intersection:
            return "intersection";
        case KernelKind::Resemblance:
            return "resemblance";
        case KernelKind::Linear:
            return "linear";
    }
    return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
    for (KernelKind k : {KernelKind::MinMax, KernelKind::NMinMax, KernelKind::Intersection,
                         KernelKind::Resemblance, KernelKind::Linear}) {
        if (name == to_string(k)) return k;
    }
    throw UsageError("unknown kernel '" + std::string(name) +
                     "' (expected minmax, nminmax, intersection, resemblance or linear)");
}

void check_kernel_input(KernelKind kind, const SparseVector& v, std::string_view what) {
    switch (required_norm(kind)) {
        case Norm::None:
            return;
        case Norm::SumToOne: {
            const double s = v.sum();
            if (!(std::fabs(s - 1.0) <= kNormalizationTolerance)) {
                throw DataError(std::string(what) + " must sum to 1 for the " +
                                std::string(to_string(kind)) + " kernel (sum = " + format_double(s) + ")");
            }
            return;
        }
        case Norm::UnitL2: {
            const double n = v.l2_norm();
            if (!(std::fabs(n - 1.0) <= kNormalizationTolerance)) {
                throw DataError(std::string(what) + " must have unit l2 norm for the linear kernel (norm = " +
                                format_double(n) + ")");
            }
            return;
        }
    }
}

double min_max(const SparseVector& u, const SparseVector& v) {
    check_same_dimension(u, v);
    const MergedSums s = merge_min_max(u, v);
    return ratio_or_throw(s.min_sum, s.max_sum);
}

double resemblance(const SparseVector& u, const SparseVector& v) {
    check_same_dimension(u, v);
    const auto ui = u.indices();
    const auto vi = v.indices();
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t both = 0;
    while (a < ui.size() && b < vi.size()) {
        if (ui[a] == vi[b]) {
            ++both;
            ++a;
            ++b;
        } else if (ui[a] < vi[b]) {
            ++a;
        } else {
            ++b;
        }
    }
    const std::size_t either = ui.size() + vi.size() - both;
    if (either == 0) throw DataError("resemblance is undefined for two empty vectors");
    return static_cast<double>(both) / static_cast<double>(either);
}

double intersection(const SparseVector& u, const SparseVector& v) {
    check_same_dimension(u, v);
    check_kernel_input(KernelKind::Intersection, u, "u");
    check_kernel_input(KernelKind::Intersection, v, "v");
    return merge_min_max(u, v).min_sum;
}

double n_min_max(const SparseVector& u, const SparseVector& v) {
    check_same_dimension(u, v);
    check_kernel_input(KernelKind::NMinMax, u, "u");
    check_kernel_input(KernelKind::NMinMax, v, "v");
    const MergedSums s = merge_min_max(u, v);
    return ratio_or_throw(s.min_sum, s.max_sum);
}

double linear(const SparseVector& u, const SparseVector& v) {
    check_same_dimension(u, v);
    check_kernel_input(KernelKind::Linear, u, "u");
    check_kernel_input(KernelKind::Linear, v, "v");
    return sparse_dot(u, v);
}

double kernel(KernelKind kind, const SparseVector& u, const SparseVector& v) {
    switch (kind) {
        case KernelKind::MinMax:
            return min_max(u, v);
        case KernelKind::NMinMax:
            return n_min_max(u, v);
        case KernelKind::Intersection:
            return intersection(u, v);
        case KernelKind::Resemblance:
            return resemblance(u, v);
        case KernelKind::Linear:
            return linear(u, v);
    }
    throw UsageError("unknown kernel kind");
}

GramMatrix gram(std::span<const SparseVector> left, std::span<const SparseVector> right,
                KernelKind kind, const GramOptions& options) {
    GramMatrix m;
    m.rows = left.size();
    m.cols = right.size();
    m.kind = kind;
    m.values.assign(m.rows * m.cols, 0.0);
    if (m.rows == 0 || m.cols == 0) return m;

    const std::uint64_t dim = left.front().dimension();
    std::size_t total_nnz = 0;
    auto validate = [&](std::span<const SparseVector> set, const char* side) {
        for (std::size_t i = 0; i < set.size(); ++i) {
            const std::string what = std::string(side) + "[" + std::to_string(i) + "]";
            if (set[i].dimension() != dim) {
                throw DataError("gram: " + what + " has dimension " + std::to_string(set[i].dimension()) +
                                ", expected " + std::to_string(dim));
            }
            check_kernel_input(kind, set[i], "gram: " + what);
            total_nnz += set[i].nnz();
        }
    };
    validate(left, "left");
    validate(right, "right");

    const std::size_t vectors = m.rows + m.cols;
    const bool min_max_family =
        kind == KernelKind::MinMax || kind == KernelKind::NMinMax || kind == KernelKind::Intersection;
    const bool dense = min_max_family && dim > 0 && vectors * dim <= options.dense_budget &&
                       static_cast<double>(total_nnz) >= options.dense_fill_threshold * static_cast<double>(vectors * dim);

    auto pair_error = [](std::size_t r, std::size_t c, const std::exception& e) {
        return DataError("gram (row " + std::to_string(r) + ", col " + std::to_string(c) + "): " + e.what());
    };
    const std::size_t chunk = std::max<std::size_t>(1, 8192 / m.cols);

    if (dense) {
        std::vector<double> lhs(m.rows * dim, 0.0);
        std::vector<double> rhs(m.cols * dim, 0.0);
        auto fill = [dim](std::span<const SparseVector> set, std::vector<double>& out) {
            for (std::size_t i = 0; i < set.size(); ++i) {
                const auto idx = set[i].indices();
                const auto w = set[i].weights();
                for (std::size_t p = 0; p < idx.size(); ++p) out[i * dim + idx[p]] = w[p];
            }
        };
        fill(left, lhs);
        fill(right, rhs);
        const simd::Kernels& k = simd::active();
        parallel_for(m.rows, chunk, options.threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                for (std::size_t c = 0; c < m.cols; ++c) {
                    const auto s = simd::dense_min_max(k, &lhs[r * dim], &rhs[c * dim], dim);
                    double value = s.min_sum;
                    if (kind != KernelKind::Intersection) {
                        if (s.max_sum == 0.0) {
                            throw pair_error(r, c, DataError("min-max kernel is undefined for two empty vectors"));
                        }
                        value = s.min_sum / s.max_sum;
                    }
                    m.values[r * m.cols + c] = value;
                }
            }
        });
        return m;
    }

    parallel_for(m.rows, chunk, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            for (std::size_t c = 0; c < m.cols; ++c) {
                double value = 0.0;
                try {
                    switch (kind) {
                        case KernelKind::MinMax:
                        case KernelKind::NMinMax: {
                            const MergedSums s = merge_min_max(left[r], right[c]);
                            value = ratio_or_throw(s.min_sum, s.max_sum);
                            break;
                        }
                        case KernelKind::Intersection:
                            value = merge_min_max(left[r], right[c]).min_sum;
                            break;
                        case KernelKind::Resemblance:
                            value = resemblance(left[r], right[c]);
                            break;
                        case KernelKind::Linear:
                            value = sparse_dot(left[r], right[c]);
                            break;
                    }
                } catch (const std::exception& e) {
                    throw pair_error(r, c, e);
                }
                m.values[r * m.cols + c] = value;
            }
        }
    });
    return m;
}

void write_precomputed(std::ostream& out, const GramMatrix& m, std::span<const int> labels) {
    if (labels.size() != m.rows) {
        throw DataError("precomputed kernel: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(m.rows) + " rows");
    }
    std::string line;
    for (std::size_t r = 0; r < m.rows; ++r) {
        line.clear();
        line += std::to_string(labels[r]);
        line += " 0:";
        line += std::to_string(r + 1);
        for (std::size_t c = 0; c < m.cols; ++c) {
            line += ' ';
            line += std::to_string(c + 1);
            line += ':';
            append_double(line, m(r, c));
        }
        line += '\n';
        out << line;
    }
}

}  // namespace cwsk

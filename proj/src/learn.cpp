#include "cwsk/learn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "cwsk/error.hpp"
#include "cwsk/numeric.hpp"
#include "cwsk/random.hpp"

namespace cwsk {
namespace {

constexpr double kRenormLimit = 1e5;
constexpr std::size_t kCalibrationRows = 500;

double loss_value(Loss loss, double margin) {
    if (loss == Loss::Hinge) return margin < 1.0 ? 1.0 - margin : 0.0;
    return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

// d loss / d score for label y in {-1, +1}.
double loss_slope(Loss loss, double score, double y) {
    const double margin = y * score;
    if (loss == Loss::Hinge) return margin < 1.0 ? -y : 0.0;
    if (margin > 0.0) {
        const double e = std::exp(-margin);
        return -y * e / (1.0 + e);
    }
    return -y / (1.0 + std::exp(margin));
}

double sparse_dot(const std::vector<double>& w, RowView x) {
    double s = 0.0;
    if (x.value.empty()) {
        for (std::uint64_t i : x.index) s += w[i];
    } else {
        for (std::size_t p = 0; p < x.index.size(); ++p) s += w[x.index[p]] * x.value[p];
    }
    return s;
}

void sparse_axpy(std::vector<double>& w, double a, RowView x) {
    if (x.value.empty()) {
        for (std::uint64_t i : x.index) w[i] += a;
    } else {
        for (std::size_t p = 0; p < x.index.size(); ++p) w[x.index[p]] += a * x.value[p];
    }
}

// Binary averaged SGD with proximal l2 shrinkage.
//   w = W / w_div
//   averaged w = (A + frac * W) / a_div   once averaging has started
// so every step touches only the row's coordinates.
class BinarySgd {
  public:
    BinarySgd(std::uint64_t dim, double lambda, Loss loss) : lambda_(lambda), loss_(loss), W_(dim, 0.0) {}

    void reset() {
        std::fill(W_.begin(), W_.end(), 0.0);
        A_.clear();
        w_div_ = 1.0;
        a_div_ = 1.0;
        frac_ = 0.0;
        b_ = 0.0;
        ab_ = 0.0;
        averaging_ = false;
        t_avg_ = 0;
    }

    void step(RowView x, double y, double eta, double eta_bias, bool average) {
        const double s = sparse_dot(W_, x) / w_div_ + b_;
        if (!std::isfinite(s)) throw NumericError("training diverged (non-finite score); rescale the features");
        const double d = loss_slope(loss_, s, y);
        if (d != 0.0) {
            const double delta = -eta * d * w_div_;
            sparse_axpy(W_, delta, x);
            if (averaging_ && frac_ != 0.0) sparse_axpy(A_, -frac_ * delta, x);
        }
        w_div_ *= 1.0 + eta * lambda_;
        b_ -= eta_bias * d;

        if (average) {
            const double mu = 1.0 / static_cast<double>(++t_avg_);
            if (!averaging_) {
                A_.assign(W_.size(), 0.0);
                a_div_ = w_div_;
                frac_ = 1.0;
                ab_ = b_;
                averaging_ = true;
            } else {
                a_div_ /= 1.0 - mu;
                frac_ += mu * a_div_ / w_div_;
                ab_ += mu * (b_ - ab_);
            }
        }
        if (w_div_ > kRenormLimit || a_div_ > kRenormLimit) renorm();
    }

    double cost(const Examples& data, std::span<const std::size_t> rows, const std::vector<double>& y) const {
        CompensatedSum sq;
        for (double w : W_) sq.add(w * w);
        CompensatedSum l;
        for (std::size_t r : rows) {
            const double s = sparse_dot(W_, data.row(r)) / w_div_ + b_;
            l.add(loss_value(loss_, y[r] * s));
        }
        return 0.5 * lambda_ * sq.value() / (w_div_ * w_div_) + l.value() / static_cast<double>(rows.size());
    }

    // Final weights (averaged if averaging ran) and bias.
    std::pair<std::vector<double>, double> result() const {
        std::vector<double> w(W_.size());
        if (averaging_) {
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = (A_[i] + frac_ * W_[i]) / a_div_;
            return {std::move(w), ab_};
        }
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = W_[i] / w_div_;
        return {std::move(w), b_};
    }

  private:
    void renorm() {
        if (averaging_) {
            for (std::size_t i = 0; i < W_.size(); ++i) A_[i] = (A_[i] + frac_ * W_[i]) / a_div_;
            a_div_ = 1.0;
            frac_ = 0.0;
        }
        for (double& w : W_) w /= w_div_;
        w_div_ = 1.0;
    }

    double lambda_;
    Loss loss_;
    std::vector<double> W_;
    std::vector<double> A_;
    double w_div_ = 1.0;
    double a_div_ = 1.0;
    double frac_ = 0.0;
    double b_ = 0.0;
    double ab_ = 0.0;
    bool averaging_ = false;
    std::uint64_t t_avg_ = 0;
};

void shuffle(std::vector<std::size_t>& v, SplitMix64& g) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[g.below(i)]);
}

double eta_at(double eta0, double lambda, double t) { return eta0 / std::pow(1.0 + lambda * eta0 * t, 0.75); }

// Bias step decays on the scale of one epoch, independent of lambda, so
// the intercept can still track class priors when lambda is large.
double bias_eta_at(double eta0, double t, double n) { return eta0 / std::pow(1.0 + eta0 * t / n, 0.75); }

// Picks the initial step size with the lowest regularized cost after one
// plain SGD pass over a fixed subsample.
double calibrate(BinarySgd& sgd, const Examples& data, std::span<const std::size_t> rows,
                 const std::vector<double>& y, double lambda) {
    double best_eta = 1.0;
    double best_cost = std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(rows.size());
    for (int e = -8; e <= 2; ++e) {
        const double eta0 = std::ldexp(1.0, e);
        sgd.reset();
        double t = 0.0;
        try {
            for (std::size_t r : rows) {
                sgd.step(data.row(r), y[r], eta_at(eta0, lambda, t), bias_eta_at(eta0, t, n), false);
                t += 1.0;
            }
        } catch (const NumericError&) {
            continue;
        }
        const double c = sgd.cost(data, rows, y);
        if (c < best_cost) {
            best_cost = c;
            best_eta = eta0;
        }
    }
    return best_eta;
}

std::pair<std::vector<double>, double> train_binary(const Examples& data, const std::vector<double>& y,
                                                    const std::vector<std::vector<std::size_t>>& orders,
                                                    const TrainConfig& cfg) {
    BinarySgd sgd(data.space().dimension(), cfg.lambda, cfg.loss);
    const auto& first = orders.front();
    const std::span<const std::size_t> subset(first.data(), std::min(first.size(), kCalibrationRows));
    const double eta0 = calibrate(sgd, data, subset, y, cfg.lambda);

    sgd.reset();
    const double n = static_cast<double>(data.size());
    const std::uint64_t average_from = cfg.epochs > 1 ? data.size() : 0;
    std::uint64_t t = 0;
    for (const auto& order : orders) {
        for (std::size_t r : order) {
            const double tt = static_cast<double>(t);
            sgd.step(data.row(r), y[r], eta_at(eta0, cfg.lambda, tt), bias_eta_at(eta0, tt, n), t >= average_from);
            ++t;
        }
    }
    auto result = sgd.result();
    const bool finite = std::isfinite(result.second) &&
                        std::all_of(result.first.begin(), result.first.end(), [](double w) { return std::isfinite(w); });
    if (!finite) throw NumericError("training diverged (non-finite weights); rescale the features");
    return result;
}

void check_space(const LinearModel& m, RowView x) {
    const std::uint64_t dim = m.space.dimension();
    for (std::uint64_t i : x.index) {
        if (i >= dim) {
            throw DataError("feature index " + std::to_string(i) + " outside model dimension " + std::to_string(dim));
        }
    }
}

const char* space_tag(FeatureSpace::Kind k) { return k == FeatureSpace::Kind::Raw ? "raw" : "encoded"; }

}  // namespace

Examples Examples::from_encoded(std::span<const EncodedVector> rows, std::span<const int> labels) {
    if (rows.size() != labels.size()) {
        throw DataError(std::to_string(labels.size()) + " labels for " + std::to_string(rows.size()) + " rows");
    }
    Examples e;
    if (!rows.empty()) e.space_ = FeatureSpace::encoded(rows.front().k(), rows.front().budget());
    for (std::size_t n = 0; n < rows.size(); ++n) {
        if (rows[n].k() != e.space_.k || rows[n].budget() != e.space_.budget) {
            throw DataError("row " + std::to_string(n + 1) + ": encoding differs in k or bit budget from row 1");
        }
        e.index_.insert(e.index_.end(), rows[n].indices().begin(), rows[n].indices().end());
        e.offsets_.push_back(e.index_.size());
        e.labels_.push_back(labels[n]);
    }
    return e;
}

Examples Examples::from_dataset(const Dataset& d) {
    Examples e;
    e.space_ = FeatureSpace::raw(d.dimension());
    for (std::size_t n = 0; n < d.size(); ++n) {
        const auto& v = d.vector(n);
        e.index_.insert(e.index_.end(), v.indices().begin(), v.indices().end());
        e.value_.insert(e.value_.end(), v.weights().begin(), v.weights().end());
        e.offsets_.push_back(e.index_.size());
        e.labels_.push_back(d.label(n));
    }
    return e;
}

RowView Examples::row(std::size_t i) const {
    const std::size_t b = offsets_[i];
    const std::size_t len = offsets_[i + 1] - b;
    RowView r;
    r.index = std::span<const std::uint64_t>(index_.data() + b, len);
    if (space_.kind == FeatureSpace::Kind::Raw) r.value = std::span<const double>(value_.data() + b, len);
    return r;
}

LinearModel train(const Examples& data, const TrainConfig& cfg) {
    if (cfg.epochs == 0) throw UsageError("epochs must be at least 1");
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
        throw UsageError("lambda must be finite and > 0, got " + format_double(cfg.lambda));
    }
    std::vector<int> classes = data.labels();
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) throw DataError("training needs at least two distinct labels");

    SplitMix64 g(mix64(cfg.seed));
    std::vector<std::vector<std::size_t>> orders(cfg.epochs, std::vector<std::size_t>(data.size()));
    for (auto& order : orders) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle(order, g);
    }

    LinearModel m;
    m.space = data.space();
    m.lambda = cfg.lambda;
    m.classes = classes;
    std::vector<double> y(data.size());
    auto fit = [&](int positive) {
        for (std::size_t i = 0; i < data.size(); ++i) y[i] = data.label(i) == positive ? 1.0 : -1.0;
        return train_binary(data, y, orders, cfg);
    };

    if (classes.size() == 2) {
        auto [w, b] = fit(classes[1]);
        std::vector<double> neg(w.size());
        std::transform(w.begin(), w.end(), neg.begin(), [](double x) { return -x; });
        m.weights = {std::move(neg), std::move(w)};
        m.bias = {-b, b};
        return m;
    }
    for (int c : classes) {
        auto [w, b] = fit(c);
        m.weights.push_back(std::move(w));
        m.bias.push_back(b);
    }
    return m;
}

LinearModel train(std::span<const EncodedVector> rows, std::span<const int> labels, const TrainConfig& cfg) {
    return train(Examples::from_encoded(rows, labels), cfg);
}

double score(const LinearModel& m, std::size_t cls, RowView x, std::size_t* touched) {
    if (touched) *touched += x.index.size();
    return sparse_dot(m.weights[cls], x) + m.bias[cls];
}

int predict(const LinearModel& m, RowView x, std::size_t* touched) {
    check_space(m, x);
    std::size_t best = 0;
    double best_score = score(m, 0, x, touched);
    for (std::size_t c = 1; c < m.classes.size(); ++c) {
        const double s = score(m, c, x, touched);
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    return m.classes[best];
}

int predict(const LinearModel& m, const EncodedVector& x) {
    if (m.space != FeatureSpace::encoded(x.k(), x.budget())) {
        throw DataError("encoding does not match the model's feature space");
    }
    return predict(m, RowView{x.indices(), {}});
}

double evaluate(const LinearModel& m, const Examples& test) {
    if (test.empty()) throw DataError("evaluation needs a nonempty test set");
    if (test.space().kind != m.space.kind ||
        (m.space.kind == FeatureSpace::Kind::Encoded && test.space() != m.space)) {
        throw DataError("test features do not match the model's feature space");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) correct += predict(m, test.row(i)) == test.label(i) ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::vector<double> default_lambda_grid() {
    return {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2};
}

GridSearchResult train_grid(const Examples& train_set, const Examples& test_set, std::span<const double> lambdas,
                            const TrainConfig& base) {
    if (lambdas.empty()) throw UsageError("empty lambda grid");
    GridSearchResult out;
    double best_acc = -1.0;
    for (double lambda : lambdas) {
        TrainConfig cfg = base;
        cfg.lambda = lambda;
        LinearModel m = train(train_set, cfg);
        const double acc = evaluate(m, test_set);
        out.points.push_back({lambda, acc});
        if (acc > best_acc) {
            best_acc = acc;
            out.best = out.points.size() - 1;
            out.model = std::move(m);
        }
    }
    return out;
}

void save_model(std::ostream& out, const LinearModel& m) {
    std::string line = "cwsk-model 1\nspace ";
    line += space_tag(m.space.kind);
    if (m.space.kind == FeatureSpace::Kind::Raw) {
        line += ' ' + std::to_string(m.space.raw_dimension);
    } else {
        line += ' ' + std::to_string(m.space.k) + ' ' + std::to_string(m.space.budget.bi) + ' ' +
                std::to_string(m.space.budget.bt);
    }
    line += "\nlambda ";
    append_double(line, m.lambda);
    line += "\nclasses " + std::to_string(m.classes.size());
    for (int c : m.classes) line += ' ' + std::to_string(c);
    line += '\n';
    out << line;
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        line = "class " + std::to_string(m.classes[c]) + ' ';
        append_double(line, m.bias[c]);
        for (double w : m.weights[c]) {
            line += ' ';
            append_double(line, w);
        }
        line += '\n';
        out << line;
    }
}

LinearModel load_model(std::istream& in) {
    auto bad = [](const std::string& what) { return DataError("model file: " + what); };
    std::string line;
    if (!std::getline(in, line) || line != "cwsk-model 1") throw bad("missing 'cwsk-model 1' header");

    LinearModel m;
    std::string word;
    std::getline(in, line);
    {
        std::istringstream s(line);
        std::string kind;
        s >> word >> kind;
        if (word != "space") throw bad("expected 'space' line");
        if (kind == "raw") {
            std::uint64_t d = 0;
            if (!(s >> d)) throw bad("bad raw space line");
            m.space = FeatureSpace::raw(d);
        } else if (kind == "encoded") {
            std::uint32_t k = 0;
            unsigned bi = 0;
            unsigned bt = 0;
            if (!(s >> k >> bi >> bt) || bi > 32 || bt > 32 || bi + bt == 0 || bi + bt >= 63) {
                throw bad("bad encoded space line");
            }
            m.space = FeatureSpace::encoded(k, {bi, bt});
        } else {
            throw bad("unknown space '" + kind + "'");
        }
    }
    std::getline(in, line);
    {
        const auto sp = line.find(' ');
        if (line.substr(0, sp) != "lambda" || sp == std::string::npos ||
            !parse_double(std::string_view(line).substr(sp + 1), m.lambda)) {
            throw bad("bad lambda line");
        }
    }
    std::getline(in, line);
    {
        std::istringstream s(line);
        std::size_t n = 0;
        if (!(s >> word >> n) || word != "classes" || n < 2) throw bad("bad classes line");
        m.classes.resize(n);
        for (auto& c : m.classes) {
            if (!(s >> c)) throw bad("bad classes line");
        }
    }
    const std::uint64_t dim = m.space.dimension();
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        if (!std::getline(in, line)) throw bad("missing weights for class " + std::to_string(m.classes[c]));
        std::vector<std::string_view> tok;
        std::size_t pos = 0;
        while (pos < line.size()) {
            std::size_t end = line.find(' ', pos);
            if (end == std::string::npos) end = line.size();
            if (end > pos) tok.emplace_back(line.data() + pos, end - pos);
            pos = end + 1;
        }
        int label = 0;
        if (tok.size() != dim + 3 || tok[0] != "class" || !parse_int(tok[1], label) || label != m.classes[c]) {
            throw bad("bad weight row for class " + std::to_string(m.classes[c]));
        }
        double b = 0.0;
        if (!parse_double(tok[2], b)) throw bad("bad bias for class " + std::to_string(label));
        std::vector<double> w(dim);
        for (std::uint64_t i = 0; i < dim; ++i) {
            if (!parse_double(tok[i + 3], w[i])) throw bad("bad weight for class " + std::to_string(label));
        }
        m.bias.push_back(b);
        m.weights.push_back(std::move(w));
    }
    return m;
}

}  // namespace cwsk

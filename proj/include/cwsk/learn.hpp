#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cwsk/data.hpp"
#include "cwsk/encode.hpp"

namespace cwsk {

enum class Loss { Hinge, Logistic };

struct TrainConfig {
    std::uint32_t epochs = 10;
    double lambda = 1e-4;  // l2 strength; about 1 / (C n) in SVM terms
    std::uint64_t seed = 0;
    Loss loss = Loss::Hinge;
};

// Layout of the feature vectors a model consumes.
struct FeatureSpace {
    enum class Kind { Encoded, Raw };

    Kind kind = Kind::Raw;
    std::uint32_t k = 0;
    BitBudget budget;
    std::uint64_t raw_dimension = 0;

    static FeatureSpace encoded(std::uint32_t k, BitBudget budget) { return {Kind::Encoded, k, budget, 0}; }
    static FeatureSpace raw(std::uint64_t dimension) { return {Kind::Raw, 0, {}, dimension}; }

    std::uint64_t dimension() const {
        return kind == Kind::Raw ? raw_dimension : std::uint64_t{k} << budget.total();
    }
    friend bool operator==(const FeatureSpace&, const FeatureSpace&) = default;
};

// Sparse row; an empty value span means every listed feature is 1.
struct RowView {
    std::span<const std::uint64_t> index;
    std::span<const double> value;
};

// Labeled rows in compressed sparse row form.
class Examples {
  public:
    // Throws DataError if the encodings disagree on k or budget, or on a
    // label count mismatch.
    static Examples from_encoded(std::span<const EncodedVector> rows, std::span<const int> labels);
    static Examples from_dataset(const Dataset& d);

    const FeatureSpace& space() const { return space_; }
    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }
    RowView row(std::size_t i) const;

  private:
    FeatureSpace space_;
    std::vector<int> labels_;
    std::vector<std::uint64_t> index_;
    std::vector<double> value_;  // empty for unit-valued rows
    std::vector<std::size_t> offsets_{0};
};

// One weight row and bias per class, classes ascending. Two-class models
// store a single binary separator as (w, -w).
struct LinearModel {
    FeatureSpace space;
    double lambda = 0.0;
    std::vector<int> classes;
    std::vector<std::vector<double>> weights;
    std::vector<double> bias;
};

// Averaged SGD on the l2-regularized loss, one-vs-rest for more than two
// classes. Deterministic given cfg.seed. Throws DataError on fewer than two
// distinct labels.
LinearModel train(const Examples& data, const TrainConfig& cfg);
LinearModel train(std::span<const EncodedVector> rows, std::span<const int> labels, const TrainConfig& cfg);

// w_c . x + b_c. If `touched` is given it is incremented once per weight read.
double score(const LinearModel& m, std::size_t cls, RowView x, std::size_t* touched = nullptr);

// Class with the largest score; ties go to the smallest label.
int predict(const LinearModel& m, RowView x, std::size_t* touched = nullptr);
int predict(const LinearModel& m, const EncodedVector& x);

// Fraction of correct predictions. Throws DataError on an empty set or a
// feature space mismatch.
double evaluate(const LinearModel& m, const Examples& test);

struct GridPoint {
    double lambda;
    double accuracy;
};

struct GridSearchResult {
    std::vector<GridPoint> points;
    std::size_t best = 0;  // first point with the highest accuracy
    LinearModel model;     // trained at points[best].lambda
};

// 1e-6, 1e-5, ..., 1e2.
std::vector<double> default_lambda_grid();

// Trains at every lambda and scores on `test`.
GridSearchResult train_grid(const Examples& train_set, const Examples& test_set, std::span<const double> lambdas,
                            const TrainConfig& base);

void save_model(std::ostream& out, const LinearModel& m);
LinearModel load_model(std::istream& in);

}  // namespace cwsk

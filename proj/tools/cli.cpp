#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cwsk/cws.hpp"
#include "cwsk/data.hpp"
#include "cwsk/encode.hpp"
#include "cwsk/error.hpp"
#include "cwsk/estimate.hpp"
#include "cwsk/kernels.hpp"
#include "cwsk/learn.hpp"
#include "cwsk/numeric.hpp"
#include "cwsk/parallel.hpp"

namespace cwsk::cli {
namespace {

// Writes to `path` through a temporary file that only replaces the target
// on commit(); an uncommitted file is removed.
class Output {
  public:
    Output(const std::string& path, std::ostream& stdout_stream) : path_(path) {
        if (path_ == "-") {
            stream_ = &stdout_stream;
            return;
        }
        tmp_ = path_ + ".tmp";
        file_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!file_) throw DataError("cannot open '" + path_ + "' for writing");
        stream_ = &file_;
    }
    Output(const Output&) = delete;
    Output& operator=(const Output&) = delete;
    ~Output() {
        if (!tmp_.empty() && !committed_) {
            file_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    std::ostream& stream() { return *stream_; }

    void commit() {
        stream_->flush();
        if (!*stream_) throw DataError("write to '" + path_ + "' failed");
        if (tmp_.empty()) return;
        file_.close();
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

  private:
    std::string path_;
    std::string tmp_;
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
    bool committed_ = false;
};

class Input {
  public:
    Input(const std::string& path, std::istream& stdin_stream) {
        if (path == "-") {
            stream_ = &stdin_stream;
            return;
        }
        file_.open(path, std::ios::binary);
        if (!file_) throw DataError("cannot open '" + path + "'");
        stream_ = &file_;
    }
    std::istream& stream() { return *stream_; }

  private:
    std::ifstream file_;
    std::istream* stream_ = nullptr;
};

Dataset load_file(const std::string& path, std::istream& in, const LoadOptions& opts) {
    Input f(path, in);
    try {
        return load_libsvm(f.stream(), opts);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

Dataset with_dimension(const Dataset& d, std::uint64_t dim) {
    if (d.dimension() == dim) return d;
    Dataset out(dim);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& v = d.vector(i);
        out.add(d.label(i), SparseVector(dim, {v.indices().begin(), v.indices().end()},
                                         {v.weights().begin(), v.weights().end()}));
    }
    return out;
}

std::vector<int> read_labels(const std::string& path, std::istream& in) {
    Input f(path, in);
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f.stream(), line)) {
        ++lineno;
        if (!line.empty() && line.front() == '#') continue;
        std::istringstream s(line);
        std::string tok;
        if (!(s >> tok)) continue;
        int label = 0;
        if (!parse_int(tok, label)) {
            throw DataError(path + ": line " + std::to_string(lineno) + ": bad label '" + tok + "'");
        }
        labels.push_back(label);
    }
    return labels;
}

template <class T>
std::vector<T> split_list(const std::string& s, T (*parse_one)(std::string_view)) {
    std::vector<T> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(parse_one(std::string_view(s).substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

double parse_lambda(std::string_view s) {
    double x = 0.0;
    if (!parse_double(s, x) || !(x > 0.0) || !std::isfinite(x)) {
        throw UsageError("bad lambda '" + std::string(s) + "'");
    }
    return x;
}

Loss parse_loss(const std::string& s) {
    if (s == "hinge") return Loss::Hinge;
    if (s == "logistic") return Loss::Logistic;
    throw UsageError("unknown loss '" + s + "' (expected hinge or logistic)");
}

unsigned resolve_threads(unsigned t) { return t == 0 ? default_threads() : t; }

NormalizeMode auto_normalization(KernelKind k) {
    switch (k) {
        case KernelKind::NMinMax:
        case KernelKind::Intersection:
            return NormalizeMode::SumToOne;
        case KernelKind::Linear:
            return NormalizeMode::UnitL2;
        default:
            return NormalizeMode::None;
    }
}

struct GramArgs {
    std::string kernel;
    std::string train;
    std::string test;
    std::string out;
    std::string normalize = "auto";
    std::optional<std::uint64_t> dimension;
    bool shift_half = false;
    unsigned threads = 0;
};

void do_gram(const GramArgs& a, std::istream& in, std::ostream& out) {
    const KernelKind kind = parse_kernel_kind(a.kernel);
    const NormalizeMode mode = a.normalize == "auto" ? auto_normalization(kind) : parse_normalize_mode(a.normalize);
    if (!a.test.empty() && a.test == "-" && a.train == "-") throw UsageError("only one input can be stdin");
    LoadOptions opts{a.dimension, a.shift_half};
    Dataset train = load_file(a.train, in, opts);
    std::optional<Dataset> test;
    if (!a.test.empty()) {
        test = load_file(a.test, in, opts);
        const std::uint64_t dim = std::max(train.dimension(), test->dimension());
        train = with_dimension(train, dim);
        test = with_dimension(*test, dim);
    }
    train = normalize(train, mode);
    if (test) test = normalize(*test, mode);

    const Dataset& rows = test ? *test : train;
    GramOptions go;
    go.threads = resolve_threads(a.threads);
    const GramMatrix m = gram(rows.vectors(), train.vectors(), kind, go);
    Output o(a.out, out);
    write_precomputed(o.stream(), m, rows.labels());
    o.commit();
}

struct SketchArgs {
    std::uint32_t k = 0;
    std::uint64_t seed = 0;
    std::uint64_t dimension = 0;
    std::string in;
    std::string out;
    std::string normalize = "none";
    bool shift_half = false;
    unsigned threads = 0;
};

void do_sketch(const SketchArgs& a, std::istream& in, std::ostream& out) {
    if (a.k == 0) throw UsageError("--k must be at least 1");
    if (a.dimension == 0) throw UsageError("--dimension must be at least 1");
    Dataset d = normalize(load_file(a.in, in, {a.dimension, a.shift_half}), parse_normalize_mode(a.normalize));
    const Sketcher sketcher(a.seed, a.k, a.dimension);
    const auto sketches = sketcher.sketch_all(d.vectors(), resolve_threads(a.threads));
    Output o(a.out, out);
    write_sketches(o.stream(), sketches, a.seed, a.k, a.dimension);
    o.commit();
}

struct EncodeArgs {
    unsigned bi = 0;
    unsigned bt = 0;
    std::string in;
    std::string labels;
    std::string out;
};

void do_encode(const EncodeArgs& a, std::istream& in, std::ostream& out) {
    const BitBudget budget{a.bi, a.bt};
    validate(budget);
    if (budget.total() == 0) throw UsageError("--bi + --bt must be at least 1");
    if (a.in == "-" && a.labels == "-") throw UsageError("only one input can be stdin");
    SketchFile f;
    {
        Input src(a.in, in);
        f = read_sketches(src.stream());
    }
    std::vector<int> labels(f.sketches.size(), 0);
    if (!a.labels.empty()) {
        labels = read_labels(a.labels, in);
        if (labels.size() != f.sketches.size()) {
            throw DataError(a.labels + ": " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(f.sketches.size()) + " sketches");
        }
    }
    std::vector<EncodedVector> rows;
    rows.reserve(f.sketches.size());
    for (const auto& s : f.sketches) rows.push_back(encode(s, budget));
    Output o(a.out, out);
    write_encoded(o.stream(), rows, labels);
    o.commit();
}

struct SimulateArgs {
    std::string pairs;
    std::string k_grid;
    std::string schemes = "full,0bit,1bit";
    std::uint32_t reps = 10000;
    std::uint64_t seed = 0;
    std::string out;
    std::optional<std::uint64_t> dimension;
    unsigned threads = 0;
};

void do_simulate(const SimulateArgs& a, std::istream& in, std::ostream& out) {
    SimulationConfig cfg;
    cfg.k_grid = parse_k_grid(a.k_grid);
    cfg.schemes = split_list<Scheme>(a.schemes, parse_scheme);
    cfg.n_reps = a.reps;
    if (cfg.n_reps == 0) throw UsageError("--reps must be at least 1");
    cfg.seed = a.seed;
    cfg.threads = resolve_threads(a.threads);
    const Dataset d = load_file(a.pairs, in, {a.dimension, false});
    if (d.size() % 2 != 0) throw DataError(a.pairs + ": pairs file needs an even number of rows");
    std::vector<SimulationReport> reports;
    for (std::size_t p = 0; p < d.size() / 2; ++p) {
        try {
            reports.push_back(simulate(d.vector(2 * p), d.vector(2 * p + 1), cfg, std::to_string(p)));
        } catch (const DataError& e) {
            throw DataError("pair " + std::to_string(p) + ": " + e.what());
        }
    }
    Output o(a.out, out);
    write_report_csv(o.stream(), reports);
    o.commit();
}

struct FeatureArgs {
    std::uint32_t k = 0;
    unsigned bi = 0;
    unsigned bt = 0;
    bool raw = false;
    std::optional<std::uint64_t> dimension;
};

Examples load_examples(const std::string& path, std::istream& in, const FeatureSpace& space) {
    if (space.kind == FeatureSpace::Kind::Raw) {
        return Examples::from_dataset(load_file(path, in, {space.raw_dimension, false}));
    }
    const Dataset d = load_file(path, in, {space.dimension(), false});
    std::vector<EncodedVector> rows;
    rows.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        try {
            rows.push_back(EncodedVector::from_sparse(d.vector(i), space.k, space.budget));
        } catch (const DataError& e) {
            throw DataError(path + ": row " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return Examples::from_encoded(rows, d.labels());
}

struct TrainArgs {
    FeatureArgs features;
    std::string in;
    std::string test;
    std::string out;
    std::string lambdas;
    std::uint32_t epochs = 10;
    std::uint64_t seed = 0;
    std::string loss = "hinge";
};

FeatureSpace resolve_space(const FeatureArgs& f, const std::string& path, std::istream& in) {
    if (f.raw) {
        if (f.dimension) return FeatureSpace::raw(*f.dimension);
        return FeatureSpace::raw(load_file(path, in, {}).dimension());
    }
    const BitBudget b{f.bi, f.bt};
    validate(b);
    if (f.k == 0 || b.total() == 0) throw UsageError("encoded features need --k >= 1 and --bi + --bt >= 1");
    if (b.total() >= 63 || f.k > (std::uint64_t{1} << (63 - b.total()))) {
        throw UsageError("encoded dimension k * 2^(bi+bt) overflows");
    }
    return FeatureSpace::encoded(f.k, b);
}

void do_train(const TrainArgs& a, std::istream& in, std::ostream& out) {
    const auto lambdas = a.lambdas.empty() ? (a.test.empty() ? std::vector<double>{TrainConfig{}.lambda} : default_lambda_grid())
                                           : split_list<double>(a.lambdas, parse_lambda);
    if (lambdas.size() > 1 && a.test.empty()) throw UsageError("a lambda grid needs --test to pick the best model");
    TrainConfig cfg;
    cfg.epochs = a.epochs;
    cfg.seed = a.seed;
    cfg.loss = parse_loss(a.loss);
    if (cfg.epochs == 0) throw UsageError("--epochs must be at least 1");

    FeatureSpace space = resolve_space(a.features, a.in, in);
    if (space.kind == FeatureSpace::Kind::Raw && !a.features.dimension && !a.test.empty()) {
        space.raw_dimension = std::max(space.raw_dimension, load_file(a.test, in, {}).dimension());
    }
    const Examples train_set = load_examples(a.in, in, space);
    LinearModel model;
    std::string report;
    if (a.test.empty()) {
        cfg.lambda = lambdas.front();
        model = train(train_set, cfg);
    } else {
        const Examples test_set = load_examples(a.test, in, space);
        GridSearchResult g = train_grid(train_set, test_set, lambdas, cfg);
        for (const auto& p : g.points) {
            report += "lambda=" + format_double(p.lambda) + " accuracy=" + format_double(p.accuracy) + '\n';
        }
        report += "best lambda=" + format_double(g.points[g.best].lambda) +
                  " accuracy=" + format_double(g.points[g.best].accuracy) + '\n';
        model = std::move(g.model);
    }
    Output o(a.out, out);
    save_model(o.stream(), model);
    o.commit();
    if (a.out != "-") out << report;
}

struct EvalArgs {
    std::string model;
    std::string in;
    std::string predictions;
};

void do_eval(const EvalArgs& a, std::istream& in, std::ostream& out) {
    LinearModel m;
    {
        Input f(a.model, in);
        m = load_model(f.stream());
    }
    const Examples test = load_examples(a.in, in, m.space);
    const double acc = evaluate(m, test);
    if (!a.predictions.empty()) {
        Output o(a.predictions, out);
        for (std::size_t i = 0; i < test.size(); ++i) o.stream() << predict(m, test.row(i)) << '\n';
        o.commit();
    }
    out << "accuracy " << format_double(acc) << '\n';
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"min-max kernels, consistent weighted sampling and hashed linear learning", "cwsk"};
    app.require_subcommand(1);

    GramArgs gram_args;
    auto* gram_cmd = app.add_subcommand("gram", "LIBSVM precomputed kernel matrix");
    gram_cmd->add_option("--kernel", gram_args.kernel, "minmax|nminmax|intersection|resemblance|linear")->required();
    gram_cmd->add_option("--train", gram_args.train, "training set (LIBSVM, '-' for stdin)")->required();
    gram_cmd->add_option("--test", gram_args.test, "rows are test vectors against the training columns");
    gram_cmd->add_option("--out", gram_args.out, "output file ('-' for stdout)")->required();
    gram_cmd->add_option("--normalize", gram_args.normalize, "auto|none|sum|l2|binarize|shift-half");
    gram_cmd->add_option("--dimension", gram_args.dimension, "feature dimension");
    gram_cmd->add_flag("--shift-half", gram_args.shift_half, "map values z in [-1,1] to (z+1)/2 on load");
    gram_cmd->add_option("--threads", gram_args.threads, "worker threads (0 = all cores)");

    SketchArgs sketch_args;
    auto* sketch_cmd = app.add_subcommand("sketch", "consistent weighted sampling sketches");
    sketch_cmd->add_option("--k", sketch_args.k, "samples per vector")->required();
    sketch_cmd->add_option("--seed", sketch_args.seed, "random seed")->required();
    sketch_cmd->add_option("--dimension", sketch_args.dimension, "feature dimension shared by all sketched sets")
        ->required();
    sketch_cmd->add_option("--in", sketch_args.in, "input (LIBSVM, '-' for stdin)")->required();
    sketch_cmd->add_option("--out", sketch_args.out, "output sketch file ('-' for stdout)")->required();
    sketch_cmd->add_option("--normalize", sketch_args.normalize, "none|sum|l2|binarize");
    sketch_cmd->add_flag("--shift-half", sketch_args.shift_half, "map values z in [-1,1] to (z+1)/2 on load");
    sketch_cmd->add_option("--threads", sketch_args.threads, "worker threads (0 = all cores)");

    EncodeArgs encode_args;
    auto* encode_cmd = app.add_subcommand("encode", "expand sketches into LIBSVM binary features");
    encode_cmd->add_option("--bi", encode_args.bi, "bits kept of istar")->required();
    encode_cmd->add_option("--bt", encode_args.bt, "bits kept of tstar")->required();
    encode_cmd->add_option("--in", encode_args.in, "sketch file ('-' for stdin)")->required();
    encode_cmd->add_option("--labels", encode_args.labels, "labels: first token of each line (LIBSVM works)");
    encode_cmd->add_option("--out", encode_args.out, "output ('-' for stdout)")->required();

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "bias/MSE simulation of kernel estimates");
    sim_cmd->add_option("--pairs", sim_args.pairs, "LIBSVM file; rows 2p and 2p+1 form pair p")->required();
    sim_cmd->add_option("--k-grid", sim_args.k_grid, "e.g. 1..1000 or 1,4,16,64")->required();
    sim_cmd->add_option("--schemes", sim_args.schemes, "comma list of full, <n>bit, i<bi>t<bt>");
    sim_cmd->add_option("--reps", sim_args.reps, "replicates per cell");
    sim_cmd->add_option("--seed", sim_args.seed, "random seed")->required();
    sim_cmd->add_option("--out", sim_args.out, "CSV output ('-' for stdout)")->required();
    sim_cmd->add_option("--dimension", sim_args.dimension, "feature dimension");
    sim_cmd->add_option("--threads", sim_args.threads, "worker threads (0 = all cores)");

    auto add_features = [](CLI::App* cmd, FeatureArgs& f) {
        cmd->add_option("--k", f.k, "samples per vector of the encoding");
        cmd->add_option("--bi", f.bi, "istar bits of the encoding");
        cmd->add_option("--bt", f.bt, "tstar bits of the encoding");
        cmd->add_flag("--raw", f.raw, "raw real-valued features instead of encodings");
        cmd->add_option("--dimension", f.dimension, "raw feature dimension");
    };
    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "linear classifier over a lambda grid");
    add_features(train_cmd, train_args.features);
    train_cmd->add_option("--in", train_args.in, "training set (LIBSVM)")->required();
    train_cmd->add_option("--test", train_args.test, "held-out set used to pick lambda");
    train_cmd->add_option("--out", train_args.out, "model file")->required();
    train_cmd->add_option("--lambda", train_args.lambdas, "comma list of l2 strengths (default: 1e-6..1e2 with --test, else 1e-4)");
    train_cmd->add_option("--epochs", train_args.epochs, "passes over the data");
    train_cmd->add_option("--seed", train_args.seed, "shuffle seed")->required();
    train_cmd->add_option("--loss", train_args.loss, "hinge|logistic");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "accuracy of a saved model");
    eval_cmd->add_option("--model", eval_args.model, "model file")->required();
    eval_cmd->add_option("--in", eval_args.in, "test set (LIBSVM)")->required();
    eval_cmd->add_option("--predictions", eval_args.predictions, "write one predicted label per line");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
        if (*gram_cmd) do_gram(gram_args, in, out);
        if (*sketch_cmd) do_sketch(sketch_args, in, out);
        if (*encode_cmd) do_encode(encode_args, in, out);
        if (*sim_cmd) do_simulate(sim_args, in, out);
        if (*train_cmd) do_train(train_args, in, out);
        if (*eval_cmd) do_eval(eval_args, in, out);
        return kOk;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "cwsk: " << one_line(e.what()) << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "cwsk: " << one_line(e.what()) << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        err << "cwsk: " << one_line(e.what()) << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        err << "cwsk: " << one_line(e.what()) << '\n';
        return kDataError;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace cwsk::cli

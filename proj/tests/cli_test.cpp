#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "cwsk/numeric.hpp"
#include "cwsk/random.hpp"

namespace cwsk {
namespace {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cwsk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name), std::ios::binary) << text;
        return path(name);
    }

    std::string read(const std::string& name) const {
        std::ifstream f(path(name), std::ios::binary);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    }

    static Result run(std::vector<std::string> args, const std::string& input = "") {
        std::istringstream in(input);
        std::ostringstream out, err;
        const int code = cli::run(args, in, out, err);
        return {code, out.str(), err.str()};
    }

    fs::path dir_;
};

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

TEST_F(Cli, GramThreeVectors) {
    const auto f = write("three.svm", "1 1:1\n2 2:1\n1 1:1 2:1\n");
    const Result r = run({"gram", "--kernel", "minmax", "--train", f, "--out", path("k.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read("k.txt"), "1 0:1 1:1 2:0 3:0.5\n2 0:2 1:0 2:1 3:0.5\n1 0:3 1:0.5 2:0.5 3:1\n");
}

TEST_F(Cli, GramStreamsAndTestRows) {
    const Result r = run({"gram", "--kernel", "linear", "--train", "-", "--out", "-"}, "0 1:3 2:4\n1 1:1\n");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "0 0:1 1:1 2:0.6\n1 0:2 1:0.6 2:1\n");

    const auto train = write("tr.svm", "0 1:1 2:1\n1 3:2\n");
    const auto test = write("te.svm", "5 1:2 2:2 3:2 4:2\n");
    const Result t = run({"gram", "--kernel", "nminmax", "--train", train, "--test", test, "--out", "-"});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_EQ(t.out, "5 0:1 1:0.3333333333333333 2:0.14285714285714285\n");
}

TEST_F(Cli, SketchEncodeDeterministic) {
    const auto f = write("d.svm", "1 1:0.5 3:2\n-1 2:1 3:1e-6 9:4\n1 4:7\n");
    std::vector<std::string> sk = {"sketch", "--k", "32", "--seed", "77", "--dimension", "10", "--in", f, "--out"};
    auto a = sk, b = sk;
    a.push_back(path("a.sk"));
    b.push_back(path("b.sk"));
    b.insert(b.end(), {"--threads", "3"});
    ASSERT_EQ(run(a).code, 0);
    ASSERT_EQ(run(b).code, 0);
    EXPECT_EQ(read("a.sk"), read("b.sk"));
    EXPECT_EQ(read("a.sk").substr(0, 23), "cwsk-sketch 1 77 32 10\n");

    const Result e1 = run({"encode", "--bi", "4", "--bt", "1", "--in", path("a.sk"), "--labels", f, "--out", "-"});
    const Result e2 = run({"encode", "--bi", "4", "--bt", "1", "--in", "-", "--labels", f, "--out", "-"}, read("a.sk"));
    ASSERT_EQ(e1.code, 0) << e1.err;
    EXPECT_EQ(e1.out, e2.out);
    EXPECT_EQ(lines(e1.out), 3);
    EXPECT_EQ(e1.out.substr(0, 2), "1 ");
    EXPECT_EQ(e1.out.find("\n-1 ") != std::string::npos, true);
}

TEST_F(Cli, SimulateHalfKernelMse) {
    const auto f = write("pair.svm", "0 1:1 2:2\n0 1:2 2:1\n");
    const Result r = run({"simulate", "--pairs", f, "--k-grid", "100", "--schemes", "full", "--reps", "10000",
                          "--seed", "2", "--out", "-"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(r.out);
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    EXPECT_EQ(header, "pair,k,scheme,bias,mse,theoretical_var,n_reps");
    std::vector<std::string> cells;
    std::stringstream rs(row);
    for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 7u);
    EXPECT_EQ(cells[0], "0");
    EXPECT_EQ(cells[1], "100");
    double mse = 0;
    ASSERT_TRUE(parse_double(cells[4], mse));
    EXPECT_GE(mse, 0.00225);
    EXPECT_LE(mse, 0.00275);
    EXPECT_EQ(cells[5], "0.0025");
    EXPECT_EQ(cells[6], "10000");

    const Result again = run({"simulate", "--pairs", f, "--k-grid", "100", "--schemes", "full", "--reps", "10000",
                              "--seed", "2", "--out", "-", "--threads", "2"});
    EXPECT_EQ(again.out, r.out);
}

TEST_F(Cli, TrainEvalPipeline) {
    std::string train_text, test_text;
    SplitMix64 g(5);
    for (int i = 0; i < 200; ++i) {
        const int c = i % 2;
        std::string line = std::to_string(c);
        for (int f = 1; f <= 6; ++f) line += " " + std::to_string(f) + ":" + format_double(g.unit() + (((f <= 3) == (c == 0)) ? 1.0 : 0.0));
        (i < 100 ? train_text : test_text) += line + "\n";
    }
    const auto tr = write("tr.svm", train_text);
    const auto te = write("te.svm", test_text);
    const Result t = run({"train", "--raw", "--in", tr, "--test", te, "--seed", "1", "--out", path("m.txt"),
                          "--lambda", "1e-4,1e-2,1"});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_EQ(lines(t.out), 4);
    EXPECT_NE(t.out.find("best lambda="), std::string::npos);
    const Result e = run({"eval", "--model", path("m.txt"), "--in", te});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(e.out.substr(0, 9), "accuracy ");
    double acc = 0;
    ASSERT_TRUE(parse_double(e.out.substr(9, e.out.size() - 10), acc));
    EXPECT_GT(acc, 0.9);

    // Encoded pipeline through sketch and encode.
    ASSERT_EQ(run({"sketch", "--k", "16", "--seed", "3", "--dimension", "6", "--in", tr, "--out", path("tr.sk")}).code, 0);
    ASSERT_EQ(run({"encode", "--bi", "3", "--bt", "0", "--in", path("tr.sk"), "--labels", tr, "--out", path("tr.enc")})
                  .code,
              0);
    const Result te2 = run({"train", "--k", "16", "--bi", "3", "--bt", "0", "--in", path("tr.enc"), "--seed", "1",
                            "--out", path("e.txt")});
    ASSERT_EQ(te2.code, 0) << te2.err;
    const Result ev2 = run({"eval", "--model", path("e.txt"), "--in", path("tr.enc"), "--predictions", "-"});
    ASSERT_EQ(ev2.code, 0) << ev2.err;
    EXPECT_EQ(lines(ev2.out), 101);
}

TEST_F(Cli, UsageErrorsExitOne) {
    for (const std::vector<std::string>& args :
         std::vector<std::vector<std::string>>{{},
                                               {"bogus"},
                                               {"sketch", "--k", "4", "--dimension", "3", "--in", "x", "--out", "y"},
                                               {"gram", "--kernel", "rbf", "--train", "x", "--out", "y"},
                                               {"simulate", "--pairs", "x", "--k-grid", "0", "--seed", "1", "--out", "y"},
                                               {"encode", "--bi", "0", "--bt", "0", "--in", "x", "--out", "y"},
                                               {"train", "--raw", "--in", "x", "--out", "y", "--seed", "1",
                                                "--lambda", "1,2"}}) {
        const Result r = run(args);
        EXPECT_EQ(r.code, cli::kUsage) << r.err;
        EXPECT_EQ(lines(r.err), 1) << r.err;
    }
}

TEST_F(Cli, DataErrorsExitTwoAndLeaveNoOutput) {
    const auto bad = write("bad.svm", "1 1:1\n1 2:-3\n");
    const Result r = run({"gram", "--kernel", "minmax", "--train", bad, "--out", path("k.txt")});
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_EQ(lines(r.err), 1);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(path("k.txt")));
    EXPECT_FALSE(fs::exists(path("k.txt.tmp")));

    const auto wide = write("wide.svm", "1 1:1 12:1\n");
    EXPECT_EQ(run({"sketch", "--k", "2", "--seed", "1", "--dimension", "10", "--in", wide, "--out", path("s")}).code,
              cli::kDataError);
    EXPECT_FALSE(fs::exists(path("s")));
    EXPECT_EQ(run({"gram", "--kernel", "minmax", "--train", path("missing"), "--out", "-"}).code, cli::kDataError);
    const auto empty_row = write("e.svm", "1 1:1\n0\n");
    EXPECT_EQ(run({"sketch", "--k", "2", "--seed", "1", "--dimension", "3", "--in", empty_row, "--out", "-"}).code,
              cli::kDataError);
}

TEST_F(Cli, DivergenceExitsThree) {
    const auto huge = write("huge.svm", "0 1:1e300\n1 2:1e300\n0 1:1e300 2:1e299\n");
    const Result r = run({"train", "--raw", "--in", huge, "--seed", "1", "--lambda", "1e-6", "--out", path("m")});
    EXPECT_EQ(r.code, cli::kNumericError) << r.err;
    EXPECT_FALSE(fs::exists(path("m")));
}

}  // namespace
}  // namespace cwsk

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "countkit/cli.hpp"
#include "countkit/countdist.hpp"
#include "countkit/error.hpp"
#include "json.hpp"

using namespace countkit;
using namespace countkit::cli;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "countkit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("countkit_test_" + name);
    std::ofstream(path) << content;
    return path.string();
}

}  // namespace

TEST(Ingest, RawAndHistogram) {
    std::istringstream raw("0\n1\n\n1\n3\n");
    const auto d = ingest(raw, InputFormat::raw);
    EXPECT_EQ(d.n_total, 4u);
    EXPECT_EQ(d.histogram, (std::map<std::uint64_t, std::uint64_t>{{0, 1}, {1, 2}, {3, 1}}));
    std::istringstream hist("2,5\n0,1\n");
    const auto h = ingest(hist, InputFormat::histogram);
    EXPECT_EQ(h.n_total, 6u);
    EXPECT_EQ(h.histogram, (std::map<std::uint64_t, std::uint64_t>{{0, 1}, {2, 5}}));
}

TEST(Ingest, Errors) {
    std::istringstream bad("1.5\n");
    try {
        ingest(bad, InputFormat::raw);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
    std::istringstream neg("3\n-1\n");
    EXPECT_THROW(ingest(neg, InputFormat::raw), ParseError);
    std::istringstream empty("\n\n");
    EXPECT_THROW(ingest(empty, InputFormat::raw), ParseError);
    EXPECT_THROW(ingest("/nonexistent/countkit.txt", InputFormat::raw), IoError);
}

TEST(Cli, PmfCsvMatchesLibrary) {
    const auto r = invoke({"pmf", "--model", "fpd", "--alpha", "0.9", "--mu", "20", "--output", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,probability");
    const auto p = countdist::GfpdParams::fpd(0.9, 20.0);
    std::size_t rows = 0;
    double total = 0.0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const auto x = std::stoull(line.substr(0, comma));
        const double v = std::stod(line.substr(comma + 1));
        EXPECT_NEAR(v, countdist::gfpd_pmf(p, x), 1e-12);
        total += v;
        ++rows;
    }
    EXPECT_GT(rows, 40u);
    EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(Cli, SampleDeterministicAndRoundTrips) {
    const std::vector<std::string> args = {"sample", "--model", "fpd", "--alpha", "1", "--mu", "3", "--n", "10", "--seed", "7"};
    const auto a = invoke(args), b = invoke(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.err.find("seed: 7"), std::string::npos);
    std::istringstream in(a.out);
    const auto d = ingest(in, InputFormat::raw);
    EXPECT_EQ(d.n_total, 10u);
}

TEST(Cli, CompareTwoModels) {
    const auto s = invoke({"sample", "--model", "fpd", "--alpha", "0.85", "--mu", "3.6", "--n", "1500", "--seed", "3"});
    ASSERT_EQ(s.code, 0);
    const auto path = temp_file("compare.txt", s.out);
    const auto r = invoke({"compare", "--models", "fpd,negbinom", "--input", path, "--output", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    ASSERT_EQ(j.size(), 2u);
    for (const auto& row : j)
        for (const char* key : {"model", "params", "loglik", "chi2", "df", "p_value", "converged"}) EXPECT_TRUE(row.contains(key));
    EXPECT_GE(j[0]["p_value"].get<double>(), j[1]["p_value"].get<double>());

    const auto table = invoke({"compare", "--models", "fpd,negbinom", "--input", path});
    EXPECT_EQ(table.code, 0);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", j[0]["p_value"].get<double>());
    EXPECT_NE(table.out.find(buf), std::string::npos);
    std::filesystem::remove(path);
}

TEST(Cli, FitAndGofJson) {
    const auto path = temp_file("fit.txt", "0,20\n1,35\n2,25\n3,12\n4,6\n5,2\n");
    const auto fit = invoke({"fit", "--model", "poisson", "--input", path, "--format", "histogram", "--output", "json"});
    ASSERT_EQ(fit.code, 0) << fit.err;
    const auto j = json::parse(fit.out);
    EXPECT_NEAR(j["params"]["lambda"].get<double>(), 1.55, 1e-4);
    const auto gof = invoke({"gof", "--model", "poisson", "--lambda", "1.5", "--input", path, "--format", "histogram",
                             "--output", "json"});
    ASSERT_EQ(gof.code, 0) << gof.err;
    EXPECT_EQ(json::parse(gof.out)["model"], "poisson");
    std::filesystem::remove(path);
}

TEST(Cli, Moments) {
    const auto r = invoke({"moments", "--model", "poisson", "--lambda", "3", "--output", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["mean"].get<double>(), 3.0, 1e-12);
    EXPECT_NEAR(j["skewness"].get<double>(), 1 / std::sqrt(3.0), 1e-12);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(invoke({"pmf", "--model", "fpd", "--alpha", "1.5", "--mu", "2"}).code, ExitCode::domain);
    EXPECT_EQ(invoke({"pmf"}).code, ExitCode::usage);
    EXPECT_EQ(invoke({"frobnicate"}).code, ExitCode::usage);
    EXPECT_EQ(invoke({"fit", "--model", "poisson", "--input", "/nonexistent/x"}).code, ExitCode::io);
    const auto path = temp_file("bad.txt", "1\n2.5\n");
    const auto r = invoke({"fit", "--model", "poisson", "--input", path, "--output", "json"});
    EXPECT_EQ(r.code, ExitCode::parse);
    EXPECT_EQ(json::parse(r.out)["error"]["code"], "parse_error");
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
    std::filesystem::remove(path);
}

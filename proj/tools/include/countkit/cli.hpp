#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "countkit/inference.hpp"

namespace countkit::cli {

enum class InputFormat { raw, histogram };
enum class OutputFormat { table, json, csv };

// Exit statuses; module errors map onto their ErrorCode.
enum ExitCode : int { ok = 0, usage = 2, parse = 3, domain = 4, evaluation = 5, io = 6 };

struct RunConfig {
    std::string command;  // pmf, sample, fit, gof, compare, moments
    std::string model;
    std::vector<std::string> models;              // compare
    std::map<std::string, double> params;         // by parameter name
    std::vector<double> init;                     // fit --method simplex
    std::string method = "default";               // fit: default, grid, simplex
    std::string input_path;
    InputFormat input_format = InputFormat::raw;
    OutputFormat output_format = OutputFormat::table;
    std::uint64_t seed = 20240607;
    std::size_t mc_n = 500'000;
    std::size_t n = 1000;                         // sample size
    std::optional<std::uint64_t> x_max;           // pmf support override
    bool pool = true;
};

inline constexpr std::uint64_t kDefaultSeed = 20240607;

inference::CountData ingest(const std::string& path, InputFormat format);
inference::CountData ingest(std::istream& in, InputFormat format);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and runs; usage errors return ExitCode::usage.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace countkit::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hwy::harness {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitIo = 3,
    kExitDiverged = 4,
    kExitLayout = 5,
};

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
};

int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err);

struct EvaluateOptions : CommandOptions {
    std::optional<std::filesystem::path> checkpoint;
    std::string arm;      // required with checkpoint when several arms are configured
    std::string variant;  // label for a single checkpoint; defaults to the first configured variant
};
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);

struct CompareOptions {
    std::vector<std::filesystem::path> reports;  // files, or directories scanned for *.report.json
    std::optional<std::filesystem::path> out;
};
int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err);

int cmd_print_obs_layout(const std::string& mode, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int run_cli(int argc, char** argv);

}  // namespace hwy::harness

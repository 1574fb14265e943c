#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "convtrace/em.hpp"

namespace convtrace::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,    // bad arguments, configuration, or input files
    kExitPartial = 2,  // some images failed; output still written
    kExitInternal = 3,
};

struct SynthArgs {
    std::filesystem::path spec_file;
    std::filesystem::path out_dir;
};

struct ExtractArgs {
    std::filesystem::path manifest;
    int alpha = 1;
    std::filesystem::path out_csv;
    int jobs = 1;
    std::optional<std::size_t> crop;  // centered crop to crop x crop
    em::EmConfig em;                  // alpha overwritten by `alpha`
};

struct AttackArgs {
    std::filesystem::path manifest;
    std::string attack;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    int jobs = 1;
};

struct TrainArgs {
    std::vector<std::filesystem::path> features;
    std::string classifier = "rf";
    std::uint64_t seed = 0;
    std::filesystem::path out_model;
};

struct EvalArgs {
    std::vector<std::filesystem::path> features;
    std::vector<std::string> classifiers;  // empty: the full bank
    std::string mode = "cv5";              // split70 | cv5
    std::string pairing = "pooled";        // pooled | pairwise
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
};

struct ReportArgs {
    std::vector<std::filesystem::path> inputs;
    std::optional<std::filesystem::path> out;
};

struct PredictArgs {
    std::filesystem::path model;
    std::vector<std::filesystem::path> features;
    std::filesystem::path out_csv;
};

/// Each command validates its paths before doing any work and throws the
/// library error types on bad input; run_guarded maps them to exit codes.
int cmd_synth(const SynthArgs& args);
/// One row per manifest entry in manifest order; failures are kept as
/// `failed` rows and make the command return kExitPartial.
int cmd_extract(const ExtractArgs& args);
int cmd_attack(const AttackArgs& args);
int cmd_train(const TrainArgs& args);
/// Writes report_<comparison>.csv and .txt into out_dir.
int cmd_eval(const EvalArgs& args);
int cmd_report(const ReportArgs& args);
int cmd_predict(const PredictArgs& args);

/// Runs `body`, printing errors to stderr and translating them to exit codes.
template <typename F>
int run_guarded(F&& body);

int exit_code_for_current_exception();

template <typename F>
int run_guarded(F&& body)
{
    try {
        return body();
    } catch (...) {
        return exit_code_for_current_exception();
    }
}

}  // namespace convtrace::cli

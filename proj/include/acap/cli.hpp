#pragma once

#include <filesystem>
#include <optional>

#include "acap/classifiers.hpp"
#include "acap/eval.hpp"
#include "acap/features.hpp"

namespace acap::cli {

// Defaults shared by every subcommand. Flags override the config file, which
// overrides the built-in defaults; the ACAP_OUT_DIR environment variable is
// the fallback output directory.
struct PipelineConfig {
    std::optional<std::filesystem::path> corpus;
    std::optional<std::filesystem::path> out;
    VectorizerConfig vectorizer;
    TrainConfig train;
    ExperimentConfig experiment;
    int verbosity = 0;
};

// Reads a JSON config file. Unknown keys are errors so typos cannot silently
// fall back to defaults. A corpus path given here must exist.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Entry point behind main(). Exit codes: 0 success, 1 runtime failure,
// 2 usage error.
int dispatch(int argc, const char* const* argv);

} // namespace acap::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sgkdv/manifest.hpp"

namespace sgkdv {

struct RunOptions {
    std::optional<std::string> out;    // overrides SGKDV_OUTPUT_DIR and the manifest
    std::optional<std::uint64_t> seed; // overrides noise.seed (and probe.data_seed for probes)
    unsigned jobs = 1;
};

struct Gate {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Exit codes: 0 all gates passed, 1 runtime error, 2 invalid manifest, 3 a gate failed.
struct RunResult {
    int exit_code = 0;
    std::vector<Gate> gates;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    std::filesystem::path out_dir;
};

Field build_initial(const Manifest& m, const GridPtr& grid);

// Applies overrides, writes the resolved manifest, runs the experiment and
// writes summary.json. Never throws.
RunResult run(Manifest m, const RunOptions& opt, const std::vector<std::string>& warnings = {});
// Parses, then runs; an invalid manifest yields exit code 2 and error.json.
RunResult run_text(const std::string& manifest_text, const RunOptions& opt);
// Merges ensemble partials found in `dir` and aggregates all summaries there.
RunResult report(const std::filesystem::path& dir);

}  // namespace sgkdv

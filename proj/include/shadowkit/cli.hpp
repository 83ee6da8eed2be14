#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shadowkit::cli {

const std::vector<std::string>& subcommands();

struct Resolution {
    /// Full config with defaults filled in (JSON text).
    std::string config;
    /// "field: message" entries; empty when the config is usable.
    std::vector<std::string> violations;
};

/// Resolves defaults for `subcommand` and checks every parameter before any
/// computation. `config_json` may be empty (all defaults).
Resolution resolve(const std::string& config_json, const std::string& subcommand, std::uint64_t seed_override = 0,
                   bool has_seed_override = false);

std::vector<std::string> validate(const std::string& config_json, const std::string& subcommand);

struct RunResult {
    int exit_code = 0;  // 0 ok, 2 negative verdict
    std::string report_json;
    std::string series_csv;
};

/// Runs a resolved config. Throws shadowkit::Error on operational failure.
RunResult run(const std::string& subcommand, const std::string& resolved_config);

/// Entry point for the executable: parses flags, writes report.json,
/// series.csv and meta.json under --out, returns the exit status.
int main(int argc, char** argv);

}  // namespace shadowkit::cli

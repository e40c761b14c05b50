#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsemi/error.hpp"

// Batch scenarios described by YAML configs, producing JSON or CSV reports.

namespace qsemi::scenario {

using Json = nlohmann::ordered_json;

enum class Kind {
    Expectation,
    Purity,
    Entropy,
    RelativeEntropy,
    Constrained,
    Displacement,
    VectorHolevo,
    ImagingSweep,
    OracleCrosscheck,
};

std::string kind_name(Kind k);
/// Throws InvalidInput for unknown names.
Kind parse_kind(const std::string& name);

enum class Command { Bound, Oracle, Imaging, Holevo };

std::string command_name(Command c);
Command parse_command(const std::string& name);
/// Whether a subcommand may run a scenario kind.
bool accepts(Command c, Kind k);

enum class Format { Report, Csv };

/// Process exit statuses.
enum class Status : int {
    Ok = 0,
    DiagnosticFailure = 2,  ///< a theorem inequality or cross-check failed
    Infeasible = 3,         ///< range condition fails or the bound is infinite
    InputError = 4,
};

/// Config problems, with line/column and field path when known.
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Numeric failure raised inside a scenario, tagged with the module that
/// produced it.
class ScenarioFailure : public Error {
public:
    ScenarioFailure(Status status, std::string module, const std::string& what);
    Status status() const { return status_; }
    const std::string& module() const { return module_; }

private:
    Status status_;
    std::string module_;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;  ///< overrides the config seed
    int threads = 1;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    /// Deterministic content: inputs echo, results, diagnostics, status.
    Json payload;
    /// Wall-clock seconds per stage; kept apart so payloads can be compared.
    Json timings;
    Table table;
    Status status = Status::Ok;
};

/// Parses and runs a config. `origin` names the source in error messages.
Report run_text(const std::string& yaml, Command command, const RunOptions& opts = {},
                const std::string& origin = "<config>");
Report run_file(const std::string& path, Command command, const RunOptions& opts = {});

std::string render(const Report& report, Format format);

/// Maps library exceptions to exit statuses.
Status status_for(const std::exception& e);

inline constexpr const char* kToolVersion = "0.3.0";

} // namespace qsemi::scenario

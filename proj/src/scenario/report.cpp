#include <array>
#include <sstream>
#include <utility>

#include <yaml-cpp/exceptions.h>

#include "qsemi/scenario.hpp"

namespace qsemi::scenario {

namespace {

constexpr std::array<std::pair<Kind, const char*>, 9> kKinds{{
    {Kind::Expectation, "expectation"},
    {Kind::Purity, "purity"},
    {Kind::Entropy, "entropy"},
    {Kind::RelativeEntropy, "relative-entropy"},
    {Kind::Constrained, "constrained"},
    {Kind::Displacement, "displacement"},
    {Kind::VectorHolevo, "vector-holevo"},
    {Kind::ImagingSweep, "imaging-sweep"},
    {Kind::OracleCrosscheck, "oracle-crosscheck"},
}};

constexpr std::array<std::pair<Command, const char*>, 4> kCommands{{
    {Command::Bound, "bound"},
    {Command::Oracle, "oracle"},
    {Command::Imaging, "imaging"},
    {Command::Holevo, "holevo"},
}};

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        out += ch == '"' ? "\"\"" : std::string(1, ch);
    }
    return out + "\"";
}

} // namespace

std::string kind_name(Kind k) {
    for (const auto& [kind, name] : kKinds) {
        if (kind == k) {
            return name;
        }
    }
    return "unknown";
}

Kind parse_kind(const std::string& name) {
    for (const auto& [kind, n] : kKinds) {
        if (name == n) {
            return kind;
        }
    }
    std::string known;
    for (const auto& kv : kKinds) {
        known += known.empty() ? kv.second : std::string(", ") + kv.second;
    }
    throw InvalidInput("unknown scenario kind '" + name + "' (known: " + known + ")");
}

std::string command_name(Command c) {
    for (const auto& [cmd, name] : kCommands) {
        if (cmd == c) {
            return name;
        }
    }
    return "unknown";
}

Command parse_command(const std::string& name) {
    for (const auto& [cmd, n] : kCommands) {
        if (name == n) {
            return cmd;
        }
    }
    throw InvalidInput("unknown subcommand '" + name + "'");
}

bool accepts(Command c, Kind k) {
    switch (c) {
    case Command::Bound:
        return k == Kind::Expectation || k == Kind::Purity || k == Kind::Entropy ||
               k == Kind::RelativeEntropy || k == Kind::Constrained || k == Kind::Displacement;
    case Command::Oracle:
        return k == Kind::OracleCrosscheck;
    case Command::Imaging:
        return k == Kind::ImagingSweep;
    case Command::Holevo:
        return k == Kind::VectorHolevo;
    }
    return false;
}

std::string render(const Report& report, Format format) {
    if (format == Format::Report) {
        Json out = report.payload;
        out["timings"] = report.timings;
        return out.dump(2) + "\n";
    }
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            os << (i ? "," : "") << csv_cell(cells[i]);
        }
        os << "\n";
    };
    line(report.table.header);
    for (const auto& row : report.table.rows) {
        line(row);
    }
    return os.str();
}

Status status_for(const std::exception& e) {
    if (const auto* f = dynamic_cast<const ScenarioFailure*>(&e)) {
        return f->status();
    }
    if (dynamic_cast<const RangeConditionError*>(&e) || dynamic_cast<const InfiniteBound*>(&e)) {
        return Status::Infeasible;
    }
    if (dynamic_cast<const ConvergenceError*>(&e)) {
        return Status::DiagnosticFailure;
    }
    if (dynamic_cast<const Error*>(&e) || dynamic_cast<const YAML::Exception*>(&e)) {
        return Status::InputError;
    }
    return Status::DiagnosticFailure;
}

} // namespace qsemi::scenario

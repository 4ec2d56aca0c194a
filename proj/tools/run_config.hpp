#pragma once

#include "nitsche/cases.hpp"
#include "nitsche/error.hpp"
#include "nitsche/reference_cell.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <string>

namespace nitsche::cli {

struct RunConfig {
    std::string case_name{"paper-3-3"};
    ElementKind kind{ElementKind::P1Triangle};
    int levels{5};
    double gamma{10.0};
    double tol{1e-10};
    std::string output{"./out"};
    bool dump_mesh{false};
    bool dump_system{false};
    bool dump_solution{false};
    bool plot{false};
};

[[nodiscard]] inline ElementKind parse_kind(const std::string& s)
{
    if (s == "p1") return ElementKind::P1Triangle;
    if (s == "q1") return ElementKind::Q1Quad;
    throw Error("unknown element kind '" + s + "' (expected p1 or q1)");
}

/// Overlays the keys present in a JSON object onto @p cfg. Unknown keys are rejected.
inline void apply_json(const nlohmann::json& j, RunConfig& cfg)
{
    if (!j.is_object()) throw Error("configuration file must contain a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "case") cfg.case_name = value.get<std::string>();
        else if (key == "element") cfg.kind = parse_kind(value.get<std::string>());
        else if (key == "levels") cfg.levels = value.get<int>();
        else if (key == "gamma") cfg.gamma = value.get<double>();
        else if (key == "tol") cfg.tol = value.get<double>();
        else if (key == "output") cfg.output = value.get<std::string>();
        else if (key == "dump_mesh") cfg.dump_mesh = value.get<bool>();
        else if (key == "dump_system") cfg.dump_system = value.get<bool>();
        else if (key == "dump_solution") cfg.dump_solution = value.get<bool>();
        else if (key == "plot") cfg.plot = value.get<bool>();
        else throw Error("unknown configuration key '" + key + "'");
    }
}

inline void load_json_file(const std::string& path, RunConfig& cfg)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open configuration file '" + path + "'");
    try {
        apply_json(nlohmann::json::parse(in), cfg);
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid configuration file '" + path + "': " + e.what());
    }
}

inline void validate(const RunConfig& cfg)
{
    if (cfg.levels < 1) throw Error("levels must be at least 1");
    if (!(cfg.gamma > 0.0)) throw Error("gamma must be positive");
    if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw Error("tol must lie in (0, 1)");
    const auto names = case_names();
    if (std::find(names.begin(), names.end(), cfg.case_name) == names.end()) {
        std::string known;
        for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
        throw Error("unknown case '" + cfg.case_name + "' (registered: " + known + ")");
    }
}

} // namespace nitsche::cli

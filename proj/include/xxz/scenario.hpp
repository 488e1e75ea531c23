#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xxz/lattice.hpp"
#include "xxz/sweep.hpp"

namespace xxz {

// One structured-text document describing a problem instance: graph, field
// pattern, sweep window, pairs of interest, tolerances, budgets and output.
struct Scenario {
    SpinGraph graph;
    std::optional<FieldPattern> pattern;
    std::optional<GridSpec> sweep;
    std::vector<std::pair<int, int>> pairs;
    std::optional<std::pair<double, double>> point;
    std::optional<FieldConfig> fields;      // explicit per-site fields
    std::optional<int> select_twice_m;

    double degeneracy_tol = 1e-8;
    double boundary_tol = 1e-8;
    std::size_t max_sector_dim = 200000;
    int dense_threshold = 4096;
    int workers = 1;

    std::string output_path;
    std::string output_format = "csv";
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

// Canonical form; parse(scenario_to_json(s)) reproduces s exactly.
nlohmann::json scenario_to_json(const Scenario& s);

// Structural checks mirroring docs/scenario.schema.json; throws ScenarioError.
void validate_scenario_schema(const nlohmann::json& doc);

}  // namespace xxz

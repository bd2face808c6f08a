#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddq/analysis.hpp"
#include "ddq/engine.hpp"
#include "ddq/protocols.hpp"

namespace ddq {

using Json = nlohmann::ordered_json;

struct LineSpec {
    int col = 0;
    int row = 0;
    Coord direction{1, 0};
    int length = 10;
};

struct AnalysisSpec {
    std::string kind;  // diffusion | profile | cancer | gate | voronoi | classify | periodicity
    std::vector<LineSpec> lines;
    double saturation_tolerance = 0.5;
    double u1 = 0.13;
    int at_scan = 0;                       // voronoi / classify snapshot
    std::vector<Coord> probes;             // classify
    std::optional<Region> region;          // periodicity / cancer override
};

// A fully resolved run: grid, expanded schedule, generator context, and the
// normalized scenario document used for bit-exact replays.
struct Scenario {
    std::string name;
    SimConfig config;
    HexGrid initial;
    std::vector<Event> events;
    int n_scans = 0;
    std::vector<AnalysisSpec> analyses;
    std::optional<TissueSpec> tissue;
    std::optional<AndInputs> gate;
    Json echo;
};

Scenario load_scenario(const Json& doc);
Scenario load_scenario_file(const std::filesystem::path& path);

struct RunReport {
    Json json;
    bool analysis_ok = true;
};

// Runs the scenario and writes scenario.json, per-scan pattern snapshots,
// states.csv, report.json and optional PPM frames into output_dir.
RunReport run_scenario(const Scenario& scenario, const std::filesystem::path& output_dir,
                       bool frames);

// In-memory variant used by tests and the acceptance suite.
Trajectory run_trajectory(const Scenario& scenario);

Json analyses_report(const Scenario& scenario, const Trajectory& trajectory);
Json analysis_report_one(const Scenario& scenario, const Trajectory& trajectory,
                         const std::string& kind);

struct VerifyResult {
    bool pass = false;
    std::string detail;
};

// Re-runs the echoed scenario and compares every stored snapshot byte for
// byte.
VerifyResult replay_verify(const std::filesystem::path& run_dir);

// Reloads the stored snapshots of a finished run.
Trajectory load_trajectory(const std::filesystem::path& run_dir, const Scenario& scenario);

void write_ppm_frame(const HexGrid& grid, const std::filesystem::path& path);

}  // namespace ddq

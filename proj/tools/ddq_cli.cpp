#include <filesystem>
#include <future>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "ddq/errors.hpp"
#include "ddq/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int run_one(const fs::path& scenario_path, const fs::path& out_dir, bool frames) {
    ddq::Scenario sc;
    try {
        sc = ddq::load_scenario_file(scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "validation error [" << scenario_path.string() << "]: " << e.what()
                  << "\n";
        return 2;
    }
    try {
        const ddq::RunReport report = ddq::run_scenario(sc, out_dir, frames);
        if (!report.analysis_ok) {
            std::cerr << "analysis failed [" << sc.name
                      << "]: " << report.json.value("analysis_error", "unknown") << "\n";
            return 3;
        }
        std::cout << sc.name << ": " << report.json["snapshots"] << " snapshots -> "
                  << out_dir.string() << "\n";
        return 0;
    } catch (const ddq::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DDQ monolayer cellular-automaton simulator"};
    app.require_subcommand(1);

    // run <scenario>... -o <dir> [--frames] [--jobs N]
    auto* run_cmd = app.add_subcommand("run", "run one or more scenario files");
    std::vector<std::string> scenario_paths;
    std::string out_root = "out";
    bool frames = false;
    int jobs = 1;
    run_cmd->add_option("scenarios", scenario_paths, "scenario JSON files")->required();
    run_cmd->add_option("-o,--output", out_root, "output directory");
    run_cmd->add_flag("--frames", frames, "emit PPM frames per scan");
    run_cmd->add_option("--jobs", jobs, "run independent scenarios in parallel");

    auto* verify_cmd = app.add_subcommand("verify", "replay a run directory bit-exactly");
    std::string verify_dir;
    verify_cmd->add_option("dir", verify_dir, "run directory")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "recompute one analysis from a run");
    std::string analyze_dir;
    std::string kind;
    analyze_cmd->add_option("dir", analyze_dir, "run directory")->required();
    analyze_cmd->add_option("--kind", kind, "analysis kind")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        // A single scenario writes directly into -o; several get subdirectories.
        if (scenario_paths.size() == 1)
            return run_one(scenario_paths[0], out_root, frames);
        int rc = 0;
        std::vector<std::future<int>> futures;
        std::size_t next = 0;
        while (next < scenario_paths.size() || !futures.empty()) {
            while (next < scenario_paths.size() &&
                   static_cast<int>(futures.size()) < std::max(1, jobs)) {
                const fs::path sp = scenario_paths[next];
                const fs::path od = fs::path(out_root) / sp.stem();
                futures.push_back(std::async(std::launch::async, run_one, sp, od, frames));
                ++next;
            }
            rc = std::max(rc, futures.back().get());
            futures.pop_back();
        }
        return rc;
    }

    if (verify_cmd->parsed()) {
        try {
            const ddq::VerifyResult res = ddq::replay_verify(verify_dir);
            std::cout << (res.pass ? "PASS" : "FAIL") << ": " << res.detail << "\n";
            return res.pass ? 0 : 1;
        } catch (const std::exception& e) {
            std::cout << "FAIL: " << e.what() << "\n";
            return 1;
        }
    }

    if (analyze_cmd->parsed()) {
        try {
            const ddq::Scenario sc =
                ddq::load_scenario_file(fs::path(analyze_dir) / "scenario.json");
            const ddq::Trajectory traj = ddq::load_trajectory(analyze_dir, sc);
            std::cout << ddq::analysis_report_one(sc, traj, kind).dump(2) << "\n";
            return 0;
        } catch (const ddq::ValidationError& e) {
            std::cerr << "validation error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "analysis error: " << e.what() << "\n";
            return 3;
        }
    }
    return 0;
}

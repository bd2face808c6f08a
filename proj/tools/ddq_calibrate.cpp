// Parameter exploration harness: runs fixture variants across seeds and
// prints the acceptance-relevant metrics, so mobility constants and fixture
// geometry can be chosen once and frozen.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <string>
#include <vector>

#include "ddq/analysis.hpp"
#include "ddq/scenario.hpp"

using namespace ddq;

namespace {

Json load_fixture(const std::string& name) {
    const std::string path = std::string(DDQ_FIXTURE_DIR) + "/" + name + ".json";
    std::ifstream in(path);
    Json doc;
    in >> doc;
    return doc;
}

Json run_with_seed(Json doc, std::uint64_t seed) {
    doc["engine"]["seed"] = seed;
    const Scenario sc = load_scenario(doc);
    const Trajectory traj = run_trajectory(sc);
    return analyses_report(sc, traj);
}

void gate_sweep(int seeds) {
    for (const char* name : {"gate_00", "gate_01", "gate_10", "gate_11"}) {
        const Json doc = load_fixture(name);
        int pass = 0, collapse = 0;
        const bool expect = std::string(name) == "gate_11";
        const bool single = std::string(name) == "gate_10" || std::string(name) == "gate_01";
        for (int s = 0; s < seeds; ++s) {
            const Json rep = run_with_seed(doc, 1000 + 17 * s);
            const auto& g = rep[0];
            const int bit = g["bit"].get<int>();
            if (bit == (expect ? 1 : 0)) ++pass;
            if (single) {
                const double da = g["density_a"].get<double>();
                const double db = g["density_b"].get<double>();
                if (std::max(da, db) > 0.5) ++collapse;
            }
        }
        std::printf("%s: truth %d/%d  collapse-in-place %d/%d\n", name, pass, seeds,
                    collapse, single ? seeds : 0);
    }
}

void diffusion_sweep(int seeds) {
    Json doc = load_fixture("diffusion");
    std::printf("bw sc1  scans |     D     R2  |     a    z0     b   sat\n");
    for (int scans : {28, 40}) {
        for (int bw : {2, 3}) {
            for (double sc1 : {0.12, 0.18, 0.25}) {
                doc["grid"]["spacing_nm"] = 1.03;
                doc["engine"]["mobility"] = {{"hold_s1", 0.25},
                                             {"hold_s3", 0.50},
                                             {"scatter_s1", sc1},
                                             {"scatter_s3", sc1}};
                // full-height band: quasi one-dimensional spreading
                doc["initial"]["generators"][0]["width"] = bw;
                doc["initial"]["generators"][0]["height"] = 27;
                doc["initial"]["generators"][0]["anchor"] = {11, 0};
                doc["schedule"]["scans"] = scans;
                for (int s = 0; s < seeds; ++s) {
                    const Json rep = run_with_seed(doc, 500 + 31 * s);
                    std::printf("%2d %.2f %5d | %6.3f %5.2f | %5.2f %5.2f %5.2f %3d\n",
                                bw, sc1, scans, rep[0]["d_nm2_per_min"].get<double>(),
                                rep[0]["r2"].get<double>(), rep[1]["a"].get<double>(),
                                rep[1]["z0"].get<double>(), rep[1]["b"].get<double>(),
                                rep[1]["saturation_scan"].get<int>());
                }
            }
        }
    }
}

void cancer_sweep(int seeds) {
    for (const char* name : {"cancer_n286", "cancer_n456", "cancer_n627", "cancer_n286_cin"}) {
        const Json doc = load_fixture(name);
        std::vector<double> mean_cum;
        std::vector<double> t_minutes;
        double t_half_sum = 0;
        int t_half_n = 0;
        for (int s = 0; s < seeds; ++s) {
            const Json rep = run_with_seed(doc, 9000 + 13 * s);
            const auto cum = rep[0]["n3_cumulative"].get<std::vector<double>>();
            if (mean_cum.empty()) {
                mean_cum.assign(cum.size(), 0.0);
                t_minutes = rep[0]["t_minutes"].get<std::vector<double>>();
            }
            for (std::size_t i = 0; i < cum.size(); ++i) mean_cum[i] += cum[i] / seeds;
            if (!rep[0]["t_half_s"].is_null()) {
                t_half_sum += rep[0]["t_half_s"].get<double>();
                ++t_half_n;
            }
        }
        double c = 0, p = 0, u2 = 0;
        try {
            const KineticsFit fit = kinetics_fit(mean_cum, t_minutes);
            c = fit.c;
            p = fit.p;
        } catch (...) {
        }
        const Json rep0 = run_with_seed(doc, 9000);
        const double x00 = rep0[0]["x00"].get<double>();
        u2 = fit_u2(mean_cum, t_minutes, 0.13, x00);
        std::printf("%s: c=%6.2f p=%5.2f u2=%9.3e x00=%5.1f t_half=%6.1fs  n3=[", name, c,
                    p, u2, x00, t_half_n ? t_half_sum / t_half_n : -1.0);
        for (std::size_t i = 0; i < mean_cum.size(); ++i)
            std::printf("%s%.0f", i ? "," : "", mean_cum[i]);
        std::printf("]\n");
    }
}

void diffusion_freeze(int seeds, double sc, int bw, double tol, int scans) {
    Json doc = load_fixture("diffusion");
    doc["grid"]["spacing_nm"] = 1.03;
    doc["engine"]["mobility"] = {{"hold_s1", 0.25},
                                 {"hold_s3", 0.50},
                                 {"scatter_s1", sc},
                                 {"scatter_s3", sc}};
    doc["initial"]["generators"][0]["width"] = bw;
    doc["initial"]["generators"][0]["height"] = 27;
    doc["initial"]["generators"][0]["anchor"] = {12 - bw / 2, 0};
    doc["schedule"]["scans"] = scans;
    Json lines = Json::array();
    for (int r = 11; r <= 15; ++r)
        lines.push_back({{"start", {8, r}}, {"dir", "E"}, {"length", 10}});
    doc["analyses"][0]["lines"] = lines;
    doc["analyses"][1]["line"] = {{"start", {8, 13}}, {"dir", "E"}, {"length", 10}};
    doc["analyses"][1]["saturation_tolerance"] = tol;
    std::printf("--- sc %.2f bw %d tol %.2f scans %d\n", sc, bw, tol, scans);
    int npass = 0;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 500 + 31 * s;
        const Json rep = run_with_seed(doc, seed);
        const double d = rep[0]["d_nm2_per_min"].get<double>();
        const double r2 = rep[0]["r2"].get<double>();
        const double a = rep[1]["a"].get<double>();
        const double z0 = rep[1]["z0"].get<double>();
        const double b = rep[1]["b"].get<double>();
        const int sat = rep[1]["saturation_scan"].get<int>();
        const bool ok = d >= 1.0 && d <= 4.0 && r2 >= 0.8 && a >= 7.0 && a <= 21.0 &&
                        b >= 0.5 && b <= 1.5 && std::abs(z0 - 4.5) <= 1.0 && sat >= 5 &&
                        sat <= 9;
        npass += ok;
        std::printf("seed %5llu | %6.3f %5.2f | %5.2f %5.2f %5.2f %3d | %s\n",
                    (unsigned long long)seed, d, r2, a, z0, b, sat, ok ? "PASS" : "");
    }
    std::printf("pass %d/%d\n", npass, seeds);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "diffusion";
    const int seeds = argc > 2 ? std::atoi(argv[2]) : 5;
    if (mode == "diffusion") diffusion_sweep(seeds);
    if (mode == "freeze") {
        const double sc = argc > 3 ? std::atof(argv[3]) : 0.13;
        const int bw = argc > 4 ? std::atoi(argv[4]) : 2;
        const double tol = argc > 5 ? std::atof(argv[5]) : 1.5;
        const int scans = argc > 6 ? std::atoi(argv[6]) : 30;
        diffusion_freeze(seeds, sc, bw, tol, scans);
    }
    if (mode == "gate") gate_sweep(seeds);
    if (mode == "cancer") cancer_sweep(seeds);
    return 0;
}

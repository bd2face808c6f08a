#pragma once

#include <array>
#include <vector>

#include "ddq/grid.hpp"

namespace ddq {

// Local state-density thresholds selecting one of the eight circuit types.
// The charged-state checks win over the background ones; the fallback rows
// for types 3/4/6/8 are artifact defaults (figure-only in the source data)
// and are scenario-configurable.
struct CircuitThresholds {
    double s3_type5 = 0.30;   // S3 fraction >  -> type 5
    double s1_type1 = 0.50;   // S1 fraction >  -> type 1
    double s2_type2 = 0.60;   // S2 fraction >= -> type 2
    double s0_type7 = 0.60;   // S0 fraction >= -> type 7
    double s1_type4_lo = 0.30;  // S1 in (lo, hi] -> type 4
    double s1_type4_hi = 0.50;
    double s2_type3_lo = 0.40;  // S2 in [lo, hi) -> type 3
    double s2_type3_hi = 0.60;
    double s3_type6_lo = 0.15;  // S3 in (lo, hi] -> type 6
    double s3_type6_hi = 0.30;
};

struct CircuitConfig {
    CircuitThresholds thresholds;
    // Neighborhood degree per circuit type 1..8 (index 0 unused).
    std::array<int, 9> degree{0, 6, 4, 3, 5, 6, 3, 6, 2};
    // Rule priority lists per type; Rule 3 leads in types 1, 5, 7.
    std::array<std::array<int, 6>, 9> priority{};
    int window_radius = 2;  // 19-cell flower, ~16-17 nm^2

    CircuitConfig() {
        for (int t = 1; t <= 8; ++t) priority[t] = {1, 2, 3, 4, 5, 6};
        priority[1] = {3, 1, 2, 4, 5, 6};
        priority[5] = {3, 1, 2, 4, 5, 6};
        priority[7] = {3, 1, 2, 4, 5, 6};
    }
};

int classify_window(const StateCounts& hist, const CircuitThresholds& thresholds);

struct Domain {
    int circuit = 0;
    Region region;
    double area_nm2 = 0.0;
};

struct CircuitMap {
    std::vector<int> circuit;      // per cell, row-major offset layout
    std::vector<int> domain_rank;  // per cell, 0 = largest domain
    std::vector<Domain> domains;   // sorted by area desc, ties by first member
    int width = 0;
    int height = 0;

    int circuit_at(const HexGrid& grid, Coord c) const { return circuit[grid.index(c)]; }
    int rank_at(const HexGrid& grid, Coord c) const { return domain_rank[grid.index(c)]; }
};

// Classify every cell through its radius-2 window, then split into connected
// circuit domains (6-adjacency).
CircuitMap segment_domains(const HexGrid& grid, const CircuitConfig& cfg = {});

const std::array<int, 6>& rule_priority(int circuit_type, const CircuitConfig& cfg);

struct VoronoiPoint {
    Vec2 position_nm;
    int domain = 0;
};

// One generator per domain: charge-weighted centroid when the domain holds
// charge, geometric centroid otherwise.
std::vector<VoronoiPoint> voronoi_generators(const HexGrid& grid, const CircuitMap& map);

struct VoronoiReport {
    bool applicable = false;
    double max_asymmetry = 0.0;   // lattice units
    double mean_asymmetry = 0.0;
    int boundary_cells = 0;
};

// For every cell adjacent to a different domain, |d1 - d2| over the two
// nearest generators, in lattice units.
VoronoiReport voronoi_check(const HexGrid& grid, const CircuitMap& map,
                            const std::vector<VoronoiPoint>& points);

}  // namespace ddq

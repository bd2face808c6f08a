#pragma once

#include <optional>
#include <vector>

#include "ddq/engine.hpp"
#include "ddq/grid.hpp"

namespace ddq {

// Seven-cell flower (unit cell) with its rank along a measurement line.
struct UnitCell {
    Coord center;
    std::vector<Coord> members;  // center + in-bounds neighbors
    int rank = 0;
};

// Overlapping flowers centered on consecutive cells along a lattice line.
std::vector<UnitCell> unit_cell_tiling(const HexGrid& grid, Coord start, Coord direction,
                                       int length);

// Electrons per nm^2 for each flower (Q / A).
std::vector<double> flux_field(const HexGrid& snapshot, const std::vector<UnitCell>& cells);
// Raw flower charge Q (electrons per unit cell); the profile fit works in
// these units, whose ceiling is the 14-electron flower capacity.
std::vector<double> flux_charge(const HexGrid& snapshot, const std::vector<UnitCell>& cells);

struct DiffusionFit {
    double d = 0.0;          // nm^2/min
    double r2 = 0.0;
    double intercept = 0.0;
    int samples = 0;
};

// Least-squares line through (curvature, rate) samples gathered from every
// interior flower and consecutive snapshot pair. Gradients are taken between
// adjacent flowers over the non-overlap area UC = 1.3 A; the curvature (the
// plain difference of flanking gradients) lands at the center flower.
DiffusionFit diffusion_fit(const Trajectory& trajectory,
                           const std::vector<std::vector<UnitCell>>& lines,
                           double unit_cell_area_nm2);

struct ProfileFit {
    double a = 0.0;
    double z0 = 0.0;
    double b = 0.0;
    double residual = 0.0;
    int saturation_scan = -1;   // first scan whose smoothed profile stopped moving
    double saturation_s = -1.0;
};

struct ProfileSample {
    double z = 0.0;
    double t_minutes = 0.0;
    double value = 0.0;
};

// Core nonlinear least squares of (a/sqrt(t)) exp(-(Z-z0)^2/(b t)).
ProfileFit fit_profile_samples(const std::vector<ProfileSample>& samples);

// Fits the (1,2,1)/4-smoothed flower-charge profile of a trajectory; t in
// minutes, amplitudes in electrons per unit cell.
ProfileFit flux_profile_fit(const Trajectory& trajectory, const std::vector<UnitCell>& line,
                            double saturation_tolerance = 0.5);

struct CancerParams {
    double u1 = 0.13;    // per minute
    double u2 = 1.79e-3;
    double x00 = 128.0;  // effective normal cells at t = 0
    double neff() const { return 2.0 * x00; }
};

struct CancerPoint {
    double x0 = 0.0;
    double x1 = 0.0;
    double x3 = 0.0;
};

// Closed forms of the three-rate mutation chain; X0+X1+X3 = X0(0) for all t.
CancerPoint cancer_closed_form(const CancerParams& params, double t_minutes);

// Cumulative count of newly appeared state-3 cells inside CG per scan pair.
struct N3Series {
    std::vector<long long> cumulative;  // one entry per scan pair
    std::vector<double> t_minutes;      // time of the later snapshot
};
N3Series n3_series(const Trajectory& trajectory, const Region& cg);

struct KineticsFit {
    double c = 0.0;
    double p = 0.0;
    std::optional<double> t_half_s;
    int points = 0;
};

// Log-log least squares of cumulative N3 against time (minutes); t_half is
// the earliest interpolated interval over which the series doubles.
KineticsFit kinetics_fit(const std::vector<double>& cumulative,
                         const std::vector<double>& t_minutes);

// Fits u2 of the closed form to an observed cumulative series (u1, X0(0)
// held fixed); used for the CIN comparison.
double fit_u2(const std::vector<double>& cumulative, const std::vector<double>& t_minutes,
              double u1, double x00);

struct GateGeometry {
    Coord center_a;
    Coord center_b;
    Coord midpoint;
    int radius = 3;
    bool wrote_a = false;
    bool wrote_b = false;
    long long q0_a = 0;
    long long q0_b = 0;
};

struct GateResult {
    int bit = 0;
    double mid_density = 0.0;   // e/nm^2 over the output disc
    double retention_a = 0.0;   // fraction of the initial input charge still in place
    double retention_b = 0.0;
    double density_a = 0.0;
    double density_b = 0.0;
};

// Output 1 iff the midpoint disc crosses the density bound and both written
// inputs gave up most of their charge (the composition moved, not spread).
GateResult gate_readout(const HexGrid& final_snapshot, const GateGeometry& geometry);

// Smallest period p such that the trailing snapshots repeat on the region.
std::optional<int> periodicity(const Trajectory& trajectory, const Region& region);

// Shared linear least squares helper (slope/intercept/R^2).
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n = 0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ddq

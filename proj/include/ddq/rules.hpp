#pragma once

#include <optional>
#include <vector>

#include "ddq/circuits.hpp"
#include "ddq/grid.hpp"
#include "ddq/rng.hpp"

namespace ddq {

// Pseudo positive charge: the attractor a charged cell converges toward.
struct Ppc {
    Vec2 position;       // lattice units
    int visible_charge;  // >= 1
};

struct MoveIntent {
    Coord from;
    Coord to;
    CellState moved_state = CellState::S1;
    int rule = 1;
};

struct Bridge {
    Coord a;  // a < b canonically
    Coord b;
    // Sides of the component after cutting the bridge; side_a contains a.
    std::vector<Coord> side_a;
    std::vector<Coord> side_b;
    bool mirror = false;  // state-aware point reflection through the midpoint
};

struct Group {
    std::vector<Coord> cells;  // canonical order
    Vec2 centroid;             // lattice units
    bool is_tree = false;      // acyclic contact graph: moves as a single entity
    bool encloses_pocket = false;  // annular shapes written to stay in place
    bool multi_contact = false;    // holds a >=2-cell seam (cyclic, not annular)
    std::vector<Bridge> bridges;

    bool rigid() const { return (is_tree && cells.size() >= 2) || encloses_pocket; }
};

// Per-state transport probabilities (Rule 2). A hold keeps the charge in
// place; a scatter redirects the step to a random open neighbor (thermal
// motion at 300 K); otherwise the step is the PPC-directed one. Moves onto a
// state-2 site bypass the draw entirely (lower barrier).
struct MobilityConfig {
    double hold_s1 = 0.25;
    double hold_s3 = 0.50;
    double scatter_s1 = 0.10;
    double scatter_s3 = 0.05;
    double dx_slope = 1.0;  // m(dx) = 1 + dx_slope * (dx - dx_ref), clamped at [0,1] use
    double dx_ref = 0.98;

    double modulation(double spacing) const {
        return 1.0 + dx_slope * (spacing - dx_ref);
    }
    double hold_probability(CellState s, double spacing) const {
        const double p = (s == CellState::S3 ? hold_s3 : hold_s1) * modulation(spacing);
        return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    }
    double scatter_probability(CellState s, double spacing) const {
        const double p = (s == CellState::S3 ? scatter_s3 : scatter_s1) * modulation(spacing);
        return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    }
};

// True = the charge stays this update. Target state-2 cells are never held.
bool mobility_hold(CellState state, double spacing, CellState target_state,
                   const MobilityConfig& cfg, Rng& rng);

inline constexpr int kInteractionRadius = 15;  // hex cells
inline constexpr double kOcclusionClearance = 0.5;  // lattice units

// Charge-weighted centroid of the visible charged cells within the
// interaction radius; a cell is visible when the straight segment to it
// passes no other charged cell closer than the clearance.
std::optional<Ppc> compute_ppc(const HexGrid& grid, Coord observer,
                               int radius = kInteractionRadius);

// Same attractor seen from an arbitrary continuous point, excluding a set of
// member cells (used for whole-group moves).
std::optional<Ppc> compute_ppc_from(const HexGrid& grid, Vec2 origin,
                                    const std::vector<Coord>& exclude,
                                    int radius = kInteractionRadius);

// Batch forms for the engine: the charged list is built once per update.
struct ChargedCell {
    Coord coord;
    Vec2 pos;
    int charge;
};
std::vector<ChargedCell> charged_cells(const HexGrid& grid);
std::optional<Ppc> ppc_for_cell(const std::vector<ChargedCell>& charged, Coord observer,
                                int radius = kInteractionRadius);
std::optional<Ppc> ppc_for_group(const std::vector<ChargedCell>& charged, Vec2 origin,
                                 const std::vector<Coord>& members_sorted,
                                 int radius = kInteractionRadius);

// Connected components of charged cells under 6-adjacency, with contact
// structure: bridges (single-point contacts) and seams.
std::vector<Group> detect_groups(const HexGrid& grid);

// Rule 3: each side of a mirror-symmetric single-point contact is pushed one
// step apart along the centroid axis. Returned as whole-side move sets.
struct SideMove {
    std::vector<Coord> cells;
    Coord step;  // unit hex direction
};
std::vector<SideMove> collide_rule3(const HexGrid& grid, const std::vector<Group>& groups);

// Rule 4b: seven state-2 cells in a flower decay to state 0 in two steps,
// sparing the center.
struct HexDecay {
    Coord center;
    std::vector<Coord> first;   // ring cells at even enumeration positions
    std::vector<Coord> second;  // remaining ring cells, next step
};
std::vector<HexDecay> hex_decay_rule4(const HexGrid& grid);

// Rule 6: one fusion (two adjacent S1 -> S3 + trail) or fission
// (S3 -> S1 + new S1) lowering the shape-asymmetry score.
struct Rule6Transition {
    bool fusion = false;
    Coord keep;     // fusion: cell that becomes S3; fission: the S3 -> S1 cell
    Coord partner;  // fusion: cell that becomes S2; fission: the new S1 cell
};

// Minimum cell-set mismatch against the 11 nontrivial hex point symmetries
// about the centroid (exact integer arithmetic).
int asymmetry_score(const std::vector<Coord>& cells);

std::optional<Rule6Transition> symmetrize_rule6(const HexGrid& grid, const Group& group);

}  // namespace ddq

#pragma once

#include <vector>

#include "ddq/engine.hpp"
#include "ddq/grid.hpp"
#include "ddq/pattern.hpp"
#include "ddq/rng.hpp"

namespace ddq {

// Writes the fragment at the anchor (STM encoding step).
void write_pattern(SimState& state, const Fragment& fragment, int anchor_col, int anchor_row);

// AND-gate inputs: a logical 1 is a radius-3 disc holding 35 charged cells
// (random S1/S3 mix above the 0.5 e/nm^2 density bound).
struct AndInputs {
    Fragment fragment;      // grid-sized, '.' background
    Coord center_a;
    Coord center_b;
    Coord midpoint;
    int radius = 3;
    bool wrote_a = false;
    bool wrote_b = false;
};
AndInputs make_and_inputs(bool a, bool b, int separation_cells, const HexGrid& grid,
                          Rng& rng, double s3_fraction = 0.2);

// Two concentric state-1 rings forming the tissue boundary CG.
struct TissueSpec {
    Coord center;
    int inner_lo = 6;       // inner ring band, hex distance [lo, hi]
    int inner_hi = 7;
    int outer_radius = 0;   // spiral radius of the CG region
    Region cg;              // cells inside (and including) the outer ring
    int n = 0;              // S0 + S1 count inside CG at t = 0
    int initial_s1 = 0;
    std::vector<Coord> ring_cells;        // every written S1
    std::vector<Coord> inner_ring_cells;  // fixed across population specs
};
TissueSpec make_tissue_rings(int n_target, int s1_target, const HexGrid& grid, Coord center);

Fragment tissue_fragment(const TissueSpec& spec, const HexGrid& grid);

// Mid-run STM interventions.
struct Intervention {
    enum class Kind { AddS1, DeleteS2 };
    Kind kind = Kind::AddS1;
    int count = 0;  // AddS1
    Region region;
    int at_scan = 0;
};
Event to_event(const Intervention& iv);
EventLogEntry intervention_apply(SimState& state, const Intervention& iv);

// Information packets for directed propagation.
enum class PacketMode { Gradient, Mirror };
Fragment make_packet(const Fragment& shape, PacketMode mode);

// Diffusion seed: a band of straight lines of alternating states 3 and 1.
Fragment make_diffusion_band(int width, int height);

}  // namespace ddq

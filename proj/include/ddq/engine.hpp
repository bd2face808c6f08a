#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddq/circuits.hpp"
#include "ddq/grid.hpp"
#include "ddq/pattern.hpp"
#include "ddq/rng.hpp"
#include "ddq/rules.hpp"

namespace ddq {

struct SimConfig {
    std::uint64_t seed = 1;
    double spacing_nm = 0.98;
    int micro_steps_per_scan = 10;
    double scan_period_s = 40.0;
    int interaction_radius = kInteractionRadius;
    MobilityConfig mobility;
    CircuitConfig circuits;
};

struct SimState {
    HexGrid grid;
    bool evolution_enabled = false;
    Rng rng;
    double elapsed_s = 0.0;
    std::vector<Coord> decay_pending;  // second-phase ring cells of Rule 4

    SimState(HexGrid g, const SimConfig& cfg) : grid(std::move(g)), rng(cfg.seed) {}
};

struct Snapshot {
    HexGrid grid;
    double t_seconds = 0.0;
};

struct EventLogEntry {
    int at_scan = 0;
    std::string op;
    int requested = 0;
    int applied = 0;
    bool partial = false;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;  // snapshot 0 is the post-write initial state
    std::vector<EventLogEntry> events;

    int scans() const { return static_cast<int>(snapshots.size()) - 1; }
};

struct Event {
    enum class Op { Write, Trigger, EraseAll, AddS1, DeleteS2 };
    Op op = Op::Write;
    int at_scan = 0;
    Fragment fragment;  // Write
    int anchor_col = 0;
    int anchor_row = 0;
    int count = 0;   // AddS1
    Region region;   // AddS1 / DeleteS2
};

// One update of the whole grid: circuit segmentation, per-domain rule
// application, deterministic conflict resolution, atomic commit.
void micro_step(SimState& state, const SimConfig& cfg);

// S micro-steps followed by a snapshot; reading is side-effect free.
Snapshot scan(SimState& state, const SimConfig& cfg);

void erase_all(SimState& state);
void trigger(SimState& state);

EventLogEntry apply_event(SimState& state, const Event& event);

// Interleaves scheduled events with scans. Events at scan k apply right
// after snapshot k is recorded (between scans k and k+1); snapshot 0 shows
// the initial grid after the at_scan-0 events.
Trajectory run(const HexGrid& initial, const std::vector<Event>& schedule, int n_scans,
               const SimConfig& cfg);

// Exposed for rule-level tests: converge intents for individually moving
// charged cells (Rules 1+2), before conflict resolution.
std::vector<MoveIntent> converge_intents(const HexGrid& grid, const CircuitMap& cmap,
                                         const SimConfig& cfg, Rng& rng);

}  // namespace ddq

#include "ddq/engine.hpp"

#include <algorithm>
#include <unordered_set>

#include "ddq/errors.hpp"

namespace ddq {

namespace {

struct Intent {
    int domain_rank = 0;
    int rule_rank = 0;
    Coord src_key;
    int rule = 1;
    std::vector<Coord> sources;  // canonical order
    Coord step;                  // unit hex direction applied to every source

    bool operator<(const Intent& o) const {
        if (domain_rank != o.domain_rank) return domain_rank < o.domain_rank;
        if (rule_rank != o.rule_rank) return rule_rank < o.rule_rank;
        return src_key < o.src_key;
    }
};

int rank_of_rule(const CircuitConfig& cfg, int circuit, int rule) {
    const auto& pri = cfg.priority[circuit];
    for (int i = 0; i < 6; ++i)
        if (pri[i] == rule) return i;
    return 6;
}

// Feasible step targets: first `degree` directions, in bounds, uncharged.
void feasible_neighbors(const HexGrid& grid, Coord c, int degree, std::vector<Coord>& out) {
    out.clear();
    for (int i = 0; i < degree; ++i) {
        const Coord n = c + kHexDirs[i];
        if (!grid.in_bounds(n)) continue;
        if (is_charged(grid.at_unchecked(n))) continue;
        out.push_back(n);
    }
}

// Exact distance ties between candidate steps are common on the lattice
// (attractors sit exactly on direction bisectors); resolving them by a fixed
// enumeration order injects a uniform drift, so the preference alternates
// with the cell parity.
inline bool prefer_later_on_ties(Coord cell) { return ((cell.q - cell.r) & 1) != 0; }

// Best feasible step strictly closer to the target than staying put.
std::optional<Coord> argmin_toward(const std::vector<Coord>& feasible, Coord from,
                                   Vec2 target) {
    const bool later = prefer_later_on_ties(from);
    std::optional<Coord> best;
    double best_d2 = norm2(to_cart(from) - target);
    for (const Coord& n : feasible) {
        const double d2 = norm2(to_cart(n) - target);
        if (d2 < best_d2 - 1e-12 || (later && d2 < best_d2 + 1e-12 && best)) {
            best_d2 = std::min(best_d2, d2);
            best = n;
        }
    }
    return best;
}

using CoordSet = std::unordered_set<Coord, CoordHash>;

// Rules 1+2: one proposed step per individually moving charged cell. A hold
// keeps the cell; a scatter redirects it; steps onto state 2 bypass both.
void single_intents(const HexGrid& grid, const CircuitMap& cmap, const SimConfig& cfg,
                    const std::vector<ChargedCell>& charged, Rng& rng,
                    const CoordSet& exclude, std::vector<Intent>& out) {
    std::vector<Coord> feasible;
    for (const ChargedCell& cc : charged) {
        if (exclude.count(cc.coord)) continue;
        const CellState s = grid.at_unchecked(cc.coord);
        const int circuit = cmap.circuit_at(grid, cc.coord);
        feasible_neighbors(grid, cc.coord, cfg.circuits.degree[circuit], feasible);
        if (feasible.empty()) continue;

        bool any_s2 = false;
        for (const Coord& n : feasible)
            if (grid.at_unchecked(n) == CellState::S2) any_s2 = true;

        const double spacing = grid.spacing();
        const double p_hold = cfg.mobility.hold_probability(s, spacing);
        const double p_scatter = cfg.mobility.scatter_probability(s, spacing);
        const double u = rng.uniform01();

        if (u < p_hold && !any_s2) continue;  // held; no S2 exemption possible

        const auto ppc = ppc_for_cell(charged, cc.coord, cfg.interaction_radius);
        if (!ppc) continue;  // isolated charges stay put

        const auto directed = argmin_toward(feasible, cc.coord, ppc->position);
        const bool onto_s2 =
            directed && grid.at_unchecked(*directed) == CellState::S2;
        Coord target;
        if (u < p_hold) {
            if (!onto_s2) continue;  // held after all
            target = *directed;
        } else if (u < p_hold + p_scatter && !onto_s2) {
            target = feasible[rng.below(feasible.size())];
        } else if (directed) {
            target = *directed;
        } else {
            continue;  // no step improves on staying
        }

        Intent in;
        in.domain_rank = cmap.rank_at(grid, cc.coord);
        in.rule_rank = rank_of_rule(cfg.circuits, circuit, 1);
        in.src_key = cc.coord;
        in.rule = 1;
        in.sources = {cc.coord};
        in.step = target - cc.coord;
        out.push_back(std::move(in));
    }
}

}  // namespace

std::vector<MoveIntent> converge_intents(const HexGrid& grid, const CircuitMap& cmap,
                                         const SimConfig& cfg, Rng& rng) {
    std::vector<Intent> intents;
    single_intents(grid, cmap, cfg, charged_cells(grid), rng, {}, intents);
    std::vector<MoveIntent> out;
    out.reserve(intents.size());
    for (const Intent& in : intents)
        out.push_back({in.sources[0], in.sources[0] + in.step, grid.at(in.sources[0]), 1});
    return out;
}

void micro_step(SimState& state, const SimConfig& cfg) {
    if (!state.evolution_enabled) return;
    HexGrid& grid = state.grid;

    const CircuitMap cmap = segment_domains(grid, cfg.circuits);
    const std::vector<Group> groups = detect_groups(grid);
    const std::vector<ChargedCell> charged = charged_cells(grid);

    // --- Rule 6: at most one shape-normalizing transition per group.
    CoordSet locked;
    std::vector<Rule6Transition> transitions;
    for (const Group& g : groups) {
        const auto t = symmetrize_rule6(grid, g);
        if (!t) continue;
        if (locked.count(t->keep) || locked.count(t->partner)) continue;
        locked.insert(t->keep);
        locked.insert(t->partner);
        transitions.push_back(*t);
    }

    std::vector<Intent> intents;

    // --- Rule 5: rigid groups step as one unit toward their shared PPC.
    CoordSet rigid_member;
    for (const Group& g : groups) {
        if (!g.rigid()) continue;
        for (const Coord& c : g.cells) rigid_member.insert(c);
        bool touched = false;
        for (const Coord& c : g.cells)
            if (locked.count(c)) touched = true;
        if (touched) continue;

        const auto ppc = ppc_for_group(charged, g.centroid, g.cells, cfg.interaction_radius);
        if (!ppc) continue;
        const bool later = prefer_later_on_ties(g.cells.front());
        const double d0 = norm2(g.centroid - ppc->position);
        int best = -1;
        double best_d2 = d0;
        for (int i = 0; i < 6; ++i) {
            const double d2 = norm2(g.centroid + to_cart(kHexDirs[i]) - ppc->position);
            if (d2 < best_d2 - 1e-12 || (later && d2 < best_d2 + 1e-12 && best >= 0)) {
                best_d2 = std::min(best_d2, d2);
                best = i;
            }
        }
        if (best < 0) continue;

        bool any_s3 = false;
        for (const Coord& c : g.cells)
            if (grid.at_unchecked(c) == CellState::S3) any_s3 = true;
        const double p_hold = cfg.mobility.hold_probability(
            any_s3 ? CellState::S3 : CellState::S1, grid.spacing());
        if (state.rng.uniform01() < p_hold) continue;

        Intent in;
        in.src_key = g.cells.front();
        in.domain_rank = cmap.rank_at(grid, in.src_key);
        in.rule_rank = rank_of_rule(cfg.circuits, cmap.circuit_at(grid, in.src_key), 5);
        in.rule = 5;
        in.sources = g.cells;
        in.step = kHexDirs[best];
        intents.push_back(std::move(in));
    }

    // --- Rule 3: mirror single-point contacts repel.
    for (const SideMove& sm : collide_rule3(grid, groups)) {
        bool touched = false;
        for (const Coord& c : sm.cells)
            if (locked.count(c)) touched = true;
        if (touched) continue;
        Intent in;
        in.src_key = sm.cells.front();
        in.domain_rank = cmap.rank_at(grid, in.src_key);
        in.rule_rank = rank_of_rule(cfg.circuits, cmap.circuit_at(grid, in.src_key), 3);
        in.rule = 3;
        in.sources = sm.cells;
        in.step = sm.step;
        intents.push_back(std::move(in));
    }

    // --- Rules 1+2 for everything that moves on its own.
    CoordSet exclude = locked;
    for (const Coord& c : rigid_member) exclude.insert(c);
    single_intents(grid, cmap, cfg, charged, state.rng, exclude, intents);

    // --- Resolution: commit winners by (domain rank, rule rank, source).
    std::sort(intents.begin(), intents.end());
    CoordSet consumed, claimed;
    struct Move {
        Coord from;
        Coord to;
        CellState s;
    };
    std::vector<Move> moves;
    for (const Intent& in : intents) {
        bool ok = true;
        for (const Coord& c : in.sources)
            if (consumed.count(c)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        for (const Coord& c : in.sources) {
            const Coord t = c + in.step;
            const bool internal =
                std::binary_search(in.sources.begin(), in.sources.end(), t);
            if (internal) continue;
            if (!grid.in_bounds(t) || is_charged(grid.at_unchecked(t)) ||
                locked.count(t) || claimed.count(t)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (const Coord& c : in.sources) {
            consumed.insert(c);
            claimed.insert(c + in.step);
            moves.push_back({c, c + in.step, grid.at_unchecked(c)});
        }
    }

    // --- Rule 4b: hexagonal state-2 flowers decay over two steps. Central
    // cells are never converted, even when they sit on a neighboring
    // flower's ring.
    const std::vector<HexDecay> decays = hex_decay_rule4(grid);
    CoordSet centers;
    for (const HexDecay& d : decays) centers.insert(d.center);

    // Commit phase.
    for (const Coord& c : state.decay_pending)
        if (grid.in_bounds(c) && !centers.count(c) && grid.at_unchecked(c) == CellState::S2)
            grid.set_unchecked(c, CellState::S0);
    std::vector<Coord> pending_next;
    for (const HexDecay& d : decays) {
        for (const Coord& c : d.first)
            if (!centers.count(c) && grid.at_unchecked(c) == CellState::S2)
                grid.set_unchecked(c, CellState::S0);
        for (const Coord& c : d.second)
            if (!centers.count(c)) pending_next.push_back(c);
    }
    std::sort(pending_next.begin(), pending_next.end());
    pending_next.erase(std::unique(pending_next.begin(), pending_next.end()),
                       pending_next.end());
    state.decay_pending = std::move(pending_next);

    for (const Rule6Transition& t : transitions) {
        if (t.fusion) {
            grid.set_unchecked(t.keep, CellState::S3);
            grid.set_unchecked(t.partner, CellState::S2);
        } else {
            grid.set_unchecked(t.keep, CellState::S1);
            grid.set_unchecked(t.partner, CellState::S1);
        }
    }

    CoordSet dsts;
    for (const Move& m : moves) dsts.insert(m.to);
    for (const Move& m : moves) grid.set_unchecked(m.to, m.s);
    for (const Move& m : moves)
        if (!dsts.count(m.from)) grid.set_unchecked(m.from, CellState::S2);  // trail
}

Snapshot scan(SimState& state, const SimConfig& cfg) {
    for (int i = 0; i < cfg.micro_steps_per_scan; ++i) micro_step(state, cfg);
    state.elapsed_s += cfg.scan_period_s;
    return {state.grid, state.elapsed_s};
}

void erase_all(SimState& state) { state.grid.fill(CellState::S0); }

void trigger(SimState& state) { state.evolution_enabled = true; }

EventLogEntry apply_event(SimState& state, const Event& event) {
    EventLogEntry log;
    log.at_scan = event.at_scan;
    switch (event.op) {
        case Event::Op::Write: {
            log.op = "write";
            apply_fragment(state.grid, event.fragment, event.anchor_col, event.anchor_row);
            for (const std::string& row : event.fragment.rows)
                for (char ch : row)
                    if (ch != '.') ++log.applied;
            log.requested = log.applied;
            break;
        }
        case Event::Op::Trigger:
            log.op = "trigger";
            trigger(state);
            break;
        case Event::Op::EraseAll:
            log.op = "erase_all";
            erase_all(state);
            break;
        case Event::Op::AddS1: {
            log.op = "add_s1";
            log.requested = event.count;
            std::vector<Coord> open;
            for (const Coord& c : event.region.coords)
                if (state.grid.at(c) == CellState::S0) open.push_back(c);
            const int k = std::min<int>(event.count, static_cast<int>(open.size()));
            for (int i = 0; i < k; ++i) {
                const std::size_t j = i + state.rng.below(open.size() - i);
                std::swap(open[i], open[j]);
                state.grid.set_unchecked(open[i], CellState::S1);
            }
            log.applied = k;
            log.partial = k < event.count;
            break;
        }
        case Event::Op::DeleteS2: {
            log.op = "delete_s2";
            for (const Coord& c : event.region.coords)
                if (state.grid.at(c) == CellState::S2) {
                    state.grid.set_unchecked(c, CellState::S0);
                    ++log.applied;
                }
            log.requested = log.applied;
            break;
        }
    }
    return log;
}

Trajectory run(const HexGrid& initial, const std::vector<Event>& schedule, int n_scans,
               const SimConfig& cfg) {
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i].at_scan < schedule[i - 1].at_scan)
            throw ScheduleError("schedule events must be sorted by scan index");
    for (const Event& e : schedule)
        if (e.at_scan < 0 || e.at_scan > n_scans)
            throw ScheduleError("event scan index outside the run");

    SimState state(initial, cfg);
    Trajectory traj;
    std::size_t ei = 0;
    auto apply_at = [&](int k) {
        while (ei < schedule.size() && schedule[ei].at_scan == k)
            traj.events.push_back(apply_event(state, schedule[ei++]));
    };

    apply_at(0);
    traj.snapshots.push_back({state.grid, 0.0});
    for (int k = 1; k <= n_scans; ++k) {
        traj.snapshots.push_back(scan(state, cfg));
        apply_at(k);
    }
    return traj;
}

}  // namespace ddq

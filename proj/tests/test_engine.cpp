#include <doctest.h>

#include <random>

#include "ddq/engine.hpp"
#include "ddq/errors.hpp"
#include "ddq/pattern.hpp"

using namespace ddq;

namespace {

SimConfig quiet_config() {
    SimConfig cfg;
    cfg.seed = 42;
    cfg.mobility.hold_s1 = 0.0;
    cfg.mobility.hold_s3 = 0.0;
    cfg.mobility.scatter_s1 = 0.0;
    cfg.mobility.scatter_s3 = 0.0;
    return cfg;
}

std::vector<Coord> charged_coords(const HexGrid& g) {
    std::vector<Coord> out;
    g.for_each([&](Coord c, CellState s) {
        if (is_charged(s)) out.push_back(c);
    });
    return out;
}

}  // namespace

TEST_CASE("micro step identities") {
    const SimConfig cfg = quiet_config();

    SUBCASE("all-S0 grid is a fixed point") {
        SimState st(HexGrid(24, 27, 0.98), cfg);
        st.evolution_enabled = true;
        const HexGrid before = st.grid;
        micro_step(st, cfg);
        CHECK(st.grid == before);
    }

    SUBCASE("disabled evolution freezes any content") {
        SimState st(HexGrid(24, 27, 0.98), cfg);
        st.grid.set(st.grid.coord_at(5, 5), CellState::S1);
        st.grid.set(st.grid.coord_at(9, 5), CellState::S3);
        const HexGrid before = st.grid;
        for (int i = 0; i < 5; ++i) micro_step(st, cfg);
        CHECK(st.grid == before);
    }
}

TEST_CASE("two charges converge and the engine resolves the clash") {
    const SimConfig cfg = quiet_config();
    SimState st(HexGrid(24, 27, 0.98), cfg);
    const Coord a = st.grid.coord_at(6, 12);
    const Coord b = a + Coord{6, 0};
    st.grid.set(a, CellState::S1);
    st.grid.set(b, CellState::S1);
    st.evolution_enabled = true;

    micro_step(st, cfg);
    micro_step(st, cfg);
    micro_step(st, cfg);
    const auto cells = charged_coords(st.grid);
    REQUIRE(cells.size() == 2);
    CHECK(hex_dist(cells[0], cells[1]) == 1);  // adjacent after three steps
    // movers leave a state-2 trail
    CHECK(st.grid.at(a) == CellState::S2);
    CHECK(st.grid.at(b) == CellState::S2);
    CHECK(excess_charge(st.grid) == 2);
}

TEST_CASE("asymmetric cluster fuses into a state 3") {
    const SimConfig cfg = quiet_config();
    SimState st(HexGrid(24, 27, 0.98), cfg);
    const Coord c = st.grid.coord_at(12, 13);
    for (const Coord& d : kHexDirs) st.grid.set(c + d, CellState::S1);
    st.grid.set(c + Coord{2, 0}, CellState::S1);
    st.grid.set(c + Coord{2, -1}, CellState::S1);
    const long long q0 = excess_charge(st.grid);
    st.evolution_enabled = true;

    micro_step(st, cfg);
    const StateCounts h = histogram(st.grid, full_region(st.grid));
    CHECK(h[CellState::S3] == 1);
    CHECK(excess_charge(st.grid) == q0);
}

TEST_CASE("mirror dimers oscillate through rule 3") {
    const SimConfig cfg = quiet_config();
    SimState st(HexGrid(24, 27, 0.98), cfg);
    const Coord a = st.grid.coord_at(11, 13);
    const Coord b = a + Coord{1, 0};
    st.grid.set(a, CellState::S1);
    st.grid.set(b, CellState::S1);
    st.evolution_enabled = true;

    micro_step(st, cfg);  // repulsion wins in a type-7 domain
    auto cells = charged_coords(st.grid);
    REQUIRE(cells.size() == 2);
    CHECK(hex_dist(cells[0], cells[1]) == 3);

    micro_step(st, cfg);  // attraction pulls them back
    cells = charged_coords(st.grid);
    CHECK(hex_dist(cells[0], cells[1]) == 1);
}

TEST_CASE("rigid line moves as a single entity") {
    const SimConfig cfg = quiet_config();
    SimState st(HexGrid(24, 27, 0.98), cfg);
    // alternating line, plus a heavy attractor to the east
    const Coord start = st.grid.coord_at(4, 13);
    std::vector<Coord> line;
    for (int i = 0; i < 4; ++i) {
        line.push_back(start + Coord{i, 0});
        st.grid.set(line.back(), i % 2 == 0 ? CellState::S3 : CellState::S1);
    }
    const Coord heavy = st.grid.coord_at(18, 13);
    for (const Coord& d : kHexDirs) st.grid.set(heavy + d, CellState::S3);
    st.grid.set(heavy, CellState::S3);
    st.evolution_enabled = true;

    const HexGrid before = st.grid;
    micro_step(st, cfg);
    // every line member stepped east together, preserving the pattern
    for (int i = 0; i < 4; ++i) {
        const Coord from = line[i];
        const Coord to = from + Coord{1, 0};
        CHECK(st.grid.at(to) == before.at(from));
    }
    CHECK(st.grid.at(line[0]) == CellState::S2);  // trail behind the group
}

TEST_CASE("hexagonal state-2 flower decays in two steps sparing the center") {
    const SimConfig cfg = quiet_config();
    SimState st(HexGrid(24, 27, 0.98), cfg);
    const Coord c = st.grid.coord_at(12, 13);
    st.grid.set(c, CellState::S2);
    for (const Coord& d : kHexDirs) st.grid.set(c + d, CellState::S2);
    st.evolution_enabled = true;

    micro_step(st, cfg);
    int ring_s0 = 0;
    for (const Coord& d : kHexDirs)
        if (st.grid.at(c + d) == CellState::S0) ++ring_s0;
    CHECK(ring_s0 == 3);
    CHECK(st.grid.at(c) == CellState::S2);

    micro_step(st, cfg);
    for (const Coord& d : kHexDirs) CHECK(st.grid.at(c + d) == CellState::S0);
    CHECK(st.grid.at(c) == CellState::S2);

    SUBCASE("overlapping flowers convert shared cells once") {
        SimState st2(HexGrid(24, 27, 0.98), cfg);
        const Coord c1 = st2.grid.coord_at(10, 13);
        const Coord c2 = c1 + Coord{1, 0};
        for (const Coord& cc : {c1, c2}) {
            st2.grid.set(cc, CellState::S2);
            for (const Coord& d : kHexDirs) st2.grid.set(cc + d, CellState::S2);
        }
        st2.evolution_enabled = true;
        micro_step(st2, cfg);
        micro_step(st2, cfg);
        // both rings are gone; both centers survive as S2
        CHECK(st2.grid.at(c1) == CellState::S2);
        CHECK(st2.grid.at(c2) == CellState::S2);
        int s2 = 0;
        st2.grid.for_each([&](Coord, CellState s) {
            if (s == CellState::S2) ++s2;
        });
        CHECK(s2 == 2);
    }
}

TEST_CASE("interaction radius cuts off at fifteen cells") {
    const SimConfig cfg = quiet_config();
    SimState st(HexGrid(24, 27, 0.98), cfg);
    const Coord a = st.grid.coord_at(2, 13);
    const Coord b = a + Coord{16, 0};
    st.grid.set(a, CellState::S1);
    st.grid.set(b, CellState::S1);
    st.evolution_enabled = true;
    const HexGrid before = st.grid;
    for (int i = 0; i < 10; ++i) micro_step(st, cfg);
    CHECK(st.grid == before);
}

TEST_CASE("scan timing and snapshots") {
    SimConfig cfg = quiet_config();
    cfg.micro_steps_per_scan = 10;
    SimState st(HexGrid(24, 27, 0.98), cfg);
    st.grid.set(st.grid.coord_at(5, 5), CellState::S1);

    SUBCASE("scanning a disabled state reads back the input") {
        const HexGrid before = st.grid;
        const Snapshot snap = scan(st, cfg);
        CHECK(snap.grid == before);
        CHECK(snap.t_seconds == 40.0);
    }

    SUBCASE("two scans advance eighty seconds") {
        scan(st, cfg);
        const Snapshot s2 = scan(st, cfg);
        CHECK(s2.t_seconds == 80.0);
        CHECK(st.elapsed_s == 80.0);
    }
}

TEST_CASE("erase and trigger protocol verbs") {
    const SimConfig cfg = quiet_config();
    SimState st(HexGrid(24, 27, 0.98), cfg);
    st.grid.set(st.grid.coord_at(3, 3), CellState::S3);
    st.grid.set(st.grid.coord_at(4, 3), CellState::S2);

    SUBCASE("erase resets every cell and the charge") {
        erase_all(st);
        st.grid.for_each([&](Coord, CellState s) { CHECK(s == CellState::S0); });
        CHECK(excess_charge(st.grid) == 0);
        const HexGrid once = st.grid;
        erase_all(st);
        CHECK(st.grid == once);  // idempotent
    }

    SUBCASE("trigger enables evolution without touching the grid") {
        const HexGrid before = st.grid;
        trigger(st);
        CHECK(st.evolution_enabled);
        CHECK(st.grid == before);
        trigger(st);
        CHECK(st.evolution_enabled);  // double trigger is the same
    }

    SUBCASE("triggered all-S0 grid still does nothing") {
        erase_all(st);
        trigger(st);
        const HexGrid before = st.grid;
        micro_step(st, cfg);
        CHECK(st.grid == before);
    }
}

TEST_CASE("run interleaves events and scans") {
    SimConfig cfg = quiet_config();
    cfg.micro_steps_per_scan = 4;

    SUBCASE("empty schedule on a disabled state repeats the input") {
        HexGrid initial(24, 27, 0.98);
        initial.set(initial.coord_at(7, 7), CellState::S1);
        const Trajectory traj = run(initial, {}, 5, cfg);
        REQUIRE(traj.snapshots.size() == 6);
        for (const Snapshot& s : traj.snapshots) CHECK(s.grid == initial);
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
            CHECK(traj.snapshots[k].t_seconds == doctest::Approx(40.0 * k));
    }

    SUBCASE("write, trigger, evolve") {
        HexGrid initial(24, 27, 0.98);
        Event write;
        write.op = Event::Op::Write;
        write.fragment = parse_fragment("11\n11\n");
        write.anchor_col = 10;
        write.anchor_row = 12;
        Event trig;
        trig.op = Event::Op::Trigger;
        const Trajectory traj = run(initial, {write, trig}, 10, cfg);
        REQUIRE(traj.snapshots.size() == 11);
        CHECK(excess_charge(traj.snapshots.front().grid) == 4);
        CHECK(excess_charge(traj.snapshots.back().grid) == 4);  // conservation
        // determinism: identical runs produce identical trajectories
        const Trajectory again = run(initial, {write, trig}, 10, cfg);
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
            CHECK(traj.snapshots[k].grid == again.snapshots[k].grid);
    }

    SUBCASE("write then erase ends all-S0") {
        HexGrid initial(24, 27, 0.98);
        Event write;
        write.op = Event::Op::Write;
        write.fragment = parse_fragment("333\n");
        write.anchor_col = 5;
        write.anchor_row = 5;
        Event erase;
        erase.op = Event::Op::EraseAll;
        const Trajectory traj = run(initial, {write, erase}, 1, cfg);
        traj.snapshots.back().grid.for_each(
            [&](Coord, CellState s) { CHECK(s == CellState::S0); });
    }

    SUBCASE("unsorted schedules are rejected") {
        HexGrid initial(24, 27, 0.98);
        Event late;
        late.op = Event::Op::Trigger;
        late.at_scan = 3;
        Event early;
        early.op = Event::Op::Trigger;
        early.at_scan = 1;
        CHECK_THROWS_AS(run(initial, {late, early}, 5, cfg), ScheduleError);
        Event outside;
        outside.op = Event::Op::Trigger;
        outside.at_scan = 9;
        CHECK_THROWS_AS(run(initial, {outside}, 5, cfg), ScheduleError);
    }
}

TEST_CASE("intervention events") {
    SimConfig cfg = quiet_config();
    SimState st(HexGrid(24, 27, 0.98), cfg);

    SUBCASE("add_s1 raises the charge by the applied count") {
        Event e;
        e.op = Event::Op::AddS1;
        e.count = 5;
        e.region = disc_region(st.grid, st.grid.coord_at(12, 13), 4);
        const EventLogEntry log = apply_event(st, e);
        CHECK(log.applied == 5);
        CHECK_FALSE(log.partial);
        CHECK(excess_charge(st.grid) == 5);
    }

    SUBCASE("add_s1 reports partial application") {
        Event e;
        e.op = Event::Op::AddS1;
        e.count = 9;
        e.region = disc_region(st.grid, st.grid.coord_at(12, 13), 1);  // 7 cells
        const EventLogEntry log = apply_event(st, e);
        CHECK(log.applied == 7);
        CHECK(log.partial);
    }

    SUBCASE("delete_s2 without any S2 is the identity") {
        st.grid.set(st.grid.coord_at(3, 3), CellState::S1);
        const HexGrid before = st.grid;
        Event e;
        e.op = Event::Op::DeleteS2;
        e.region = full_region(st.grid);
        const EventLogEntry log = apply_event(st, e);
        CHECK(log.applied == 0);
        CHECK(st.grid == before);
    }

    SUBCASE("delete_s2 clears trails inside the region") {
        st.grid.set(st.grid.coord_at(3, 3), CellState::S2);
        st.grid.set(st.grid.coord_at(4, 3), CellState::S2);
        st.grid.set(st.grid.coord_at(5, 3), CellState::S3);
        Event e;
        e.op = Event::Op::DeleteS2;
        e.region = full_region(st.grid);
        const EventLogEntry log = apply_event(st, e);
        CHECK(log.applied == 2);
        CHECK(st.grid.at(st.grid.coord_at(3, 3)) == CellState::S0);
        CHECK(st.grid.at(st.grid.coord_at(5, 3)) == CellState::S3);  // untouched
    }
}

TEST_CASE("conservation and per-step charge bookkeeping") {
    SimConfig cfg = quiet_config();
    cfg.mobility.hold_s1 = 0.25;
    cfg.mobility.hold_s3 = 0.50;
    cfg.mobility.scatter_s1 = 0.10;
    cfg.mobility.scatter_s3 = 0.05;
    std::mt19937 mt(55);

    for (int iter = 0; iter < 25; ++iter) {
        SimState st(HexGrid(16, 16, 0.98), cfg);
        for (int k = 0; k < 30; ++k)
            st.grid.set(st.grid.coord_at(static_cast<int>(mt() % 16),
                                         static_cast<int>(mt() % 16)),
                        static_cast<CellState>(mt() % 4));
        st.evolution_enabled = true;
        long long q = excess_charge(st.grid);
        StateCounts prev = histogram(st.grid, full_region(st.grid));
        for (int s = 0; s < 12; ++s) {
            micro_step(st, cfg);
            CHECK(excess_charge(st.grid) == q);
            const StateCounts now = histogram(st.grid, full_region(st.grid));
            const int d1 = now[CellState::S1] - prev[CellState::S1];
            const int d3 = now[CellState::S3] - prev[CellState::S3];
            // only rule 6 changes the charged-cell counts: each transition
            // trades two S1 for one S3 or back (one per group per step)
            CHECK(d1 == -2 * d3);
            prev = now;
        }
    }
}

TEST_CASE("seeded runs are bit-identical and seeds matter") {
    SimConfig cfg = quiet_config();
    cfg.mobility.hold_s1 = 0.25;
    cfg.mobility.hold_s3 = 0.50;
    cfg.mobility.scatter_s1 = 0.20;
    cfg.mobility.scatter_s3 = 0.10;
    cfg.micro_steps_per_scan = 6;

    HexGrid initial(24, 27, 0.98);
    // a cyclic blob moves cell by cell, so the scatter draws matter
    for (int i = 0; i < 4; ++i) {
        initial.set(initial.coord_at(8 + i, 13), CellState::S1);
        initial.set(initial.coord_at(8 + i, 14), CellState::S1);
    }
    initial.set(initial.coord_at(16, 13), CellState::S3);
    Event trig;
    trig.op = Event::Op::Trigger;

    const Trajectory a = run(initial, {trig}, 6, cfg);
    const Trajectory b = run(initial, {trig}, 6, cfg);
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        CHECK(a.snapshots[k].grid == b.snapshots[k].grid);

    SimConfig other = cfg;
    other.seed = 43;
    const Trajectory c = run(initial, {trig}, 6, other);
    bool differs = false;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        if (!(a.snapshots[k].grid == c.snapshots[k].grid)) differs = true;
    CHECK(differs);
}

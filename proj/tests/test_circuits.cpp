#include <doctest.h>

#include <random>

#include "ddq/circuits.hpp"
#include "ddq/errors.hpp"

using namespace ddq;

namespace {

StateCounts counts(int s0, int s1, int s2, int s3) {
    StateCounts h;
    h.counts = {s0, s1, s2, s3};
    return h;
}

HexGrid horizontal_split(CellState top, CellState bottom, int split_row) {
    HexGrid grid(24, 27, 0.98);
    grid.for_each([&](Coord c, CellState) {
        grid.set_unchecked(c, c.r < split_row ? top : bottom);
    });
    return grid;
}

}  // namespace

TEST_CASE("window classification thresholds") {
    const CircuitThresholds t;

    SUBCASE("background states in excess of 60%") {
        CHECK(classify_window(counts(14, 5, 0, 0), t) == 7);  // 74% S0
        CHECK(classify_window(counts(5, 0, 14, 0), t) == 2);  // 74% S2
    }
    SUBCASE("state 1 above half") {
        CHECK(classify_window(counts(8, 11, 0, 0), t) == 1);  // 58% S1
    }
    SUBCASE("state 3 above 30%") {
        CHECK(classify_window(counts(12, 0, 0, 7), t) == 5);  // 37% S3
    }
    SUBCASE("fallback rows") {
        CHECK(classify_window(counts(10, 9, 0, 0), t) == 4);   // 47% S1
        CHECK(classify_window(counts(9, 0, 10, 0), t) == 3);   // 53% S2
        CHECK(classify_window(counts(8, 3, 4, 4), t) == 6);    // 21% S3
        CHECK(classify_window(counts(10, 5, 2, 2), t) == 8);   // nothing dominates
    }
    SUBCASE("every histogram maps to exactly one type") {
        std::mt19937 mt(5);
        for (int i = 0; i < 2000; ++i) {
            int n[4] = {0, 0, 0, 0};
            for (int k = 0; k < 19; ++k) ++n[mt() % 4];
            const int type = classify_window(counts(n[0], n[1], n[2], n[3]), t);
            CHECK(type >= 1);
            CHECK(type <= 8);
        }
    }
    SUBCASE("one electron flips the classification") {
        // one S0 -> S1 adds a single electron and crosses the 50% line
        CHECK(classify_window(counts(10, 9, 0, 0), t) == 4);
        CHECK(classify_window(counts(9, 10, 0, 0), t) == 1);  // 10/19 = 52.6%
        // one S1 -> S3 adds a single electron and crosses the 30% line
        CHECK(classify_window(counts(8, 1, 5, 5), t) == 6);   // 26% S3
        CHECK(classify_window(counts(8, 0, 5, 6), t) == 5);   // 32% S3
    }
}

TEST_CASE("domain segmentation") {
    SUBCASE("uniform state-0 grid is one type-7 domain") {
        HexGrid grid(24, 27, 0.98);
        const CircuitMap map = segment_domains(grid);
        REQUIRE(map.domains.size() == 1);
        CHECK(map.domains[0].circuit == 7);
        CHECK(map.domains[0].region.size() == 648);
    }

    SUBCASE("horizontal S2/S0 halves give exactly two domains") {
        const HexGrid grid = horizontal_split(CellState::S2, CellState::S0, 13);
        const CircuitMap map = segment_domains(grid);
        REQUIRE(map.domains.size() == 2);
        bool saw2 = false, saw7 = false;
        for (const Domain& d : map.domains) {
            if (d.circuit == 2) saw2 = true;
            if (d.circuit == 7) saw7 = true;
        }
        CHECK(saw2);
        CHECK(saw7);
    }

    SUBCASE("a dense S1 patch on a state-0 grid becomes a type-1 domain") {
        HexGrid grid(24, 27, 0.98);
        for (const Coord& c : disc_region(grid, grid.coord_at(12, 13), 2).coords)
            grid.set(c, CellState::S1);
        const CircuitMap map = segment_domains(grid);
        CHECK(map.circuit_at(grid, grid.coord_at(12, 13)) == 1);
        bool found = false;
        for (const Domain& d : map.domains)
            if (d.circuit == 1 && d.region.contains(grid.coord_at(12, 13))) found = true;
        CHECK(found);
    }

    SUBCASE("domains partition the grid in canonical order") {
        std::mt19937 mt(17);
        HexGrid grid(24, 27, 0.98);
        grid.for_each([&](Coord c, CellState) {
            grid.set_unchecked(c, static_cast<CellState>(mt() % 4));
        });
        const CircuitMap map = segment_domains(grid);
        std::size_t total = 0;
        for (const Domain& d : map.domains) total += d.region.size();
        CHECK(total == 648);
        for (std::size_t i = 1; i < map.domains.size(); ++i)
            CHECK(map.domains[i - 1].region.size() >= map.domains[i].region.size());
        grid.for_each([&](Coord c, CellState) {
            const int rank = map.rank_at(grid, c);
            CHECK(map.domains[rank].region.contains(c));
        });
    }
}

TEST_CASE("rule priorities per circuit type") {
    const CircuitConfig cfg;
    const std::array<int, 6> rule3_first = {3, 1, 2, 4, 5, 6};
    const std::array<int, 6> rule1_first = {1, 2, 3, 4, 5, 6};

    CHECK(rule_priority(5, cfg) == rule3_first);
    CHECK(rule_priority(7, cfg) == rule3_first);
    CHECK(rule_priority(1, cfg) == rule3_first);
    CHECK(rule_priority(2, cfg) == rule1_first);
    CHECK(rule_priority(4, cfg) == rule1_first);
    CHECK_THROWS_AS(rule_priority(0, cfg), ConfigError);
    CHECK_THROWS_AS(rule_priority(9, cfg), ConfigError);
}

TEST_CASE("voronoi generators") {
    SUBCASE("single uncharged domain uses the geometric centroid") {
        HexGrid grid(24, 27, 0.98);
        const CircuitMap map = segment_domains(grid);
        const auto points = voronoi_generators(grid, map);
        REQUIRE(points.size() == 1);
        Vec2 acc{0, 0};
        grid.for_each([&](Coord c, CellState) { acc = acc + to_cart(c); });
        CHECK(points[0].position_nm.x == doctest::Approx(0.98 * acc.x / 648));
        CHECK(points[0].position_nm.y == doctest::Approx(0.98 * acc.y / 648));
    }

    SUBCASE("two half domains give mirror-symmetric generators") {
        const HexGrid grid = horizontal_split(CellState::S2, CellState::S0, 13);
        const CircuitMap map = segment_domains(grid);
        REQUIRE(map.domains.size() == 2);
        const auto points = voronoi_generators(grid, map);
        const double mid = 0.98 * 0.8660254 * 13.0;
        CHECK((points[0].position_nm.y + points[1].position_nm.y) / 2 ==
              doctest::Approx(mid).epsilon(0.02));
    }

    SUBCASE("generator equals the brute-force member mean") {
        HexGrid grid(24, 27, 0.98);
        grid.for_each([&](Coord c, CellState) {
            grid.set_unchecked(c, c.r < 9 ? CellState::S2 : CellState::S0);
        });
        const CircuitMap map = segment_domains(grid);
        const auto points = voronoi_generators(grid, map);
        for (const VoronoiPoint& p : points) {
            const Domain& d = map.domains[p.domain];
            Vec2 acc{0, 0};
            for (const Coord& c : d.region.coords) acc = acc + to_cart(c);
            CHECK(p.position_nm.x ==
                  doctest::Approx(0.98 * acc.x / d.region.size()).epsilon(1e-9));
            CHECK(p.position_nm.y ==
                  doctest::Approx(0.98 * acc.y / d.region.size()).epsilon(1e-9));
        }
    }

    SUBCASE("charged domains weight the centroid by charge") {
        HexGrid grid(24, 27, 0.98);
        grid.set(grid.coord_at(4, 13), CellState::S1);
        grid.set(grid.coord_at(6, 13), CellState::S3);
        const CircuitMap map = segment_domains(grid);
        const auto points = voronoi_generators(grid, map);
        REQUIRE(points.size() == 1);
        const Vec2 a = to_cart(grid.coord_at(4, 13));
        const Vec2 b = to_cart(grid.coord_at(6, 13));
        CHECK(points[0].position_nm.x ==
              doctest::Approx(0.98 * (a.x + 2 * b.x) / 3).epsilon(1e-9));
    }
}

TEST_CASE("voronoi boundary check") {
    SUBCASE("equal half domains with centered generators stay under one spacing") {
        HexGrid grid(24, 26, 0.98);  // even height: the halves match exactly
        grid.for_each([&](Coord c, CellState) {
            grid.set_unchecked(c, c.r < 13 ? CellState::S2 : CellState::S0);
        });
        const CircuitMap map = segment_domains(grid);
        REQUIRE(map.domains.size() == 2);
        const auto points = voronoi_generators(grid, map);
        const VoronoiReport rep = voronoi_check(grid, map, points);
        REQUIRE(rep.applicable);
        CHECK(rep.boundary_cells > 0);
        CHECK(rep.max_asymmetry <= 1.0);
    }

    SUBCASE("nearest-generator partitions bound the boundary asymmetry") {
        // A boundary cell sits within one step of the bisector, so the
        // difference of generator distances stays below two spacings.
        HexGrid grid(24, 27, 0.98);
        std::mt19937 mt(23);
        for (int iter = 0; iter < 25; ++iter) {
            Coord g0 = grid.coord_at(static_cast<int>(mt() % 24), static_cast<int>(mt() % 27));
            Coord g1 = grid.coord_at(static_cast<int>(mt() % 24), static_cast<int>(mt() % 27));
            Coord g2 = grid.coord_at(static_cast<int>(mt() % 24), static_cast<int>(mt() % 27));
            if (hex_dist(g0, g1) < 6 || hex_dist(g1, g2) < 6 || hex_dist(g0, g2) < 6)
                continue;
            const Vec2 gens[3] = {to_cart(g0), to_cart(g1), to_cart(g2)};
            CircuitMap map;
            map.width = grid.width();
            map.height = grid.height();
            map.circuit.assign(648, 1);
            map.domain_rank.assign(648, 0);
            std::array<std::vector<Coord>, 3> members;
            grid.for_each([&](Coord c, CellState) {
                int best = 0;
                double bd = norm2(to_cart(c) - gens[0]);
                for (int g = 1; g < 3; ++g) {
                    const double d = norm2(to_cart(c) - gens[g]);
                    if (d < bd) {
                        bd = d;
                        best = g;
                    }
                }
                map.domain_rank[grid.index(c)] = best;
                members[best].push_back(c);
            });
            std::vector<VoronoiPoint> points;
            for (int g = 0; g < 3; ++g) {
                if (members[g].empty()) continue;
                map.domains.push_back({1, Region::of(members[g]), 0.0});
                points.push_back({{0.98 * gens[g].x, 0.98 * gens[g].y}, g});
            }
            if (points.size() < 2) continue;
            const VoronoiReport rep = voronoi_check(grid, map, points);
            REQUIRE(rep.applicable);
            CHECK(rep.max_asymmetry <= 2.0);
            CHECK(rep.mean_asymmetry <= 1.0);
        }
    }

    SUBCASE("single domain is not applicable") {
        HexGrid grid(24, 27, 0.98);
        const CircuitMap map = segment_domains(grid);
        const auto points = voronoi_generators(grid, map);
        const VoronoiReport rep = voronoi_check(grid, map, points);
        CHECK_FALSE(rep.applicable);
    }
}

#include "ddq/circuits.hpp"

#include <algorithm>
#include <limits>

#include "ddq/errors.hpp"

namespace ddq {

int classify_window(const StateCounts& hist, const CircuitThresholds& t) {
    const int total = hist.total();
    if (total <= 0) throw GeometryError("empty classification window");
    const double n = static_cast<double>(total);
    const double f0 = hist[CellState::S0] / n;
    const double f1 = hist[CellState::S1] / n;
    const double f2 = hist[CellState::S2] / n;
    const double f3 = hist[CellState::S3] / n;

    if (f3 > t.s3_type5) return 5;
    if (f1 > t.s1_type1) return 1;
    if (f2 >= t.s2_type2) return 2;
    if (f0 >= t.s0_type7) return 7;
    if (f1 > t.s1_type4_lo && f1 <= t.s1_type4_hi) return 4;
    if (f2 >= t.s2_type3_lo && f2 < t.s2_type3_hi) return 3;
    if (f3 > t.s3_type6_lo && f3 <= t.s3_type6_hi) return 6;
    return 8;
}

namespace {

StateCounts window_histogram(const HexGrid& grid, Coord center, int radius) {
    StateCounts h;
    for (int dr = -radius; dr <= radius; ++dr) {
        for (int dq = -radius; dq <= radius; ++dq) {
            if (std::abs(dq + dr) > radius) continue;
            const Coord c = center + Coord{dq, dr};
            if (grid.in_bounds(c)) ++h.counts[static_cast<int>(grid.at_unchecked(c))];
        }
    }
    return h;
}

}  // namespace

CircuitMap segment_domains(const HexGrid& grid, const CircuitConfig& cfg) {
    CircuitMap map;
    map.width = grid.width();
    map.height = grid.height();
    map.circuit.assign(static_cast<std::size_t>(grid.cell_count()), 0);
    map.domain_rank.assign(static_cast<std::size_t>(grid.cell_count()), 0);

    grid.for_each([&](Coord c, CellState) {
        map.circuit[grid.index(c)] =
            classify_window(window_histogram(grid, c, cfg.window_radius), cfg.thresholds);
    });

    // Connected components of equal circuit id; scan in canonical order so the
    // discovery order is deterministic.
    std::vector<int> comp(static_cast<std::size_t>(grid.cell_count()), -1);
    std::vector<Domain> domains;
    std::vector<Coord> stack;
    for (int row = 0; row < grid.height(); ++row) {
        for (int col = 0; col < grid.width(); ++col) {
            const Coord seed = axial_from_offset(col, row);
            if (comp[grid.index(seed)] >= 0) continue;
            const int id = static_cast<int>(domains.size());
            const int type = map.circuit[grid.index(seed)];
            std::vector<Coord> members;
            stack.push_back(seed);
            comp[grid.index(seed)] = id;
            while (!stack.empty()) {
                const Coord c = stack.back();
                stack.pop_back();
                members.push_back(c);
                for (const Coord& d : kHexDirs) {
                    const Coord n = c + d;
                    if (!grid.in_bounds(n)) continue;
                    if (comp[grid.index(n)] >= 0) continue;
                    if (map.circuit[grid.index(n)] != type) continue;
                    comp[grid.index(n)] = id;
                    stack.push_back(n);
                }
            }
            Domain dom;
            dom.circuit = type;
            dom.region = Region::of(std::move(members));
            dom.area_nm2 = dom.region.area_nm2(grid);
            domains.push_back(std::move(dom));
        }
    }

    // Canonical ordering: area descending, ties by smallest member.
    std::vector<int> order(domains.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (domains[a].region.size() != domains[b].region.size())
            return domains[a].region.size() > domains[b].region.size();
        return domains[a].region.coords.front() < domains[b].region.coords.front();
    });
    std::vector<int> rank_of(domains.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank_of[order[r]] = static_cast<int>(r);

    map.domains.resize(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i)
        map.domains[rank_of[i]] = std::move(domains[i]);
    for (int i = 0; i < grid.cell_count(); ++i) map.domain_rank[i] = rank_of[comp[i]];
    return map;
}

const std::array<int, 6>& rule_priority(int circuit_type, const CircuitConfig& cfg) {
    if (circuit_type < 1 || circuit_type > 8)
        throw ConfigError("unknown circuit type");
    return cfg.priority[circuit_type];
}

std::vector<VoronoiPoint> voronoi_generators(const HexGrid& grid, const CircuitMap& map) {
    if (map.domains.empty()) throw GeometryError("no domains");
    std::vector<VoronoiPoint> points;
    points.reserve(map.domains.size());
    for (std::size_t i = 0; i < map.domains.size(); ++i) {
        const Domain& dom = map.domains[i];
        double wsum = 0.0;
        Vec2 acc{0.0, 0.0};
        long long q = 0;
        for (const Coord& c : dom.region.coords) q += charge_of(grid.at(c));
        for (const Coord& c : dom.region.coords) {
            const double w = q > 0 ? static_cast<double>(charge_of(grid.at(c))) : 1.0;
            acc = acc + w * to_cart(c);
            wsum += w;
        }
        points.push_back({{grid.spacing() * acc.x / wsum, grid.spacing() * acc.y / wsum},
                          static_cast<int>(i)});
    }
    return points;
}

VoronoiReport voronoi_check(const HexGrid& grid, const CircuitMap& map,
                            const std::vector<VoronoiPoint>& points) {
    VoronoiReport report;
    if (map.domains.size() < 2 || points.size() < 2) return report;
    report.applicable = true;

    double sum = 0.0;
    grid.for_each([&](Coord c, CellState) {
        const int dom = map.domain_rank[grid.index(c)];
        bool boundary = false;
        for (const Coord& d : kHexDirs) {
            const Coord n = c + d;
            if (grid.in_bounds(n) && map.domain_rank[grid.index(n)] != dom) {
                boundary = true;
                break;
            }
        }
        if (!boundary) return;
        const Vec2 p{grid.spacing() * to_cart(c).x, grid.spacing() * to_cart(c).y};
        double d1 = std::numeric_limits<double>::max();
        double d2 = std::numeric_limits<double>::max();
        for (const VoronoiPoint& g : points) {
            const double d = norm(p - g.position_nm);
            if (d < d1) {
                d2 = d1;
                d1 = d;
            } else if (d < d2) {
                d2 = d;
            }
        }
        const double asym = (d2 - d1) / grid.spacing();
        report.max_asymmetry = std::max(report.max_asymmetry, asym);
        sum += asym;
        ++report.boundary_cells;
    });
    if (report.boundary_cells > 0) report.mean_asymmetry = sum / report.boundary_cells;
    return report;
}

}  // namespace ddq

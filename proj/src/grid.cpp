#include "ddq/grid.hpp"

#include <algorithm>

namespace ddq {

std::vector<Coord> neighbors(Coord c, int degree, const HexGrid& grid) {
    if (degree < 2 || degree > 6)
        throw CoordinateError("neighborhood degree must be in [2,6]");
    if (!grid.in_bounds(c)) throw CoordinateError("coordinate out of bounds");
    std::vector<Coord> out;
    out.reserve(degree);
    for (int i = 0; i < degree; ++i) {
        const Coord n = c + kHexDirs[i];
        if (grid.in_bounds(n)) out.push_back(n);
    }
    return out;
}

Region Region::of(std::vector<Coord> cs) {
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    return Region{std::move(cs)};
}

bool Region::contains(Coord c) const {
    return std::binary_search(coords.begin(), coords.end(), c);
}

Region full_region(const HexGrid& grid) { return Region{grid.all_cells()}; }

Region disc_region(const HexGrid& grid, Coord center, int radius) {
    std::vector<Coord> cs;
    for (int dr = -radius; dr <= radius; ++dr) {
        for (int dq = -radius; dq <= radius; ++dq) {
            if (std::abs(dq + dr) > radius) continue;
            const Coord c = center + Coord{dq, dr};
            if (grid.in_bounds(c)) cs.push_back(c);
        }
    }
    return Region::of(std::move(cs));
}

long long excess_charge(const HexGrid& grid, const Region& region) {
    long long q = 0;
    for (const Coord& c : region.coords) q += charge_of(grid.at(c));
    return q;
}

long long excess_charge(const HexGrid& grid) {
    long long q = 0;
    grid.for_each([&](Coord, CellState s) { q += charge_of(s); });
    return q;
}

double charge_density(const HexGrid& grid, const Region& region) {
    if (region.empty()) throw GeometryError("charge density of an empty region");
    return static_cast<double>(excess_charge(grid, region)) / region.area_nm2(grid);
}

StateCounts histogram(const HexGrid& grid, const Region& region) {
    StateCounts h;
    for (const Coord& c : region.coords) ++h.counts[static_cast<int>(grid.at(c))];
    return h;
}

}  // namespace ddq

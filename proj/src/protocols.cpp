#include "ddq/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "ddq/errors.hpp"

namespace ddq {

void write_pattern(SimState& state, const Fragment& fragment, int anchor_col, int anchor_row) {
    apply_fragment(state.grid, fragment, anchor_col, anchor_row);
}

namespace {

Fragment blank_fragment(const HexGrid& grid) {
    Fragment f;
    f.rows.assign(grid.height(), std::string(grid.width(), '.'));
    return f;
}

void put(Fragment& f, Coord c, char ch) { f.rows[c.r][offset_col(c)] = ch; }

void fill_disc(Fragment& f, const HexGrid& grid, Coord center, int radius, Rng& rng,
               double s3_fraction) {
    std::vector<Coord> cells = disc_region(grid, center, radius).coords;
    if (static_cast<int>(cells.size()) != 3 * radius * (radius + 1) + 1)
        throw GeometryError("gate input disc clipped by the grid boundary");
    rng.shuffle(cells);
    const int charged = 35;
    for (int i = 0; i < charged; ++i)
        put(f, cells[i], rng.uniform01() < s3_fraction ? '3' : '1');
}

}  // namespace

AndInputs make_and_inputs(bool a, bool b, int separation_cells, const HexGrid& grid,
                          Rng& rng, double s3_fraction) {
    if (separation_cells < 6 || separation_cells > 15)
        throw GeometryError("gate input separation must be in [6, 15] cells");
    AndInputs out;
    out.fragment = blank_fragment(grid);
    const int mid_row = grid.height() / 2;
    const int mid_col = grid.width() / 2;
    out.midpoint = grid.coord_at(mid_col, mid_row);
    out.center_a = grid.coord_at(mid_col - (separation_cells + 1) / 2, mid_row);
    out.center_b = grid.coord_at(mid_col + separation_cells / 2, mid_row);
    out.wrote_a = a;
    out.wrote_b = b;
    if (a) fill_disc(out.fragment, grid, out.center_a, out.radius, rng, s3_fraction);
    if (b) fill_disc(out.fragment, grid, out.center_b, out.radius, rng, s3_fraction);
    return out;
}

namespace {

// Canonical spiral order: distance from the center, then angle from east
// (counter-clockwise), then row/column.
std::vector<Coord> spiral_order(const HexGrid& grid, Coord center) {
    struct Key {
        int dist;
        double angle;
        Coord c;
    };
    std::vector<Key> keys;
    keys.reserve(grid.cell_count());
    const Vec2 origin = to_cart(center);
    grid.for_each([&](Coord c, CellState) {
        const Vec2 d = to_cart(c) - origin;
        double ang = std::atan2(-d.y, d.x);  // rows grow downward
        if (ang < 0) ang += 6.283185307179586;
        keys.push_back({hex_dist(c, center), ang, c});
    });
    std::sort(keys.begin(), keys.end(), [](const Key& x, const Key& y) {
        if (x.dist != y.dist) return x.dist < y.dist;
        if (x.angle != y.angle) return x.angle < y.angle;
        return x.c < y.c;
    });
    std::vector<Coord> out;
    out.reserve(keys.size());
    for (const Key& k : keys) out.push_back(k.c);
    return out;
}

// Evenly spread selection of `need` cells from an angle-sorted layer.
std::vector<Coord> spread_select(const std::vector<Coord>& layer, int need) {
    std::vector<Coord> out;
    const int m = static_cast<int>(layer.size());
    for (int i = 0; i < need; ++i)
        out.push_back(layer[static_cast<std::size_t>(i) * m / need]);
    return out;
}

std::vector<Coord> sort_by_angle(std::vector<Coord> cells, Coord center) {
    const Vec2 origin = to_cart(center);
    std::sort(cells.begin(), cells.end(), [&](Coord a, Coord b) {
        const Vec2 da = to_cart(a) - origin;
        const Vec2 db = to_cart(b) - origin;
        double aa = std::atan2(-da.y, da.x);
        double ab = std::atan2(-db.y, db.x);
        if (aa < 0) aa += 6.283185307179586;
        if (ab < 0) ab += 6.283185307179586;
        if (aa != ab) return aa < ab;
        return a < b;
    });
    return cells;
}

}  // namespace

TissueSpec make_tissue_rings(int n_target, int s1_target, const HexGrid& grid, Coord center) {
    TissueSpec spec;
    spec.center = center;
    if (n_target > grid.cell_count())
        throw GeometryError("tissue population exceeds the grid");

    const std::vector<Coord> spiral = spiral_order(grid, center);
    std::vector<Coord> region_cells(spiral.begin(), spiral.begin() + n_target);
    spec.cg = Region::of(region_cells);
    spec.outer_radius = hex_dist(spiral[n_target - 1], center);
    spec.n = n_target;

    // Inner ring band, identical for every population spec.
    for (const Coord& c : spec.cg.coords) {
        const int d = hex_dist(c, center);
        if (d >= spec.inner_lo && d <= spec.inner_hi) spec.inner_ring_cells.push_back(c);
    }
    std::sort(spec.inner_ring_cells.begin(), spec.inner_ring_cells.end());
    if (spec.outer_radius <= spec.inner_hi + 1)
        throw GeometryError("tissue population too small: rings would touch");

    // Outer ring: the CG boundary, thickened inward until the count is met.
    std::unordered_set<Coord, CoordHash> in_region(spec.cg.coords.begin(),
                                                   spec.cg.coords.end());
    auto in_region_neighbors = [&](Coord c) {
        int k = 0;
        for (const Coord& d : kHexDirs)
            if (in_region.count(c + d)) ++k;
        return k;
    };
    std::vector<Coord> boundary, second;
    for (const Coord& c : spec.cg.coords) {
        const int d = hex_dist(c, center);
        if (d <= spec.inner_hi) continue;
        if (in_region_neighbors(c) < 6) boundary.push_back(c);
    }
    std::unordered_set<Coord, CoordHash> in_boundary(boundary.begin(), boundary.end());
    for (const Coord& c : spec.cg.coords) {
        const int d = hex_dist(c, center);
        if (d <= spec.inner_hi || in_boundary.count(c)) continue;
        bool adj = false;
        for (const Coord& dd : kHexDirs)
            if (in_boundary.count(c + dd)) adj = true;
        if (adj) second.push_back(c);
    }

    const int inner_n = static_cast<int>(spec.inner_ring_cells.size());
    const int need = s1_target - inner_n;
    if (need < static_cast<int>(boundary.size()))
        throw GeometryError("initial state-1 count too small to close the outer ring");
    if (need > static_cast<int>(boundary.size() + second.size()))
        throw GeometryError("initial state-1 count exceeds the ring capacity");

    spec.ring_cells = spec.inner_ring_cells;
    for (const Coord& c : boundary) spec.ring_cells.push_back(c);
    const int extra = need - static_cast<int>(boundary.size());
    if (extra > 0)
        for (const Coord& c : spread_select(sort_by_angle(second, center), extra))
            spec.ring_cells.push_back(c);
    std::sort(spec.ring_cells.begin(), spec.ring_cells.end());
    spec.initial_s1 = static_cast<int>(spec.ring_cells.size());
    return spec;
}

Fragment tissue_fragment(const TissueSpec& spec, const HexGrid& grid) {
    Fragment f = blank_fragment(grid);
    for (const Coord& c : spec.ring_cells) put(f, c, '1');
    return f;
}

Event to_event(const Intervention& iv) {
    Event e;
    e.at_scan = iv.at_scan;
    e.region = iv.region;
    if (iv.kind == Intervention::Kind::AddS1) {
        e.op = Event::Op::AddS1;
        e.count = iv.count;
    } else {
        e.op = Event::Op::DeleteS2;
    }
    return e;
}

EventLogEntry intervention_apply(SimState& state, const Intervention& iv) {
    return apply_event(state, to_event(iv));
}

namespace {

struct PacketCell {
    Coord c;
    char state;
};

std::vector<PacketCell> fragment_cells(const Fragment& shape) {
    std::vector<PacketCell> out;
    for (int r = 0; r < shape.height(); ++r)
        for (int col = 0; col < shape.width(); ++col) {
            const char ch = shape.rows[r][col];
            if (ch != '.') out.push_back({axial_from_offset(col, r), ch});
        }
    if (out.empty()) throw GeometryError("empty packet shape");
    return out;
}

Fragment cells_to_fragment(const std::vector<PacketCell>& cells) {
    int min_r = cells[0].c.r, max_r = cells[0].c.r;
    int min_c = offset_col(cells[0].c), max_c = offset_col(cells[0].c);
    for (const PacketCell& pc : cells) {
        min_r = std::min(min_r, pc.c.r);
        max_r = std::max(max_r, pc.c.r);
        min_c = std::min(min_c, offset_col(pc.c));
        max_c = std::max(max_c, offset_col(pc.c));
    }
    // Keep the row parity of the original coordinates so the axial layout is
    // preserved when the fragment is re-anchored on an even row.
    if (min_r & 1) --min_r;
    Fragment f;
    f.rows.assign(max_r - min_r + 1, std::string(max_c - min_c + 1, '.'));
    for (const PacketCell& pc : cells)
        f.rows[pc.c.r - min_r][offset_col(pc.c) - min_c] = pc.state;
    return f;
}

}  // namespace

Fragment make_packet(const Fragment& shape, PacketMode mode) {
    std::vector<PacketCell> cells = fragment_cells(shape);

    if (mode == PacketMode::Mirror) {
        // Reflect through the midpoint of the leading east edge; the copy
        // shares exactly that one adjacency.
        Coord lead = cells[0].c;
        double best_x = to_cart(lead).x;
        for (const PacketCell& pc : cells) {
            const double x = to_cart(pc.c).x;
            if (x > best_x + 1e-12) {
                best_x = x;
                lead = pc.c;
            }
        }
        const Coord m2 = lead + (lead + kHexDirs[0]);  // twice the edge midpoint
        std::unordered_set<Coord, CoordHash> original;
        for (const PacketCell& pc : cells) original.insert(pc.c);
        std::vector<PacketCell> image;
        for (const PacketCell& pc : cells) {
            const Coord ic = m2 - pc.c;
            if (original.count(ic)) throw GeometryError("mirror image overlaps the packet");
            image.push_back({ic, pc.state});
        }
        int contacts = 0;
        std::unordered_set<Coord, CoordHash> image_set;
        for (const PacketCell& pc : image) image_set.insert(pc.c);
        for (const Coord& c : original)
            for (const Coord& d : kHexDirs)
                if (image_set.count(c + d)) ++contacts;
        if (contacts != 1)
            throw GeometryError("mirror contact is not a single adjacency");
        for (const PacketCell& pc : image) cells.push_back(pc);
        return cells_to_fragment(cells);
    }

    // Gradient mode: a dense all-S3 tail on the west side drives the packet.
    int min_c = offset_col(cells[0].c), min_r = cells[0].c.r, max_r = cells[0].c.r;
    for (const PacketCell& pc : cells) {
        min_c = std::min(min_c, offset_col(pc.c));
        min_r = std::min(min_r, pc.c.r);
        max_r = std::max(max_r, pc.c.r);
    }
    for (int r = min_r; r <= max_r; ++r)
        for (int col = min_c - 2; col <= min_c - 1; ++col)
            cells.push_back({axial_from_offset(col, r), '3'});
    return cells_to_fragment(cells);
}

Fragment make_diffusion_band(int width, int height) {
    if (width <= 0 || height <= 0) throw GeometryError("empty diffusion band");
    Fragment f;
    f.rows.assign(height, std::string(width, '.'));
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            f.rows[r][c] = ((c + r) % 2 == 0) ? '3' : '1';
    return f;
}

}  // namespace ddq

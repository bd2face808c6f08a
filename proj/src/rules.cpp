#include "ddq/rules.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "ddq/errors.hpp"

namespace ddq {

bool mobility_hold(CellState state, double spacing, CellState target_state,
                   const MobilityConfig& cfg, Rng& rng) {
    if (!is_charged(state)) throw std::invalid_argument("mobility of an uncharged state");
    if (target_state == CellState::S2) return false;  // lower barrier, never held
    return rng.uniform01() < cfg.hold_probability(state, spacing);
}

std::vector<ChargedCell> charged_cells(const HexGrid& grid) {
    std::vector<ChargedCell> out;
    grid.for_each([&](Coord c, CellState s) {
        if (is_charged(s)) out.push_back({c, to_cart(c), charge_of(s)});
    });
    return out;
}

namespace {

template <typename Candidate, typename Excluded>
std::optional<Ppc> ppc_impl(const std::vector<ChargedCell>& charged, Vec2 origin,
                            int radius, Candidate&& is_candidate, Excluded&& is_excluded) {
    struct Entry {
        double d2;
        const ChargedCell* cell;
        bool candidate;
    };
    const double occl_r2 = (radius + 0.5) * (radius + 0.5);
    std::vector<Entry> entries;
    entries.reserve(charged.size());
    for (const ChargedCell& cc : charged) {
        if (is_excluded(cc)) continue;
        const double d2 = norm2(cc.pos - origin);
        if (d2 > occl_r2) continue;
        entries.push_back({d2, &cc, is_candidate(cc)});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        return a.cell->coord < b.cell->coord;
    });

    double wsum = 0.0;
    Vec2 acc{0.0, 0.0};
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!entries[i].candidate) continue;
        // Occluders are always strictly closer than the candidate (cells are
        // at least one lattice unit apart), so the sorted prefix suffices.
        bool blocked = false;
        for (std::size_t j = 0; j < i; ++j) {
            if (entries[j].d2 >= entries[i].d2) break;
            if (point_segment_dist2(entries[j].cell->pos, origin, entries[i].cell->pos) <
                kOcclusionClearance * kOcclusionClearance) {
                blocked = true;
                break;
            }
        }
        if (blocked) continue;
        const double w = entries[i].cell->charge;
        acc = acc + w * entries[i].cell->pos;
        wsum += w;
    }
    if (wsum <= 0.0) return std::nullopt;
    return Ppc{{acc.x / wsum, acc.y / wsum}, static_cast<int>(wsum)};
}

}  // namespace

std::optional<Ppc> ppc_for_cell(const std::vector<ChargedCell>& charged, Coord observer,
                                int radius) {
    const Vec2 origin = to_cart(observer);
    return ppc_impl(
        charged, origin, radius,
        [&](const ChargedCell& cc) { return hex_dist(cc.coord, observer) <= radius; },
        [&](const ChargedCell& cc) { return cc.coord == observer; });
}

std::optional<Ppc> ppc_for_group(const std::vector<ChargedCell>& charged, Vec2 origin,
                                 const std::vector<Coord>& members_sorted, int radius) {
    const double r2 = static_cast<double>(radius) * radius;
    return ppc_impl(
        charged, origin, radius,
        [&](const ChargedCell& cc) { return norm2(cc.pos - origin) <= r2; },
        [&](const ChargedCell& cc) {
            return std::binary_search(members_sorted.begin(), members_sorted.end(), cc.coord);
        });
}

std::optional<Ppc> compute_ppc(const HexGrid& grid, Coord observer, int radius) {
    if (!grid.in_bounds(observer)) throw CoordinateError("observer out of bounds");
    if (!is_charged(grid.at(observer)))
        throw std::invalid_argument("PPC observer must hold state 1 or 3");
    return ppc_for_cell(charged_cells(grid), observer, radius);
}

std::optional<Ppc> compute_ppc_from(const HexGrid& grid, Vec2 origin,
                                    const std::vector<Coord>& exclude, int radius) {
    std::vector<Coord> members = exclude;
    std::sort(members.begin(), members.end());
    return ppc_for_group(charged_cells(grid), origin, members, radius);
}

namespace {

// Iterative bridge finding (the contact graph is tiny but recursion depth is
// unbounded on long chains).
struct BridgeFinder {
    const std::vector<std::vector<int>>& adj;
    std::vector<int> tin, low;
    std::vector<std::pair<int, int>> bridges;
    int timer = 0;

    explicit BridgeFinder(const std::vector<std::vector<int>>& a)
        : adj(a), tin(a.size(), -1), low(a.size(), -1) {}

    void run(int root) {
        struct Frame {
            int v;
            int parent;
            std::size_t next = 0;
        };
        std::vector<Frame> stack;
        stack.push_back({root, -1});
        tin[root] = low[root] = timer++;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < adj[f.v].size()) {
                const int to = adj[f.v][f.next++];
                if (to == f.parent) continue;
                if (tin[to] >= 0) {
                    low[f.v] = std::min(low[f.v], tin[to]);
                } else {
                    tin[to] = low[to] = timer++;
                    stack.push_back({to, f.v});
                }
            } else {
                const int v = f.v;
                const int p = f.parent;
                stack.pop_back();
                if (p >= 0) {
                    low[p] = std::min(low[p], low[v]);
                    if (low[v] > tin[p]) bridges.emplace_back(p, v);
                }
            }
        }
    }
};

}  // namespace

std::vector<Group> detect_groups(const HexGrid& grid) {
    std::vector<Coord> coords;
    grid.for_each([&](Coord c, CellState s) {
        if (is_charged(s)) coords.push_back(c);
    });
    std::unordered_map<Coord, int, CoordHash> idx;
    for (std::size_t i = 0; i < coords.size(); ++i) idx[coords[i]] = static_cast<int>(i);

    std::vector<std::vector<int>> adj(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        for (const Coord& d : kHexDirs) {
            auto it = idx.find(coords[i] + d);
            if (it != idx.end()) adj[i].push_back(it->second);
        }
    }

    // Components.
    std::vector<int> comp(coords.size(), -1);
    int ncomp = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (comp[i] >= 0) continue;
        std::vector<int> stack{static_cast<int>(i)};
        comp[i] = ncomp;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int to : adj[v])
                if (comp[to] < 0) {
                    comp[to] = ncomp;
                    stack.push_back(to);
                }
        }
        ++ncomp;
    }

    // Pockets: uncharged cells not reachable from the grid border. Annular
    // shapes (rings enclosing at least a unit-cell-sized pocket) are written
    // to stay in place and are treated as rigid.
    std::vector<int> pocket_comp(static_cast<std::size_t>(grid.cell_count()), -2);
    {
        std::vector<Coord> stack;
        grid.for_each([&](Coord c, CellState s) {
            if (is_charged(s)) {
                pocket_comp[grid.index(c)] = -3;  // wall
                return;
            }
            const int col = offset_col(c);
            if (c.r == 0 || c.r == grid.height() - 1 || col == 0 || col == grid.width() - 1) {
                if (pocket_comp[grid.index(c)] == -2) {
                    pocket_comp[grid.index(c)] = -1;  // outside
                    stack.push_back(c);
                }
            }
        });
        while (!stack.empty()) {
            const Coord c = stack.back();
            stack.pop_back();
            for (const Coord& d : kHexDirs) {
                const Coord n = c + d;
                if (!grid.in_bounds(n)) continue;
                if (pocket_comp[grid.index(n)] != -2) continue;
                pocket_comp[grid.index(n)] = -1;
                stack.push_back(n);
            }
        }
    }
    // Label remaining pockets and their sizes.
    std::vector<int> pocket_size;
    {
        std::vector<Coord> stack;
        grid.for_each([&](Coord c, CellState) {
            if (pocket_comp[grid.index(c)] != -2) return;
            const int id = static_cast<int>(pocket_size.size());
            pocket_comp[grid.index(c)] = id;
            pocket_size.push_back(0);
            stack.push_back(c);
            while (!stack.empty()) {
                const Coord p = stack.back();
                stack.pop_back();
                ++pocket_size[id];
                for (const Coord& d : kHexDirs) {
                    const Coord n = p + d;
                    if (!grid.in_bounds(n)) continue;
                    if (pocket_comp[grid.index(n)] != -2) continue;
                    pocket_comp[grid.index(n)] = id;
                    stack.push_back(n);
                }
            }
        });
    }
    constexpr int kMinPocket = 7;

    std::vector<Group> groups(ncomp);
    std::vector<int> edge_count(ncomp, 0);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        Group& g = groups[comp[i]];
        g.cells.push_back(coords[i]);
        for (int to : adj[i])
            if (static_cast<std::size_t>(to) > i) ++edge_count[comp[i]];
        for (const Coord& d : kHexDirs) {
            const Coord n = coords[i] + d;
            if (!grid.in_bounds(n)) continue;
            const int pc = pocket_comp[grid.index(n)];
            if (pc >= 0 && pocket_size[pc] >= kMinPocket) g.encloses_pocket = true;
        }
    }

    // Bridges over the whole contact graph.
    BridgeFinder bf(adj);
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (bf.tin[i] < 0) bf.run(static_cast<int>(i));

    for (int ci = 0; ci < ncomp; ++ci) {
        Group& g = groups[ci];
        std::sort(g.cells.begin(), g.cells.end());
        const int n = static_cast<int>(g.cells.size());
        g.is_tree = edge_count[ci] == n - 1;
        g.multi_contact = edge_count[ci] >= n && !g.encloses_pocket;
        Vec2 acc{0.0, 0.0};
        for (const Coord& c : g.cells) acc = acc + to_cart(c);
        g.centroid = {acc.x / n, acc.y / n};
    }

    // Resolve each bridge into its two sides and test for a state-aware
    // mirror contact: point reflection through the bridge midpoint maps one
    // side onto the other, state for state.
    for (auto [u, v] : bf.bridges) {
        const int ci = comp[u];
        Group& g = groups[ci];
        Bridge br;
        br.a = coords[u];
        br.b = coords[v];
        if (br.b < br.a) std::swap(br.a, br.b);

        std::unordered_set<Coord, CoordHash> side_a;
        std::vector<int> stack{idx[br.a]};
        side_a.insert(br.a);
        while (!stack.empty()) {
            const int w = stack.back();
            stack.pop_back();
            for (int to : adj[w]) {
                // cut exactly the bridge edge
                if ((coords[w] == br.a && coords[to] == br.b) ||
                    (coords[w] == br.b && coords[to] == br.a))
                    continue;
                if (side_a.count(coords[to])) continue;
                side_a.insert(coords[to]);
                stack.push_back(to);
            }
        }
        for (const Coord& c : g.cells) {
            if (side_a.count(c))
                br.side_a.push_back(c);
            else
                br.side_b.push_back(c);
        }
        std::sort(br.side_a.begin(), br.side_a.end());
        std::sort(br.side_b.begin(), br.side_b.end());

        if (br.side_a.size() == br.side_b.size()) {
            const Coord m2 = br.a + br.b;  // twice the midpoint
            bool mirror = true;
            std::unordered_set<Coord, CoordHash> bset(br.side_b.begin(), br.side_b.end());
            for (const Coord& c : br.side_a) {
                const Coord image = m2 - c;
                if (!bset.count(image) || grid.at(image) != grid.at(c)) {
                    mirror = false;
                    break;
                }
            }
            br.mirror = mirror;
        }
        g.bridges.push_back(std::move(br));
    }

    // Canonical component order by first member.
    std::sort(groups.begin(), groups.end(),
              [](const Group& a, const Group& b) { return a.cells.front() < b.cells.front(); });
    return groups;
}

namespace {

// Direction ties alternate with the anchor cell's parity so exact bisector
// pushes stay isotropic in aggregate.
Coord quantize_direction(Vec2 v, Coord anchor) {
    const bool later = ((anchor.q - anchor.r) & 1) != 0;
    int best = 0;
    double best_dot = dot(to_cart(kHexDirs[0]), v);
    for (int i = 1; i < 6; ++i) {
        const double d = dot(to_cart(kHexDirs[i]), v);
        if (d > best_dot + 1e-12 || (later && d > best_dot - 1e-12)) {
            best_dot = std::max(best_dot, d);
            best = i;
        }
    }
    return kHexDirs[best];
}

Vec2 centroid_of(const std::vector<Coord>& cells) {
    Vec2 acc{0.0, 0.0};
    for (const Coord& c : cells) acc = acc + to_cart(c);
    return {acc.x / cells.size(), acc.y / cells.size()};
}

}  // namespace

std::vector<SideMove> collide_rule3(const HexGrid&, const std::vector<Group>& groups) {
    std::vector<SideMove> moves;
    for (const Group& g : groups) {
        for (const Bridge& br : g.bridges) {
            if (!br.mirror) continue;
            const Vec2 ca = centroid_of(br.side_a);
            const Vec2 cb = centroid_of(br.side_b);
            moves.push_back({br.side_a, quantize_direction(ca - cb, br.a)});
            moves.push_back({br.side_b, quantize_direction(cb - ca, br.a)});
        }
    }
    return moves;
}

std::vector<HexDecay> hex_decay_rule4(const HexGrid& grid) {
    std::vector<HexDecay> out;
    grid.for_each([&](Coord c, CellState s) {
        if (s != CellState::S2) return;
        HexDecay d;
        d.center = c;
        for (int i = 0; i < 6; ++i) {
            const Coord n = c + kHexDirs[i];
            if (!grid.in_bounds(n) || grid.at_unchecked(n) != CellState::S2) return;
            if (i % 2 == 0)
                d.first.push_back(n);
            else
                d.second.push_back(n);
        }
        out.push_back(std::move(d));
    });
    return out;
}

namespace {

// Cube-coordinate images under the 12 hex point symmetries (identity at 0).
// Coordinates are scaled by the group size so the centroid stays integral.
struct Cube {
    long long x, y, z;
};

Cube transform_cube(const Cube& p, int t) {
    // rotations: r_k = k * 60 degrees; reflections: swap(y,z) composed with
    // rotations.
    Cube q = p;
    const bool reflect = t >= 6;
    if (reflect) q = {q.x, q.z, q.y};
    switch (t % 6) {
        case 0: return q;
        case 1: return {-q.z, -q.x, -q.y};
        case 2: return {q.y, q.z, q.x};
        case 3: return {-q.x, -q.y, -q.z};
        case 4: return {q.z, q.x, q.y};
        default: return {-q.y, -q.z, -q.x};
    }
}

struct ScaledKeyHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
        return std::hash<long long>()(k.first * 1000003LL + k.second);
    }
};

// Mismatch of the cell set against symmetry t about its centroid; counting
// stops at `cutoff`. Coordinates are scaled by n so everything stays exact:
// the image matches a member cell iff its squared cartesian distance D/n^2
// satisfies 4D < n^2 (strictly inside half a lattice spacing).
int mismatch_against(const std::vector<Coord>& cells,
                     const std::unordered_set<std::pair<long long, long long>, ScaledKeyHash>& set,
                     long long sx, long long sy, long long n, int t, int cutoff) {
    int mism = 0;
    for (const Coord& c : cells) {
        const Cube p{n * c.q - sx, n * c.r - sy, -(n * c.q - sx) - (n * c.r - sy)};
        const Cube q = transform_cube(p, t);
        // image in axial, scaled by n
        const long long ix = q.x + sx;
        const long long iy = q.y + sy;
        // Nearest lattice cell (cube rounding); at most one can lie strictly
        // within half a spacing of the image.
        const double fq = static_cast<double>(ix) / n;
        const double fr = static_cast<double>(iy) / n;
        const double fs = -fq - fr;
        double rq = std::round(fq), rr = std::round(fr), rs = std::round(fs);
        const double dq = std::abs(rq - fq), dr = std::abs(rr - fr), ds = std::abs(rs - fs);
        if (dq > dr && dq > ds)
            rq = -rr - rs;
        else if (dr > ds)
            rr = -rq - rs;
        const long long cq = static_cast<long long>(rq);
        const long long cr = static_cast<long long>(rr);
        const long long dq2 = ix - n * cq;
        const long long dr2 = iy - n * cr;
        const long long d2 = dq2 * dq2 + dq2 * dr2 + dr2 * dr2;  // n^2 * |img - cell|^2
        bool matched = false;
        if (4 * d2 < n * n)
            matched = set.count({n * cq, n * cr}) > 0;
        if (!matched && ++mism >= cutoff) return mism;
    }
    return mism;
}

int score_with_cutoff(const std::vector<Coord>& cells, int cutoff) {
    const long long n = static_cast<long long>(cells.size());
    if (n <= 2) return 0;  // singletons and pairs are always point-symmetric
    long long sx = 0, sy = 0;
    std::unordered_set<std::pair<long long, long long>, ScaledKeyHash> set;
    set.reserve(cells.size() * 2);
    for (const Coord& c : cells) {
        sx += c.q;
        sy += c.r;
        set.insert({n * c.q, n * c.r});
    }
    int best = cutoff;
    for (int t = 1; t < 12 && best > 0; ++t)
        best = std::min(best, mismatch_against(cells, set, sx, sy, n, t, best));
    return best;
}

}  // namespace

int asymmetry_score(const std::vector<Coord>& cells) {
    return score_with_cutoff(cells, static_cast<int>(cells.size()) + 1);
}

std::optional<Rule6Transition> symmetrize_rule6(const HexGrid& grid, const Group& group) {
    if (group.cells.empty()) return std::nullopt;
    const int current = asymmetry_score(group.cells);
    if (current == 0) return std::nullopt;

    std::unordered_set<Coord, CoordHash> members(group.cells.begin(), group.cells.end());
    int best_score = current;
    std::optional<Rule6Transition> best;

    auto consider = [&](const Rule6Transition& cand, const std::vector<Coord>& cells) {
        const int s = score_with_cutoff(cells, best_score);
        if (s < best_score) {
            best_score = s;
            best = cand;
        }
    };

    std::vector<Coord> scratch;
    scratch.reserve(group.cells.size() + 1);

    // Fusions: for each adjacent S1 pair, either orientation (the partner
    // becomes the trail).
    for (const Coord& a : group.cells) {
        if (grid.at(a) != CellState::S1) continue;
        for (const Coord& d : kHexDirs) {
            const Coord b = a + d;
            if (!members.count(b) || grid.at(b) != CellState::S1) continue;
            if (!(a < b)) continue;
            for (int orient = 0; orient < 2; ++orient) {
                const Coord keep = orient == 0 ? a : b;
                const Coord part = orient == 0 ? b : a;
                scratch.clear();
                for (const Coord& c : group.cells)
                    if (!(c == part)) scratch.push_back(c);
                consider({true, keep, part}, scratch);
            }
        }
    }

    // Fissions: an S3 splits, pushing a new S1 into an open neighbor.
    for (const Coord& a : group.cells) {
        if (grid.at(a) != CellState::S3) continue;
        for (const Coord& d : kHexDirs) {
            const Coord t = a + d;
            if (!grid.in_bounds(t)) continue;
            const CellState ts = grid.at(t);
            if (is_charged(ts)) continue;
            scratch = group.cells;
            scratch.push_back(t);
            consider({false, a, t}, scratch);
        }
    }

    return best;
}

}  // namespace ddq

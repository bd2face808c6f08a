#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ddq/errors.hpp"
#include "ddq/geometry.hpp"

namespace ddq {

enum class CellState : std::uint8_t { S0 = 0, S1 = 1, S2 = 2, S3 = 3 };

// Excess electrons per state. Only S1 and S3 are mobile.
inline int charge_of(CellState s) {
    switch (s) {
        case CellState::S1: return 1;
        case CellState::S3: return 2;
        default: return 0;
    }
}

inline bool is_charged(CellState s) {
    return s == CellState::S1 || s == CellState::S3;
}

constexpr double kSqrt3 = 1.7320508075688772;

// Bounded hex lattice with reflecting boundary; storage is row-major over the
// even-r offset layout.
class HexGrid {
  public:
    HexGrid() : HexGrid(24, 27, 0.98) {}
    HexGrid(int width, int height, double spacing_nm)
        : width_(width), height_(height), spacing_(spacing_nm),
          cells_(static_cast<std::size_t>(width) * height, CellState::S0) {
        if (width <= 0 || height <= 0)
            throw GeometryError("grid dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    double spacing() const { return spacing_; }
    int cell_count() const { return width_ * height_; }

    // Area of one lattice site, nm^2.
    double site_area() const { return 0.5 * kSqrt3 * spacing_ * spacing_; }
    // Area enclosed by a seven-cell flower (unit cell), nm^2.
    double unit_cell_area() const { return 1.5 * kSqrt3 * spacing_ * spacing_; }

    bool in_bounds(Coord c) const {
        const int col = offset_col(c);
        return c.r >= 0 && c.r < height_ && col >= 0 && col < width_;
    }

    std::size_t index(Coord c) const {
        return static_cast<std::size_t>(c.r) * width_ + offset_col(c);
    }

    CellState at(Coord c) const {
        if (!in_bounds(c)) throw CoordinateError("coordinate out of bounds");
        return cells_[index(c)];
    }
    CellState at_unchecked(Coord c) const { return cells_[index(c)]; }

    void set(Coord c, CellState s) {
        if (!in_bounds(c)) throw CoordinateError("coordinate out of bounds");
        cells_[index(c)] = s;
    }
    void set_unchecked(Coord c, CellState s) { cells_[index(c)] = s; }

    void fill(CellState s) { cells_.assign(cells_.size(), s); }

    Coord coord_at(int col, int row) const { return axial_from_offset(col, row); }

    template <typename F>
    void for_each(F&& f) const {
        for (int row = 0; row < height_; ++row)
            for (int col = 0; col < width_; ++col)
                f(axial_from_offset(col, row), cells_[static_cast<std::size_t>(row) * width_ + col]);
    }

    std::vector<Coord> all_cells() const {
        std::vector<Coord> out;
        out.reserve(cells_.size());
        for (int row = 0; row < height_; ++row)
            for (int col = 0; col < width_; ++col) out.push_back(axial_from_offset(col, row));
        return out;
    }

    friend bool operator==(const HexGrid& a, const HexGrid& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ &&
               a.spacing_ == b.spacing_ && a.cells_ == b.cells_;
    }

  private:
    int width_;
    int height_;
    double spacing_;
    std::vector<CellState> cells_;
};

// First `degree` in-bounds neighbors in the fixed enumeration order
// (E, NE, NW, W, SW, SE); circuit types use degree < 6 to clip the set.
std::vector<Coord> neighbors(Coord c, int degree, const HexGrid& grid);

struct Region {
    std::vector<Coord> coords;  // kept sorted in canonical order

    static Region of(std::vector<Coord> cs);
    bool contains(Coord c) const;
    std::size_t size() const { return coords.size(); }
    bool empty() const { return coords.empty(); }
    double area_nm2(const HexGrid& grid) const {
        return static_cast<double>(coords.size()) * grid.site_area();
    }
};

Region full_region(const HexGrid& grid);
Region disc_region(const HexGrid& grid, Coord center, int radius);

struct StateCounts {
    std::array<int, 4> counts{0, 0, 0, 0};
    int operator[](CellState s) const { return counts[static_cast<int>(s)]; }
    int total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

// Q = #S1 + 2 * #S3 inside the region.
long long excess_charge(const HexGrid& grid, const Region& region);
long long excess_charge(const HexGrid& grid);

// Q / region area; electrons per nm^2.
double charge_density(const HexGrid& grid, const Region& region);

StateCounts histogram(const HexGrid& grid, const Region& region);

}  // namespace ddq

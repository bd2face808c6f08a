#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddq/grid.hpp"

namespace ddq {

// Text codec for grids and fragments. Rows of {0,1,2,3,.} in even-r offset
// layout, row-major, LF line endings; '.' means "leave the cell unchanged"
// and is only meaningful in fragments.
struct Fragment {
    std::vector<std::string> rows;  // consistent widths, validated

    int width() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
    int height() const { return static_cast<int>(rows.size()); }
};

Fragment parse_fragment(const std::string& text);

// Full-grid parse: no '.' allowed.
HexGrid parse_grid(const std::string& text, double spacing_nm = 0.98);

std::string serialize_grid(const HexGrid& grid);

// Writes non-'.' fragment characters onto the grid; anchor is the offset
// (col,row) of the fragment's top-left cell. The whole fragment rectangle
// must be in bounds.
void apply_fragment(HexGrid& grid, const Fragment& fragment, int anchor_col, int anchor_row);

}  // namespace ddq

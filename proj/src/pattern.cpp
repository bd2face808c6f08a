#include "ddq/pattern.hpp"

#include <sstream>

namespace ddq {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> rows;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            rows.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) rows.push_back(cur);
    return rows;
}

void validate_rows(const std::vector<std::string>& rows, bool allow_dot) {
    if (rows.empty()) throw ParseError("empty pattern", 0, 0);
    const std::size_t w = rows[0].size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != w)
            throw ParseError("ragged row", static_cast<int>(r),
                             static_cast<int>(rows[r].size()));
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            const char ch = rows[r][c];
            const bool ok = ch == '0' || ch == '1' || ch == '2' || ch == '3' ||
                            (allow_dot && ch == '.');
            if (!ok)
                throw ParseError(std::string("illegal character '") + ch + "'",
                                 static_cast<int>(r), static_cast<int>(c));
        }
    }
    if (w == 0) throw ParseError("empty row", 0, 0);
}

}  // namespace

Fragment parse_fragment(const std::string& text) {
    Fragment f{split_lines(text)};
    validate_rows(f.rows, true);
    return f;
}

HexGrid parse_grid(const std::string& text, double spacing_nm) {
    const std::vector<std::string> rows = split_lines(text);
    validate_rows(rows, false);
    HexGrid grid(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()), spacing_nm);
    for (int r = 0; r < grid.height(); ++r)
        for (int c = 0; c < grid.width(); ++c)
            grid.set_unchecked(axial_from_offset(c, r),
                               static_cast<CellState>(rows[r][c] - '0'));
    return grid;
}

std::string serialize_grid(const HexGrid& grid) {
    std::string out;
    out.reserve(static_cast<std::size_t>(grid.height()) * (grid.width() + 1));
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c)
            out.push_back(static_cast<char>(
                '0' + static_cast<int>(grid.at_unchecked(axial_from_offset(c, r)))));
        out.push_back('\n');
    }
    return out;
}

void apply_fragment(HexGrid& grid, const Fragment& fragment, int anchor_col, int anchor_row) {
    if (anchor_col < 0 || anchor_row < 0 ||
        anchor_col + fragment.width() > grid.width() ||
        anchor_row + fragment.height() > grid.height())
        throw GeometryError("fragment placement out of bounds");
    for (int r = 0; r < fragment.height(); ++r) {
        for (int c = 0; c < fragment.width(); ++c) {
            const char ch = fragment.rows[r][c];
            if (ch == '.') continue;
            grid.set_unchecked(axial_from_offset(anchor_col + c, anchor_row + r),
                               static_cast<CellState>(ch - '0'));
        }
    }
}

}  // namespace ddq

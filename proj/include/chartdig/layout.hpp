#pragma once

// Reference-geometry classification (grid / box / axis lines / none) and
// the scanning origin derived from it. Row coordinates in this module are
// bottom-up: row 0 is the bottom image row.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chartdig/error.hpp"
#include "chartdig/image.hpp"

namespace chartdig {

enum class AxisKind { grid, box, axes, none };

inline std::string to_string(AxisKind kind)
{
    switch (kind) {
    case AxisKind::grid: return "grid";
    case AxisKind::box: return "box";
    case AxisKind::axes: return "axes";
    case AxisKind::none: return "none";
    }
    return "none";
}

inline AxisKind parse_axis_kind(const std::string& s)
{
    if (s == "grid") return AxisKind::grid;
    if (s == "box") return AxisKind::box;
    if (s == "axes") return AxisKind::axes;
    if (s == "none") return AxisKind::none;
    throw InputError("unknown axis kind '" + s + "'");
}

/// A detected full-length line. For horizontal lines the indices are
/// bottom-up rows, for vertical lines columns. `center` is the index with
/// the most ink; [first, last] are the indices whose pixels belong to it.
struct Line {
    int first = 0;
    int last = 0;
    int center = 0;

    friend bool operator==(const Line&, const Line&) = default;
};

struct BoxBounds {
    int left = 0;
    int right = 0;
    int bottom = 0;
    int top = 0;
};

struct AxisLayout {
    AxisKind kind = AxisKind::none;
    std::vector<Line> rows;    ///< horizontal lines, bottom to top
    std::vector<Line> columns; ///< vertical lines, left to right
    std::optional<BoxBounds> box;
    std::optional<int> baseline_row;
    std::optional<int> origin_column;
    std::optional<double> grid_pitch;
};

struct ScanOrigin {
    int column = 0;
    int baseline_row = 0; ///< bottom-up

    friend bool operator==(const ScanOrigin&, const ScanOrigin&) = default;
};

struct LayoutParams {
    double coverage = 0.8;          ///< fraction of the extent a full line must cover
    int band = 1;                   ///< rows (cols) of slack when measuring coverage
    double uniformity = 0.2;        ///< allowed grid spacing deviation from the median
    double border_fraction = 0.25;  ///< box edges must lie in this outer fraction
    double member_fraction = 0.05;  ///< raw coverage for a row to count as part of a line
};

namespace detail {

// Full lines along one direction. `raw[i]` is the ink count of line i,
// `banded[i]` the count of cross positions with ink within +/- band.
inline std::vector<Line> group_lines(const std::vector<int>& raw, const std::vector<int>& banded, int extent,
                                     const LayoutParams& p)
{
    std::vector<Line> lines;
    const int n = static_cast<int>(raw.size());
    const double need = p.coverage * extent;
    const double member = p.member_fraction * extent;
    int i = 0;
    while (i < n) {
        if (banded[i] < need) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && banded[j + 1] >= need)
            ++j;
        int center = i;
        for (int k = i; k <= j; ++k)
            if (raw[k] > raw[center])
                center = k;
        int first = center;
        int last = center;
        for (int k = i; k <= j; ++k)
            if (raw[k] >= member) {
                first = std::min(first, k);
                last = std::max(last, k);
            }
        lines.push_back({first, last, center});
        i = j + 1;
    }
    return lines;
}

inline bool uniform_spacing(const std::vector<Line>& lines, double tolerance, std::vector<double>& gaps)
{
    std::vector<double> local;
    for (std::size_t i = 1; i < lines.size(); ++i)
        local.push_back(lines[i].center - lines[i - 1].center);
    std::vector<double> sorted = local;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (median < 2.0)
        return false;
    for (double g : local)
        if (std::abs(g - median) > tolerance * median)
            return false;
    gaps.insert(gaps.end(), local.begin(), local.end());
    return true;
}

inline void fill_kind_fields(AxisLayout& layout)
{
    layout.box.reset();
    layout.baseline_row.reset();
    layout.origin_column.reset();
    layout.grid_pitch.reset();
    switch (layout.kind) {
    case AxisKind::box:
        layout.box = BoxBounds{layout.columns.front().center, layout.columns.back().center,
                               layout.rows.front().center, layout.rows.back().center};
        break;
    case AxisKind::axes:
        layout.baseline_row = layout.rows.front().center;
        if (!layout.columns.empty())
            layout.origin_column = layout.columns.front().center;
        break;
    case AxisKind::grid: {
        std::vector<double> gaps;
        for (std::size_t i = 1; i < layout.rows.size(); ++i)
            gaps.push_back(layout.rows[i].center - layout.rows[i - 1].center);
        for (std::size_t i = 1; i < layout.columns.size(); ++i)
            gaps.push_back(layout.columns[i].center - layout.columns[i - 1].center);
        std::sort(gaps.begin(), gaps.end());
        layout.grid_pitch = gaps.empty() ? 0.0 : gaps[gaps.size() / 2];
        break;
    }
    case AxisKind::none: break;
    }
}

} // namespace detail

inline AxisLayout classify_axes(const BinaryImage& img, const LayoutParams& params = {})
{
    const int w = img.width();
    const int h = img.height();
    const int b = std::max(params.band, 0);

    // Indexed bottom-up.
    std::vector<int> row_raw(h, 0), row_band(h, 0), col_raw(w, 0), col_band(w, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (img(x, y) == Bit::ink) {
                ++row_raw[flip_row(y, h)];
                ++col_raw[x];
            }
    for (int r = 0; r < h; ++r) {
        const int lo = std::max(0, r - b), hi = std::min(h - 1, r + b);
        for (int x = 0; x < w; ++x)
            for (int q = lo; q <= hi; ++q)
                if (img(x, flip_row(q, h)) == Bit::ink) {
                    ++row_band[r];
                    break;
                }
    }
    for (int x = 0; x < w; ++x) {
        const int lo = std::max(0, x - b), hi = std::min(w - 1, x + b);
        for (int y = 0; y < h; ++y)
            for (int q = lo; q <= hi; ++q)
                if (img(q, y) == Bit::ink) {
                    ++col_band[x];
                    break;
                }
    }

    AxisLayout layout;
    layout.rows = detail::group_lines(row_raw, row_band, w, params);
    layout.columns = detail::group_lines(col_raw, col_band, h, params);
    const std::size_t nr = layout.rows.size();
    const std::size_t nc = layout.columns.size();

    std::vector<double> gaps;
    if (nr >= 3 && nc >= 3 && detail::uniform_spacing(layout.rows, params.uniformity, gaps)
        && detail::uniform_spacing(layout.columns, params.uniformity, gaps)) {
        layout.kind = AxisKind::grid;
    } else if (nr == 2 && nc == 2) {
        const double bf = params.border_fraction;
        const bool near = layout.rows.front().center <= bf * h && layout.rows.back().center >= (1.0 - bf) * h - 1
                       && layout.columns.front().center <= bf * w && layout.columns.back().center >= (1.0 - bf) * w - 1;
        layout.kind = near ? AxisKind::box : AxisKind::none;
    } else if (nr == 1 && nc <= 1) {
        layout.kind = AxisKind::axes;
    } else {
        layout.kind = AxisKind::none;
    }
    detail::fill_kind_fields(layout);
    return layout;
}

/// Re-labels a detected layout as `kind`, using the outermost detected
/// lines. Throws when the detected lines cannot support the requested kind.
inline AxisLayout force_layout_kind(AxisLayout layout, AxisKind kind)
{
    auto fail = [&] {
        throw InputError("axis mode '" + to_string(kind) + "' does not match the detected lines ("
                         + std::to_string(layout.rows.size()) + " horizontal, " + std::to_string(layout.columns.size())
                         + " vertical)");
    };
    switch (kind) {
    case AxisKind::none:
        break;
    case AxisKind::box:
        if (layout.rows.size() < 2 || layout.columns.size() < 2)
            fail();
        layout.rows = {layout.rows.front(), layout.rows.back()};
        layout.columns = {layout.columns.front(), layout.columns.back()};
        break;
    case AxisKind::axes:
        if (layout.rows.empty())
            fail();
        layout.rows = {layout.rows.front()};
        if (!layout.columns.empty())
            layout.columns = {layout.columns.front()};
        break;
    case AxisKind::grid:
        if (layout.rows.size() < 2 && layout.columns.size() < 2)
            fail();
        break;
    }
    layout.kind = kind;
    detail::fill_kind_fields(layout);
    return layout;
}

inline ScanOrigin resolve_origin(const AxisLayout& layout, const BinaryImage& img)
{
    const int w = img.width();
    const int h = img.height();
    auto on_row_line = [&](int row) {
        for (const Line& l : layout.rows)
            if (row >= l.first && row <= l.last)
                return true;
        return false;
    };
    // First column with ink, optionally ignoring pixels on horizontal lines.
    auto first_ink_column = [&](bool skip_lines) -> std::optional<int> {
        for (int x = 0; x < w; ++x)
            for (int y = 0; y < h; ++y)
                if (img(x, y) == Bit::ink && !(skip_lines && on_row_line(flip_row(y, h))))
                    return x;
        return std::nullopt;
    };

    const auto any = first_ink_column(false);
    if (!any)
        throw InputError("no ink content");

    switch (layout.kind) {
    case AxisKind::box:
        return {layout.box->left, layout.box->bottom};
    case AxisKind::axes: {
        if (layout.origin_column)
            return {*layout.origin_column, *layout.baseline_row};
        const auto off_line = first_ink_column(true);
        return {off_line.value_or(*any), *layout.baseline_row};
    }
    case AxisKind::grid:
    case AxisKind::none:
        break;
    }
    return {*any, 0};
}

/// Erases the detected reference lines. A line pixel survives when the
/// pixels just beyond the line on both sides (above and below a horizontal
/// line, left and right of a vertical one) are ink that is not itself part
/// of a line; that is where the trace crosses. Afterwards, leftover
/// fragments lying wholly within `band` pixels of the lines and touching no
/// crossing (resampling stair-steps of a deskewed line) are erased too.
inline BinaryImage strip_reference_lines(const BinaryImage& img, const AxisLayout& layout, int band = 1)
{
    if (layout.kind == AxisKind::none)
        return img;
    const int w = img.width();
    const int h = img.height();

    // Per-pixel membership, storage coordinates. Value = index+1 of the
    // horizontal line, vertical lines flagged separately.
    std::vector<int> hline(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> vline(static_cast<std::size_t>(w) * h, 0);
    auto at = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
    for (std::size_t i = 0; i < layout.rows.size(); ++i) {
        const Line& l = layout.rows[i];
        for (int r = std::max(l.first, 0); r <= std::min(l.last, h - 1); ++r)
            for (int x = 0; x < w; ++x)
                hline[at(x, flip_row(r, h))] = static_cast<int>(i) + 1;
    }
    for (std::size_t i = 0; i < layout.columns.size(); ++i) {
        const Line& l = layout.columns[i];
        for (int c = std::max(l.first, 0); c <= std::min(l.last, w - 1); ++c)
            for (int y = 0; y < h; ++y)
                vline[at(c, y)] = static_cast<int>(i) + 1;
    }
    auto free_ink = [&](int x, int y) {
        return img.contains(x, y) && img(x, y) == Bit::ink && hline[at(x, y)] == 0 && vline[at(x, y)] == 0;
    };

    BinaryImage out = img;
    std::vector<char> crossing(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (img(x, y) != Bit::ink)
                continue;
            const int hi = hline[at(x, y)];
            const int vi = vline[at(x, y)];
            if (hi == 0 && vi == 0)
                continue;
            bool keep = false;
            if (hi != 0) {
                const Line& l = layout.rows[static_cast<std::size_t>(hi - 1)];
                const int above = flip_row(l.last, h) - 1;
                const int below = flip_row(l.first, h) + 1;
                keep = keep || (free_ink(x, above) && free_ink(x, below));
            }
            if (vi != 0) {
                const Line& l = layout.columns[static_cast<std::size_t>(vi - 1)];
                keep = keep || (free_ink(l.first - 1, y) && free_ink(l.last + 1, y));
            }
            if (!keep)
                out(x, y) = Bit::background;
            else
                crossing[at(x, y)] = 1;
        }
    }

    // rows / columns within `band` of some line
    band = std::max(band, 0);
    std::vector<char> near_row(static_cast<std::size_t>(h), 0), near_col(static_cast<std::size_t>(w), 0);
    for (const Line& l : layout.rows)
        for (int r = std::max(l.first - band, 0); r <= std::min(l.last + band, h - 1); ++r)
            near_row[static_cast<std::size_t>(flip_row(r, h))] = 1;
    for (const Line& l : layout.columns)
        for (int c = std::max(l.first - band, 0); c <= std::min(l.last + band, w - 1); ++c)
            near_col[static_cast<std::size_t>(c)] = 1;
    auto near_line = [&](int x, int y) { return near_row[static_cast<std::size_t>(y)] || near_col[static_cast<std::size_t>(x)]; };

    std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> component, stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (out(x, y) != Bit::ink || seen[at(x, y)] || !near_line(x, y))
                continue;
            component.clear();
            stack.assign(1, {x, y});
            seen[at(x, y)] = 1;
            bool inside = true;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                component.push_back({cx, cy});
                inside = inside && near_line(cx, cy) && !crossing[at(cx, cy)];
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (out.contains(nx, ny) && out(nx, ny) == Bit::ink && !seen[at(nx, ny)]) {
                            seen[at(nx, ny)] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
            }
            if (inside)
                for (const auto& [px, py] : component)
                    out(px, py) = Bit::background;
        }
    }
    return out;
}

} // namespace chartdig

#pragma once

// Multi-part scans: locate the coloured pen marks that delimit each part,
// cut the part at the marks, and join the per-part signals.

#include <string>
#include <utility>
#include <vector>

#include "chartdig/color.hpp"
#include "chartdig/error.hpp"
#include "chartdig/image.hpp"
#include "chartdig/trace.hpp"

namespace chartdig {

struct MarkSpec {
    ColorSpec color = ColorSpec::named(HueClass::red);
    double min_height = 0.5; ///< fraction of the image height a mark column must cover

    void validate() const
    {
        color.validate();
        if (!(min_height > 0.0 && min_height <= 1.0))
            throw InputError("mark minimum height must lie in (0,1]");
    }
};

enum class StripPosition { first, intermediate, last, only };

inline std::string to_string(StripPosition p)
{
    switch (p) {
    case StripPosition::first: return "first";
    case StripPosition::intermediate: return "intermediate";
    case StripPosition::last: return "last";
    case StripPosition::only: return "only";
    }
    return "only";
}

inline std::size_t expected_marks(StripPosition p) noexcept
{
    switch (p) {
    case StripPosition::first:
    case StripPosition::last: return 1;
    case StripPosition::intermediate: return 2;
    case StripPosition::only: return 0;
    }
    return 0;
}

/// Position of part `index` out of `count` scans given in paper order.
inline StripPosition position_of(std::size_t index, std::size_t count) noexcept
{
    if (count <= 1)
        return StripPosition::only;
    if (index == 0)
        return StripPosition::first;
    if (index + 1 == count)
        return StripPosition::last;
    return StripPosition::intermediate;
}

/// Inclusive column interval.
struct ColumnRange {
    int first = 0;
    int last = 0;

    friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

/// Maximal runs of columns whose count of mark-coloured pixels reaches
/// min_height * height, left to right.
inline std::vector<ColumnRange> detect_marks(const RasterImage& img, const MarkSpec& spec)
{
    spec.validate();
    const double need = spec.min_height * img.height();
    std::vector<ColumnRange> marks;
    bool open = false;
    for (int x = 0; x < img.width(); ++x) {
        int count = 0;
        for (int y = 0; y < img.height(); ++y)
            count += spec.color.matches(img(x, y)) ? 1 : 0;
        const bool hit = count > 0 && count >= need;
        if (hit && !open) {
            marks.push_back({x, x});
            open = true;
        } else if (hit) {
            marks.back().last = x;
        } else {
            open = false;
        }
    }
    return marks;
}

/// Column range of the signal-bearing part of a scan: before the mark for
/// the first part, between the marks for intermediate parts, after the mark
/// for the last part, everything for a lone scan.
inline ColumnRange segment_bounds(const std::vector<ColumnRange>& marks, int width, StripPosition pos)
{
    const std::size_t want = expected_marks(pos);
    if (marks.size() != want)
        throw InputError("strip position '" + to_string(pos) + "' expects " + std::to_string(want) + " mark(s), found "
                         + std::to_string(marks.size()));
    ColumnRange r{0, width - 1};
    switch (pos) {
    case StripPosition::first: r = {0, marks[0].first - 1}; break;
    case StripPosition::intermediate: r = {marks[0].last + 1, marks[1].first - 1}; break;
    case StripPosition::last: r = {marks[0].last + 1, width - 1}; break;
    case StripPosition::only: break;
    }
    if (r.first > r.last)
        throw InputError("marks leave no columns to digitize");
    return r;
}

/// Concatenates parts in order with columns renumbered from 0. With
/// `level_junctions`, each later part is shifted vertically so its first
/// value equals the previous part's last value.
inline Signal1D append_segments(const std::vector<Signal1D>& parts, bool level_junctions = true)
{
    if (parts.empty())
        throw InputError("no segments to append");
    Signal1D out;
    out.dpi = parts.front().dpi;
    int column = 0;
    for (const Signal1D& part : parts) {
        if (part.dpi != out.dpi)
            throw InputError("segments have different dpi");
        if (part.samples.empty())
            continue;
        int offset = 0;
        if (level_junctions && !out.samples.empty())
            offset = out.samples.back().value - part.samples.front().value;
        for (Sample s : part.samples) {
            s.column = column++;
            s.value += offset;
            out.samples.push_back(s);
        }
    }
    return out;
}

} // namespace chartdig

#pragma once

// Synthetic chart renderer. Draws a known waveform with the requested
// reference geometry, pen marks and scan defects, and records the exact
// ground truth so every pipeline stage can be checked against it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "chartdig/color.hpp"
#include "chartdig/error.hpp"
#include "chartdig/image.hpp"
#include "chartdig/layout.hpp"
#include "chartdig/preprocess.hpp"
#include "chartdig/stitch.hpp"

namespace chartdig {

struct ChartStyle {
    AxisKind axis = AxisKind::none;
    Rgb line_color = kBlack; ///< box/axes lines; grid lines when axis == grid
    int line_thickness = 1;
    int grid_pitch = 20;
    int trace_thickness = 1;
    Rgb trace_color = kBlack;
    std::vector<ColumnRange> marks; ///< canvas columns
    Rgb mark_color{230, 30, 30};
    double skew = 0.0;  ///< degrees, counterclockwise
    double noise = 0.0; ///< fraction of pixels turned into isolated specks
    double dpi = 300.0;
    int height = 200;
    int margin = 20; ///< blank columns on each side of the trace
    std::optional<int> axis_row;    ///< axes style: baseline row (bottom-up), default margin / 2
    std::optional<int> axis_column; ///< axes style: vertical line column, default margin / 2
    std::uint64_t seed = 1;

    void validate() const
    {
        if (!(noise >= 0.0 && noise <= 0.05))
            throw InputError("noise density must lie in [0, 0.05]");
        if (trace_thickness < 1 || line_thickness < 1)
            throw InputError("thickness must be at least 1");
        if (height < 8 || margin < 0)
            throw InputError("canvas too small");
        if (axis == AxisKind::grid && grid_pitch < 2)
            throw InputError("grid pitch must be at least 2");
        if (!(dpi > 0.0))
            throw InputError("dpi must be positive");
    }
};

/// Reference colour for a hue class, inside the default suppression box.
inline Rgb grid_color(HueClass hue)
{
    return ColorSpec::named(hue).center;
}

struct GroundTruth {
    int width = 0;
    int height = 0;
    std::vector<std::optional<double>> centerline; ///< bottom-up row per canvas column
    ChartStyle style;
    std::vector<ColumnRange> marks;
    double skew = 0.0;
    std::size_t trace_pixels = 0;                  ///< trace pixels visible before defects
    std::vector<std::array<int, 2>> specks;        ///< storage (x, y) of injected noise
    std::optional<BoxBounds> box;                  ///< bottom-up rows
    std::optional<int> baseline_row;               ///< bottom-up
    std::optional<int> axis_column;
};

struct SynthChart {
    RasterImage image;
    GroundTruth truth;
};

namespace detail {

inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

} // namespace detail

/// Renders `waveform` (bottom-up row per trace column) on a canvas of
/// waveform.size() + 2 * margin columns. Drawing order: reference
/// geometry, trace, marks, skew, noise; the ground truth describes the
/// chart before skew and noise.
inline SynthChart render_chart(const std::vector<double>& waveform, const ChartStyle& style)
{
    style.validate();
    if (waveform.empty())
        throw InputError("empty waveform");
    const int n = static_cast<int>(waveform.size());
    const int w = n + 2 * style.margin;
    const int h = style.height;
    RasterImage img(w, h, kWhite);
    GroundTruth truth;
    truth.width = w;
    truth.height = h;
    truth.style = style;
    truth.skew = style.skew;

    auto put = [&](int x, int row, Rgb c) {
        const int y = flip_row(row, h);
        if (img.contains(x, y))
            img(x, y) = c;
    };
    const int t = style.line_thickness;
    const int inset = style.margin / 2;
    int floor_row = -1;
    int ceil_row = h;
    switch (style.axis) {
    case AxisKind::box: {
        const BoxBounds b{inset, w - 1 - inset, inset, h - 1 - inset};
        for (int k = 0; k < t; ++k) {
            for (int x = b.left; x <= b.right; ++x) {
                put(x, b.bottom + k, style.line_color);
                put(x, b.top - k, style.line_color);
            }
            for (int r = b.bottom; r <= b.top; ++r) {
                put(b.left + k, r, style.line_color);
                put(b.right - k, r, style.line_color);
            }
        }
        truth.box = b;
        floor_row = b.bottom + t - 1;
        ceil_row = b.top - t + 1;
        break;
    }
    case AxisKind::axes: {
        const int row = style.axis_row.value_or(inset);
        const int col = style.axis_column.value_or(inset);
        if (row < 0 || row >= h || col < 0 || col >= w)
            throw InputError("axis position outside canvas");
        for (int k = 0; k < t; ++k) {
            for (int x = col; x < w; ++x)
                put(x, row + k, style.line_color);
            for (int r = row; r < h; ++r)
                put(col + k, r, style.line_color);
        }
        truth.baseline_row = row;
        truth.axis_column = col;
        floor_row = row + t - 1;
        break;
    }
    case AxisKind::grid:
        for (int x = 0; x < w; x += style.grid_pitch)
            for (int k = 0; k < t && x + k < w; ++k)
                for (int r = 0; r < h; ++r)
                    put(x + k, r, style.line_color);
        for (int r0 = 0; r0 < h; r0 += style.grid_pitch)
            for (int k = 0; k < t; ++k)
                for (int x = 0; x < w; ++x)
                    put(x, r0 + k, style.line_color);
        break;
    case AxisKind::none: break;
    }

    // Each column spans from its own row halfway toward both neighbours so
    // the trace stays 8-connected on steep slopes.
    std::vector<int> rows(waveform.size());
    for (int i = 0; i < n; ++i)
        rows[i] = detail::round_half_up(waveform[i]);
    std::vector<int> lo(rows), hi(rows);
    for (int i = 0; i + 1 < n; ++i) {
        const int a = rows[i], d = rows[i + 1] - rows[i];
        if (d > 1) {
            hi[i] = std::max(hi[i], a + d / 2);
            lo[i + 1] = std::min(lo[i + 1], a + d / 2 + 1);
        } else if (d < -1) {
            lo[i] = std::min(lo[i], a + d / 2);
            hi[i + 1] = std::max(hi[i + 1], a + d / 2 - 1);
        }
    }
    const int below = (style.trace_thickness - 1) / 2;
    const int above = style.trace_thickness / 2;
    truth.centerline.assign(static_cast<std::size_t>(w), std::nullopt);
    std::vector<std::uint8_t> trace_mask(img.size(), 0);
    for (int i = 0; i < n; ++i) {
        const int r0 = lo[i] - below, r1 = hi[i] + above;
        if (r0 <= floor_row || r1 >= ceil_row || r0 < 0 || r1 >= h)
            throw InputError("waveform exceeds canvas at column " + std::to_string(i));
        const int x = style.margin + i;
        for (int r = r0; r <= r1; ++r) {
            put(x, r, style.trace_color);
            trace_mask[static_cast<std::size_t>(flip_row(r, h)) * w + x] = 1;
        }
        truth.centerline[static_cast<std::size_t>(style.margin + i)] = waveform[i];
    }

    for (const ColumnRange& m : style.marks) {
        if (m.first < 0 || m.last >= w || m.first > m.last)
            throw InputError("mark outside canvas");
        for (int x = m.first; x <= m.last; ++x)
            for (int y = 0; y < h; ++y) {
                img(x, y) = style.mark_color;
                trace_mask[static_cast<std::size_t>(y) * w + x] = 0;
            }
        truth.marks.push_back(m);
    }
    for (std::uint8_t m : trace_mask)
        truth.trace_pixels += m;

    img = rotate(img, style.skew, kWhite);

    if (style.noise > 0.0) {
        std::mt19937_64 rng(style.seed);
        const auto target = static_cast<std::size_t>(std::llround(style.noise * w * h));
        auto clear = [&](int x, int y) {
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (img.at_or(x + dx, y + dy, kWhite) != kWhite)
                        return false;
            return true;
        };
        for (std::size_t tries = 0; truth.specks.size() < target && tries < 50 * target + 100; ++tries) {
            const int x = static_cast<int>(rng() % static_cast<std::uint64_t>(w));
            const int y = static_cast<int>(rng() % static_cast<std::uint64_t>(h));
            if (!clear(x, y))
                continue;
            img(x, y) = kBlack;
            truth.specks.push_back({x, y});
        }
    }
    return {std::move(img), std::move(truth)};
}

struct SpikeSpec {
    int period = 150;           ///< columns between spikes
    int height = 60;            ///< spike height above baseline, pixels
    int width = 1;              ///< spike width, columns
    double hump_amplitude = 8.0;
    double baseline = 40.0;
    std::uint64_t seed = 1;
};

/// Baseline with periodic narrow spikes, a small hump before each spike and
/// a larger one after it. Humps have finite support and never touch spike
/// columns.
inline std::vector<double> make_ecg_like(int length, const SpikeSpec& spec)
{
    if (length <= 0 || spec.period <= 0 || spec.width < 1 || spec.width >= spec.period)
        throw InputError("ECG-like waveform needs positive length and period, and 1 <= width < period");
    std::vector<double> v(static_cast<std::size_t>(length), spec.baseline);
    std::mt19937_64 rng(spec.seed);
    const int jitter = static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, spec.period / 8)));
    const int gap = std::max(1, spec.period / 12);
    const int p_width = spec.period / 6;
    const int t_width = spec.period / 4;

    auto bump = [&](int start, int span, double amp) {
        for (int k = 1; k < span; ++k) {
            const int x = start + k;
            if (x >= 0 && x < length)
                v[static_cast<std::size_t>(x)] += amp * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / span));
        }
    };
    for (int s = spec.period / 2 + jitter; s < length; s += spec.period) {
        if (p_width >= 2)
            bump(s - gap - p_width, p_width, spec.hump_amplitude / 2.0);
        if (t_width >= 2)
            bump(s + spec.width - 1 + gap, t_width, spec.hump_amplitude);
        for (int k = 0; k < spec.width && s + k < length; ++k)
            v[static_cast<std::size_t>(s + k)] = spec.baseline + spec.height;
    }
    return v;
}

inline std::vector<double> make_sine(int length, double baseline, double amplitude, double period)
{
    if (length <= 0 || !(period > 0.0))
        throw InputError("sine waveform needs positive length and period");
    std::vector<double> v(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i)
        v[static_cast<std::size_t>(i)] = baseline + amplitude * std::sin(2.0 * std::numbers::pi * i / period);
    return v;
}

inline nlohmann::json to_json(const GroundTruth& t)
{
    using nlohmann::json;
    auto rgb = [](Rgb c) { return json::array({c.r, c.g, c.b}); };
    json centerline = json::array();
    for (const auto& c : t.centerline)
        centerline.push_back(c ? json(*c) : json(nullptr));
    json marks = json::array();
    for (const auto& m : t.marks)
        marks.push_back({m.first, m.last});
    json specks = json::array();
    for (const auto& s : t.specks)
        specks.push_back({s[0], s[1]});
    json j{
        {"width", t.width},
        {"height", t.height},
        {"centerline", centerline},
        {"marks", marks},
        {"skew", t.skew},
        {"trace_pixels", t.trace_pixels},
        {"specks", specks},
        {"style",
         {{"axis", to_string(t.style.axis)},
          {"line_color", rgb(t.style.line_color)},
          {"line_thickness", t.style.line_thickness},
          {"grid_pitch", t.style.grid_pitch},
          {"trace_thickness", t.style.trace_thickness},
          {"trace_color", rgb(t.style.trace_color)},
          {"mark_color", rgb(t.style.mark_color)},
          {"noise", t.style.noise},
          {"dpi", t.style.dpi},
          {"height", t.style.height},
          {"margin", t.style.margin},
          {"seed", t.style.seed}}},
    };
    if (t.box)
        j["box"] = {{"left", t.box->left}, {"right", t.box->right}, {"bottom", t.box->bottom}, {"top", t.box->top}};
    if (t.baseline_row)
        j["baseline_row"] = *t.baseline_row;
    if (t.axis_column)
        j["axis_column"] = *t.axis_column;
    return j;
}

} // namespace chartdig

#pragma once

// Raw scan to clean binary image: colour-keyed grid suppression, Otsu
// binarization, isolated-speck removal, skew detection and rotation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "chartdig/color.hpp"
#include "chartdig/error.hpp"
#include "chartdig/image.hpp"

namespace chartdig {

/// Replaces every pixel matching `spec` with white.
inline RasterImage suppress_grid(const RasterImage& img, const GridColorSpec& spec)
{
    RasterImage out = img;
    for (Rgb& p : out.pixels())
        if (spec.matches(p))
            p = kWhite;
    return out;
}

using Histogram = std::array<std::uint64_t, 256>;

inline Histogram histogram(const GrayImage& img) noexcept
{
    Histogram h{};
    for (std::uint8_t v : img.pixels())
        ++h[v];
    return h;
}

/// Level t maximizing the between-class variance when the histogram is
/// split into {<= t} and {> t}. Ties go to the smallest t. A histogram with
/// a single occupied level v yields max(v - 1, 0).
inline int otsu_threshold(const Histogram& hist)
{
    std::uint64_t total = 0;
    std::uint64_t sum = 0;
    int occupied = 0;
    int last_level = 0;
    for (int t = 0; t < 256; ++t) {
        total += hist[t];
        sum += static_cast<std::uint64_t>(t) * hist[t];
        if (hist[t] != 0) {
            ++occupied;
            last_level = t;
        }
    }
    if (total == 0)
        throw InputError("empty histogram");
    if (occupied == 1)
        return std::max(last_level - 1, 0);

    const double n = static_cast<double>(total);
    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    double best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += hist[t];
        s0 += static_cast<std::uint64_t>(t) * hist[t];
        const std::uint64_t n1 = total - n0;
        double between = 0.0;
        if (n0 != 0 && n1 != 0) {
            const double w0 = static_cast<double>(n0) / n;
            const double w1 = static_cast<double>(n1) / n;
            const double mu0 = static_cast<double>(s0) / static_cast<double>(n0);
            const double mu1 = static_cast<double>(sum - s0) / static_cast<double>(n1);
            between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        }
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

inline int otsu_threshold(const GrayImage& img) { return otsu_threshold(histogram(img)); }

/// Values <= threshold become ink.
inline BinaryImage binarize(const GrayImage& img, int threshold)
{
    if (threshold < 0 || threshold > 255)
        throw InputError("threshold must lie in [0,255]");
    BinaryImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = src[i] <= threshold ? Bit::ink : Bit::background;
    return out;
}

/// Removes isolated single ink pixels (3x3 window) and isolated
/// axis-aligned ink pairs (3x4 / 4x3 window). Decisions are taken on the
/// input and applied together, so the filter is idempotent.
inline BinaryImage despeckle(const BinaryImage& img)
{
    const int w = img.width();
    const int h = img.height();
    auto ink = [&](int x, int y) { return is_ink(img, x, y); };
    // True when every pixel of the rectangle [x0,x1]x[y0,y1] is background,
    // ignoring the pixels listed in `skip`.
    auto clear = [&](int x0, int y0, int x1, int y1, std::span<const std::array<int, 2>> skip) {
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                bool skipped = false;
                for (const auto& s : skip)
                    skipped = skipped || (s[0] == x && s[1] == y);
                if (!skipped && ink(x, y))
                    return false;
            }
        return true;
    };

    BinaryImage out = img;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!ink(x, y))
                continue;
            const std::array<std::array<int, 2>, 1> self{{{x, y}}};
            if (clear(x - 1, y - 1, x + 1, y + 1, self)) {
                out(x, y) = Bit::background;
                continue;
            }
            if (ink(x + 1, y)) {
                const std::array<std::array<int, 2>, 2> pair{{{x, y}, {x + 1, y}}};
                if (clear(x - 1, y - 1, x + 2, y + 1, pair)) {
                    out(x, y) = Bit::background;
                    out(x + 1, y) = Bit::background;
                }
            }
            if (ink(x, y + 1)) {
                const std::array<std::array<int, 2>, 2> pair{{{x, y}, {x, y + 1}}};
                if (clear(x - 1, y - 1, x + 1, y + 2, pair)) {
                    out(x, y) = Bit::background;
                    out(x, y + 1) = Bit::background;
                }
            }
        }
    }
    return out;
}

inline constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

/// Rotates about the image centre by `degrees` (positive is counterclockwise
/// as displayed). Inverse mapping, nearest-neighbour sampling; pixels that
/// map outside the source get `fill`.
template <class Pixel>
Image<Pixel> rotate(const Image<Pixel>& img, double degrees, Pixel fill)
{
    if (degrees == 0.0)
        return img;
    const double c = std::cos(deg_to_rad(degrees));
    const double s = std::sin(deg_to_rad(degrees));
    const double cx = (img.width() - 1) / 2.0;
    const double cy = (img.height() - 1) / 2.0;
    Image<Pixel> out(img.width(), img.height(), fill);
    for (int y = 0; y < img.height(); ++y) {
        const double dy = y - cy;
        for (int x = 0; x < img.width(); ++x) {
            const double dx = x - cx;
            const int sx = static_cast<int>(std::floor(cx + dx * c - dy * s + 0.5));
            const int sy = static_cast<int>(std::floor(cy + dx * s + dy * c + 0.5));
            if (img.contains(sx, sy))
                out(x, y) = img(sx, sy);
        }
    }
    return out;
}

inline BinaryImage rotate(const BinaryImage& img, double degrees)
{
    return rotate(img, degrees, Bit::background);
}

struct SkewSearch {
    double range = 5.0; ///< degrees, searched symmetrically
    double step = 0.05;
};

struct SkewEstimate {
    double angle = 0.0;      ///< degrees, counterclockwise positive
    double confidence = 0.0; ///< in [0,1]
};

/// Projection-profile skew estimate: the candidate angle whose
/// counter-rotation gives the horizontal ink profile with the largest
/// variance. Equal scores resolve to the smaller |angle|, then to the
/// negative one.
inline SkewEstimate detect_skew(const BinaryImage& img, SkewSearch search = {})
{
    if (!(search.step > 0.0) || !(search.range >= 0.0))
        throw InputError("skew search needs range >= 0 and step > 0");
    std::vector<std::array<double, 2>> ink;
    const double cx = (img.width() - 1) / 2.0;
    const double cy = (img.height() - 1) / 2.0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (img(x, y) == Bit::ink)
                ink.push_back({x - cx, y - cy});
    if (ink.empty())
        throw InputError("no ink content");

    const int steps = static_cast<int>(std::floor(search.range / search.step + 1e-9));
    // Rotated rows of the centred image stay within +/- the half diagonal.
    const int half = static_cast<int>(std::ceil(std::hypot(cx, cy))) + 1;
    const auto bins = static_cast<std::size_t>(2 * half + 1);
    const double n = static_cast<double>(ink.size());

    std::vector<double> variance;
    variance.reserve(static_cast<std::size_t>(2 * steps + 1));
    std::vector<std::uint32_t> profile(bins);
    for (int k = -steps; k <= steps; ++k) {
        const double a = deg_to_rad(k * search.step);
        const double s = std::sin(a);
        const double c = std::cos(a);
        std::fill(profile.begin(), profile.end(), 0u);
        for (const auto& p : ink) {
            // Row after rotating by -angle.
            const double yr = p[0] * s + p[1] * c;
            ++profile[static_cast<std::size_t>(std::floor(yr + 0.5) + half)];
        }
        double sq = 0.0;
        for (std::uint32_t v : profile)
            sq += static_cast<double>(v) * v;
        const double mean = n / static_cast<double>(bins);
        variance.push_back(sq / static_cast<double>(bins) - mean * mean);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < variance.size(); ++i) {
        const int ki = static_cast<int>(i) - steps;
        const int kb = static_cast<int>(best) - steps;
        if (variance[i] > variance[best] || (variance[i] == variance[best] && std::abs(ki) < std::abs(kb)))
            best = i;
    }
    std::vector<double> sorted = variance;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double top = variance[best];
    const double confidence = top > 0.0 ? std::clamp((top - median) / top, 0.0, 1.0) : 0.0;
    return {(static_cast<int>(best) - steps) * search.step, confidence};
}

} // namespace chartdig

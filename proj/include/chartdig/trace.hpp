#pragma once

// Column run extraction and reduction of the run vector to a 1-D signal.
//
// The run vector is the classic complex-pair encoding of a plotted trace:
// every vertical ink run in column c spanning rows [lower, upper] becomes
// the two components c + i*lower, c + i*upper. Rows are bottom-up and
// measured from the scan origin's baseline.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "chartdig/error.hpp"
#include "chartdig/image.hpp"
#include "chartdig/layout.hpp"

namespace chartdig {

struct Run {
    int column = 0;
    int lower = 0;
    int upper = 0;

    int thickness() const noexcept { return upper - lower + 1; }
    double midpoint() const noexcept { return (lower + upper) / 2.0; }

    friend bool operator==(const Run&, const Run&) = default;
};

class TraceRuns {
public:
    TraceRuns() = default;

    explicit TraceRuns(std::vector<Run> runs) : runs_(std::move(runs))
    {
        for (std::size_t i = 0; i < runs_.size(); ++i) {
            if (runs_[i].lower > runs_[i].upper)
                throw InputError("run with lower > upper");
            if (i > 0) {
                const Run& a = runs_[i - 1];
                const Run& b = runs_[i];
                if (b.column < a.column || (b.column == a.column && b.lower <= a.upper))
                    throw InputError("runs must be sorted by column, then by row, without overlap");
            }
        }
    }

    std::span<const Run> runs() const noexcept { return runs_; }
    bool empty() const noexcept { return runs_.empty(); }
    std::size_t size() const noexcept { return runs_.size(); }

    std::size_t count_in_column(int column) const noexcept
    {
        return static_cast<std::size_t>(std::count_if(runs_.begin(), runs_.end(),
                                                      [column](const Run& r) { return r.column == column; }));
    }

    /// Two components per run, same real part.
    std::vector<std::complex<double>> to_complex_pairs() const
    {
        std::vector<std::complex<double>> v;
        v.reserve(2 * runs_.size());
        for (const Run& r : runs_) {
            v.emplace_back(r.column, r.lower);
            v.emplace_back(r.column, r.upper);
        }
        return v;
    }

    static TraceRuns from_complex_pairs(std::span<const std::complex<double>> v)
    {
        if (v.size() % 2 != 0)
            throw InputError("complex run vector must have an even number of components");
        std::vector<Run> runs;
        runs.reserve(v.size() / 2);
        for (std::size_t i = 0; i < v.size(); i += 2) {
            if (v[i].real() != v[i + 1].real())
                throw InputError("paired components must share their real part");
            runs.push_back({static_cast<int>(v[i].real()), static_cast<int>(v[i].imag()),
                            static_cast<int>(v[i + 1].imag())});
        }
        return TraceRuns(std::move(runs));
    }

    friend bool operator==(const TraceRuns&, const TraceRuns&) = default;

private:
    std::vector<Run> runs_;
};

struct ExtractionParams {
    int alpha = 1;                      ///< modal run thickness, pixels
    std::optional<double> initial_beta; ///< defaults to the first column's run midpoint
    double dpi = 300.0;                 ///< copied into the resulting signal
};

enum class Provenance { measured, interpolated };

struct Sample {
    int column = 0;
    int value = 0; ///< bottom-up row relative to the baseline
    Provenance provenance = Provenance::measured;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct Signal1D {
    std::vector<Sample> samples;
    double dpi = 300.0;

    std::size_t size() const noexcept { return samples.size(); }

    friend bool operator==(const Signal1D&, const Signal1D&) = default;
};

/// Every maximal vertical ink run in columns >= origin.column, scanned
/// bottom-left to top-right.
inline TraceRuns extract_runs(const BinaryImage& img, const ScanOrigin& origin)
{
    const int h = img.height();
    std::vector<Run> runs;
    for (int x = std::max(origin.column, 0); x < img.width(); ++x) {
        int start = -1;
        for (int r = 0; r <= h; ++r) {
            const bool ink = r < h && img(x, flip_row(r, h)) == Bit::ink;
            if (ink && start < 0)
                start = r;
            if (!ink && start >= 0) {
                runs.push_back({x, start - origin.baseline_row, r - 1 - origin.baseline_row});
                start = -1;
            }
        }
    }
    return TraceRuns(std::move(runs));
}

/// Most frequent run thickness; the smaller thickness wins ties.
inline int compute_alpha(const TraceRuns& runs)
{
    if (runs.empty())
        throw InputError("no trace");
    std::map<int, std::size_t> counts;
    for (const Run& r : runs.runs())
        ++counts[r.thickness()];
    int best = counts.begin()->first;
    std::size_t best_count = counts.begin()->second;
    for (const auto& [thickness, count] : counts)
        if (count > best_count) {
            best = thickness;
            best_count = count;
        }
    return best;
}

/// One sample per column that has runs. With several runs in a column the
/// one whose midpoint is nearest the running reference is used. A run no
/// taller than alpha (upper - lower <= alpha) contributes its upper row;
/// a taller one contributes whichever end lies farther from the reference,
/// which keeps the tips of narrow spikes.
inline Signal1D reduce_to_1d(const TraceRuns& runs, const ExtractionParams& params)
{
    if (params.alpha < 1)
        throw InputError("alpha must be at least 1");
    Signal1D sig;
    sig.dpi = params.dpi;
    auto all = runs.runs();
    if (all.empty())
        return sig;

    double beta = params.initial_beta.value_or(all.front().midpoint());
    std::size_t i = 0;
    while (i < all.size()) {
        const int column = all[i].column;
        std::size_t j = i;
        const Run* chosen = &all[i];
        while (j < all.size() && all[j].column == column) {
            if (std::abs(all[j].midpoint() - beta) < std::abs(chosen->midpoint() - beta))
                chosen = &all[j];
            ++j;
        }
        int value = chosen->upper;
        if (chosen->upper - chosen->lower > params.alpha
            && std::abs(beta - chosen->lower) > std::abs(beta - chosen->upper))
            value = chosen->lower;
        sig.samples.push_back({column, value, Provenance::measured});
        beta = value;
        i = j;
    }
    return sig;
}

namespace detail {

// Nearest integer to num/den (den > 0); exact halves go toward `up`.
inline long long round_ratio(long long num, long long den, bool up)
{
    long long q = num / den;
    long long r = num % den;
    if (r < 0) {
        q -= 1;
        r += den;
    }
    if (2 * r > den || (2 * r == den && up))
        return q + 1;
    return q;
}

} // namespace detail

/// Fills every missing column between measured samples by linear
/// interpolation, rounded to the nearest row (halves toward the later
/// neighbour).
inline Signal1D interpolate_gaps(const Signal1D& sig)
{
    const auto measured = std::count_if(sig.samples.begin(), sig.samples.end(),
                                        [](const Sample& s) { return s.provenance == Provenance::measured; });
    if (measured < 2)
        throw InputError("insufficient data");
    Signal1D out;
    out.dpi = sig.dpi;
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        const Sample& a = sig.samples[i];
        if (i > 0 && a.column <= sig.samples[i - 1].column)
            throw InputError("signal columns must be strictly increasing");
        out.samples.push_back(a);
        if (i + 1 == sig.samples.size())
            break;
        const Sample& b = sig.samples[i + 1];
        const long long span = static_cast<long long>(b.column) - a.column;
        const long long rise = static_cast<long long>(b.value) - a.value;
        for (long long k = 1; k < span; ++k) {
            const long long step = detail::round_ratio(rise * k, span, rise > 0);
            out.samples.push_back({a.column + static_cast<int>(k), a.value + static_cast<int>(step),
                                   Provenance::interpolated});
        }
    }
    return out;
}

/// Drops `head` leading and `tail` trailing samples; columns restart at 0.
inline Signal1D trim_ends(const Signal1D& sig, std::size_t head, std::size_t tail)
{
    if (head + tail >= sig.samples.size())
        throw InputError("trim exceeds signal");
    Signal1D out;
    out.dpi = sig.dpi;
    out.samples.assign(sig.samples.begin() + static_cast<std::ptrdiff_t>(head),
                       sig.samples.end() - static_cast<std::ptrdiff_t>(tail));
    const int base = out.samples.front().column;
    for (Sample& s : out.samples)
        s.column -= base;
    return out;
}

} // namespace chartdig

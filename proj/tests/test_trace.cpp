#include <gtest/gtest.h>

#include <random>

#include "chartdig/layout.hpp"
#include "chartdig/preprocess.hpp"
#include "chartdig/raster.hpp"
#include "chartdig/synth.hpp"
#include "chartdig/trace.hpp"
#include "oracles.hpp"

using namespace chartdig;
using namespace std::complex_literals;

namespace {

BinaryImage blank(int w, int h) { return BinaryImage(w, h, Bit::background); }

void ink_rows(BinaryImage& img, int column, std::initializer_list<int> rows)
{
    for (int r : rows)
        img(column, flip_row(r, img.height())) = Bit::ink;
}

Signal1D measured(std::initializer_list<std::pair<int, int>> points)
{
    Signal1D sig;
    for (auto [c, v] : points)
        sig.samples.push_back({c, v, Provenance::measured});
    return sig;
}

Signal1D ramp(int n)
{
    Signal1D sig;
    for (int i = 0; i < n; ++i)
        sig.samples.push_back({i, i % 7, Provenance::measured});
    return sig;
}

TraceRuns runs_with_thickness(std::initializer_list<int> thickness)
{
    std::vector<Run> runs;
    int c = 0;
    for (int t : thickness)
        runs.push_back({c++, 10, 10 + t - 1});
    return TraceRuns(std::move(runs));
}

BinaryImage binarized(const RasterImage& img)
{
    const GrayImage g = to_grayscale(img);
    return binarize(g, otsu_threshold(g));
}

} // namespace

TEST(TraceRuns, RejectsMalformedRuns)
{
    EXPECT_THROW(TraceRuns({{0, 5, 4}}), InputError);
    EXPECT_THROW(TraceRuns({{1, 0, 0}, {0, 0, 0}}), InputError);
    EXPECT_THROW(TraceRuns({{0, 0, 3}, {0, 3, 5}}), InputError);
    EXPECT_NO_THROW(TraceRuns({{0, 0, 3}, {0, 5, 5}, {1, 0, 0}}));
}

TEST(TraceRuns, PaperPairDecodes)
{
    const std::vector<std::complex<double>> v{11.0 + 25i, 11.0 + 26i};
    const TraceRuns runs = TraceRuns::from_complex_pairs(v);
    ASSERT_EQ(runs.size(), 1u);
    EXPECT_EQ(runs.runs()[0], (chartdig::Run{11, 25, 26}));
    EXPECT_EQ(runs.to_complex_pairs(), v);
}

TEST(TraceRuns, ComplexPairsAreABijection)
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 100; ++i) {
        const TraceRuns runs = oracle::random_runs(rng);
        const auto v = runs.to_complex_pairs();
        ASSERT_EQ(v.size(), 2 * runs.size());
        const TraceRuns back = TraceRuns::from_complex_pairs(v);
        ASSERT_EQ(back.runs().size(), runs.runs().size());
        for (std::size_t k = 0; k < runs.size(); ++k)
            ASSERT_EQ(back.runs()[k], runs.runs()[k]);
    }
    const std::vector<std::complex<double>> odd{1.0 + 1i};
    EXPECT_THROW(TraceRuns::from_complex_pairs(odd), InputError);
    const std::vector<std::complex<double>> split{1.0 + 1i, 2.0 + 1i};
    EXPECT_THROW(TraceRuns::from_complex_pairs(split), InputError);
}

TEST(ExtractRuns, PaperColumnEleven)
{
    BinaryImage img = blank(20, 40);
    ink_rows(img, 11, {25, 26});
    const TraceRuns runs = extract_runs(img, {0, 0});
    ASSERT_EQ(runs.size(), 1u);
    EXPECT_EQ(runs.runs()[0], (chartdig::Run{11, 25, 26}));
}

TEST(ExtractRuns, BlankImageHasNoRuns)
{
    EXPECT_TRUE(extract_runs(blank(8, 8), {0, 0}).empty());
}

TEST(ExtractRuns, SplitColumn)
{
    BinaryImage img = blank(6, 12);
    ink_rows(img, 4, {3, 4, 5, 9});
    const TraceRuns runs = extract_runs(img, {0, 0});
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_EQ(runs.runs()[0], (chartdig::Run{4, 3, 5}));
    EXPECT_EQ(runs.runs()[1], (chartdig::Run{4, 9, 9}));
    EXPECT_EQ(runs.count_in_column(4), 2u);
}

TEST(ExtractRuns, RelativeToOrigin)
{
    BinaryImage img = blank(10, 20);
    ink_rows(img, 2, {15});
    ink_rows(img, 6, {8, 9});
    const TraceRuns runs = extract_runs(img, {3, 5});
    ASSERT_EQ(runs.size(), 1u);
    EXPECT_EQ(runs.runs()[0], (chartdig::Run{6, 3, 4}));
}

TEST(ComputeAlpha, Examples)
{
    EXPECT_EQ(compute_alpha(runs_with_thickness({2, 2, 2, 2})), 2);
    EXPECT_EQ(compute_alpha(runs_with_thickness({1, 1, 7})), 1);
    EXPECT_EQ(compute_alpha(runs_with_thickness({2, 2, 3, 3})), 2);
    EXPECT_THROW(compute_alpha(TraceRuns{}), InputError);
}

TEST(ComputeAlpha, PaperFigureOneStretch)
{
    // first five pairs of the printed vector: thicknesses 1, 2, 2, 2, 3
    const std::vector<std::complex<double>> v{10.0 + 26i, 10.0 + 26i, 11.0 + 25i, 11.0 + 26i, 12.0 + 25i,
                                              12.0 + 26i, 13.0 + 26i, 13.0 + 27i, 14.0 + 26i, 14.0 + 28i};
    EXPECT_EQ(compute_alpha(TraceRuns::from_complex_pairs(v)), 2);
}

TEST(ReduceTo1D, ThinRunsStoreUpperRow)
{
    const TraceRuns runs({{0, 10, 11}, {1, 11, 12}, {2, 12, 14}, {3, 13, 14}});
    const Signal1D sig = reduce_to_1d(runs, {2, std::nullopt, 300.0});
    ASSERT_EQ(sig.size(), 4u);
    EXPECT_EQ(sig.samples[0].value, 11);
    EXPECT_EQ(sig.samples[1].value, 12);
    EXPECT_EQ(sig.samples[2].value, 14);
    EXPECT_EQ(sig.samples[3].value, 14);
}

TEST(ReduceTo1D, SpikeTipThenDescendingEdge)
{
    const TraceRuns runs({{0, 10, 60}, {1, 5, 58}});
    const Signal1D sig = reduce_to_1d(runs, {2, 26.0, 300.0});
    ASSERT_EQ(sig.size(), 2u);
    EXPECT_EQ(sig.samples[0].value, 60);
    EXPECT_EQ(sig.samples[1].value, 5);
}

TEST(ReduceTo1D, EmptyColumnsYieldNoSample)
{
    const TraceRuns runs({{0, 1, 1}, {3, 2, 2}});
    const Signal1D sig = reduce_to_1d(runs, {1, std::nullopt, 150.0});
    ASSERT_EQ(sig.size(), 2u);
    EXPECT_EQ(sig.samples[1].column, 3);
    EXPECT_EQ(sig.dpi, 150.0);
}

TEST(ReduceTo1D, PicksRunNearestBeta)
{
    const TraceRuns runs({{0, 20, 20}, {1, 2, 3}, {1, 19, 21}});
    const Signal1D sig = reduce_to_1d(runs, {2, std::nullopt, 300.0});
    EXPECT_EQ(sig.samples[1].value, 21);
}

TEST(ReduceTo1D, MatchesOracleOnRandomRuns)
{
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 200; ++i) {
        const TraceRuns runs = oracle::random_runs(rng);
        const int alpha = 1 + static_cast<int>(rng() % 4);
        std::optional<double> beta;
        if (rng() % 2)
            beta = static_cast<double>(static_cast<int>(rng() % 60) - 20);
        const Signal1D sig = reduce_to_1d(runs, {alpha, beta, 300.0});
        const auto want = oracle::reduce(runs.to_complex_pairs(), alpha, beta);
        ASSERT_EQ(sig.size(), want.size()) << "sequence " << i;
        for (std::size_t k = 0; k < want.size(); ++k) {
            ASSERT_EQ(sig.samples[k].column, want[k].first) << "sequence " << i;
            ASSERT_EQ(sig.samples[k].value, want[k].second) << "sequence " << i << " sample " << k;
        }
    }
}

TEST(InterpolateGaps, Examples)
{
    const Signal1D mid = interpolate_gaps(measured({{10, 10}, {12, 12}}));
    ASSERT_EQ(mid.size(), 3u);
    EXPECT_EQ(mid.samples[1], (Sample{11, 11, Provenance::interpolated}));

    const Signal1D line = interpolate_gaps(measured({{0, 0}, {4, 8}}));
    ASSERT_EQ(line.size(), 5u);
    EXPECT_EQ(line.samples[1].value, 2);
    EXPECT_EQ(line.samples[2].value, 4);
    EXPECT_EQ(line.samples[3].value, 6);

    const Signal1D full = measured({{0, 3}, {1, 4}, {2, 9}});
    EXPECT_EQ(interpolate_gaps(full), full);
}

TEST(InterpolateGaps, TiesRoundTowardLaterNeighbour)
{
    const Signal1D up = interpolate_gaps(measured({{0, 0}, {2, 1}}));
    EXPECT_EQ(up.samples[1].value, 1);
    const Signal1D down = interpolate_gaps(measured({{0, 1}, {2, 0}}));
    EXPECT_EQ(down.samples[1].value, 0);
    const Signal1D neg = interpolate_gaps(measured({{0, -3}, {2, -4}}));
    EXPECT_EQ(neg.samples[1].value, -4);
}

TEST(InterpolateGaps, NeedsTwoMeasuredSamples)
{
    EXPECT_THROW(interpolate_gaps(measured({{3, 1}})), InputError);
    EXPECT_THROW(interpolate_gaps(Signal1D{}), InputError);
}

TEST(InterpolateGaps, KeepsMeasuredAndFillsContiguously)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
        const Signal1D sig = reduce_to_1d(oracle::random_runs(rng), {2, std::nullopt, 300.0});
        if (sig.size() < 2)
            continue;
        const Signal1D out = interpolate_gaps(sig);
        for (std::size_t k = 1; k < out.size(); ++k)
            ASSERT_EQ(out.samples[k].column, out.samples[k - 1].column + 1);
        std::size_t m = 0;
        for (const Sample& s : out.samples)
            if (s.provenance == Provenance::measured)
                ASSERT_EQ(s, sig.samples[m++]);
        ASSERT_EQ(m, sig.size());
    }
}

TEST(TrimEnds, Examples)
{
    const Signal1D sig = ramp(100);
    const Signal1D t = trim_ends(sig, 16, 16);
    ASSERT_EQ(t.size(), 68u);
    EXPECT_EQ(t.samples.front().column, 0);
    EXPECT_EQ(t.samples.front().value, sig.samples[16].value);
    EXPECT_EQ(trim_ends(sig, 0, 0), sig);
    EXPECT_THROW(trim_ends(ramp(10), 6, 6), InputError);
    EXPECT_THROW(trim_ends(ramp(10), 5, 5), InputError);
}

TEST(TrimEnds, LengthProperty)
{
    for (std::size_t h = 0; h < 5; ++h)
        for (std::size_t t = 0; t < 5; ++t)
            EXPECT_EQ(trim_ends(ramp(12), h, t).size(), 12 - h - t);
}

TEST(TraceRoundTrip, SmoothSineWithinAlpha)
{
    for (int thickness : {1, 2, 3}) {
        ChartStyle style;
        style.trace_thickness = thickness;
        const SynthChart chart = render_chart(make_sine(500, 100, 50, 180), style);
        const BinaryImage img = binarized(chart.image);
        const ScanOrigin origin = resolve_origin(classify_axes(img), img);
        const TraceRuns runs = extract_runs(img, origin);
        const int alpha = compute_alpha(runs);
        const Signal1D sig = interpolate_gaps(reduce_to_1d(runs, {alpha, std::nullopt, 300.0}));
        const oracle::CenterlineFit fit = oracle::fit_to_centerline(sig, chart.truth, origin.baseline_row);
        EXPECT_EQ(fit.misses, 0u);
        EXPECT_LE(fit.rms, alpha) << "thickness " << thickness;
    }
}

TEST(TraceRoundTrip, SpikeTipWithinOnePixel)
{
    SpikeSpec spikes;
    spikes.seed = 4;
    const std::vector<double> wave = make_ecg_like(600, spikes);
    const SynthChart chart = render_chart(wave, ChartStyle{});
    const BinaryImage img = binarized(chart.image);
    const TraceRuns runs = extract_runs(img, {0, 0});
    const Signal1D sig = interpolate_gaps(reduce_to_1d(runs, {compute_alpha(runs), std::nullopt, 300.0}));
    int checked = 0;
    for (std::size_t i = 0; i < wave.size(); ++i) {
        if (wave[i] < spikes.baseline + spikes.height * 0.9)
            continue;
        const int column = chart.truth.style.margin + static_cast<int>(i);
        for (const Sample& s : sig.samples)
            if (s.column == column) {
                EXPECT_NEAR(s.value, std::lround(wave[i]), 1) << "column " << column;
                ++checked;
            }
    }
    EXPECT_GE(checked, 3);
}

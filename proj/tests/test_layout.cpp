#include <gtest/gtest.h>

#include "chartdig/layout.hpp"
#include "chartdig/pipeline.hpp"
#include "chartdig/preprocess.hpp"
#include "chartdig/raster.hpp"
#include "chartdig/synth.hpp"

using namespace chartdig;

namespace {

BinaryImage blank(int w, int h) { return BinaryImage(w, h, Bit::background); }

BinaryImage binarized(const RasterImage& img)
{
    const GrayImage g = to_grayscale(img);
    return binarize(g, otsu_threshold(g));
}

SynthChart chart_of(AxisKind kind, std::uint64_t seed = 1, double noise = 0.0)
{
    ChartStyle style;
    style.axis = kind;
    style.height = 220;
    style.noise = noise;
    style.seed = seed;
    SpikeSpec spikes;
    spikes.baseline = 80;
    spikes.seed = seed;
    return render_chart(make_ecg_like(560, spikes), style);
}

} // namespace

TEST(AxisKind, NamesRoundTrip)
{
    for (AxisKind k : {AxisKind::grid, AxisKind::box, AxisKind::axes, AxisKind::none})
        EXPECT_EQ(parse_axis_kind(to_string(k)), k);
    EXPECT_THROW(parse_axis_kind("circle"), InputError);
}

TEST(ClassifyAxes, WavyTraceAloneIsNone)
{
    const BinaryImage img = binarized(chart_of(AxisKind::none).image);
    const AxisLayout layout = classify_axes(img);
    EXPECT_EQ(layout.kind, AxisKind::none);
    EXPECT_TRUE(layout.rows.empty());
    EXPECT_TRUE(layout.columns.empty());
}

TEST(ClassifyAxes, BoxBoundsMatchRender)
{
    const SynthChart chart = chart_of(AxisKind::box);
    const AxisLayout layout = classify_axes(binarized(chart.image));
    ASSERT_EQ(layout.kind, AxisKind::box);
    ASSERT_TRUE(layout.box && chart.truth.box);
    EXPECT_NEAR(layout.box->left, chart.truth.box->left, 1);
    EXPECT_NEAR(layout.box->right, chart.truth.box->right, 1);
    EXPECT_NEAR(layout.box->bottom, chart.truth.box->bottom, 1);
    EXPECT_NEAR(layout.box->top, chart.truth.box->top, 1);
}

TEST(ClassifyAxes, AxesBaselineMatchesRender)
{
    ChartStyle style;
    style.axis = AxisKind::axes;
    style.height = 220;
    style.axis_row = 40;
    style.axis_column = 25;
    SpikeSpec spikes;
    spikes.baseline = 90;
    const SynthChart chart = render_chart(make_ecg_like(560, spikes), style);
    const BinaryImage img = binarized(chart.image);
    const AxisLayout layout = classify_axes(img);
    ASSERT_EQ(layout.kind, AxisKind::axes);
    ASSERT_TRUE(layout.baseline_row);
    EXPECT_NEAR(*layout.baseline_row, 40, 1);
    const ScanOrigin origin = resolve_origin(layout, img);
    EXPECT_EQ(origin.column, 25);
    EXPECT_EQ(origin.baseline_row, 40);
}

TEST(ClassifyAxes, GridPitchMatchesRender)
{
    const SynthChart chart = chart_of(AxisKind::grid);
    const AxisLayout layout = classify_axes(binarized(chart.image));
    ASSERT_EQ(layout.kind, AxisKind::grid);
    ASSERT_TRUE(layout.grid_pitch);
    EXPECT_NEAR(*layout.grid_pitch, chart.truth.style.grid_pitch, 1.0);
    EXPECT_GE(*layout.grid_pitch, 2.0);
}

TEST(ClassifyAxes, CleanCorpusIsAlwaysRight)
{
    for (AxisKind kind : {AxisKind::none, AxisKind::box, AxisKind::axes, AxisKind::grid})
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
            EXPECT_EQ(classify_axes(binarized(chart_of(kind, seed).image)).kind, kind)
                << to_string(kind) << " seed " << seed;
}

TEST(ClassifyAxes, NoisyCorpusAfterDespeckle)
{
    int right = 0, total = 0;
    for (AxisKind kind : {AxisKind::none, AxisKind::box, AxisKind::axes, AxisKind::grid})
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const BinaryImage img = despeckle(binarized(chart_of(kind, seed, 0.005).image));
            right += classify_axes(img).kind == kind ? 1 : 0;
            ++total;
        }
    EXPECT_GE(right, total * 95 / 100);
}

TEST(ClassifyAxes, LinesStayInsideImage)
{
    for (AxisKind kind : {AxisKind::box, AxisKind::axes, AxisKind::grid}) {
        const BinaryImage img = binarized(chart_of(kind).image);
        const AxisLayout layout = classify_axes(img);
        for (const Line& l : layout.rows) {
            EXPECT_GE(l.first, 0);
            EXPECT_LT(l.last, img.height());
            EXPECT_TRUE(l.first <= l.center && l.center <= l.last);
        }
        for (const Line& l : layout.columns) {
            EXPECT_GE(l.first, 0);
            EXPECT_LT(l.last, img.width());
        }
    }
}

TEST(ForceLayoutKind, OverrideKeepsDetectedLines)
{
    const BinaryImage img = binarized(chart_of(AxisKind::box).image);
    const AxisLayout forced = force_layout_kind(classify_axes(img), AxisKind::none);
    EXPECT_EQ(forced.kind, AxisKind::none);
    EXPECT_EQ(strip_reference_lines(img, forced), img);
}

TEST(ResolveOrigin, SinglePixelWithoutAxes)
{
    BinaryImage img = blank(20, 30);
    img(7, flip_row(12, 30)) = Bit::ink;
    const ScanOrigin origin = resolve_origin(classify_axes(img), img);
    EXPECT_EQ(origin.column, 7);
    EXPECT_EQ(origin.baseline_row, 0);
}

TEST(ResolveOrigin, BlankImageIsError)
{
    const BinaryImage img = blank(10, 10);
    EXPECT_THROW(resolve_origin(classify_axes(img), img), InputError);
}

TEST(ResolveOrigin, BoxUsesLowerLeftCorner)
{
    const SynthChart chart = chart_of(AxisKind::box);
    const BinaryImage img = binarized(chart.image);
    const ScanOrigin origin = resolve_origin(classify_axes(img), img);
    EXPECT_NEAR(origin.column, chart.truth.box->left, 1);
    EXPECT_NEAR(origin.baseline_row, chart.truth.box->bottom, 1);
}

TEST(ResolveOrigin, StableUnderDespeckle)
{
    for (AxisKind kind : {AxisKind::none, AxisKind::box, AxisKind::axes, AxisKind::grid}) {
        const BinaryImage img = binarized(chart_of(kind).image);
        const BinaryImage clean = despeckle(img);
        const ScanOrigin a = resolve_origin(classify_axes(img), img);
        const ScanOrigin b = resolve_origin(classify_axes(clean), clean);
        EXPECT_EQ(a.column, b.column) << to_string(kind);
        EXPECT_EQ(a.baseline_row, b.baseline_row) << to_string(kind);
    }
}

TEST(StripReferenceLines, NoneIsUnchanged)
{
    const BinaryImage img = binarized(chart_of(AxisKind::none).image);
    EXPECT_EQ(strip_reference_lines(img, classify_axes(img)), img);
}

TEST(StripReferenceLines, BoxLeavesOnlyTrace)
{
    const SynthChart chart = chart_of(AxisKind::box);
    const BinaryImage img = binarized(chart.image);
    const BinaryImage out = strip_reference_lines(img, classify_axes(img));
    EXPECT_EQ(classify_axes(out).kind, AxisKind::none);
    EXPECT_TRUE(classify_axes(out).rows.empty());
    EXPECT_TRUE(classify_axes(out).columns.empty());
    const double want = static_cast<double>(chart.truth.trace_pixels);
    EXPECT_NEAR(static_cast<double>(count_ink(out)), want, 0.05 * want);
}

TEST(StripReferenceLines, CrossingStrokeSurvives)
{
    // 5x5 tile of a wider image: full row 2, vertical stroke at column 2
    BinaryImage img = blank(5, 5);
    for (int x = 0; x < 5; ++x)
        img(x, 2) = Bit::ink;
    for (int y = 0; y < 5; ++y)
        img(2, y) = Bit::ink;
    AxisLayout layout = classify_axes(img);
    ASSERT_EQ(layout.rows.size(), 1u);
    ASSERT_EQ(layout.rows[0].center, 2);
    layout.columns.clear(); // the stroke is trace, not a reference line
    layout = force_layout_kind(layout, AxisKind::axes);
    const BinaryImage out = strip_reference_lines(img, layout);
    BinaryImage want = blank(5, 5);
    for (int y = 0; y < 5; ++y)
        want(2, y) = Bit::ink;
    EXPECT_EQ(out, want);
}

TEST(StripReferenceLines, NeverAddsInk)
{
    for (AxisKind kind : {AxisKind::box, AxisKind::axes, AxisKind::grid})
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const BinaryImage img = binarized(chart_of(kind, seed, 0.003).image);
            const BinaryImage out = strip_reference_lines(img, classify_axes(img));
            for (std::size_t i = 0; i < img.size(); ++i)
                ASSERT_FALSE(out.pixels()[i] == Bit::ink && img.pixels()[i] != Bit::ink);
        }
}

TEST(StripReferenceLines, SkewedFrameLeavesNoResidue)
{
    for (AxisKind kind : {AxisKind::box, AxisKind::axes})
        for (double skew : {-2.0, -0.7, 1.2, 3.0}) {
            ChartStyle st;
            st.axis = kind;
            st.skew = skew;
            st.height = 400; // frame stays on canvas after rotation
            st.margin = 60;
            SpikeSpec sp;
            sp.baseline = 150;
            const SynthChart c = render_chart(make_ecg_like(768, sp), st);
            const DigitizeResult r = digitize_images({{"x.png", c.image}}, PipelineConfig{});
            EXPECT_NEAR(static_cast<double>(r.signal.size()), 768.0, 2.0)
                << to_string(kind) << " skew " << skew;
        }
}

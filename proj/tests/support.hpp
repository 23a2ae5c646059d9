#pragma once

// Fixtures shared by the unit and acceptance tests.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "chartdig/pipeline.hpp"
#include "chartdig/synth.hpp"

namespace fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir()
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("chartdig-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p)
{
    const auto bytes = chartdig::read_file(p);
    return std::string(bytes.begin(), bytes.end());
}

inline chartdig::BinaryImage binarized(const chartdig::RasterImage& img)
{
    const chartdig::GrayImage g = chartdig::to_grayscale(img);
    return chartdig::binarize(g, chartdig::otsu_threshold(g));
}

/// One long sine strip cut into three scans at two hand-drawn marks. The
/// marks sit on sine crests; each cut keeps its mark(s), so neighbouring
/// scans share the mark columns.
struct SplitStrip {
    chartdig::SynthChart whole;  ///< same strip without marks
    std::vector<chartdig::ColumnRange> marks;
    std::vector<std::pair<std::string, chartdig::RasterImage>> parts;
    std::vector<int> part_start; ///< canvas column of each part's column 0
};

inline SplitStrip split_strip(int length = 900, int mark_width = 2, double period = 200.0)
{
    using namespace chartdig;
    const std::vector<double> wave = make_sine(length, 100, 40, period);
    ChartStyle style;
    SplitStrip s{render_chart(wave, style), {}, {}, {}};
    // crests of sin at (k + 1/4) * period
    for (int k : {1, 3}) {
        const int c = style.margin + static_cast<int>(std::lround((k + 0.25) * period));
        s.marks.push_back({c, c + mark_width - 1});
    }
    style.marks = s.marks;
    const SynthChart marked = render_chart(wave, style);
    const int w = marked.image.width();
    const ColumnRange cuts[3] = {{0, s.marks[0].last}, {s.marks[0].first, s.marks[1].last}, {s.marks[1].first, w - 1}};
    for (int i = 0; i < 3; ++i) {
        s.parts.emplace_back("part" + std::to_string(i + 1) + ".png",
                             crop_columns(marked.image, cuts[i].first, cuts[i].last));
        s.part_start.push_back(cuts[i].first);
    }
    return s;
}

} // namespace fixture

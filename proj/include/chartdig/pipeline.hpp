#pragma once

// End-to-end digitization of one or more scans into a calibrated signal.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chartdig/calib.hpp"
#include "chartdig/color.hpp"
#include "chartdig/error.hpp"
#include "chartdig/image.hpp"
#include "chartdig/layout.hpp"
#include "chartdig/preprocess.hpp"
#include "chartdig/raster.hpp"
#include "chartdig/stitch.hpp"
#include "chartdig/trace.hpp"

namespace chartdig {

struct PipelineConfig {
    std::optional<GridColorSpec> grid_color; ///< unset: no colour suppression
    bool despeckle = true;
    bool deskew = true;
    SkewSearch skew;
    std::optional<AxisKind> axis_mode; ///< unset: automatic classification
    LayoutParams layout;
    std::optional<int> alpha; ///< unset: modal run thickness
    std::size_t trim_head = 0;
    std::size_t trim_tail = 0;
    MarkSpec marks;
    bool level_junctions = true;
    CalibSpec calib;
};

/// A failure tagged with the pipeline stage and input it happened in.
class StageError : public Error {
public:
    StageError(std::string stage, std::string input, const std::string& what)
        : Error(stage + " failed for " + input + ": " + what), stage_(std::move(stage)), input_(std::move(input))
    {
    }

    const std::string& stage() const noexcept { return stage_; }
    const std::string& input() const noexcept { return input_; }

private:
    std::string stage_;
    std::string input_;
};

/// Intermediate results of one scan.
struct ScanReport {
    std::string input;
    std::optional<ColumnRange> segment;
    int threshold = 0;
    SkewEstimate skew;
    AxisLayout layout;
    ScanOrigin origin;
    int alpha = 1;
    Signal1D signal; ///< interpolated and trimmed
};

namespace detail {

template <class F>
auto run_stage(const char* stage, const std::string& input, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, input, e.what());
    }
}

} // namespace detail

/// Grid suppression through interpolation for a single image; trimming is
/// applied as configured.
inline ScanReport digitize_image(const RasterImage& raw, const PipelineConfig& cfg, const std::string& name = "<image>")
{
    using detail::run_stage;
    ScanReport rep;
    rep.input = name;

    const RasterImage clean = cfg.grid_color
                                ? run_stage("suppress_grid", name, [&] { return suppress_grid(raw, *cfg.grid_color); })
                                : raw;
    const GrayImage gray = to_grayscale(clean);
    BinaryImage bin = run_stage("binarize", name, [&] {
        rep.threshold = otsu_threshold(gray);
        return binarize(gray, rep.threshold);
    });
    if (cfg.despeckle)
        bin = despeckle(bin);
    if (cfg.deskew) {
        rep.skew = run_stage("detect_skew", name, [&] { return detect_skew(bin, cfg.skew); });
        if (rep.skew.angle != 0.0)
            bin = rotate(bin, -rep.skew.angle);
    }
    rep.layout = run_stage("classify_axes", name, [&] {
        AxisLayout layout = classify_axes(bin, cfg.layout);
        return cfg.axis_mode ? force_layout_kind(std::move(layout), *cfg.axis_mode) : layout;
    });
    rep.origin = run_stage("resolve_origin", name, [&] { return resolve_origin(rep.layout, bin); });
    const BinaryImage stripped = strip_reference_lines(bin, rep.layout, cfg.layout.band);
    const TraceRuns runs = extract_runs(stripped, rep.origin);
    rep.alpha = run_stage("compute_alpha", name, [&] { return cfg.alpha ? *cfg.alpha : compute_alpha(runs); });
    const Signal1D reduced =
        run_stage("reduce_to_1d", name, [&] { return reduce_to_1d(runs, {rep.alpha, std::nullopt, cfg.calib.dpi}); });
    const Signal1D filled = run_stage("interpolate_gaps", name, [&] { return interpolate_gaps(reduced); });
    rep.signal = run_stage("trim_ends", name, [&] { return trim_ends(filled, cfg.trim_head, cfg.trim_tail); });
    return rep;
}

struct DigitizeResult {
    Signal1D signal;
    PhysicalSignal physical;
    std::vector<ScanReport> scans;
};

inline nlohmann::json to_json(const PipelineConfig& cfg)
{
    nlohmann::json j;
    if (cfg.grid_color)
        j["grid_color"] = {cfg.grid_color->center.r, cfg.grid_color->center.g, cfg.grid_color->center.b};
    else
        j["grid_color"] = nullptr;
    j["despeckle"] = cfg.despeckle;
    j["deskew"] = cfg.deskew;
    j["skew_range"] = cfg.skew.range;
    j["skew_step"] = cfg.skew.step;
    j["axis_mode"] = cfg.axis_mode ? to_string(*cfg.axis_mode) : "auto";
    j["line_coverage"] = cfg.layout.coverage;
    j["alpha"] = cfg.alpha ? nlohmann::json(*cfg.alpha) : nlohmann::json("auto");
    j["trim_head"] = cfg.trim_head;
    j["trim_tail"] = cfg.trim_tail;
    j["mark_min_height"] = cfg.marks.min_height;
    j["level_junctions"] = cfg.level_junctions;
    return j;
}

/// Digitizes scans given in paper order. Several scans are cut at their
/// marks (first / intermediate / last) and joined; a single scan is used
/// whole.
inline DigitizeResult digitize_images(const std::vector<std::pair<std::string, RasterImage>>& scans,
                                      const PipelineConfig& cfg)
{
    if (scans.empty())
        throw InputError("no input images");
    cfg.calib.validate();
    DigitizeResult result;
    std::vector<Signal1D> parts;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        const auto& [name, raw] = scans[i];
        if (scans.size() == 1) {
            result.scans.push_back(digitize_image(raw, cfg, name));
        } else {
            const StripPosition pos = position_of(i, scans.size());
            const ColumnRange seg = detail::run_stage("segment_bounds", name, [&] {
                return segment_bounds(detect_marks(raw, cfg.marks), raw.width(), pos);
            });
            ScanReport rep = digitize_image(crop_columns(raw, seg.first, seg.last), cfg, name);
            rep.segment = seg;
            result.scans.push_back(std::move(rep));
        }
        parts.push_back(result.scans.back().signal);
    }
    result.signal = detail::run_stage("append_segments", scans.back().first,
                                      [&] { return append_segments(parts, cfg.level_junctions); });
    result.physical = to_physical(result.signal, cfg.calib);

    nlohmann::json inputs = nlohmann::json::array();
    for (const ScanReport& r : result.scans) {
        nlohmann::json s{{"file", r.input},
                         {"threshold", r.threshold},
                         {"skew_degrees", r.skew.angle},
                         {"axis_kind", to_string(r.layout.kind)},
                         {"origin_column", r.origin.column},
                         {"baseline_row", r.origin.baseline_row},
                         {"alpha", r.alpha},
                         {"samples", r.signal.size()}};
        if (r.segment)
            s["segment"] = {r.segment->first, r.segment->last};
        inputs.push_back(std::move(s));
    }
    result.physical.metadata = {{"inputs", inputs}, {"pipeline", to_json(cfg)}};
    return result;
}

inline DigitizeResult digitize_files(const std::vector<std::filesystem::path>& paths, const PipelineConfig& cfg)
{
    std::vector<std::pair<std::string, RasterImage>> scans;
    for (const auto& p : paths)
        scans.emplace_back(p.string(), detail::run_stage("load_image", p.string(), [&] { return load_image(p); }));
    return digitize_images(scans, cfg);
}

} // namespace chartdig

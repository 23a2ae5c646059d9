#pragma once

// `chartdig` command line: digitize, synth and plot subcommands.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chartdig/calib.hpp"
#include "chartdig/color.hpp"
#include "chartdig/pipeline.hpp"
#include "chartdig/plot.hpp"
#include "chartdig/raster.hpp"
#include "chartdig/synth.hpp"

namespace chartdig::cli {

struct ConfigEntry {
    std::string name; ///< flag name without dashes
    std::string key;  ///< as written in the file
    std::vector<std::string> values;
};

/// Reads a flat JSON object of option values. Keys are flag names without
/// the leading dashes; underscores are accepted in place of dashes.
inline std::vector<ConfigEntry> read_json_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": not valid JSON: " + e.what());
    }
    if (!j.is_object())
        throw InputError(path.string() + ": config must be a JSON object");
    std::vector<ConfigEntry> entries;
    for (auto it = j.begin(); it != j.end(); ++it) {
        ConfigEntry entry{it.key(), it.key(), {}};
        for (char& c : entry.name)
            if (c == '_')
                c = '-';
        auto text = [&](const nlohmann::json& v) -> std::string {
            if (v.is_boolean())
                return v.get<bool>() ? "true" : "false";
            if (v.is_string())
                return v.get<std::string>();
            if (v.is_number())
                return v.dump();
            throw InputError(path.string() + ": unsupported value for '" + it.key() + "'");
        };
        if (it.value().is_array())
            for (const auto& v : it.value())
                entry.values.push_back(text(v));
        else
            entry.values.push_back(text(it.value()));
        entries.push_back(std::move(entry));
    }
    return entries;
}

/// Feeds config entries to options of `app` that were not given on the
/// command line.
inline void apply_config(CLI::App& app, const std::vector<ConfigEntry>& entries)
{
    for (const ConfigEntry& e : entries) {
        CLI::Option* opt = app.get_option_no_throw("--" + e.name);
        if (opt == nullptr || e.name == "config")
            throw InputError("unknown config key '" + e.key + "'");
        if (opt->count() > 0)
            continue;
        for (const std::string& v : e.values)
            opt->add_result(opt->get_expected_min() == 0 ? opt->get_flag_value(e.name, v) : v);
        opt->run_callback();
    }
}

namespace detail {

/// Writes every output under a temporary name and renames them only once
/// all of them were produced, so a failed run leaves nothing behind.
class StagedOutputs {
public:
    ~StagedOutputs()
    {
        std::error_code ec;
        for (const auto& [tmp, final_path] : files_)
            std::filesystem::remove(tmp, ec);
    }

    void add(const std::filesystem::path& path, const std::string& text)
    {
        std::filesystem::path tmp = path;
        tmp += ".partial";
        write_text(tmp, text);
        files_.emplace_back(tmp, path);
    }

    void add(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes)
    {
        std::filesystem::path tmp = path;
        tmp += ".partial";
        write_file(tmp, bytes);
        files_.emplace_back(tmp, path);
    }

    void commit()
    {
        for (const auto& [tmp, final_path] : files_) {
            std::error_code ec;
            std::filesystem::rename(tmp, final_path, ec);
            if (ec)
                throw IoError("cannot move output into place: " + final_path.string());
        }
        files_.clear();
    }

private:
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> files_;
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& image)
{
    std::filesystem::path p = image;
    p.replace_extension(".truth.json");
    return p;
}

} // namespace detail

struct DigitizeOptions {
    std::vector<std::string> inputs;
    std::string output;
    std::string format = "csv";
    std::string plot;
    std::string grid_color = "none";
    bool despeckle = true;
    bool deskew = true;
    double skew_range = 5.0;
    double skew_step = 0.05;
    std::string axis_mode = "auto";
    double line_coverage = 0.8;
    int alpha = 0;
    std::size_t trim_head = 0;
    std::size_t trim_tail = 0;
    std::string mark_color = "red";
    double mark_min_height = 0.5;
    bool level_junctions = true;
    double dpi = 300.0;
    double paper_speed = 25.0;
    double amplitude_scale = 10.0;
    std::string unit = "mV";
};

inline PipelineConfig make_config(const DigitizeOptions& o)
{
    PipelineConfig cfg;
    if (o.grid_color != "none")
        cfg.grid_color = parse_color_spec(o.grid_color);
    cfg.despeckle = o.despeckle;
    cfg.deskew = o.deskew;
    cfg.skew = {o.skew_range, o.skew_step};
    if (o.axis_mode != "auto")
        cfg.axis_mode = parse_axis_kind(o.axis_mode);
    if (!(o.line_coverage > 0.0 && o.line_coverage <= 1.0))
        throw InputError("line coverage must lie in (0,1]");
    cfg.layout.coverage = o.line_coverage;
    if (o.alpha < 0)
        throw InputError("alpha must be positive (0 selects the modal thickness)");
    if (o.alpha > 0)
        cfg.alpha = o.alpha;
    cfg.trim_head = o.trim_head;
    cfg.trim_tail = o.trim_tail;
    cfg.marks.color = parse_color_spec(o.mark_color);
    cfg.marks.min_height = o.mark_min_height;
    cfg.marks.validate();
    cfg.level_junctions = o.level_junctions;
    cfg.calib = {o.dpi, o.paper_speed, o.amplitude_scale, o.unit};
    cfg.calib.validate();
    return cfg;
}

inline int run_digitize(const DigitizeOptions& o, std::ostream& out, std::ostream& err)
{
    try {
        const PipelineConfig cfg = make_config(o);
        const ExportFormat format = parse_export_format(o.format);
        std::vector<std::filesystem::path> paths(o.inputs.begin(), o.inputs.end());
        const DigitizeResult result = digitize_files(paths, cfg);

        detail::StagedOutputs staged;
        staged.add(o.output, render_export(result.physical, format));
        if (!o.plot.empty())
            staged.add(o.plot, render_svg(result.physical));
        staged.commit();
        out << "wrote " << result.physical.values.size() << " samples to " << o.output << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "chartdig digitize: " << e.what() << "\n";
        return 1;
    }
}

struct SynthOptions {
    std::string output;
    std::string truth;
    std::string style = "none";
    int length = 500;
    int height = 200;
    int margin = 20;
    std::string waveform = "sine";
    double baseline = -1.0;
    double amplitude = 30.0;
    double period = 200.0;
    int spike_height = 60;
    int spike_width = 1;
    std::string grid_color;
    int grid_pitch = 0;
    int line_thickness = 1;
    int thickness = 1;
    std::vector<std::string> marks;
    std::string mark_color = "230,30,30";
    double skew = 0.0;
    double noise = 0.0;
    double dpi = 300.0;
    std::uint64_t seed = 1;
};

inline ColumnRange parse_mark(const std::string& s)
{
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            const int c = std::stoi(s);
            return {c, c};
        }
        return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw InputError("bad mark '" + s + "', expected FIRST[:LAST]");
    }
}

inline int run_synth(const SynthOptions& o, std::ostream& out, std::ostream& err)
{
    try {
        ChartStyle style;
        style.axis = parse_axis_kind(o.style);
        if (style.axis == AxisKind::grid)
            style.line_color = grid_color(HueClass::red);
        if (!o.grid_color.empty())
            style.line_color = parse_color_spec(o.grid_color).center;
        if (o.grid_pitch > 0)
            style.grid_pitch = o.grid_pitch;
        style.line_thickness = o.line_thickness;
        style.trace_thickness = o.thickness;
        for (const auto& m : o.marks)
            style.marks.push_back(parse_mark(m));
        style.mark_color = parse_color_spec(o.mark_color).center;
        style.skew = o.skew;
        style.noise = o.noise;
        style.dpi = o.dpi;
        style.height = o.height;
        style.margin = o.margin;
        style.seed = o.seed;

        std::vector<double> wave;
        if (o.waveform == "sine") {
            wave = make_sine(o.length, o.baseline >= 0 ? o.baseline : o.height / 2.0, o.amplitude, o.period);
        } else if (o.waveform == "constant") {
            wave.assign(static_cast<std::size_t>(std::max(o.length, 0)), o.baseline >= 0 ? o.baseline : o.height / 2.0);
        } else if (o.waveform == "ecg") {
            SpikeSpec spec;
            spec.period = static_cast<int>(o.period);
            spec.height = o.spike_height;
            spec.width = o.spike_width;
            spec.baseline = o.baseline >= 0 ? o.baseline : o.height / 3.0;
            spec.seed = o.seed;
            wave = make_ecg_like(o.length, spec);
        } else {
            throw InputError("unknown waveform '" + o.waveform + "'");
        }
        const SynthChart chart = render_chart(wave, style);

        const std::filesystem::path truth = o.truth.empty() ? detail::sidecar_path(o.output) : std::filesystem::path(o.truth);
        detail::StagedOutputs staged;
        staged.add(o.output, encode_png(chart.image));
        staged.add(truth, to_json(chart.truth).dump(2) + "\n");
        staged.commit();
        out << "wrote " << chart.image.width() << "x" << chart.image.height() << " chart to " << o.output << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "chartdig synth: " << e.what() << "\n";
        return 1;
    }
}

inline int run_plot(const std::string& input, const std::string& output, std::ostream& out, std::ostream& err)
{
    try {
        const PhysicalSignal sig = read_signal_json(input);
        detail::StagedOutputs staged;
        staged.add(output, render_svg(sig));
        staged.commit();
        out << "wrote " << output << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "chartdig plot: " << e.what() << "\n";
        return 1;
    }
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Digitize scanned paper chart recordings into calibrated 1-D signals", "chartdig"};
    app.require_subcommand(1);

    DigitizeOptions d;
    CLI::App* dig = app.add_subcommand("digitize", "Extract a signal from one scan or from ordered marked parts");
    std::string config_path;
    dig->add_option("--config", config_path, "JSON file setting any of the options below");
    dig->add_option("inputs", d.inputs, "Input PNG/BMP scans in paper order")->required();
    dig->add_option("-o,--output", d.output, "Data file to write")->required();
    dig->add_option("--format", d.format, "csv | ascii | json")->capture_default_str();
    dig->add_option("--plot", d.plot, "Also write an SVG plot here");
    dig->add_option("--grid-color", d.grid_color, "Grid colour to erase: none | red | green | blue | R,G,B[,TOL]")
        ->capture_default_str();
    dig->add_flag("--despeckle,!--no-despeckle", d.despeckle, "Remove isolated specks");
    dig->add_flag("--deskew,!--no-deskew", d.deskew, "Detect and correct skew");
    dig->add_option("--skew-range", d.skew_range, "Skew search half-range, degrees")->capture_default_str();
    dig->add_option("--skew-step", d.skew_step, "Skew search step, degrees")->capture_default_str();
    dig->add_option("--axis-mode", d.axis_mode, "auto | grid | box | axes | none")->capture_default_str();
    dig->add_option("--line-coverage", d.line_coverage, "Coverage making a row/column a reference line")
        ->capture_default_str();
    dig->add_option("--alpha", d.alpha, "Run thickness threshold in pixels (0 = modal thickness)")
        ->capture_default_str();
    dig->add_option("--trim-head", d.trim_head, "Samples dropped at the start of each scan")->capture_default_str();
    dig->add_option("--trim-tail", d.trim_tail, "Samples dropped at the end of each scan")->capture_default_str();
    dig->add_option("--mark-color", d.mark_color, "Stitch mark colour")->capture_default_str();
    dig->add_option("--mark-min-height", d.mark_min_height, "Fraction of image height a mark must cover")
        ->capture_default_str();
    dig->add_flag("--level-junctions,!--no-level-junctions", d.level_junctions,
                  "Shift each joined part to continue the previous one");
    dig->add_option("--dpi", d.dpi, "Scan resolution")->capture_default_str();
    dig->add_option("--paper-speed", d.paper_speed, "Paper speed, mm/s")->capture_default_str();
    dig->add_option("--amplitude-scale", d.amplitude_scale, "mm per signal unit")->capture_default_str();
    dig->add_option("--unit", d.unit, "Amplitude unit label")->capture_default_str();

    SynthOptions s;
    CLI::App* syn = app.add_subcommand("synth", "Render a synthetic chart with ground truth");
    syn->add_option("-o,--output", s.output, "PNG to write")->required();
    syn->add_option("--truth", s.truth, "Ground-truth JSON (default: output path with .truth.json extension)");
    syn->add_option("--style", s.style, "none | box | axes | grid")->capture_default_str();
    syn->add_option("--length", s.length, "Trace length in columns")->capture_default_str();
    syn->add_option("--height", s.height, "Canvas height")->capture_default_str();
    syn->add_option("--margin", s.margin, "Blank columns each side of the trace")->capture_default_str();
    syn->add_option("--waveform", s.waveform, "sine | ecg | constant")->capture_default_str();
    syn->add_option("--baseline", s.baseline, "Waveform baseline row (bottom-up)");
    syn->add_option("--amplitude", s.amplitude, "Sine amplitude, pixels")->capture_default_str();
    syn->add_option("--period", s.period, "Sine period / spike spacing, columns")->capture_default_str();
    syn->add_option("--spike-height", s.spike_height, "ECG spike height, pixels")->capture_default_str();
    syn->add_option("--spike-width", s.spike_width, "ECG spike width, columns")->capture_default_str();
    auto* grid_color_opt = syn->add_option("--grid-color", s.grid_color, "Grid line colour (style grid)");
    auto* grid_pitch_opt = syn->add_option("--grid-pitch", s.grid_pitch, "Grid pitch, pixels (style grid)");
    syn->add_option("--line-thickness", s.line_thickness, "Reference line thickness")->capture_default_str();
    syn->add_option("--thickness", s.thickness, "Trace thickness")->capture_default_str();
    syn->add_option("--mark", s.marks, "Mark columns FIRST[:LAST], repeatable");
    syn->add_option("--mark-color", s.mark_color, "Mark colour")->capture_default_str();
    syn->add_option("--skew", s.skew, "Rotation applied after drawing, degrees")->capture_default_str();
    syn->add_option("--noise", s.noise, "Isolated speck density")->capture_default_str();
    syn->add_option("--dpi", s.dpi, "Nominal resolution")->capture_default_str();
    syn->add_option("--seed", s.seed, "Random seed")->capture_default_str();

    std::string plot_in, plot_out;
    CLI::App* plt = app.add_subcommand("plot", "Plot a JSON signal export as SVG");
    plt->add_option("input", plot_in, "Signal JSON written by digitize --format json")->required();
    plt->add_option("-o,--output", plot_out, "SVG to write")->required();

    try {
        app.parse(argc, argv);
        if (dig->parsed() && !config_path.empty()) {
            try {
                apply_config(*dig, read_json_config(config_path));
            } catch (const Error& e) {
                throw CLI::ValidationError("--config", e.what());
            } catch (const CLI::ParseError&) {
                throw;
            }
        }
        if (syn->parsed() && s.style != "grid" && (grid_color_opt->count() > 0 || grid_pitch_opt->count() > 0))
            throw CLI::ValidationError("--grid-color/--grid-pitch", "only valid with --style grid");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0 && dynamic_cast<const CLI::CallForHelp*>(&e) == nullptr)
            err << app.help();
        return code;
    }

    if (dig->parsed())
        return run_digitize(d, out, err);
    if (syn->parsed())
        return run_synth(s, out, err);
    return run_plot(plot_in, plot_out, out, err);
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<const char*> argv{"chartdig"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace chartdig::cli

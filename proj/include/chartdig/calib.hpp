#pragma once

// Pixel signal to physical units, and data file export.

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "chartdig/error.hpp"
#include "chartdig/trace.hpp"

namespace chartdig {

inline constexpr double kMmPerInch = 25.4;

struct CalibSpec {
    double dpi = 300.0;
    double paper_speed = 25.0;     ///< mm per second
    double amplitude_scale = 10.0; ///< mm per signal unit
    std::string unit = "mV";

    void validate() const
    {
        if (!(dpi > 0.0) || !(paper_speed > 0.0) || !(amplitude_scale > 0.0))
            throw InputError("dpi, paper speed and amplitude scale must be positive");
    }

    double sample_period() const noexcept { return kMmPerInch / (dpi * paper_speed); }
    double units_per_pixel() const noexcept { return kMmPerInch / (dpi * amplitude_scale); }

    friend bool operator==(const CalibSpec&, const CalibSpec&) = default;
};

struct PhysicalSignal {
    double sample_period = 0.0; ///< seconds
    std::vector<double> values;
    std::string unit;
    CalibSpec calib;
    nlohmann::json metadata = nlohmann::json::object();
};

inline PhysicalSignal to_physical(const Signal1D& sig, const CalibSpec& spec, double baseline_row = 0.0)
{
    spec.validate();
    PhysicalSignal out;
    out.sample_period = spec.sample_period();
    out.unit = spec.unit;
    out.calib = spec;
    out.values.reserve(sig.samples.size());
    const double scale = spec.units_per_pixel();
    for (const Sample& s : sig.samples)
        out.values.push_back((s.value - baseline_row) * scale);
    return out;
}

enum class ExportFormat { csv, ascii, json };

inline ExportFormat parse_export_format(const std::string& s)
{
    if (s == "csv")
        return ExportFormat::csv;
    if (s == "ascii" || s == "ascii-column")
        return ExportFormat::ascii;
    if (s == "json")
        return ExportFormat::json;
    throw InputError("unknown output format '" + s + "'");
}

namespace detail {

/// Shortest representation that reads back to the same double.
inline std::string format_shortest(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int precision)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

} // namespace detail

inline nlohmann::json to_json(const PhysicalSignal& sig)
{
    nlohmann::json j;
    j["sample_period"] = sig.sample_period;
    j["unit"] = sig.unit;
    j["calibration"] = {{"dpi", sig.calib.dpi},
                        {"paper_speed_mm_per_s", sig.calib.paper_speed},
                        {"amplitude_mm_per_unit", sig.calib.amplitude_scale},
                        {"unit", sig.calib.unit}};
    j["metadata"] = sig.metadata;
    j["samples"] = sig.values;
    return j;
}

inline PhysicalSignal physical_from_json(const nlohmann::json& j)
{
    try {
        PhysicalSignal sig;
        sig.sample_period = j.at("sample_period").get<double>();
        sig.unit = j.at("unit").get<std::string>();
        const auto& c = j.at("calibration");
        sig.calib.dpi = c.at("dpi").get<double>();
        sig.calib.paper_speed = c.at("paper_speed_mm_per_s").get<double>();
        sig.calib.amplitude_scale = c.at("amplitude_mm_per_unit").get<double>();
        sig.calib.unit = c.at("unit").get<std::string>();
        sig.metadata = j.value("metadata", nlohmann::json::object());
        sig.values = j.at("samples").get<std::vector<double>>();
        return sig;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed signal JSON: ") + e.what());
    }
}

/// File body for the given format. CSV: `t,value` header then one row per
/// sample, time with six decimals. ASCII: one amplitude per line.
inline std::string render_export(const PhysicalSignal& sig, ExportFormat format)
{
    std::string out;
    switch (format) {
    case ExportFormat::csv:
        out = "t,value\n";
        for (std::size_t k = 0; k < sig.values.size(); ++k) {
            out += detail::format_fixed(static_cast<double>(k) * sig.sample_period, 6);
            out += ',';
            out += detail::format_shortest(sig.values[k]);
            out += '\n';
        }
        break;
    case ExportFormat::ascii:
        for (double v : sig.values) {
            out += detail::format_shortest(v);
            out += '\n';
        }
        break;
    case ExportFormat::json:
        out = to_json(sig).dump(2);
        out += '\n';
        break;
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open for writing: " + path.string());
    f << text;
    f.flush();
    if (!f)
        throw IoError("write failed: " + path.string());
}

inline void export_signal(const PhysicalSignal& sig, ExportFormat format, const std::filesystem::path& path)
{
    write_text(path, render_export(sig, format));
}

inline PhysicalSignal read_signal_json(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return physical_from_json(j);
}

} // namespace chartdig

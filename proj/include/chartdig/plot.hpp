#pragma once

// SVG re-plot of a calibrated signal: one polyline plus labelled axes.

#include <algorithm>
#include <filesystem>
#include <string>

#include "chartdig/calib.hpp"
#include "chartdig/error.hpp"

namespace chartdig {

struct PlotLayout {
    int width = 800;
    int height = 300;
    int left = 70;
    int right = 20;
    int top = 20;
    int bottom = 50;
    int ticks = 5;
};

namespace detail {

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string tick_label(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
    return std::string(buf, res.ptr);
}

} // namespace detail

inline std::string render_svg(const PhysicalSignal& sig, const PlotLayout& L = {})
{
    if (sig.values.empty())
        throw InputError("cannot plot an empty signal");
    const double pw = L.width - L.left - L.right;
    const double ph = L.height - L.top - L.bottom;
    const std::size_t n = sig.values.size();
    const double t_end = n > 1 ? static_cast<double>(n - 1) * sig.sample_period : sig.sample_period;
    const auto [lo_it, hi_it] = std::minmax_element(sig.values.begin(), sig.values.end());
    const double vmin = *lo_it;
    const double vmax = *hi_it;
    const double span = vmax - vmin;

    auto px = [&](double t) { return L.left + (t_end > 0 ? t / t_end : 0.0) * pw; };
    auto py = [&](double v) { return span > 0 ? L.top + (vmax - v) / span * ph : L.top + ph / 2.0; };
    auto num = [](double v) { return detail::format_fixed(v, 2); };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(L.width) + "\" height=\""
       + std::to_string(L.height) + "\" viewBox=\"0 0 " + std::to_string(L.width) + " " + std::to_string(L.height)
       + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(L.width) + "\" height=\"" + std::to_string(L.height)
       + "\" fill=\"white\"/>\n";
    s += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    s += "<line x1=\"" + num(L.left) + "\" y1=\"" + num(L.top + ph) + "\" x2=\"" + num(L.left + pw) + "\" y2=\""
       + num(L.top + ph) + "\"/>\n";
    s += "<line x1=\"" + num(L.left) + "\" y1=\"" + num(L.top) + "\" x2=\"" + num(L.left) + "\" y2=\""
       + num(L.top + ph) + "\"/>\n";
    s += "</g>\n";

    s += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    for (int k = 0; k <= L.ticks; ++k) {
        const double f = static_cast<double>(k) / L.ticks;
        const double t = f * t_end;
        const double x = L.left + f * pw;
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(L.top + ph) + "\" x2=\"" + num(x) + "\" y2=\""
           + num(L.top + ph + 4) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(x) + "\" y=\"" + num(L.top + ph + 16) + "\" text-anchor=\"middle\">"
           + detail::tick_label(t) + "</text>\n";
        const double v = span > 0 ? vmin + f * span : vmin;
        const double y = py(v);
        if (span > 0 || k == 0) {
            s += "<line x1=\"" + num(L.left - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(L.left) + "\" y2=\""
               + num(y) + "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + num(L.left - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">"
               + detail::tick_label(v) + "</text>\n";
        }
    }
    s += "<text x=\"" + num(L.left + pw / 2) + "\" y=\"" + num(L.height - 8.0)
       + "\" text-anchor=\"middle\">time (s)</text>\n";
    s += "<text x=\"14\" y=\"" + num(L.top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       + num(L.top + ph / 2) + ")\">amplitude (" + detail::xml_escape(sig.unit) + ")</text>\n";
    s += "</g>\n";

    s += "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0)
            s += ' ';
        s += num(px(static_cast<double>(k) * sig.sample_period)) + "," + num(py(sig.values[k]));
    }
    s += "\"/>\n</svg>\n";
    return s;
}

inline void emit_plot(const PhysicalSignal& sig, const std::filesystem::path& path)
{
    write_text(path, render_svg(sig));
}

} // namespace chartdig

#pragma once

#include <array>
#include <cstdlib>
#include <string>

#include "chartdig/error.hpp"
#include "chartdig/image.hpp"

namespace chartdig {

enum class HueClass { red, green, blue, custom };

/// Box-shaped colour match: a pixel matches when every channel lies within
/// its tolerance of `center`. Named hue classes additionally require the
/// hue channel to exceed both other channels by `dominance`, so that dark
/// trace ink never matches.
struct ColorSpec {
    HueClass hue = HueClass::custom;
    Rgb center{};
    std::array<int, 3> tolerance{0, 0, 0};
    int dominance = 0;

    static ColorSpec named(HueClass hue)
    {
        switch (hue) {
        case HueClass::red: return {hue, {220, 80, 80}, {90, 90, 90}, 30};
        case HueClass::green: return {hue, {80, 200, 80}, {90, 90, 90}, 30};
        case HueClass::blue: return {hue, {80, 80, 220}, {90, 90, 90}, 30};
        case HueClass::custom: break;
        }
        throw InputError("custom colour spec needs an explicit centre");
    }

    static ColorSpec custom(Rgb center, std::array<int, 3> tolerance)
    {
        ColorSpec spec{HueClass::custom, center, tolerance, 0};
        spec.validate();
        return spec;
    }

    void validate() const
    {
        for (int t : tolerance)
            if (t < 0 || t > 255)
                throw InputError("colour tolerance must lie in [0,255]");
        if (dominance < 0 || dominance > 255)
            throw InputError("colour dominance must lie in [0,255]");
    }

    bool matches(Rgb p) const noexcept
    {
        const std::array<int, 3> px{p.r, p.g, p.b};
        const std::array<int, 3> c{center.r, center.g, center.b};
        for (int i = 0; i < 3; ++i)
            if (std::abs(px[i] - c[i]) > tolerance[i])
                return false;
        if (hue == HueClass::custom)
            return true;
        const int k = hue == HueClass::red ? 0 : hue == HueClass::green ? 1 : 2;
        for (int i = 0; i < 3; ++i)
            if (i != k && px[k] - px[i] < dominance)
                return false;
        return true;
    }
};

using GridColorSpec = ColorSpec;

/// Accepts "red", "green", "blue" or "R,G,B[,TOL]" (TOL defaults to 40).
inline ColorSpec parse_color_spec(const std::string& text)
{
    if (text == "red")
        return ColorSpec::named(HueClass::red);
    if (text == "green")
        return ColorSpec::named(HueClass::green);
    if (text == "blue")
        return ColorSpec::named(HueClass::blue);

    std::array<int, 4> v{0, 0, 0, 40};
    std::size_t n = 0;
    std::size_t pos = 0;
    while (n < v.size()) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(text.substr(pos), &used);
        } catch (const std::exception&) {
            throw InputError("bad colour spec '" + text + "'");
        }
        v[n++] = value;
        pos += used;
        if (pos == text.size())
            break;
        if (text[pos] != ',')
            throw InputError("bad colour spec '" + text + "'");
        ++pos;
    }
    if (pos != text.size() || n < 3)
        throw InputError("bad colour spec '" + text + "'");
    for (std::size_t i = 0; i < 3; ++i)
        if (v[i] < 0 || v[i] > 255)
            throw InputError("colour channel out of range in '" + text + "'");
    return ColorSpec::custom(
        {static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2])},
        {v[3], v[3], v[3]});
}

} // namespace chartdig

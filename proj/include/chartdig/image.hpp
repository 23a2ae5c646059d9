#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chartdig/error.hpp"

namespace chartdig {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend constexpr bool operator==(Rgb, Rgb) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

/// Binary pixel state. `ink` is the dark foreground class.
enum class Bit : std::uint8_t { background = 0, ink = 1 };

/// Row-major raster with rows stored top to bottom.
///
/// Dimensions are fixed at construction; both must be positive.
template <class Pixel>
class Image {
public:
    using pixel_type = Pixel;

    Image(int width, int height, Pixel fill = Pixel{})
        : width_(width), height_(height)
    {
        check_dims(width, height);
        pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Image(int width, int height, std::vector<Pixel> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels))
    {
        check_dims(width, height);
        if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw InputError("pixel buffer size does not match image dimensions");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    bool contains(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    Pixel& operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }
    const Pixel& operator()(int x, int y) const noexcept { return pixels_[index(x, y)]; }

    /// Out-of-bounds reads return `outside`.
    Pixel at_or(int x, int y, Pixel outside) const noexcept
    {
        return contains(x, y) ? pixels_[index(x, y)] : outside;
    }

    std::span<const Pixel> pixels() const noexcept { return pixels_; }
    std::span<Pixel> pixels() noexcept { return pixels_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    static void check_dims(int width, int height)
    {
        if (width <= 0 || height <= 0)
            throw InputError("image dimensions must be positive");
    }

    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<Pixel> pixels_;
};

using RasterImage = Image<Rgb>;
using GrayImage = Image<std::uint8_t>;
using BinaryImage = Image<Bit>;

inline bool is_ink(const BinaryImage& img, int x, int y) noexcept
{
    return img.at_or(x, y, Bit::background) == Bit::ink;
}

inline std::size_t count_ink(const BinaryImage& img) noexcept
{
    std::size_t n = 0;
    for (Bit b : img.pixels())
        n += b == Bit::ink ? 1 : 0;
    return n;
}

/// Converts a storage row (top-down) to a signal row (bottom-up) and back.
inline constexpr int flip_row(int row, int height) noexcept { return height - 1 - row; }

/// Copies columns [first, last] into a new image.
template <class Pixel>
Image<Pixel> crop_columns(const Image<Pixel>& img, int first, int last)
{
    if (first < 0 || last >= img.width() || first > last)
        throw InputError("column crop out of range");
    Image<Pixel> out(last - first + 1, img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = first; x <= last; ++x)
            out(x - first, y) = img(x, y);
    return out;
}

} // namespace chartdig

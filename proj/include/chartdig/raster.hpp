#pragma once

// Image file I/O (PNG, BMP) and colour to grayscale conversion.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "chartdig/error.hpp"
#include "chartdig/image.hpp"

namespace chartdig {

namespace detail {

inline std::uint32_t read_be32(const std::uint8_t* p) noexcept
{
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

inline std::uint32_t read_le32(const std::uint8_t* p) noexcept
{
    return (std::uint32_t{p[3]} << 24) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[1]} << 8) | p[0];
}

inline std::uint16_t read_le16(const std::uint8_t* p) noexcept
{
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_le16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline constexpr std::array<std::uint8_t, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

inline std::uint8_t paeth(int a, int b, int c) noexcept
{
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc)
        return static_cast<std::uint8_t>(a);
    if (pb <= pc)
        return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

inline std::vector<std::uint8_t> inflate_all(std::span<const std::uint8_t> src, std::size_t expected)
{
    std::vector<std::uint8_t> out(expected);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK)
        throw DecodeError("PNG: zlib initialisation failed");
    zs.next_in = const_cast<Bytef*>(src.data());
    zs.avail_in = static_cast<uInt>(src.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    const std::size_t produced = zs.total_out;
    inflateEnd(&zs);
    if ((rc != Z_STREAM_END && rc != Z_BUF_ERROR) || produced != expected)
        throw DecodeError("PNG: corrupt image data stream");
    return out;
}

inline RasterImage decode_png(std::span<const std::uint8_t> data)
{
    std::size_t pos = kPngSignature.size();
    std::uint32_t width = 0, height = 0;
    int color_type = -1;
    int depth = 8;
    std::vector<Rgb> palette;
    std::vector<std::uint8_t> idat;
    bool seen_end = false;

    while (!seen_end) {
        if (pos + 12 > data.size())
            throw DecodeError("PNG: truncated chunk");
        const std::uint32_t len = read_be32(&data[pos]);
        if (len > data.size() - pos - 12)
            throw DecodeError("PNG: chunk length exceeds file size");
        const std::uint8_t* type = &data[pos + 4];
        const std::uint8_t* body = &data[pos + 8];
        const std::uint32_t crc = read_be32(body + len);
        if (crc32(crc32(0L, Z_NULL, 0), type, len + 4) != crc)
            throw DecodeError("PNG: chunk CRC mismatch");
        const std::string tag(reinterpret_cast<const char*>(type), 4);

        if (tag == "IHDR") {
            if (len != 13)
                throw DecodeError("PNG: bad IHDR length");
            width = read_be32(body);
            height = read_be32(body + 4);
            depth = body[8];
            color_type = body[9];
            const bool low_ok = color_type == 0 || color_type == 3;
            const bool ok = (depth == 8) || (depth == 16 && color_type != 3)
                         || (low_ok && (depth == 1 || depth == 2 || depth == 4));
            if (color_type != 0 && color_type != 2 && color_type != 3 && color_type != 4 && color_type != 6)
                throw DecodeError("PNG: unsupported colour type");
            if (!ok)
                throw DecodeError("PNG: unsupported bit depth " + std::to_string(depth));
            if (body[10] != 0 || body[11] != 0)
                throw DecodeError("PNG: unknown compression or filter method");
            if (body[12] != 0)
                throw DecodeError("PNG: interlaced images are not supported");
            if (width == 0 || height == 0 || width > (1u << 24) || height > (1u << 24))
                throw DecodeError("PNG: invalid dimensions");
        } else if (tag == "PLTE") {
            if (len % 3 != 0)
                throw DecodeError("PNG: bad palette length");
            for (std::uint32_t i = 0; i < len; i += 3)
                palette.push_back({body[i], body[i + 1], body[i + 2]});
        } else if (tag == "IDAT") {
            idat.insert(idat.end(), body, body + len);
        } else if (tag == "IEND") {
            seen_end = true;
        } else if ((type[0] & 0x20) == 0) {
            throw DecodeError("PNG: unknown critical chunk " + tag);
        }
        pos += 12 + len;
    }
    if (color_type < 0)
        throw DecodeError("PNG: missing IHDR");
    if (color_type == 3 && palette.empty())
        throw DecodeError("PNG: palette image without PLTE");

    const std::size_t channels = color_type == 0 ? 1 : color_type == 2 ? 3 : color_type == 3 ? 1 : color_type == 4 ? 2 : 4;
    const std::size_t bits = channels * static_cast<std::size_t>(depth);
    const std::size_t stride = (bits * width + 7) / 8;
    const std::size_t unit = std::max<std::size_t>(1, bits / 8); // filter byte distance
    std::vector<std::uint8_t> raw = inflate_all(idat, (stride + 1) * height);

    // Sample `index` of a row as an 8-bit value (16-bit keeps the high byte).
    auto sample = [depth](const std::uint8_t* row, std::size_t index) -> std::uint8_t {
        switch (depth) {
        case 8: return row[index];
        case 16: return row[2 * index];
        default: {
            const std::size_t bit = index * static_cast<std::size_t>(depth);
            const int shift = 8 - depth - static_cast<int>(bit % 8);
            return static_cast<std::uint8_t>((row[bit / 8] >> shift) & ((1 << depth) - 1));
        }
        }
    };
    const int gray_scale = depth < 8 ? 255 / ((1 << depth) - 1) : 1;

    std::vector<std::uint8_t> prev(stride, 0);
    std::vector<Rgb> pixels;
    pixels.reserve(static_cast<std::size_t>(width) * height);
    for (std::uint32_t y = 0; y < height; ++y) {
        std::uint8_t* row = &raw[y * (stride + 1)];
        const int filter = row[0];
        std::uint8_t* cur = row + 1;
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= unit ? cur[i - unit] : 0;
            const int b = prev[i];
            const int c = i >= unit ? prev[i - unit] : 0;
            switch (filter) {
            case 0: break;
            case 1: cur[i] = static_cast<std::uint8_t>(cur[i] + a); break;
            case 2: cur[i] = static_cast<std::uint8_t>(cur[i] + b); break;
            case 3: cur[i] = static_cast<std::uint8_t>(cur[i] + (a + b) / 2); break;
            case 4: cur[i] = static_cast<std::uint8_t>(cur[i] + paeth(a, b, c)); break;
            default: throw DecodeError("PNG: invalid row filter");
            }
        }
        for (std::uint32_t x = 0; x < width; ++x) {
            const std::size_t base = x * channels;
            switch (color_type) {
            case 0:
            case 4: {
                const auto v = static_cast<std::uint8_t>(sample(cur, base) * gray_scale);
                pixels.push_back({v, v, v});
                break;
            }
            case 2:
            case 6: pixels.push_back({sample(cur, base), sample(cur, base + 1), sample(cur, base + 2)}); break;
            case 3: {
                const std::uint8_t idx = sample(cur, base);
                if (idx >= palette.size())
                    throw DecodeError("PNG: palette index out of range");
                pixels.push_back(palette[idx]);
                break;
            }
            }
        }
        std::memcpy(prev.data(), cur, stride);
    }
    return RasterImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

inline RasterImage decode_bmp(std::span<const std::uint8_t> data)
{
    if (data.size() < 54)
        throw DecodeError("BMP: truncated header");
    const std::uint32_t offset = read_le32(&data[10]);
    const std::uint32_t dib = read_le32(&data[14]);
    if (dib < 40)
        throw DecodeError("BMP: unsupported header version");
    const auto width = static_cast<std::int32_t>(read_le32(&data[18]));
    const auto raw_height = static_cast<std::int32_t>(read_le32(&data[22]));
    const int bpp = read_le16(&data[28]);
    const std::uint32_t compression = read_le32(&data[30]);
    if (bpp != 24 && bpp != 32)
        throw DecodeError("BMP: only 24- and 32-bit images are supported");
    if (compression != 0 && !(compression == 3 && bpp == 32))
        throw DecodeError("BMP: compressed images are not supported");
    if (width <= 0 || raw_height == 0 || width > (1 << 24) || raw_height == INT32_MIN)
        throw DecodeError("BMP: invalid dimensions");
    const bool top_down = raw_height < 0;
    const int height = top_down ? -raw_height : raw_height;
    if (height > (1 << 24))
        throw DecodeError("BMP: invalid dimensions");
    const std::size_t stride = ((static_cast<std::size_t>(bpp) * width + 31) / 32) * 4;
    if (offset > data.size() || stride * height > data.size() - offset)
        throw DecodeError("BMP: pixel data truncated");

    RasterImage img(width, height);
    const std::size_t step = bpp / 8;
    for (int row = 0; row < height; ++row) {
        const int y = top_down ? row : height - 1 - row;
        const std::uint8_t* src = &data[offset + row * stride];
        for (int x = 0; x < width; ++x) {
            const std::uint8_t* p = src + x * step;
            img(x, y) = {p[2], p[1], p[0]};
        }
    }
    return img;
}

} // namespace detail

/// Decodes PNG or BMP bytes, chosen by signature.
inline RasterImage decode_image(std::span<const std::uint8_t> data)
{
    if (data.empty())
        throw DecodeError("empty file: no image format signature");
    if (data.size() >= 8 && std::equal(detail::kPngSignature.begin(), detail::kPngSignature.end(), data.begin()))
        return detail::decode_png(data);
    if (data.size() >= 2 && data[0] == 'B' && data[1] == 'M')
        return detail::decode_bmp(data);
    throw DecodeError("unsupported image format (expected PNG or BMP signature)");
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed: " + path.string());
    return bytes;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed: " + path.string());
}

inline RasterImage load_image(const std::filesystem::path& path)
{
    const auto bytes = read_file(path);
    try {
        return decode_image(bytes);
    } catch (const DecodeError& e) {
        throw DecodeError(path.string() + ": " + e.what());
    }
}

/// 8-bit RGB, non-interlaced, filter 0 on every row. Output is a pure
/// function of the pixels.
inline std::vector<std::uint8_t> encode_png(const RasterImage& img)
{
    const std::size_t stride = 3 * static_cast<std::size_t>(img.width());
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * img.height());
    for (int y = 0; y < img.height(); ++y) {
        raw.push_back(0);
        for (int x = 0; x < img.width(); ++x) {
            const Rgb p = img(x, y);
            raw.push_back(p.r);
            raw.push_back(p.g);
            raw.push_back(p.b);
        }
    }
    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> z(zlen);
    if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw Error("PNG: compression failed");
    z.resize(zlen);

    std::vector<std::uint8_t> out(detail::kPngSignature.begin(), detail::kPngSignature.end());
    auto chunk = [&out](const char* tag, std::span<const std::uint8_t> body) {
        detail::put_be32(out, static_cast<std::uint32_t>(body.size()));
        const std::size_t start = out.size();
        out.insert(out.end(), tag, tag + 4);
        out.insert(out.end(), body.begin(), body.end());
        detail::put_be32(out, static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), &out[start], static_cast<uInt>(body.size() + 4))));
    };
    std::vector<std::uint8_t> ihdr;
    detail::put_be32(ihdr, static_cast<std::uint32_t>(img.width()));
    detail::put_be32(ihdr, static_cast<std::uint32_t>(img.height()));
    ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
    chunk("IHDR", ihdr);
    chunk("IDAT", z);
    chunk("IEND", {});
    return out;
}

/// Uncompressed 24-bit, bottom-up rows.
inline std::vector<std::uint8_t> encode_bmp(const RasterImage& img)
{
    const std::size_t stride = ((24 * static_cast<std::size_t>(img.width()) + 31) / 32) * 4;
    const auto data_size = static_cast<std::uint32_t>(stride * img.height());
    std::vector<std::uint8_t> out;
    out.reserve(54 + data_size);
    out.push_back('B');
    out.push_back('M');
    detail::put_le32(out, 54 + data_size);
    detail::put_le32(out, 0);
    detail::put_le32(out, 54);
    detail::put_le32(out, 40);
    detail::put_le32(out, static_cast<std::uint32_t>(img.width()));
    detail::put_le32(out, static_cast<std::uint32_t>(img.height()));
    detail::put_le16(out, 1);
    detail::put_le16(out, 24);
    detail::put_le32(out, 0);
    detail::put_le32(out, data_size);
    detail::put_le32(out, 2835);
    detail::put_le32(out, 2835);
    detail::put_le32(out, 0);
    detail::put_le32(out, 0);
    for (int y = img.height() - 1; y >= 0; --y) {
        std::size_t written = 0;
        for (int x = 0; x < img.width(); ++x) {
            const Rgb p = img(x, y);
            out.insert(out.end(), {p.b, p.g, p.r});
            written += 3;
        }
        out.resize(out.size() + (stride - written), 0);
    }
    return out;
}

inline void write_png(const std::filesystem::path& path, const RasterImage& img)
{
    write_file(path, encode_png(img));
}

inline void write_bmp(const std::filesystem::path& path, const RasterImage& img)
{
    write_file(path, encode_bmp(img));
}

/// BT.601 luma, rounded half up: round(0.299 R + 0.587 G + 0.114 B).
inline constexpr std::uint8_t luma(Rgb p) noexcept
{
    const unsigned v = (299u * p.r + 587u * p.g + 114u * p.b + 500u) / 1000u;
    return static_cast<std::uint8_t>(v > 255u ? 255u : v);
}

inline GrayImage to_grayscale(const RasterImage& img)
{
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = luma(src[i]);
    return out;
}

} // namespace chartdig

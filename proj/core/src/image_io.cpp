#include "distvar/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace distvar {

bool has_suffix(const std::string& path, const std::string& suffix) {
    if (path.size() < suffix.size()) return false;
    return std::equal(suffix.rbegin(), suffix.rend(), path.rbegin(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) ==
               std::tolower(static_cast<unsigned char>(b));
    });
}

ScalarField luminance(const Image& img) {
    if (img.planes.empty()) throw std::invalid_argument("luminance: empty image");
    if (!img.rgb()) return img.planes[0];
    const ScalarField& r = img.planes[0];
    ScalarField out(r.width, r.height, 0.0, r.pixel_pitch);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 0.299 * img.planes[0][i] + 0.587 * img.planes[1][i] + 0.114 * img.planes[2][i];
    return out;
}

namespace {

struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 or 3
    double maxval = 255.0;
    std::vector<double> samples;  // interleaved raw integer values
};

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

RawImage read_png_raw(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("read_image: cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw std::runtime_error("read_image: not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("read_image: png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("read_image: png init failed");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_image: failed to decode " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    png_byte bit_depth = png_get_bit_depth(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if ((color_type & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    if (bit_depth == 16) png_set_swap(png);  // native little-endian in memory
    png_read_update_info(png, info);

    RawImage raw;
    raw.width = int(png_get_image_width(png, info));
    raw.height = int(png_get_image_height(png, info));
    bit_depth = png_get_bit_depth(png, info);
    raw.channels = int(png_get_channels(png, info));
    raw.maxval = bit_depth == 16 ? 65535.0 : 255.0;
    if (raw.channels != 1 && raw.channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_image: unsupported channel count in " + path);
    }

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    buffer.resize(row_bytes * raw.height);
    row_ptrs.resize(raw.height);
    for (int y = 0; y < raw.height; ++y) row_ptrs[y] = buffer.data() + y * row_bytes;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    raw.samples.resize(std::size_t(raw.width) * raw.height * raw.channels);
    if (bit_depth == 16) {
        for (std::size_t i = 0; i < raw.samples.size(); ++i) {
            std::uint16_t v;
            std::memcpy(&v, buffer.data() + 2 * i, 2);
            raw.samples[i] = double(v);
        }
    } else {
        for (std::size_t i = 0; i < raw.samples.size(); ++i) raw.samples[i] = double(buffer[i]);
    }
    return raw;
}

RawImage read_pgm_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_image: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("read_image: expected binary PGM (P5): " + path);
    auto next_token = [&in, &path]() {
        // Skips whitespace and '#' comment lines.
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
            if (!in) throw std::runtime_error("read_image: truncated PGM header: " + path);
        }
        long value = 0;
        in >> value;
        if (!in) throw std::runtime_error("read_image: bad PGM header: " + path);
        return value;
    };
    RawImage raw;
    raw.width = int(next_token());
    raw.height = int(next_token());
    const long maxval = next_token();
    if (raw.width <= 0 || raw.height <= 0 || maxval <= 0 || maxval > 65535)
        throw std::runtime_error("read_image: bad PGM dimensions/maxval: " + path);
    raw.channels = 1;
    raw.maxval = double(maxval);
    in.get();  // single whitespace after maxval

    const std::size_t count = std::size_t(raw.width) * raw.height;
    raw.samples.resize(count);
    if (maxval < 256) {
        std::vector<unsigned char> buf(count);
        in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(count));
        if (!in) throw std::runtime_error("read_image: truncated PGM data: " + path);
        for (std::size_t i = 0; i < count; ++i) raw.samples[i] = double(buf[i]);
    } else {
        std::vector<unsigned char> buf(count * 2);
        in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(count * 2));
        if (!in) throw std::runtime_error("read_image: truncated PGM data: " + path);
        for (std::size_t i = 0; i < count; ++i)
            raw.samples[i] = double((unsigned(buf[2 * i]) << 8) | buf[2 * i + 1]);  // big-endian
    }
    return raw;
}

RawImage read_raw(const std::string& path) {
    if (has_suffix(path, ".pgm")) return read_pgm_raw(path);
    return read_png_raw(path);
}

ScalarField read_pfm(const std::string& path, double pixel_pitch) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_depth: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "Pf")
        throw std::runtime_error("read_depth: only grayscale PFM (Pf) is supported: " + path);
    int w = 0, h = 0;
    double scale = 0.0;
    in >> w >> h >> scale;
    if (!in || w <= 0 || h <= 0 || scale == 0.0)
        throw std::runtime_error("read_depth: bad PFM header: " + path);
    in.get();  // newline before the raster
    const bool little_endian = scale < 0.0;
    std::vector<unsigned char> buf(std::size_t(w) * h * 4);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (!in) throw std::runtime_error("read_depth: truncated PFM data: " + path);
    ScalarField out(w, h, 0.0, pixel_pitch);
    for (int y = 0; y < h; ++y) {
        // PFM rows run bottom to top.
        const int src_y = h - 1 - y;
        for (int x = 0; x < w; ++x) {
            const unsigned char* p = buf.data() + (std::size_t(src_y) * w + x) * 4;
            std::uint32_t bits = little_endian
                                     ? (std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                                        (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24))
                                     : (std::uint32_t(p[3]) | (std::uint32_t(p[2]) << 8) |
                                        (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[0]) << 24));
            float v;
            std::memcpy(&v, &bits, 4);
            out.at(x, y) = double(v);
        }
    }
    return out;
}

}  // namespace

Image read_image(const std::string& path) {
    const RawImage raw = read_raw(path);
    Image img;
    img.planes.assign(raw.channels, ScalarField(raw.width, raw.height));
    for (int y = 0; y < raw.height; ++y)
        for (int x = 0; x < raw.width; ++x)
            for (int c = 0; c < raw.channels; ++c)
                img.planes[c].at(x, y) =
                    raw.samples[(std::size_t(y) * raw.width + x) * raw.channels + c] / raw.maxval;
    return img;
}

void write_image_png16(const Image& img, const std::string& path) {
    if (img.planes.size() != 1 && img.planes.size() != 3)
        throw std::invalid_argument("write_image_png16: need 1 or 3 planes");
    const int w = img.width(), h = img.height();
    const int channels = int(img.planes.size());

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("write_image_png16: cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("write_image_png16: png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("write_image_png16: png init failed");
    }
    std::vector<std::uint16_t> row(std::size_t(w) * channels);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_image_png16: failed to encode " + path);
    }
    png_init_io(png, fp.get());
    // Fixed settings so identical pixels produce identical bytes.
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, w, h, 16,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);  // native little-endian rows

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                const double v = std::min(1.0, std::max(0.0, img.planes[c].at(x, y)));
                row[std::size_t(x) * channels + c] =
                    std::uint16_t(std::lround(v * 65535.0));
            }
        }
        png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_image_png16(const ScalarField& field, const std::string& path) {
    Image img;
    img.planes.push_back(field);
    write_image_png16(img, path);
}

ScalarField read_depth(const std::string& path, double depth_scale, double pixel_pitch) {
    if (has_suffix(path, ".pfm")) return read_pfm(path, pixel_pitch);
    const RawImage raw = read_raw(path);
    if (raw.channels != 1)
        throw std::runtime_error("read_depth: depth maps must be single-channel: " + path);
    if (depth_scale <= 0.0) throw std::invalid_argument("read_depth: depth_scale must be > 0");
    ScalarField out(raw.width, raw.height, 0.0, pixel_pitch);
    for (std::size_t i = 0; i < raw.samples.size(); ++i) out[i] = raw.samples[i] * depth_scale;
    return out;
}

void write_pfm(const ScalarField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pfm: cannot open " + path);
    out << "Pf\n" << field.width << " " << field.height << "\n-1.0\n";
    for (int y = field.height - 1; y >= 0; --y) {
        for (int x = 0; x < field.width; ++x) {
            const float v = float(field.at(x, y));
            std::uint32_t bits;
            std::memcpy(&bits, &v, 4);
            const unsigned char bytes[4] = {
                static_cast<unsigned char>(bits & 0xff),
                static_cast<unsigned char>((bits >> 8) & 0xff),
                static_cast<unsigned char>((bits >> 16) & 0xff),
                static_cast<unsigned char>((bits >> 24) & 0xff)};
            out.write(reinterpret_cast<const char*>(bytes), 4);
        }
    }
    if (!out) throw std::runtime_error("write_pfm: write failed for " + path);
}

}  // namespace distvar

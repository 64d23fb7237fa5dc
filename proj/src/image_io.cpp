#include <png.h>

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "curvseg/lattice.hpp"

namespace curvseg {

namespace {

bool has_png_signature(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool has_pgm_signature(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5';
}

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    int next_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw Error("malformed PGM header");
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (1L << 24)) {
                throw Error("malformed PGM header");
            }
            ++pos_;
        }
        return static_cast<int>(value);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t data_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw Error("unexpected end of image data");
        }
        return pos_ + 1;
    }

    void skip(std::size_t n) { pos_ += n; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

double luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return std::round(0.299 * r + 0.587 * g + 0.114 * b);
}

std::vector<std::uint8_t> encode_png_raw(int width, int height, std::uint32_t format, const std::uint8_t* pixels) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open file: " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

RasterGray decode_pgm(std::span<const std::uint8_t> bytes) {
    if (!has_pgm_signature(bytes)) {
        throw Error("not a binary PGM (P5) file");
    }
    PgmHeaderReader reader(bytes);
    reader.skip(2);
    const int width = reader.next_int();
    const int height = reader.next_int();
    const int maxval = reader.next_int();
    if (width <= 0 || height <= 0) {
        throw Error("PGM dimensions must be positive");
    }
    if (maxval != 255) {
        throw Error("unsupported bit depth: PGM maxval " + std::to_string(maxval) + " (only 8-bit supported)");
    }
    const std::size_t offset = reader.data_offset();
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() < offset + count) {
        throw Error("unexpected end of image data");
    }
    RasterGray r{width, height, {}};
    r.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
    return r;
}

RasterGray read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

std::vector<std::uint8_t> encode_pgm(const RasterGray& raster) {
    const std::string header =
        "P5\n" + std::to_string(raster.width) + " " + std::to_string(raster.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), raster.pixels.begin(), raster.pixels.end());
    return out;
}

void write_pgm(const std::filesystem::path& path, const RasterGray& raster) { write_file(path, encode_pgm(raster)); }

RasterRgb decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(std::string("cannot decode PNG: ") + image.message);
    }
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw Error("unsupported bit depth: 16-bit PNG (only 8-bit supported)");
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        throw Error(std::string("unexpected end of image data: ") + image.message);
    }
    RasterRgb r{static_cast<int>(image.width), static_cast<int>(image.height), {}, !color};
    if (color) {
        r.pixels = std::move(buffer);
    } else {
        r.pixels.reserve(buffer.size() * 3);
        for (auto v : buffer) {
            r.pixels.insert(r.pixels.end(), {v, v, v});
        }
    }
    return r;
}

std::vector<std::uint8_t> encode_png(const RasterGray& raster) {
    return encode_png_raw(raster.width, raster.height, PNG_FORMAT_GRAY, raster.pixels.data());
}

std::vector<std::uint8_t> encode_png(const RasterRgb& raster) {
    return encode_png_raw(raster.width, raster.height, PNG_FORMAT_RGB, raster.pixels.data());
}

void write_png(const std::filesystem::path& path, const RasterGray& raster) { write_file(path, encode_png(raster)); }
void write_png(const std::filesystem::path& path, const RasterRgb& raster) { write_file(path, encode_png(raster)); }

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
    std::vector<double> values;
    int width = 0;
    int height = 0;
    if (has_pgm_signature(bytes)) {
        const auto r = decode_pgm(bytes);
        width = r.width;
        height = r.height;
        values.reserve(r.pixels.size());
        for (auto v : r.pixels) {
            values.push_back(v / 255.0);
        }
    } else if (has_png_signature(bytes)) {
        const auto r = decode_png(bytes);
        width = r.width;
        height = r.height;
        values.reserve(r.pixels.size() / 3);
        for (std::size_t i = 0; i + 2 < r.pixels.size(); i += 3) {
            const double y = r.is_gray ? r.pixels[i] : luminance(r.pixels[i], r.pixels[i + 1], r.pixels[i + 2]);
            values.push_back(y / 255.0);
        }
    } else {
        throw Error("unrecognized image format (expected PGM P5 or PNG)");
    }
    return GrayImage(width, height, std::move(values));
}

GrayImage load_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

namespace {

Seed sentinel_to_seed(std::uint8_t v) {
    switch (v) {
        case 255:
            return Seed::Foreground;
        case 0:
            return Seed::Background;
        case 128:
            return Seed::None;
        default:
            throw Error("ambiguous seed value " + std::to_string(v) + " (expected 255, 0 or 128)");
    }
}

}  // namespace

SeedMask decode_seeds(std::span<const std::uint8_t> bytes) {
    std::vector<Seed> labels;
    int width = 0;
    int height = 0;
    if (has_pgm_signature(bytes)) {
        const auto r = decode_pgm(bytes);
        width = r.width;
        height = r.height;
        labels.reserve(r.pixels.size());
        for (auto v : r.pixels) {
            labels.push_back(sentinel_to_seed(v));
        }
    } else if (has_png_signature(bytes)) {
        const auto r = decode_png(bytes);
        width = r.width;
        height = r.height;
        labels.reserve(r.pixels.size() / 3);
        for (std::size_t i = 0; i + 2 < r.pixels.size(); i += 3) {
            const auto red = r.pixels[i];
            const auto green = r.pixels[i + 1];
            const auto blue = r.pixels[i + 2];
            if (r.is_gray) {
                labels.push_back(sentinel_to_seed(red));
            } else if (red == 255 && green == 0 && blue == 0) {
                labels.push_back(Seed::Foreground);
            } else if (red == 0 && green == 0 && blue == 255) {
                labels.push_back(Seed::Background);
            } else {
                labels.push_back(Seed::None);
            }
        }
    } else {
        throw Error("unrecognized seed format (expected PGM P5 or PNG)");
    }
    return SeedMask(width, height, std::move(labels));
}

SeedMask load_seeds(const std::filesystem::path& path) { return decode_seeds(read_file(path)); }

}  // namespace curvseg

#include "qwp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace qwp {
namespace {

std::runtime_error io_error(const std::string& what, const std::filesystem::path& path) {
    return std::runtime_error(what + ": " + path.string());
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& is) {
    std::string token;
    char ch = 0;
    while (is.get(ch)) {
        if (ch == '#') {
            std::string ignored;
            std::getline(is, ignored);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!token.empty()) return token;
            continue;
        }
        token.push_back(ch);
    }
    return token;
}

std::size_t parse_size(const std::string& token, const std::filesystem::path& path) {
    if (token.empty() || !std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw io_error("malformed PGM header", path);
    }
    return std::stoul(token);
}

}  // namespace

ImageGrid read_pgm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open image", path);
    if (header_token(is) != "P5") throw io_error("not a binary PGM (P5) file", path);
    const std::size_t width = parse_size(header_token(is), path);
    const std::size_t height = parse_size(header_token(is), path);
    const std::size_t maxval = parse_size(header_token(is), path);
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) throw io_error("unsupported PGM header", path);

    ImageGrid image(height, width);
    if (maxval < 256) {
        std::vector<unsigned char> raw(width * height);
        is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!is) throw io_error("truncated PGM data", path);
        const double scale = 255.0 / static_cast<double>(maxval);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            image.data()[i] = maxval == 255 ? raw[i] : std::round(raw[i] * scale);
        }
    } else {
        std::vector<unsigned char> raw(2 * width * height);
        is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!is) throw io_error("truncated PGM data", path);
        const double scale = 255.0 / static_cast<double>(maxval);
        for (std::size_t i = 0; i < width * height; ++i) {
            const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            image.data()[i] = v * scale;
        }
    }
    return image;
}

std::vector<std::uint8_t> to_8bit(const ImageGrid& image) {
    std::vector<std::uint8_t> out(image.size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double v = std::clamp(image.data()[i], 0.0, 255.0);
        out[i] = static_cast<std::uint8_t>(std::lround(v));
    }
    return out;
}

void write_pgm(const std::filesystem::path& path, const ImageGrid& image) {
    if (image.empty()) throw std::invalid_argument("write_pgm: empty image");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open output image", path);
    os << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    const auto bytes = to_8bit(image);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw io_error("failed writing image", path);
}

ImageGrid read_png(const std::filesystem::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
        throw io_error(std::string("cannot read PNG (") + img.message + ")", path);
    }
    img.format = PNG_FORMAT_GRAY;
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw io_error("cannot decode PNG (" + msg + ")", path);
    }
    ImageGrid image(img.height, img.width);
    for (std::size_t i = 0; i < image.size(); ++i) image.data()[i] = buffer[i];
    return image;
}

ImageGrid read_image(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open image", path);
    std::array<unsigned char, 8> magic{};
    is.read(reinterpret_cast<char*>(magic.data()), magic.size());
    const auto got = static_cast<std::size_t>(is.gcount());
    is.close();
    if (got >= 2 && magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
    static constexpr std::array<unsigned char, 8> png_sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (got == 8 && magic == png_sig) return read_png(path);
    throw io_error("unsupported image format (expected P5 PGM or PNG)", path);
}

bool is_supported_image(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".pgm" || ext == ".png";
}

}  // namespace qwp

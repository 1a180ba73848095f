#include "dehaze/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "dehaze/errors.hpp"

namespace dehaze {
namespace {

namespace fs = std::filesystem;

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
  }
  return f;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

// ---------------------------------------------------------------- PNG

struct RawRaster {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<unsigned char> bytes;
};

// libpng reports errors through longjmp; no object with a non-trivial
// destructor may be constructed between setjmp and the end of this function.
bool read_png_raw(std::FILE* fp, RawRaster& out, std::string& error) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) {
    error = "png_create_read_struct failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows;
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    error = "png_create_info_struct failed";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    error = "corrupt PNG stream";
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.bytes.resize(stride * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) {
    rows[static_cast<std::size_t>(y)] = out.bytes.data() + stride * static_cast<std::size_t>(y);
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool write_png_raw(std::FILE* fp, const RawRaster& in, std::string& error) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) {
    error = "png_create_write_struct failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(static_cast<std::size_t>(in.height));
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    error = "png_create_info_struct failed";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    error = "PNG encoding failed";
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(in.width), static_cast<png_uint_32>(in.height),
               in.bit_depth, in.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(in.width) *
                             static_cast<std::size_t>(in.channels) *
                             static_cast<std::size_t>(in.bit_depth / 8);
  for (int y = 0; y < in.height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(in.bytes.data() + stride * static_cast<std::size_t>(y));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

// Interleaved big-endian samples (PNG and PNM share this layout).
Image from_interleaved(const RawRaster& raw) {
  if (raw.bit_depth != 8 && raw.bit_depth != 16) {
    throw FormatError("unsupported bit depth " + std::to_string(raw.bit_depth));
  }
  if (raw.channels != 1 && raw.channels != 3) {
    throw FormatError("unsupported channel count " + std::to_string(raw.channels));
  }
  Image img(raw.width, raw.height, raw.channels);
  const double max_value = raw.bit_depth == 8 ? 255.0 : 65535.0;
  const std::size_t bytes_per_sample = static_cast<std::size_t>(raw.bit_depth / 8);
  std::size_t offset = 0;
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      for (int c = 0; c < raw.channels; ++c) {
        unsigned value = raw.bytes[offset];
        if (bytes_per_sample == 2) value = (value << 8) | raw.bytes[offset + 1];
        offset += bytes_per_sample;
        img.at(c, y, x) = static_cast<double>(value) / max_value;
      }
    }
  }
  return img;
}

RawRaster to_interleaved(const Image& img, int bit_depth) {
  RawRaster raw;
  raw.width = img.width();
  raw.height = img.height();
  raw.channels = img.channels();
  raw.bit_depth = bit_depth;
  const double max_value = bit_depth == 8 ? 255.0 : 65535.0;
  raw.bytes.reserve(img.plane_size() * static_cast<std::size_t>(img.channels()) *
                    static_cast<std::size_t>(bit_depth / 8));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        const double s = std::clamp(img.at(c, y, x), 0.0, 1.0);
        const auto value = static_cast<unsigned>(std::lround(s * max_value));
        if (bit_depth == 16) raw.bytes.push_back(static_cast<unsigned char>(value >> 8));
        raw.bytes.push_back(static_cast<unsigned char>(value & 0xFF));
      }
    }
  }
  return raw;
}

Image load_png(const fs::path& path) {
  auto fp = open_file(path, "rb");
  unsigned char signature[8];
  if (std::fread(signature, 1, 8, fp.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw FormatError("'" + path.string() + "' is not a PNG file");
  }
  std::rewind(fp.get());
  RawRaster raw;
  std::string error;
  if (!read_png_raw(fp.get(), raw, error)) throw FormatError("'" + path.string() + "': " + error);
  return from_interleaved(raw);
}

void save_png(const Image& img, const fs::path& path, int bit_depth) {
  const RawRaster raw = to_interleaved(img, bit_depth);
  auto fp = open_file(path, "wb");
  std::string error;
  if (!write_png_raw(fp.get(), raw, error)) throw IoError("'" + path.string() + "': " + error);
}

// ---------------------------------------------------------------- PNM / PFM

constexpr std::uint32_t byteswap32(std::uint32_t v) noexcept {
  return (v >> 24) | ((v >> 8) & 0x0000FF00u) | ((v << 8) & 0x00FF0000u) | (v << 24);
}

std::string read_token(std::istream& in) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch) != 0) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(ch));
    }
    ch = in.get();
  }
  return token;
}

int parse_positive(const std::string& token, const fs::path& path) {
  try {
    const int v = std::stoi(token);
    if (v > 0) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("'" + path.string() + "': malformed header field '" + token + "'");
}

Image load_pnm(const fs::path& path, std::ifstream& in, const std::string& magic) {
  RawRaster raw;
  raw.channels = magic == "P6" ? 3 : 1;
  raw.width = parse_positive(read_token(in), path);
  raw.height = parse_positive(read_token(in), path);
  const int max_value = parse_positive(read_token(in), path);
  if (max_value > 65535) throw FormatError("'" + path.string() + "': maxval above 65535");
  raw.bit_depth = max_value < 256 ? 8 : 16;
  raw.bytes.resize(static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height) *
                   static_cast<std::size_t>(raw.channels) * static_cast<std::size_t>(raw.bit_depth / 8));
  in.read(reinterpret_cast<char*>(raw.bytes.data()), static_cast<std::streamsize>(raw.bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.bytes.size())) {
    throw FormatError("'" + path.string() + "': truncated pixel data");
  }
  Image img = from_interleaved(raw);
  if (max_value != 255 && max_value != 65535) {
    // from_interleaved normalised by the container maximum; rescale to maxval.
    const double scale = (raw.bit_depth == 8 ? 255.0 : 65535.0) / max_value;
    for (double& s : img.samples()) s = std::min(1.0, s * scale);
  }
  return img;
}

Image load_pfm(const fs::path& path, std::ifstream& in, const std::string& magic) {
  const int channels = magic == "PF" ? 3 : 1;
  const int width = parse_positive(read_token(in), path);
  const int height = parse_positive(read_token(in), path);
  double scale = 0.0;
  try {
    scale = std::stod(read_token(in));
  } catch (const std::exception&) {
    throw FormatError("'" + path.string() + "': malformed PFM scale");
  }
  const bool little_endian = scale < 0.0;
  std::vector<std::uint32_t> words(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                                   static_cast<std::size_t>(channels));
  in.read(reinterpret_cast<char*>(words.data()),
          static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (in.gcount() != static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t))) {
    throw FormatError("'" + path.string() + "': truncated PFM data");
  }
  const bool host_little = std::endian::native == std::endian::little;
  Image img(width, height, channels);
  std::size_t i = 0;
  // PFM rows run bottom to top.
  for (int y = height - 1; y >= 0; --y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        std::uint32_t w = words[i++];
        if (little_endian != host_little) w = byteswap32(w);
        img.at(c, y, x) = static_cast<double>(std::bit_cast<float>(w));
      }
    }
  }
  return img;
}

void save_pnm(const Image& img, const fs::path& path) {
  const bool want_color = lower_extension(path) == ".ppm";
  if (want_color != (img.channels() == 3)) {
    throw ShapeError("'" + path.string() + "': " + (want_color ? "PPM needs 3 channels" : "PGM needs 1 channel"));
  }
  const RawRaster raw = to_interleaved(img, 8);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << (want_color ? "P6" : "P5") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(raw.bytes.data()), static_cast<std::streamsize>(raw.bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_pfm(const Image& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << (img.channels() == 3 ? "PF" : "Pf") << '\n' << img.width() << ' ' << img.height() << "\n-1.0\n";
  for (int y = img.height() - 1; y >= 0; --y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        std::uint32_t w = std::bit_cast<std::uint32_t>(static_cast<float>(img.at(c, y, x)));
        if constexpr (std::endian::native == std::endian::big) w = byteswap32(w);
        out.write(reinterpret_cast<const char*>(&w), sizeof w);
      }
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

Image load_image(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  char head[2] = {0, 0};
  in.read(head, 2);
  if (in.gcount() != 2) throw FormatError("'" + path.string() + "': file too short");
  const std::string magic(head, 2);
  if (magic == "P5" || magic == "P6") return load_pnm(path, in, magic);
  if (magic == "PF" || magic == "Pf") return load_pfm(path, in, magic);
  in.close();
  return load_png(path);
}

void save_image(const Image& img, const fs::path& path) {
  if (img.empty()) throw ArgumentError("save_image: empty image");
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    save_png(img, path, 8);
  } else if (ext == ".ppm" || ext == ".pgm") {
    save_pnm(img, path);
  } else if (ext == ".pfm") {
    save_pfm(img, path);
  } else {
    throw FormatError("'" + path.string() + "': unsupported output extension '" + ext + "'");
  }
}

void save_png16(const Image& img, const fs::path& path) {
  if (img.empty()) throw ArgumentError("save_png16: empty image");
  save_png(img, path, 16);
}

}  // namespace dehaze

#include "stereo/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "stereo/error.hpp"
#include "stereo/keyvalue.hpp"

namespace stereo {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : s_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    require(pos_ > start, Errc::MalformedHeader, "unexpected end of header");
    return std::string(s_.substr(start, pos_ - start));
  }

  int integer() {
    const std::string t = token();
    for (char c : t) require(std::isdigit(static_cast<unsigned char>(c)), Errc::MalformedHeader, "bad header field " + t);
    require(t.size() < 10, Errc::MalformedHeader, "header field too large: " + t);
    return std::stoi(t);
  }

  /// Consumes the single whitespace byte that ends the header.
  std::size_t data_start() {
    require(pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])), Errc::MalformedHeader,
            "header must end with whitespace");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

struct NetpbmHeader {
  int width, height;
  std::size_t offset;
};

NetpbmHeader read_netpbm(std::string_view bytes, const char* magic) {
  HeaderReader r(bytes);
  const std::string m = r.token();
  if (m != magic) {
    const bool known = m == "P1" || m == "P2" || m == "P3" || m == "P4" || m == "P5" || m == "P6";
    throw Error(known ? Errc::UnsupportedFormat : Errc::MalformedHeader,
                "expected " + std::string(magic) + " image, found '" + m + "'");
  }
  const int w = r.integer(), h = r.integer(), maxval = r.integer();
  require(w > 0 && h > 0, Errc::MalformedHeader, "image dimensions must be positive");
  require(maxval > 0 && maxval < 65536, Errc::MalformedHeader, "invalid maxval");
  require(maxval == 255, Errc::UnsupportedFormat, "only maxval 255 is supported, found " + std::to_string(maxval));
  return {w, h, r.data_start()};
}

std::string netpbm_header(const char* magic, int w, int h) {
  return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
}

}  // namespace

GrayImage decode_pgm(std::string_view bytes) {
  const auto hd = read_netpbm(bytes, "P5");
  const std::size_t n = std::size_t(hd.width) * hd.height;
  require(bytes.size() >= hd.offset + n, Errc::TruncatedData, "PGM pixel data is truncated");
  GrayImage img(hd.width, hd.height);
  std::memcpy(img.data(), bytes.data() + hd.offset, n);
  return img;
}

RgbImage decode_ppm(std::string_view bytes) {
  const auto hd = read_netpbm(bytes, "P6");
  const std::size_t n = std::size_t(hd.width) * hd.height;
  require(bytes.size() >= hd.offset + 3 * n, Errc::TruncatedData, "PPM pixel data is truncated");
  RgbImage img(hd.width, hd.height);
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data() + hd.offset);
  for (std::size_t i = 0; i < n; ++i) img.data()[i] = {p[3 * i], p[3 * i + 1], p[3 * i + 2]};
  return img;
}

FloatImage decode_pfm(std::string_view bytes) {
  HeaderReader r(bytes);
  const std::string m = r.token();
  if (m == "PF") throw Error(Errc::UnsupportedFormat, "three-channel PFM is not supported");
  require(m == "Pf", Errc::MalformedHeader, "expected PFM 'Pf' header, found '" + m + "'");
  const int w = r.integer(), h = r.integer();
  require(w > 0 && h > 0, Errc::MalformedHeader, "image dimensions must be positive");
  double scale = 0;
  try {
    scale = parse_double(r.token());
  } catch (const Error&) {
    throw Error(Errc::MalformedHeader, "invalid PFM scale");
  }
  require(scale != 0 && std::isfinite(scale), Errc::MalformedHeader, "PFM scale must be non-zero");
  const std::size_t off = r.data_start();
  const std::size_t n = std::size_t(w) * h;
  require(bytes.size() >= off + 4 * n, Errc::TruncatedData, "PFM pixel data is truncated");
  const bool little = scale < 0;
  const bool swap = little != (std::endian::native == std::endian::little);
  FloatImage img(w, h);
  for (int y = 0; y < h; ++y) {
    const char* row = bytes.data() + off + std::size_t(h - 1 - y) * w * 4;
    for (int x = 0; x < w; ++x) {
      std::uint32_t u;
      std::memcpy(&u, row + 4 * x, 4);
      if (swap) u = __builtin_bswap32(u);
      img(x, y) = std::bit_cast<float>(u);
    }
  }
  return img;
}

std::string encode_pgm(const GrayImage& img) {
  std::string out = netpbm_header("P5", img.width(), img.height());
  out.append(reinterpret_cast<const char*>(img.data()), img.size());
  return out;
}

std::string encode_ppm(const RgbImage& img) {
  std::string out = netpbm_header("P6", img.width(), img.height());
  out.reserve(out.size() + 3 * img.size());
  for (const Rgb& p : img.pixels()) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

std::string encode_pfm(const FloatImage& img) {
  std::string out = "Pf\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n-1.0\n";
  const std::size_t off = out.size();
  out.resize(off + 4 * img.size());
  for (int y = 0; y < img.height(); ++y) {
    char* row = out.data() + off + std::size_t(img.height() - 1 - y) * img.width() * 4;
    for (int x = 0; x < img.width(); ++x) {
      std::uint32_t u = std::bit_cast<std::uint32_t>(img(x, y));
      if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
      std::memcpy(row + 4 * x, &u, 4);
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::IoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), Errc::IoFailure, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), Errc::IoFailure, "write failed for " + path);
}

GrayImage load_pgm(const std::string& path) { return decode_pgm(read_file(path)); }
RgbImage load_ppm(const std::string& path) { return decode_ppm(read_file(path)); }
FloatImage load_pfm(const std::string& path) { return decode_pfm(read_file(path)); }

void save_pgm(const GrayImage& img, const std::string& path) { write_file(path, encode_pgm(img)); }
void save_ppm(const RgbImage& img, const std::string& path) { write_file(path, encode_ppm(img)); }
void save_pfm(const FloatImage& img, const std::string& path) { write_file(path, encode_pfm(img)); }

void save_disparity_pfm(const DisparityMap& map, const std::string& path) {
  FloatImage f = to_float(map);
  for (auto& v : f.pixels())
    if (std::isnan(v)) v = -1.0f;
  save_pfm(f, path);
}

DisparityMap load_disparity_pfm(const std::string& path, int d_min, int d_max) {
  return from_float(load_pfm(path), d_min, d_max);
}

void save_disparity_pgm(const DisparityMap& map, const std::string& path) { save_pgm(to_8bit(map), path); }

}  // namespace stereo

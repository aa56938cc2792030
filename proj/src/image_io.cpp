#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include "bodyfit/image.hpp"

namespace bodyfit {

BinaryImage::BinaryImage(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("image dimensions must be positive");
  }
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t BinaryImage::count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

namespace {

struct Netpbm {
  char kind = '0';  // '1'..'6'
  RgbImage rgb;
  std::vector<std::uint8_t> bits;  // PBM only, 1 = black = foreground
};

class HeaderReader {
 public:
  explicit HeaderReader(std::istream& in) : in_(in) {}

  int next_int(const char* what) {
    skip_space_and_comments();
    std::string tok;
    while (in_ && std::isdigit(in_.peek())) tok += static_cast<char>(in_.get());
    if (tok.empty()) throw ParseError(std::string("netpbm: expected ") + what);
    return std::stoi(tok);
  }

  // PBM plain format allows bits with no separating whitespace.
  int next_bit() {
    skip_space_and_comments();
    const int c = in_.get();
    if (c != '0' && c != '1') throw ParseError("netpbm: bad bit value");
    return c - '0';
  }

  void skip_space_and_comments() {
    while (in_) {
      const int c = in_.peek();
      if (c == '#') {
        std::string line;
        std::getline(in_, line);
      } else if (std::isspace(c)) {
        in_.get();
      } else {
        break;
      }
    }
  }

 private:
  std::istream& in_;
};

Netpbm decode(std::istream& in) {
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] < '1' || magic[1] > '6') {
    throw ParseError("netpbm: bad magic number");
  }
  Netpbm img;
  img.kind = magic[1];
  HeaderReader hdr(in);
  const int w = hdr.next_int("width");
  const int h = hdr.next_int("height");
  if (w <= 0 || h <= 0 || static_cast<long long>(w) * h > (1LL << 28)) {
    throw ParseError("netpbm: implausible dimensions");
  }
  const bool bitmap = img.kind == '1' || img.kind == '4';
  int maxval = 1;
  if (!bitmap) {
    maxval = hdr.next_int("maxval");
    if (maxval <= 0 || maxval > 65535) throw ParseError("netpbm: bad maxval");
  }
  const std::size_t n = static_cast<std::size_t>(w) * h;
  img.rgb.width = w;
  img.rgb.height = h;
  img.rgb.pixels.resize(n);

  auto scale = [maxval](int v) {
    if (v > maxval) throw ParseError("netpbm: sample exceeds maxval");
    return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  };
  const bool binary = img.kind >= '4';
  if (binary) in.get();  // the single whitespace byte after the header

  if (bitmap) {
    img.bits.resize(n);
    if (binary) {
      const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
      std::vector<char> row(row_bytes);
      for (int y = 0; y < h; ++y) {
        if (!in.read(row.data(), static_cast<std::streamsize>(row_bytes))) {
          throw ParseError("netpbm: truncated raster");
        }
        for (int x = 0; x < w; ++x) {
          img.bits[static_cast<std::size_t>(y) * w + x] =
              (static_cast<unsigned char>(row[x / 8]) >> (7 - x % 8)) & 1;
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!in) throw ParseError("netpbm: truncated raster");
        img.bits[i] = static_cast<std::uint8_t>(hdr.next_bit());
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t v = img.bits[i] ? 0 : 255;
      img.rgb.pixels[i] = {v, v, v};
    }
    return img;
  }

  const int channels = (img.kind == '3' || img.kind == '6') ? 3 : 1;
  auto read_sample = [&]() -> int {
    if (!binary) return hdr.next_int("sample");
    if (maxval < 256) {
      const int c = in.get();
      if (c == EOF) throw ParseError("netpbm: truncated raster");
      return c;
    }
    const int hi = in.get();
    const int lo = in.get();
    if (lo == EOF) throw ParseError("netpbm: truncated raster");
    return hi * 256 + lo;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (channels == 1) {
      const std::uint8_t v = scale(read_sample());
      img.rgb.pixels[i] = {v, v, v};
    } else {
      for (int c = 0; c < 3; ++c) img.rgb.pixels[i][c] = scale(read_sample());
    }
  }
  return img;
}

Netpbm decode_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image: " + path.string());
  return decode(in);
}

}  // namespace

RgbImage read_netpbm(const std::filesystem::path& path) {
  return decode_file(path).rgb;
}

BinaryImage read_silhouette(const std::filesystem::path& path, double threshold) {
  Netpbm img = decode_file(path);
  if (img.bits.empty()) {
    return extract_silhouette(img.rgb, img.rgb.at(0, 0), threshold);
  }
  BinaryImage mask(img.rgb.width, img.rgb.height);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      mask.set(x, y, img.bits[static_cast<std::size_t>(y) * mask.width() + x] != 0);
    }
  }
  BinaryImage kept = largest_component(mask);
  if (kept.count() == 0) throw EmptySilhouetteError("no foreground in " + path.string());
  return kept;
}

void write_pbm(const BinaryImage& image, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write image: " + path.string());
  out << "P1\n" << image.width() << ' ' << image.height() << '\n';
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      out << (image.at(x, y) ? '1' : '0');
      // Plain PBM lines should stay under 70 characters.
      if ((x + 1) % 64 == 0 || x + 1 == image.width()) out << '\n';
    }
  }
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write image: " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  for (const auto& px : image.pixels) {
    out.write(reinterpret_cast<const char*>(px.data()), 3);
  }
}

}  // namespace bodyfit

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "bodyfit/error.hpp"
#include "bodyfit/mesh.hpp"

namespace bodyfit {

/// Row-major foreground mask.
class BinaryImage {
 public:
  BinaryImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  /// Out-of-bounds pixels read as background.
  bool get(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_ && at(x, y);
  }
  void set(int x, int y, bool on) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = on ? 1 : 0;
  }

  std::size_t count() const;
  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

/// 8-bit RGB image, the input to background subtraction.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::array<std::uint8_t, 3>> pixels;  // row-major

  const std::array<std::uint8_t, 3>& at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

/// Keeps only the largest 8-connected foreground component. Ties go to the
/// component found first in row-major order.
BinaryImage largest_component(const BinaryImage& image);

/// Background subtraction: pixels whose RGB distance from `background`,
/// normalised to [0, 1], exceeds `threshold` become foreground; then the
/// largest component is kept. Throws EmptySilhouetteError if nothing
/// remains.
BinaryImage extract_silhouette(const RgbImage& image,
                               const std::array<std::uint8_t, 3>& background,
                               double threshold);

// Netpbm I/O. Readers accept P1-P6; silhouettes are written as plain PBM.
RgbImage read_netpbm(const std::filesystem::path& path);
/// PBM files decode directly; PGM/PPM files are thresholded against their
/// top-left pixel colour.
BinaryImage read_silhouette(const std::filesystem::path& path,
                            double threshold = 0.25);
void write_pbm(const BinaryImage& image, const std::filesystem::path& path);
void write_ppm(const RgbImage& image, const std::filesystem::path& path);

}  // namespace bodyfit

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchmodels {

// Grayscale image. Intensities are kept as unclamped reals; the conventional
// [0, 255] range is only enforced when writing to disk.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;  // row-major, size height * width

  double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
  double at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * width + c];
  }
  std::size_t size() const { return pixels.size(); }

  static Image zeros(int h, int w) {
    Image im;
    im.height = h;
    im.width = w;
    im.pixels.assign(static_cast<std::size_t>(h) * w, 0.0);
    return im;
  }
};

struct NoiseSpec {
  double sigma = 0.0;       // standard deviation, intensity units
  std::uint64_t seed = 0;
};

class PgmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a binary (P5) or ASCII (P2) PGM file, maxval up to 65535.
// 16-bit samples are big-endian. Header '#' comments are skipped.
// Malformed input throws PgmError naming the byte offset.
Image load_pgm(const std::string& path);

// Writes binary P5 with maxval 255; values are rounded to nearest and
// clamped to [0, 255].
void save_pgm(const Image& img, const std::string& path);

// Adds i.i.d. Gaussian noise of the given sigma, seeded; same (image, spec)
// always yields a bit-identical result.
Image add_noise(const Image& img, const NoiseSpec& spec);

}  // namespace patchmodels

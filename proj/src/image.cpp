#include "patchmodels/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "patchmodels/random.hpp"

namespace patchmodels {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct PgmReader {
  std::string path;
  std::string data;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw PgmError(path + ": " + what + " at byte " + std::to_string(pos));
  }

  bool eof() const { return pos >= data.size(); }
  char peek() const { return data[pos]; }

  void skip_space_and_comments() {
    while (!eof()) {
      const char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
                 c == '\f') {
        ++pos;
      } else {
        break;
      }
    }
  }

  long read_int(const char* name) {
    skip_space_and_comments();
    if (eof()) fail(std::string("missing ") + name);
    if (peek() < '0' || peek() > '9')
      fail(std::string("malformed ") + name + " (expected digits)");
    long v = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      v = v * 10 + (peek() - '0');
      if (v > 1000000000L) fail(std::string(name) + " out of range");
      ++pos;
    }
    return v;
  }
};

}  // namespace

Image load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();

  PgmReader r;
  r.path = path;
  r.data = buf.str();

  if (r.data.size() < 2) r.fail("truncated header");
  const std::string magic = r.data.substr(0, 2);
  if (magic != "P2" && magic != "P5") r.fail("unsupported magic '" + magic + "'");
  r.pos = 2;

  const long width = r.read_int("width");
  const long height = r.read_int("height");
  const long maxval = r.read_int("maxval");
  if (width < 1 || height < 1) r.fail("non-positive dimensions");
  if (maxval < 1 || maxval > 65535) r.fail("unsupported maxval");

  Image img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.pixels.resize(static_cast<std::size_t>(width * height));

  if (magic == "P2") {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const long v = r.read_int("sample");
      if (v > maxval) r.fail("sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v);
    }
    return img;
  }

  // P5: exactly one whitespace byte after maxval, then raw samples
  if (r.eof()) r.fail("truncated payload");
  ++r.pos;
  const bool wide = maxval > 255;
  const std::size_t need = img.pixels.size() * (wide ? 2 : 1);
  if (r.data.size() - r.pos < need) {
    r.pos = r.data.size();
    r.fail("truncated payload (need " + std::to_string(need) + " bytes)");
  }
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(r.data.data()) + r.pos;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    unsigned v;
    if (wide) {
      v = (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];  // big-endian
    } else {
      v = p[i];
    }
    img.pixels[i] = static_cast<double>(v);
  }
  return img;
}

void save_pgm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PgmError(path + ": cannot open file for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::string payload(img.pixels.size(), '\0');
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    long v = std::lround(img.pixels[i]);
    if (v < 0) v = 0;
    if (v > 255) v = 255;
    payload[i] = static_cast<char>(static_cast<unsigned char>(v));
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw PgmError(path + ": write failure");
}

Image add_noise(const Image& img, const NoiseSpec& spec) {
  if (spec.sigma < 0.0) throw std::invalid_argument("add_noise: sigma < 0");
  Image out = img;
  if (spec.sigma == 0.0) return out;
  RandomStream rng(spec.seed);
  for (double& p : out.pixels) p += spec.sigma * rng.gauss();
  return out;
}

}  // namespace patchmodels

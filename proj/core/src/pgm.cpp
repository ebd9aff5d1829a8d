#include "emoadapt/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "emoadapt/error.hpp"

namespace emoadapt {
namespace {

struct PnmHeader {
  char kind = 0;  // '5' or '6'
  std::size_t width = 0, height = 0, maxval = 0;
  std::size_t data_offset = 0;
};

PnmHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw DataError("not a PNM image: bad magic");
  PnmHeader h;
  h.kind = static_cast<char>(bytes[1]);
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&](const char* what) {
    skip_space();
    std::size_t v = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > (1u << 24)) throw DataError(std::string("PNM ") + what + " too large");
      ++pos;
    }
    if (pos == start) throw DataError(std::string("PNM header: missing ") + what);
    return v;
  };
  h.width = number("width");
  h.height = number("height");
  h.maxval = number("maxval");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw DataError("PNM header: missing separator before data");
  h.data_offset = pos + 1;
  if (h.width == 0 || h.height == 0) throw DataError("PNM image has a zero dimension");
  return h;
}

}  // namespace

Tensor<float> read_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw DataError("unsupported image format: expected binary PGM (P5)");
  }
  PnmHeader h = parse_header(bytes);
  if (h.maxval != 255) throw DataError("unsupported PGM maxval " + std::to_string(h.maxval) + ", expected 255");
  const std::size_t n = h.width * h.height;
  if (bytes.size() - h.data_offset != n) {
    throw DataError("PGM payload is " + std::to_string(bytes.size() - h.data_offset) + " bytes, expected " +
                    std::to_string(n));
  }
  std::vector<float> px(n);
  for (std::size_t i = 0; i < n; ++i) px[i] = static_cast<float>(bytes[h.data_offset + i]);
  return Tensor<float>({h.height, h.width}, std::move(px));
}

std::vector<std::uint8_t> write_pgm(const Tensor<float>& image) {
  if (image.rank() != 2) throw ShapeError("write_pgm: expected [H,W], got " + shape_to_string(image.shape()));
  std::string header = "P5\n" + std::to_string(image.dim(1)) + " " + std::to_string(image.dim(0)) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + image.size());
  for (float v : image.data()) {
    if (!(v >= 0.0f && v <= 255.0f) || std::floor(v) != v) {
      throw ArgumentError("write_pgm: pixel value " + std::to_string(v) + " is not an integer in [0,255]");
    }
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

Tensor<float> quantize_unit(const Tensor<float>& image) {
  Tensor<float> out = image;
  for (auto& v : out.data()) {
    double q = std::floor(static_cast<double>(v) * 255.0 + 0.5);
    v = static_cast<float>(std::clamp(q, 0.0, 255.0));
  }
  return out;
}

Tensor<float> read_pnm_gray(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    PnmHeader h = parse_header(bytes);
    if (h.maxval != 255) throw DataError("unsupported PPM maxval " + std::to_string(h.maxval));
    const std::size_t n = h.width * h.height;
    if (bytes.size() - h.data_offset != 3 * n) throw DataError("PPM payload size mismatch");
    std::vector<float> px(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t* p = bytes.data() + h.data_offset + 3 * i;
      px[i] = static_cast<float>(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
    }
    return Tensor<float>({h.height, h.width}, std::move(px));
  }
  return read_pgm(bytes);
}

}  // namespace emoadapt

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emoadapt/tensor.hpp"

namespace emoadapt {

// Binary 8-bit PGM (P5, maxval 255). Pixels are raw 0..255 values stored
// as floats in a [H,W] tensor.
Tensor<float> read_pgm(std::span<const std::uint8_t> bytes);
// Values must be integral in [0,255]; anything else is an ArgumentError.
std::vector<std::uint8_t> write_pgm(const Tensor<float>& image);

// Quantizes [0,1] intensities to 0..255 (round half up, clamped).
Tensor<float> quantize_unit(const Tensor<float>& image);

// Reads P5 directly and P6 (binary RGB, maxval 255) converted to gray with
// Rec. 601 luma weights.
Tensor<float> read_pnm_gray(std::span<const std::uint8_t> bytes);

}  // namespace emoadapt

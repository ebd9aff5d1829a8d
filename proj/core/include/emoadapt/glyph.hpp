#pragma once

// Procedural "emotion glyphs": small face-like drawings whose mouth curve and
// eyebrows encode the class. The source domain draws bright strokes on a dark,
// flat background near the image centre; the target domain adds a background
// gradient, random translation and contrast inversion on top.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emoadapt/dataset.hpp"

namespace emoadapt {

enum class Domain { source, target };
std::string_view domain_name(Domain d);

struct DomainShift {
  double gradient_amplitude = 0.35;
  double inversion_probability = 0.5;
  int translation = 4;  // +/- pixels on each axis
};

// Everything needed to render one glyph; rendering is a pure function of it.
struct GlyphSpec {
  int label = 0;
  Domain domain = Domain::source;
  std::uint64_t jitter_seed = 0;
  double center_x = 24.0, center_y = 24.0;
  double mouth_curvature = 0.0;  // > 0 smile, < 0 frown (pixels of corner lift)
  bool eyebrows = false;
  double background = 0.1;
  double foreground = 0.9;
  double gradient = 0.0;  // background gradient amplitude
  double gradient_angle = 0.0;
  bool inverted = false;
};

inline constexpr std::size_t kGlyphSize = 48;

// Draws the class-dependent and nuisance parameters for sample `index`.
GlyphSpec sample_glyph_spec(int label, Domain domain, std::uint64_t seed, std::uint64_t index,
                            const DomainShift& shift = {});

// [48,48] intensities in [0,1].
Tensor<float> render_glyph(const GlyphSpec& spec);

struct GeneratedSet {
  Dataset dataset;
  std::vector<GlyphSpec> specs;  // parallel to dataset.samples
  std::filesystem::path manifest;
};

// Writes per_class_count glyphs of each class as PGM files under
// out_dir/images/ and a manifest out_dir/<split_name>.csv, then returns the
// quantized images exactly as load_dataset would read them back.
GeneratedSet generate_synthetic(Domain domain, std::size_t per_class_count, std::uint64_t seed,
                                const std::filesystem::path& out_dir, const std::string& split_name = "train",
                                const DomainShift& shift = {});

}  // namespace emoadapt

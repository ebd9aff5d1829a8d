#include "emoadapt/glyph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "emoadapt/digest.hpp"
#include "emoadapt/io.hpp"
#include "emoadapt/model.hpp"
#include "emoadapt/pgm.hpp"

namespace emoadapt {
namespace {

struct Segment {
  double x0, y0, x1, y1;
};

double segment_distance(const Segment& s, double px, double py) {
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = s.x0 + t * dx - px, ey = s.y0 + t * dy - py;
  return std::sqrt(ex * ex + ey * ey);
}

// Uniform in [0,1) from a 64-bit draw, independent of the standard library's
// distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

}  // namespace

std::string_view domain_name(Domain d) { return d == Domain::source ? "source" : "target"; }

GlyphSpec sample_glyph_spec(int label, Domain domain, std::uint64_t seed, std::uint64_t index,
                            const DomainShift& shift) {
  if (label < 0 || label >= static_cast<int>(kNumClasses)) throw ArgumentError("glyph label out of range");
  GlyphSpec g;
  g.label = label;
  g.domain = domain;
  std::mt19937_64 rng(derive_seed(derive_seed(seed, std::string("glyph/") + std::string(domain_name(domain))),
                                  index * kNumClasses + static_cast<std::uint64_t>(label)));
  g.jitter_seed = rng();
  g.center_x = 24.0 + uniform(rng, -1.5, 1.5);
  g.center_y = 24.0 + uniform(rng, -1.5, 1.5);
  const double lift = uniform(rng, 3.0, 5.0);
  switch (label) {
    case 1: g.mouth_curvature = lift; break;   // happy
    case 2: g.mouth_curvature = -lift; break;  // sad
    default: g.mouth_curvature = uniform(rng, -0.4, 0.4); break;
  }
  g.eyebrows = label == 0;  // angry
  g.background = uniform(rng, 0.05, 0.2);
  g.foreground = uniform(rng, 0.75, 1.0);
  if (domain == Domain::target) {
    const int t = shift.translation;
    g.center_x += static_cast<double>(static_cast<int>(rng() % static_cast<std::uint64_t>(2 * t + 1)) - t);
    g.center_y += static_cast<double>(static_cast<int>(rng() % static_cast<std::uint64_t>(2 * t + 1)) - t);
    g.gradient = shift.gradient_amplitude * uniform(rng, 0.5, 1.0);
    g.gradient_angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    g.inverted = unit(rng) < shift.inversion_probability;
  }
  return g;
}

Tensor<float> render_glyph(const GlyphSpec& g) {
  const double cx = g.center_x, cy = g.center_y;
  std::vector<Segment> strokes;
  // Mouth: parabola through the corners (cx +/- 8) lifted by curvature.
  constexpr int kMouthSegments = 16;
  auto mouth_y = [&](double x) {
    const double u = (x - cx) / 8.0;
    return cy + 9.0 + g.mouth_curvature * (0.5 - u * u);
  };
  for (int i = 0; i < kMouthSegments; ++i) {
    double xa = cx - 8.0 + 16.0 * i / kMouthSegments;
    double xb = cx - 8.0 + 16.0 * (i + 1) / kMouthSegments;
    strokes.push_back({xa, mouth_y(xa), xb, mouth_y(xb)});
  }
  if (g.eyebrows) {
    // Slanted down towards the nose.
    strokes.push_back({cx - 11.0, cy - 12.0, cx - 4.0, cy - 8.5});
    strokes.push_back({cx + 11.0, cy - 12.0, cx + 4.0, cy - 8.5});
  }
  const double eye_r = 2.2;
  const double face_r = 19.0;

  std::mt19937_64 noise_rng(g.jitter_seed);
  std::vector<float> px(kGlyphSize * kGlyphSize);
  const double ca = std::cos(g.gradient_angle), sa = std::sin(g.gradient_angle);
  for (std::size_t y = 0; y < kGlyphSize; ++y) {
    for (std::size_t x = 0; x < kGlyphSize; ++x) {
      const double fx = static_cast<double>(x) + 0.5, fy = static_cast<double>(y) + 0.5;
      double bg = g.background;
      if (g.gradient != 0.0) {
        bg += g.gradient * (((fx - 24.0) * ca + (fy - 24.0) * sa) / 48.0 + 0.5);
      }
      double ink = 0.0;
      for (const auto& s : strokes) ink = std::max(ink, std::clamp(1.6 - segment_distance(s, fx, fy), 0.0, 1.0));
      for (double ex : {cx - 7.0, cx + 7.0}) {
        const double d = std::hypot(fx - ex, fy - (cy - 4.0));
        ink = std::max(ink, std::clamp(eye_r + 0.5 - d, 0.0, 1.0));
      }
      // Faint face outline.
      const double ring = std::abs(std::hypot(fx - cx, fy - cy) - face_r);
      ink = std::max(ink, 0.45 * std::clamp(1.2 - ring, 0.0, 1.0));
      double v = bg + (g.foreground - bg) * ink;
      v += 0.03 * (unit(noise_rng) + unit(noise_rng) + unit(noise_rng) - 1.5);
      v = std::clamp(v, 0.0, 1.0);
      if (g.inverted) v = 1.0 - v;
      px[y * kGlyphSize + x] = static_cast<float>(v);
    }
  }
  return Tensor<float>({kGlyphSize, kGlyphSize}, std::move(px));
}

GeneratedSet generate_synthetic(Domain domain, std::size_t per_class_count, std::uint64_t seed,
                                const std::filesystem::path& out_dir, const std::string& split_name,
                                const DomainShift& shift) {
  if (per_class_count < 1) throw ArgumentError("generate_synthetic: per_class_count must be >= 1");
  GeneratedSet out;
  std::vector<ManifestRow> rows;
  const std::uint64_t split_seed = derive_seed(seed, "split/" + split_name);
  for (std::size_t i = 0; i < per_class_count; ++i) {
    for (int label = 0; label < static_cast<int>(kNumClasses); ++label) {
      GlyphSpec spec = sample_glyph_spec(label, domain, split_seed, i, shift);
      Tensor<float> raw = quantize_unit(render_glyph(spec));
      char name[96];
      std::snprintf(name, sizeof name, "images/%s_%s_%05zu_%s.pgm", std::string(domain_name(domain)).c_str(),
                    split_name.c_str(), i, std::string(kClassNames[static_cast<std::size_t>(label)]).c_str());
      write_file(out_dir / name, write_pgm(raw));
      rows.push_back({name, label});
      out.dataset.samples.push_back(Sample{preprocess(raw, kGlyphSize), label, name});
      out.specs.push_back(spec);
    }
  }
  out.manifest = out_dir / (split_name + ".csv");
  write_text_file(out.manifest, format_manifest(rows));
  return out;
}

}  // namespace emoadapt

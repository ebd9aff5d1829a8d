#include "emoadapt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "emoadapt/digest.hpp"
#include "emoadapt/io.hpp"
#include "emoadapt/model.hpp"
#include "emoadapt/parallel.hpp"
#include "emoadapt/pgm.hpp"

namespace emoadapt {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<ManifestRow> parse_manifest(std::string_view text) {
  std::vector<ManifestRow> rows;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      if (t != "path,label") throw DataError("manifest line 1: expected header 'path,label', got '" + t + "'");
      header_seen = true;
      continue;
    }
    auto comma = t.rfind(',');
    if (comma == std::string::npos) {
      throw DataError("manifest line " + std::to_string(line_no) + ": expected 'path,label', got '" + t + "'");
    }
    ManifestRow row;
    row.path = trim(std::string_view(t).substr(0, comma));
    std::string label = trim(std::string_view(t).substr(comma + 1));
    if (row.path.empty()) throw DataError("manifest line " + std::to_string(line_no) + ": empty path");
    auto idx = class_index(label);
    if (!idx) {
      throw DataError("manifest line " + std::to_string(line_no) + " (" + row.path + "): unknown label '" + label +
                      "'");
    }
    row.label = *idx;
    if (!seen.insert(row.path).second) {
      throw DataError("manifest line " + std::to_string(line_no) + ": duplicate path '" + row.path + "'");
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw DataError("manifest is empty (missing 'path,label' header)");
  return rows;
}

std::string format_manifest(const std::vector<ManifestRow>& rows) {
  std::string out = "path,label\n";
  for (const auto& r : rows) {
    out += r.path;
    out += ',';
    out += kClassNames.at(static_cast<std::size_t>(r.label));
    out += '\n';
  }
  return out;
}

Tensor<double> resize_area(const Tensor<float>& image, std::size_t size) {
  if (image.rank() != 2) throw ShapeError("resize_area: expected [H,W], got " + shape_to_string(image.shape()));
  const std::size_t H = image.dim(0), W = image.dim(1);
  Tensor<double> out({size, size});
  if (H == size && W == size) {
    for (std::size_t i = 0; i < image.size(); ++i) out[i] = image[i];
    return out;
  }
  const double sy = static_cast<double>(H) / static_cast<double>(size);
  const double sx = static_cast<double>(W) / static_cast<double>(size);
  // Overlap weights of source cells [k, k+1) with output cell [o*s, (o+1)*s).
  auto weights = [](std::size_t o, double s, std::size_t limit) {
    std::vector<std::pair<std::size_t, double>> w;
    double lo = static_cast<double>(o) * s, hi = static_cast<double>(o + 1) * s;
    auto k0 = static_cast<std::size_t>(std::floor(lo));
    for (std::size_t k = k0; k < limit && static_cast<double>(k) < hi; ++k) {
      double overlap = std::min(hi, static_cast<double>(k + 1)) - std::max(lo, static_cast<double>(k));
      if (overlap > 0.0) w.emplace_back(k, overlap);
    }
    return w;
  };
  for (std::size_t oy = 0; oy < size; ++oy) {
    auto wy = weights(oy, sy, H);
    for (std::size_t ox = 0; ox < size; ++ox) {
      auto wx = weights(ox, sx, W);
      double acc = 0.0;
      for (auto [y, a] : wy)
        for (auto [x, b] : wx) acc += a * b * image[y * W + x];
      out[oy * size + ox] = acc / (sy * sx);
    }
  }
  return out;
}

Tensor<float> preprocess(const Tensor<float>& raw, std::size_t size) {
  Tensor<double> r = resize_area(raw, size);
  std::vector<float> px(r.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<float>(r[i] / 255.0);
  return Tensor<float>({1, size, size}, std::move(px));
}

Dataset load_dataset(const std::filesystem::path& manifest_path, const std::filesystem::path& image_root,
                     std::size_t size) {
  if (!std::filesystem::exists(manifest_path)) {
    throw DataError("manifest not found: '" + manifest_path.string() + "'");
  }
  auto rows = parse_manifest(read_text_file(manifest_path));
  const auto root = image_root.empty() ? manifest_path.parent_path() : image_root;
  Dataset ds;
  ds.samples.resize(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto& row = rows[i];
    auto file = root / row.path;
    if (!std::filesystem::exists(file)) {
      throw DataError("manifest row " + std::to_string(i + 1) + ": image not found '" + file.string() + "'");
    }
    Tensor<float> raw;
    try {
      raw = read_pnm_gray(read_file(file));
    } catch (const DataError& e) {
      throw DataError("manifest row " + std::to_string(i + 1) + " (" + row.path + "): " + e.what());
    }
    ds.samples[i] = Sample{preprocess(raw, size), row.label, row.path};
  });
  return ds;
}

Split split_of(std::string_view relative_path) {
  return fnv1a64(relative_path) % 5 == 0 ? Split::test : Split::train;
}

Dataset select_split(const Dataset& dataset, Split split) {
  Dataset out;
  for (const auto& s : dataset.samples)
    if (split_of(s.path) == split) out.samples.push_back(s);
  return out;
}

Tensor<float> stack_images(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw ShapeError("stack_images: empty selection");
  const Shape& s = dataset.samples.at(indices[0]).image.shape();
  const std::size_t per = shape_numel(s);
  std::vector<float> data(indices.size() * per);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& img = dataset.samples.at(indices[i]).image;
    if (img.shape() != s) throw ShapeError("stack_images: inconsistent image shapes");
    std::copy(img.data().begin(), img.data().end(), data.begin() + static_cast<std::ptrdiff_t>(i * per));
  }
  Shape shape{indices.size()};
  shape.insert(shape.end(), s.begin(), s.end());
  return Tensor<float>(shape, std::move(data));
}

Tensor<float> stack_images(const Dataset& dataset) {
  std::vector<std::size_t> all(dataset.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return stack_images(dataset, all);
}

std::vector<int> labels_of(const Dataset& dataset) {
  std::vector<int> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(s.label);
  return out;
}

Tensor<float> one_hot(const std::vector<int>& labels) {
  Tensor<float> out({labels.size(), kNumClasses}, 0.0f);
  for (std::size_t i = 0; i < labels.size(); ++i) out[i * kNumClasses + static_cast<std::size_t>(labels[i])] = 1.0f;
  return out;
}

}  // namespace emoadapt

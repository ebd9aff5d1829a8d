#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emoadapt/tensor.hpp"

namespace emoadapt {

struct ManifestRow {
  std::string path;  // relative to the image root
  int label = 0;     // index into kClassNames
};

// Manifest CSV: header `path,label`, one row per image. Rejects unknown
// labels and duplicate paths with a DataError naming the line.
std::vector<ManifestRow> parse_manifest(std::string_view text);
std::string format_manifest(const std::vector<ManifestRow>& rows);

struct Sample {
  Tensor<float> image;  // [1,S,S], values in [0,1]
  int label = 0;
  std::string path;
};

struct Dataset {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

// Area-average resize of a [H,W] image to [size,size]. Identity when the
// image already has that size.
Tensor<double> resize_area(const Tensor<float>& image, std::size_t size);

// Raw 0..255 gray image -> [1,size,size] in [0,1].
Tensor<float> preprocess(const Tensor<float>& raw, std::size_t size = 48);

// Loads every manifest row in manifest order. image_root defaults to the
// manifest's directory.
Dataset load_dataset(const std::filesystem::path& manifest_path, const std::filesystem::path& image_root = {},
                     std::size_t size = 48);

enum class Split { train, test };

// Deterministic 80/20 split by hash of the relative path.
Split split_of(std::string_view relative_path);
Dataset select_split(const Dataset& dataset, Split split);

// Stacks the chosen samples into [B,1,S,S] (in the given order).
Tensor<float> stack_images(const Dataset& dataset, const std::vector<std::size_t>& indices);
Tensor<float> stack_images(const Dataset& dataset);
std::vector<int> labels_of(const Dataset& dataset);

// Row i is the one-hot encoding of labels[i].
Tensor<float> one_hot(const std::vector<int>& labels);

}  // namespace emoadapt

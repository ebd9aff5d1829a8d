#pragma once

// Binary tensor container used for checkpoints and embedding dumps.
//
//   "IERCKPT1"
//   u32 tensor count
//   per tensor: u16 name length, name bytes, u8 rank, rank x u32 dims,
//               u8 dtype (0 = f32, 1 = f64), little-endian payload
//   u32 metadata length, UTF-8 JSON metadata
//   u32 CRC-32 of every preceding byte
//
// All integers are little-endian.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "emoadapt/error.hpp"
#include "emoadapt/model.hpp"

namespace emoadapt {

inline constexpr char kCheckpointMagic[] = "IERCKPT1";

class CheckpointError : public DataError {
 public:
  enum class Kind { bad_magic, truncated, structure, integrity, digest_mismatch };
  CheckpointError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using AnyTensor = std::variant<Tensor<float>, Tensor<double>>;

// Ordered tensor table plus raw JSON metadata text.
struct TensorArchive {
  std::vector<std::pair<std::string, AnyTensor>> tensors;
  std::string metadata_json;
};

std::vector<std::uint8_t> encode_archive(const TensorArchive& archive);
TensorArchive decode_archive(std::span<const std::uint8_t> bytes);

enum class Phase { source, adapted };
std::string_view phase_name(Phase phase);

struct CheckpointMeta {
  Phase phase = Phase::source;
  std::uint64_t step = 0;
  std::vector<std::string> class_names{kClassNames.begin(), kClassNames.end()};
  std::string config_digest;
  std::uint64_t seed = 0;
  // Canonical ModelConfig text; config_digest is its SHA-256.
  std::string model_config;
};

struct Checkpoint {
  CheckpointMeta meta;
  ModelParams<float> params;

  ModelConfig model_config() const;
};

// Builds a checkpoint, filling digest and config text from the config.
Checkpoint make_checkpoint(const ModelConfig& config, ModelParams<float> params, Phase phase, std::uint64_t step,
                           std::uint64_t seed);

std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ckpt);
// expected_digest, when non-empty, must equal the stored config digest.
Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes, const std::string& expected_digest = {});

void save_checkpoint_file(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint_file(const std::filesystem::path& path, const std::string& expected_digest = {});

// Parses the canonical text written by ModelConfig::canonical_text.
ModelConfig parse_model_config(const std::string& canonical_text);

}  // namespace emoadapt

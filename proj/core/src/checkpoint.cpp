#include "emoadapt/checkpoint.hpp"

#include <cstring>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emoadapt/digest.hpp"
#include "emoadapt/io.hpp"

namespace emoadapt {
namespace {

using Kind = CheckpointError::Kind;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  template <typename T>
  void payload(std::span<const T> values) {
    using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    for (T v : values) {
      Bits b;
      std::memcpy(&b, &v, sizeof b);
      le(b);
    }
  }
  std::vector<std::uint8_t>& out() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw CheckpointError(Kind::truncated, std::string("checkpoint truncated while reading ") + what);
    }
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename U>
  U le(const char* what) {
    auto s = take(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(s[i]) << (8 * i));
    return v;
  }
  template <typename T>
  std::vector<T> payload(std::size_t count, const char* what) {
    using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    if (count > (in_.size() - pos_) / sizeof(T)) {
      throw CheckpointError(Kind::truncated, std::string("checkpoint truncated in payload of ") + what);
    }
    std::vector<T> out(count);
    for (auto& v : out) {
      Bits b = le<Bits>(what);
      std::memcpy(&v, &b, sizeof v);
    }
    return out;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

constexpr std::size_t kMagicLen = 8;

}  // namespace

std::vector<std::uint8_t> encode_archive(const TensorArchive& archive) {
  if (archive.tensors.empty()) throw CheckpointError(Kind::structure, "refusing to write an empty tensor table");
  Writer w;
  w.bytes(kCheckpointMagic, kMagicLen);
  w.le(static_cast<std::uint32_t>(archive.tensors.size()));
  for (const auto& [name, any] : archive.tensors) {
    if (name.empty() || name.size() > 0xFFFF) throw CheckpointError(Kind::structure, "bad tensor name '" + name + "'");
    w.le(static_cast<std::uint16_t>(name.size()));
    w.bytes(name.data(), name.size());
    std::visit(
        [&](const auto& t) {
          using T = typename std::decay_t<decltype(t)>::value_type;
          if (t.rank() > 0xFF) throw CheckpointError(Kind::structure, "rank too large for '" + name + "'");
          w.le(static_cast<std::uint8_t>(t.rank()));
          for (std::size_t d : t.shape()) {
            if (d > 0xFFFFFFFFu) throw CheckpointError(Kind::structure, "dimension too large for '" + name + "'");
            w.le(static_cast<std::uint32_t>(d));
          }
          w.le(static_cast<std::uint8_t>(dtype_of<T>()));
          w.payload<T>(t.data());
        },
        any);
  }
  w.le(static_cast<std::uint32_t>(archive.metadata_json.size()));
  w.bytes(archive.metadata_json.data(), archive.metadata_json.size());
  w.le(crc32(w.out()));
  return std::move(w.out());
}

TensorArchive decode_archive(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagicLen || std::memcmp(bytes.data(), kCheckpointMagic, kMagicLen) != 0) {
    throw CheckpointError(Kind::bad_magic, "not a checkpoint: bad magic");
  }
  Reader r(bytes);
  r.take(kMagicLen, "magic");
  TensorArchive archive;
  auto count = r.le<std::uint32_t>("tensor count");
  if (count == 0) throw CheckpointError(Kind::structure, "checkpoint has an empty tensor table");
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto name_len = r.le<std::uint16_t>("name length");
    auto name_bytes = r.take(name_len, "tensor name");
    std::string name(name_bytes.begin(), name_bytes.end());
    if (name.empty()) throw CheckpointError(Kind::structure, "empty tensor name");
    if (!seen.insert(name).second) throw CheckpointError(Kind::structure, "duplicate tensor '" + name + "'");
    auto rank = r.le<std::uint8_t>("rank");
    if (rank == 0) throw CheckpointError(Kind::structure, "tensor '" + name + "' has rank 0");
    Shape shape;
    std::size_t numel = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      auto dim = r.le<std::uint32_t>("dimension");
      if (dim == 0) throw CheckpointError(Kind::structure, "tensor '" + name + "' has a zero dimension");
      shape.push_back(dim);
      if (numel > bytes.size()) throw CheckpointError(Kind::truncated, "tensor '" + name + "' larger than file");
      numel *= dim;
    }
    auto tag = r.le<std::uint8_t>("dtype");
    if (tag == static_cast<std::uint8_t>(DType::f32)) {
      archive.tensors.emplace_back(name, Tensor<float>(shape, r.payload<float>(numel, name.c_str())));
    } else if (tag == static_cast<std::uint8_t>(DType::f64)) {
      archive.tensors.emplace_back(name, Tensor<double>(shape, r.payload<double>(numel, name.c_str())));
    } else {
      throw CheckpointError(Kind::structure, "tensor '" + name + "' has unknown dtype tag " + std::to_string(tag));
    }
  }
  auto meta_len = r.le<std::uint32_t>("metadata length");
  auto meta = r.take(meta_len, "metadata");
  archive.metadata_json.assign(meta.begin(), meta.end());
  const std::size_t body = r.pos();
  auto stored_crc = r.le<std::uint32_t>("CRC");
  if (r.remaining() != 0) throw CheckpointError(Kind::structure, "trailing bytes after CRC");
  if (crc32(bytes.first(body)) != stored_crc) throw CheckpointError(Kind::integrity, "checkpoint CRC mismatch");
  return archive;
}

std::string_view phase_name(Phase phase) { return phase == Phase::source ? "source" : "adapted"; }

ModelConfig parse_model_config(const std::string& text) {
  ModelConfig c;
  std::istringstream in(text);
  std::string line;
  auto as_size = [](const std::string& v) { return static_cast<std::size_t>(std::stoull(v)); };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw CheckpointError(Kind::structure, "bad model config line '" + line + "'");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    try {
      if (key == "model.attention") c.attention = value == "true";
      else if (key == "model.attention_hidden") c.attention_hidden = as_size(value);
      else if (key == "model.conv1_filters") c.conv1_filters = as_size(value);
      else if (key == "model.conv2_filters") c.conv2_filters = as_size(value);
      else if (key == "model.dropout") c.dropout_rate = std::stod(value);
      else if (key == "model.fc1_units") c.fc1_units = as_size(value);
      else if (key == "model.fc2_units") c.fc2_units = as_size(value);
      else if (key == "model.input_size") c.input_size = as_size(value);
      else throw CheckpointError(Kind::structure, "unknown model config key '" + key + "'");
    } catch (const std::logic_error&) {
      throw CheckpointError(Kind::structure, "bad model config value '" + line + "'");
    }
  }
  return c;
}

ModelConfig Checkpoint::model_config() const { return parse_model_config(meta.model_config); }

Checkpoint make_checkpoint(const ModelConfig& config, ModelParams<float> params, Phase phase, std::uint64_t step,
                           std::uint64_t seed) {
  check_params(config, params);
  Checkpoint ckpt;
  ckpt.params = std::move(params);
  ckpt.meta.phase = phase;
  ckpt.meta.step = step;
  ckpt.meta.seed = seed;
  ckpt.meta.model_config = config.canonical_text();
  ckpt.meta.config_digest = config.digest();
  return ckpt;
}

std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ckpt) {
  TensorArchive archive;
  for (const auto& [name, t] : ckpt.params) archive.tensors.emplace_back(name, t);
  nlohmann::json meta = {
      {"phase", phase_name(ckpt.meta.phase)},
      {"step", ckpt.meta.step},
      {"class_names", ckpt.meta.class_names},
      {"config_digest", ckpt.meta.config_digest},
      {"seed", ckpt.meta.seed},
      {"model_config", ckpt.meta.model_config},
  };
  archive.metadata_json = meta.dump();
  return encode_archive(archive);
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes, const std::string& expected_digest) {
  TensorArchive archive = decode_archive(bytes);
  Checkpoint ckpt;
  try {
    auto meta = nlohmann::json::parse(archive.metadata_json);
    const std::string phase = meta.at("phase").get<std::string>();
    if (phase == "source") ckpt.meta.phase = Phase::source;
    else if (phase == "adapted") ckpt.meta.phase = Phase::adapted;
    else throw CheckpointError(Kind::structure, "unknown checkpoint phase '" + phase + "'");
    ckpt.meta.step = meta.at("step").get<std::uint64_t>();
    ckpt.meta.class_names = meta.at("class_names").get<std::vector<std::string>>();
    ckpt.meta.config_digest = meta.at("config_digest").get<std::string>();
    ckpt.meta.seed = meta.at("seed").get<std::uint64_t>();
    ckpt.meta.model_config = meta.at("model_config").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(Kind::structure, std::string("bad checkpoint metadata: ") + e.what());
  }
  if (ckpt.meta.class_names != std::vector<std::string>(kClassNames.begin(), kClassNames.end())) {
    throw CheckpointError(Kind::structure, "checkpoint class names differ from [angry, happy, sad, neutral]");
  }
  if (sha256_hex(ckpt.meta.model_config) != ckpt.meta.config_digest) {
    throw CheckpointError(Kind::digest_mismatch, "stored model config does not hash to the stored digest");
  }
  if (!expected_digest.empty() && expected_digest != ckpt.meta.config_digest) {
    throw CheckpointError(Kind::digest_mismatch,
                          "checkpoint config digest " + ckpt.meta.config_digest + " does not match " + expected_digest);
  }
  for (auto& [name, any] : archive.tensors) {
    auto* t = std::get_if<Tensor<float>>(&any);
    if (!t) throw CheckpointError(Kind::structure, "checkpoint parameter '" + name + "' is not f32");
    ckpt.params.emplace(name, std::move(*t));
  }
  try {
    check_params(ckpt.model_config(), ckpt.params);
  } catch (const ShapeError& e) {
    throw CheckpointError(Kind::structure, e.what());
  }
  return ckpt;
}

void save_checkpoint_file(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file(path, save_checkpoint(ckpt));
}

Checkpoint load_checkpoint_file(const std::filesystem::path& path, const std::string& expected_digest) {
  auto bytes = read_file(path);
  return load_checkpoint(bytes, expected_digest);
}

}  // namespace emoadapt

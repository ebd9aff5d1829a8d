#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "emoadapt/glyph.hpp"
#include "emoadapt/loss.hpp"
#include "emoadapt/model.hpp"
#include "emoadapt/train.hpp"

namespace emoadapt {

// Flat key=value run configuration. Every key has a default; unknown keys and
// unparsable values are ConfigErrors.
class RunConfig {
 public:
  RunConfig();

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool has_key(const std::string& key) const { return values_.count(key) > 0; }

  // Sorted key=value lines.
  std::string canonical_text() const;

  ModelConfig model() const;
  LossConfig loss() const;
  TrainRunConfig pretrain_run() const;
  TrainRunConfig adapt_run() const;
  DomainShift shift() const;
  std::uint64_t seed() const;
  std::size_t count(const std::string& key) const;
  std::filesystem::path data_dir() const;

 private:
  double real(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

}  // namespace emoadapt

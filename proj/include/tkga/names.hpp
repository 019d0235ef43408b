#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tkga/linalg.hpp"

namespace tkga {

// Maps an entity label to a fixed-size name vector.
class NameProvider {
 public:
  virtual ~NameProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> embed(std::string_view label) const = 0;
};

// Vectors read from `label\tf1 f2 ... fd` lines.
class FileNameProvider final : public NameProvider {
 public:
  static FileNameProvider load(std::istream& in);
  static FileNameProvider load_file(const std::filesystem::path& path);

  std::size_t dimension() const override { return dimension_; }
  // Throws ResolutionError for unknown labels.
  std::vector<double> embed(std::string_view label) const override;
  bool contains(std::string_view label) const;
  std::size_t size() const noexcept { return vectors_.size(); }

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Hashes lowercased character n-grams (with boundary markers) into signed
// buckets and normalizes to unit length. Deterministic across runs.
class HashingNameProvider final : public NameProvider {
 public:
  explicit HashingNameProvider(std::size_t dimension = 64, std::size_t min_n = 2,
                               std::size_t max_n = 4);

  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view label) const override;

 private:
  std::size_t dimension_;
  std::size_t min_n_;
  std::size_t max_n_;
};

// One row per label.
Matrix embed_names(std::span<const std::string> labels, const NameProvider& provider);

}  // namespace tkga

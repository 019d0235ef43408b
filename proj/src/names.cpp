#include "tkga/names.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

#include "tkga/error.hpp"

namespace tkga {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

FileNameProvider FileNameProvider::load(std::istream& in) {
  FileNameProvider p;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(line_no, "expected label<TAB>vector");
    std::vector<double> v;
    const char* cur = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (cur < end) {
      while (cur < end && *cur == ' ') ++cur;
      if (cur == end) break;
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(cur, end, x);
      if (ec != std::errc{}) throw ParseError(line_no, "bad vector component");
      v.push_back(x);
      cur = ptr;
    }
    if (v.empty()) throw ParseError(line_no, "empty vector");
    if (p.dimension_ == 0) p.dimension_ = v.size();
    if (v.size() != p.dimension_) {
      throw ParseError(line_no, "vector has " + std::to_string(v.size()) + " components, expected " +
                                    std::to_string(p.dimension_));
    }
    p.vectors_[line.substr(0, tab)] = std::move(v);
  }
  return p;
}

FileNameProvider FileNameProvider::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load(in);
}

std::vector<double> FileNameProvider::embed(std::string_view label) const {
  const auto it = vectors_.find(std::string(label));
  if (it == vectors_.end()) throw ResolutionError(std::string(label));
  return it->second;
}

bool FileNameProvider::contains(std::string_view label) const {
  return vectors_.contains(std::string(label));
}

HashingNameProvider::HashingNameProvider(std::size_t dimension, std::size_t min_n,
                                         std::size_t max_n)
    : dimension_(dimension), min_n_(min_n), max_n_(max_n) {
  if (dimension_ == 0) throw ConfigError("name_dim", "must be positive");
  if (min_n_ == 0 || max_n_ < min_n_) throw ConfigError("ngram", "invalid n-gram range");
}

std::vector<double> HashingNameProvider::embed(std::string_view label) const {
  std::string text = "#";
  for (const unsigned char c : label) {
    text += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '#';
  }
  text += '#';
  std::vector<double> v(dimension_, 0.0);
  for (std::size_t n = min_n_; n <= max_n_; ++n) {
    if (text.size() < n) break;
    for (std::size_t i = 0; i + n <= text.size(); ++i) {
      const std::string_view gram(text.data() + i, n);
      if (gram.find_first_not_of('#') == std::string_view::npos) continue;
      const auto h = fnv1a(gram);
      v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
    }
  }
  if (norm(v) == 0.0) v[fnv1a(label) % dimension_] = 1.0;
  normalize_in_place(v);
  return v;
}

Matrix embed_names(std::span<const std::string> labels, const NameProvider& provider) {
  Matrix m(labels.size(), provider.dimension());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto v = provider.embed(labels[i]);
    if (v.size() != provider.dimension()) throw LayoutError("name vector dimension mismatch");
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

}  // namespace tkga

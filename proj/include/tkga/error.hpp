#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tkga {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

// A label that does not resolve to a handle in the graph it was looked up in.
class ResolutionError : public Error {
 public:
  explicit ResolutionError(const std::string& label)
      : Error("unresolved label: " + label), label_(label) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class LayoutError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

// The reasoner endpoint could not be reached or kept failing.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace tkga

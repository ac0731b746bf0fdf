#pragma once

#include <stdexcept>
#include <string>

namespace crsf {

// Invalid argument supplied by a caller (out-of-range coordinate, bad length).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Internal invariant violated; indicates a bug rather than bad input.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An enumeration cap or render guard refused the request.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace crsf

#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace freeinv {

/// Invalid input: bad sizes, out-of-range indices, failed preconditions.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested enumeration or expansion exceeds its configured cap.
/// `required()` carries the computed size that triggered the error.
class SizeLimitError : public std::length_error {
 public:
  SizeLimitError(const std::string& what, double required, double cap)
      : std::length_error(what + " (required " + format(required) + ", cap " + format(cap) + ")"),
        required_(required),
        cap_(cap) {}

  double required() const noexcept { return required_; }
  double cap() const noexcept { return cap_; }

 private:
  static std::string format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  double required_;
  double cap_;
};

/// A law does not store moments (or cumulants) up to the order an engine needs.
class CapacityError : public std::out_of_range {
 public:
  CapacityError(const std::string& what, std::size_t needed, std::size_t available)
      : std::out_of_range(what + ": order " + std::to_string(needed) + " needed, " +
                          std::to_string(available) + " stored"),
        needed_(needed),
        available_(available) {}

  std::size_t needed() const noexcept { return needed_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t needed_;
  std::size_t available_;
};

}  // namespace freeinv

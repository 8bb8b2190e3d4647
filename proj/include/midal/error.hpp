#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace midal {

// Precondition violations (bad shapes, out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value left the representable range (exp overflow, NaN in an iterate).
class NumericRangeError : public std::range_error {
 public:
  explicit NumericRangeError(const std::string& what, std::ptrdiff_t where = -1)
      : std::range_error(what), where_(where) {}

  // Pixel index or iteration number the failure refers to, -1 if none.
  std::ptrdiff_t where() const noexcept { return where_; }

 private:
  std::ptrdiff_t where_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::size_t pixel)
      : std::runtime_error(what), pixel_(pixel) {}

  std::size_t pixel() const noexcept { return pixel_; }

 private:
  std::size_t pixel_;
};

// Malformed or truncated image file. offset is the byte position at which
// parsing failed.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { kMalformedHeader, kTruncatedPayload, kUnsupportedMaxval, kIo };

  FormatError(Kind kind, const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

}  // namespace midal

#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "midal/error.hpp"
#include "midal/image.hpp"

namespace midal {

enum class ImageFileFormat { kPfm, kPgm8, kPgm16 };

inline const char* to_string(ImageFileFormat f) {
  switch (f) {
    case ImageFileFormat::kPfm: return "pfm";
    case ImageFileFormat::kPgm8: return "pgm8";
    case ImageFileFormat::kPgm16: return "pgm16";
  }
  return "?";
}

/// Quantization settings for PGM output. Values are clipped to [lo, hi],
/// normalized, raised to display_exponent, then mapped to [0, maxval] with
/// round-half-up.
struct PgmWriteOptions {
  double lo = 0.0;
  double hi = 1.0;
  double display_exponent = 1.0;
};

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(FormatError::Kind::kIo, "cannot open " + path.string(), 0);
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, const std::string& header,
                             const std::vector<unsigned char>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, "cannot create " + path.string(), 0);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw FormatError(FormatError::Kind::kIo, "write failed for " + path.string(), 0);
}

// Netpbm-style header tokenizer: whitespace separated, '#' comments to EOL.
class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  // Where the next token starts, for error messages.
  std::size_t next_token_offset() {
    skip_space_and_comments();
    return pos_;
  }

  std::string token(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') ++pos_;
    if (pos_ == start) {
      throw FormatError(FormatError::Kind::kMalformedHeader, std::string("missing ") + what,
                        start);
    }
    return {bytes_.begin() + static_cast<std::ptrdiff_t>(start),
            bytes_.begin() + static_cast<std::ptrdiff_t>(pos_)};
  }

  unsigned long positive_integer(const char* what) {
    const std::size_t at = next_token_offset();
    const std::string t = token(what);
    if (!std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        t.size() > 9) {
      throw FormatError(FormatError::Kind::kMalformedHeader,
                        std::string("bad ") + what + " '" + t + "'", at);
    }
    const unsigned long v = std::stoul(t);
    if (v == 0) {
      throw FormatError(FormatError::Kind::kMalformedHeader, std::string(what) + " is zero", at);
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError(FormatError::Kind::kMalformedHeader,
                        "expected single whitespace before raster", pos_);
    }
    ++pos_;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

inline ImageGrid read_pfm_bytes(const std::vector<unsigned char>& bytes) {
  HeaderReader hr(bytes);
  const std::string magic = hr.token("magic");
  if (magic != "Pf") {
    throw FormatError(FormatError::Kind::kMalformedHeader,
                      "not a grayscale PFM (magic '" + magic + "')", 0);
  }
  const std::size_t width = hr.positive_integer("width");
  const std::size_t height = hr.positive_integer("height");
  const std::size_t scale_at = hr.next_token_offset();
  const std::string scale_tok = hr.token("scale");
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_tok, &used);
    if (used != scale_tok.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw FormatError(FormatError::Kind::kMalformedHeader, "bad scale '" + scale_tok + "'",
                      scale_at);
  }
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw FormatError(FormatError::Kind::kMalformedHeader, "zero scale", scale_at);
  }
  hr.end_of_header();
  const bool little = scale < 0.0;
  const std::size_t start = hr.offset();
  const std::size_t need = width * height * 4;
  if (bytes.size() - start < need) {
    throw FormatError(FormatError::Kind::kTruncatedPayload,
                      "PFM payload has " + std::to_string(bytes.size() - start) +
                          " bytes, expected " + std::to_string(need),
                      bytes.size());
  }
  std::vector<double> data(width * height);
  for (std::size_t r = 0; r < height; ++r) {
    // PFM stores rows bottom to top.
    const std::size_t src_row = height - 1 - r;
    for (std::size_t c = 0; c < width; ++c) {
      const unsigned char* b = bytes.data() + start + 4 * (src_row * width + c);
      std::uint32_t bits = 0;
      if (little) {
        bits = std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
               std::uint32_t(b[3]) << 24;
      } else {
        bits = std::uint32_t(b[3]) | std::uint32_t(b[2]) << 8 | std::uint32_t(b[1]) << 16 |
               std::uint32_t(b[0]) << 24;
      }
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v)) {
        throw FormatError(FormatError::Kind::kMalformedHeader, "non-finite PFM sample",
                          start + 4 * (src_row * width + c));
      }
      data[r * width + c] = v;
    }
  }
  return ImageGrid(height, width, std::move(data));
}

inline ImageGrid read_pgm_bytes(const std::vector<unsigned char>& bytes) {
  HeaderReader hr(bytes);
  const std::string magic = hr.token("magic");
  if (magic != "P5") {
    throw FormatError(FormatError::Kind::kMalformedHeader,
                      "not a binary PGM (magic '" + magic + "')", 0);
  }
  const std::size_t width = hr.positive_integer("width");
  const std::size_t height = hr.positive_integer("height");
  const std::size_t maxval_at = hr.next_token_offset();
  const unsigned long maxval = hr.positive_integer("maxval");
  if (maxval > 65535) {
    throw FormatError(FormatError::Kind::kUnsupportedMaxval,
                      "unsupported maxval " + std::to_string(maxval), maxval_at);
  }
  hr.end_of_header();
  const std::size_t bps = maxval < 256 ? 1 : 2;
  const std::size_t start = hr.offset();
  const std::size_t need = width * height * bps;
  if (bytes.size() - start < need) {
    throw FormatError(FormatError::Kind::kTruncatedPayload,
                      "PGM payload has " + std::to_string(bytes.size() - start) +
                          " bytes, expected " + std::to_string(need),
                      bytes.size());
  }
  std::vector<double> data(width * height);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned char* b = bytes.data() + start + bps * i;
    const unsigned v = bps == 1 ? b[0] : (unsigned(b[0]) << 8 | b[1]);  // big-endian
    data[i] = static_cast<double>(v);
  }
  return ImageGrid(height, width, std::move(data));
}

}  // namespace detail

/// Reads a grayscale PFM ("Pf") or binary PGM ("P5"). PGM samples map to
/// reals in [0, maxval]; PFM samples are returned as stored.
inline ImageGrid read_image(const std::filesystem::path& path, ImageFileFormat format) {
  const auto bytes = detail::read_file_bytes(path);
  return format == ImageFileFormat::kPfm ? detail::read_pfm_bytes(bytes)
                                         : detail::read_pgm_bytes(bytes);
}

/// Picks the reader from the file's magic bytes.
inline ImageGrid read_image(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == 'f') return detail::read_pfm_bytes(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return detail::read_pgm_bytes(bytes);
  throw FormatError(FormatError::Kind::kMalformedHeader,
                    "unrecognized image format in " + path.string(), 0);
}

/// PFM output is little-endian float32, bottom-to-top rows. Pixels are
/// narrowed to float; a float-valued image round-trips bit-exactly.
inline void write_pfm(const ImageGrid& img, const std::filesystem::path& path) {
  const std::size_t h = img.height(), w = img.width();
  std::vector<unsigned char> payload(4 * img.size());
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t dst_row = h - 1 - r;
    for (std::size_t c = 0; c < w; ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(img(r, c)));
      unsigned char* b = payload.data() + 4 * (dst_row * w + c);
      b[0] = bits & 0xFF;
      b[1] = (bits >> 8) & 0xFF;
      b[2] = (bits >> 16) & 0xFF;
      b[3] = (bits >> 24) & 0xFF;
    }
  }
  const std::string header =
      "Pf\n" + std::to_string(w) + " " + std::to_string(h) + "\n-1.0\n";
  detail::write_file_bytes(path, header, payload);
}

inline unsigned quantize_pgm_sample(double v, unsigned maxval, const PgmWriteOptions& opt) {
  if (std::isnan(v)) throw InvalidArgument("write_pgm: NaN pixel");
  double t = (std::clamp(v, opt.lo, opt.hi) - opt.lo) / (opt.hi - opt.lo);
  if (opt.display_exponent != 1.0) t = std::pow(t, opt.display_exponent);
  return static_cast<unsigned>(std::min<double>(std::floor(t * maxval + 0.5), maxval));
}

inline void write_pgm(const ImageGrid& img, const std::filesystem::path& path,
                      ImageFileFormat format, const PgmWriteOptions& opt = {}) {
  if (format == ImageFileFormat::kPfm) throw InvalidArgument("write_pgm: PFM is not a PGM format");
  if (!(opt.hi > opt.lo)) throw InvalidArgument("write_pgm: display range must have hi > lo");
  if (!(opt.display_exponent > 0.0)) throw InvalidArgument("write_pgm: exponent must be positive");
  const unsigned maxval = format == ImageFileFormat::kPgm8 ? 255 : 65535;
  const std::size_t bps = format == ImageFileFormat::kPgm8 ? 1 : 2;
  std::vector<unsigned char> payload(bps * img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const unsigned q = quantize_pgm_sample(img[i], maxval, opt);
    if (bps == 1) {
      payload[i] = static_cast<unsigned char>(q);
    } else {
      payload[2 * i] = static_cast<unsigned char>(q >> 8);
      payload[2 * i + 1] = static_cast<unsigned char>(q & 0xFF);
    }
  }
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n" + std::to_string(maxval) + "\n";
  detail::write_file_bytes(path, header, payload);
}

inline void write_image(const ImageGrid& img, const std::filesystem::path& path,
                        ImageFileFormat format, const PgmWriteOptions& opt = {}) {
  if (format == ImageFileFormat::kPfm) {
    write_pfm(img, path);
  } else {
    write_pgm(img, path, format, opt);
  }
}

}  // namespace midal

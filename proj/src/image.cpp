#include "texnoise/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <vector>

namespace texnoise {

bool is_supported_bit_depth(int bit_depth) {
  return bit_depth == 8 || bit_depth == 12 || bit_depth == 16;
}

GrayImage::GrayImage(Pixels pixels, int bit_depth) : pixels_(std::move(pixels)), bit_depth_(bit_depth) {
  if (!is_supported_bit_depth(bit_depth)) {
    throw std::invalid_argument("unsupported bit depth " + std::to_string(bit_depth));
  }
  if (pixels_.size() > 0 && (pixels_.minCoeff() < 0 || pixels_.maxCoeff() > max_intensity())) {
    throw std::invalid_argument("intensity outside [0, " + std::to_string(max_intensity()) + "]");
  }
}

GrayImage GrayImage::zeros(int width, int height, int bit_depth) {
  return GrayImage(Pixels::Zero(height, width), bit_depth);
}

GrayImage GrayImage::from_field(const Field& field, int bit_depth) {
  const double top = static_cast<double>((std::int32_t{1} << bit_depth) - 1);
  Pixels px = field.unaryExpr([top](double v) {
                     return static_cast<std::int32_t>(std::clamp(std::round(v), 0.0, top));
                   })
                  .eval();
  return GrayImage(std::move(px), bit_depth);
}

RoiSpec parse_roi(const std::string& text) {
  RoiSpec roi;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> roi.x0 >> c1 >> roi.y0 >> c2 >> roi.side) || c1 != ',' || c2 != ',') {
    throw std::invalid_argument("ROI must be 'x,y,side', got '" + text + "'");
  }
  in >> std::ws;
  if (!in.eof()) throw std::invalid_argument("trailing characters in ROI '" + text + "'");
  return roi;
}

std::string to_string(const RoiSpec& roi) {
  return std::to_string(roi.x0) + "," + std::to_string(roi.y0) + "," + std::to_string(roi.side);
}

std::optional<ImageFormat> parse_image_format(std::string_view name) {
  if (name == "pgm8") return ImageFormat::Pgm8;
  if (name == "pgm16") return ImageFormat::Pgm16;
  if (name == "raw16") return ImageFormat::Raw16;
  return std::nullopt;
}

std::string_view to_string(ImageFormat format) {
  switch (format) {
    case ImageFormat::Pgm8: return "pgm8";
    case ImageFormat::Pgm16: return "pgm16";
    case ImageFormat::Raw16: return "raw16";
  }
  return "?";
}

namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int bit_depth_for_maxval(long maxval) {
  if (maxval <= 255) return 8;
  if (maxval <= 4095) return 12;
  return 16;
}

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  long next_int(const char* what) {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000'000L) throw IoError(std::string("PGM header: ") + what + " too large");
      ++digits;
    }
    if (digits == 0) throw IoError(std::string("PGM header: missing ") + what);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw IoError("PGM header: missing whitespace before raster");
    }
    return pos_ + 1;
  }

  std::size_t pos_ = 2;

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
};

GrayImage decode_pgm(const std::vector<unsigned char>& bytes, const std::string& name) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw IoError(name + ": not a binary PGM (P5) file");
  }
  HeaderReader header(bytes);
  const long width = header.next_int("width");
  const long height = header.next_int("height");
  const long maxval = header.next_int("maxval");
  if (width <= 0 || height <= 0) throw IoError(name + ": PGM dimensions must be positive");
  if (maxval <= 0 || maxval > 65535) throw IoError(name + ": PGM maxval out of range");
  const std::size_t offset = header.raster_offset();
  const std::size_t sample = maxval <= 255 ? 1 : 2;
  const std::size_t expected = static_cast<std::size_t>(width) * height * sample;
  if (bytes.size() - offset < expected) throw IoError(name + ": truncated PGM raster");
  if (bytes.size() - offset > expected) throw IoError(name + ": trailing bytes after PGM raster");

  GrayImage::Pixels px(height, width);
  const unsigned char* p = bytes.data() + offset;
  for (Eigen::Index i = 0; i < px.size(); ++i) {
    long v = sample == 1 ? p[i] : (long{p[2 * i]} << 8) | p[2 * i + 1];
    if (v > maxval) throw IoError(name + ": intensity exceeds maxval");
    px.data()[i] = static_cast<std::int32_t>(v);
  }
  return GrayImage(std::move(px), bit_depth_for_maxval(maxval));
}

GrayImage decode_raw16(const std::vector<unsigned char>& bytes, const RawDims& dims, const std::string& name) {
  if (dims.width <= 0 || dims.height <= 0) throw IoError(name + ": raw16 needs positive width/height");
  const std::size_t expected = static_cast<std::size_t>(dims.width) * dims.height * 2;
  if (bytes.size() < expected) throw IoError(name + ": truncated raw16 data");
  if (bytes.size() > expected) throw IoError(name + ": raw16 size does not match dims");
  GrayImage::Pixels px(dims.height, dims.width);
  for (Eigen::Index i = 0; i < px.size(); ++i) {
    px.data()[i] = static_cast<std::int32_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
  }
  return GrayImage(std::move(px), 16);
}

void write_bytes(const std::filesystem::path& path, const std::string& header,
                 const std::vector<unsigned char>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << header;
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

GrayImage load_pgm(const std::filesystem::path& path) { return decode_pgm(read_bytes(path), path.string()); }

GrayImage load_image(const std::filesystem::path& path, ImageFormat format, std::optional<RawDims> dims) {
  const auto bytes = read_bytes(path);
  switch (format) {
    case ImageFormat::Pgm8:
    case ImageFormat::Pgm16: {
      GrayImage img = decode_pgm(bytes, path.string());
      const bool wide = img.bit_depth() > 8;
      if (wide != (format == ImageFormat::Pgm16)) {
        throw IoError(path.string() + ": PGM maxval does not match declared format " +
                      std::string(to_string(format)));
      }
      return img;
    }
    case ImageFormat::Raw16:
      if (!dims) throw IoError(path.string() + ": raw16 requires explicit width and height");
      return decode_raw16(bytes, *dims, path.string());
  }
  throw IoError("unknown image format");
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  const auto maxval = img.max_intensity();
  const std::size_t sample = maxval <= 255 ? 1 : 2;
  std::vector<unsigned char> body(static_cast<std::size_t>(img.pixels().size()) * sample);
  const auto* src = img.pixels().data();
  for (Eigen::Index i = 0; i < img.pixels().size(); ++i) {
    if (sample == 1) {
      body[i] = static_cast<unsigned char>(src[i]);
    } else {
      body[2 * i] = static_cast<unsigned char>(src[i] >> 8);
      body[2 * i + 1] = static_cast<unsigned char>(src[i] & 0xff);
    }
  }
  const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                             "\n" + std::to_string(maxval) + "\n";
  write_bytes(path, header, body);
}

void save_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format) {
  switch (format) {
    case ImageFormat::Pgm8:
      if (img.bit_depth() != 8) throw IoError("pgm8 requires an 8-bit image");
      save_pgm(img, path);
      return;
    case ImageFormat::Pgm16:
      if (img.bit_depth() == 8) throw IoError("pgm16 requires a 12- or 16-bit image");
      save_pgm(img, path);
      return;
    case ImageFormat::Raw16: {
      std::vector<unsigned char> body(static_cast<std::size_t>(img.pixels().size()) * 2);
      const auto* src = img.pixels().data();
      for (Eigen::Index i = 0; i < img.pixels().size(); ++i) {
        body[2 * i] = static_cast<unsigned char>(src[i] & 0xff);
        body[2 * i + 1] = static_cast<unsigned char>(src[i] >> 8);
      }
      write_bytes(path, "", body);
      return;
    }
  }
}

GrayImage extract_roi(const GrayImage& img, const RoiSpec& roi) {
  if (!roi.fits(img.width(), img.height())) {
    throw std::out_of_range("ROI " + to_string(roi) + " outside " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + " image");
  }
  GrayImage::Pixels px = img.pixels().block(roi.y0, roi.x0, roi.side, roi.side);
  return GrayImage(std::move(px), img.bit_depth());
}

GrayImage quantize(const GrayImage& img, int levels) {
  const std::int64_t range = std::int64_t{1} << img.bit_depth();
  if (levels < 2 || levels > range) {
    throw std::invalid_argument("quantization levels must lie in [2, 2^bit_depth]");
  }
  GrayImage::Pixels px = img.pixels()
                             .unaryExpr([levels, range](std::int32_t v) {
                               const auto q = static_cast<std::int64_t>(v) * levels / range;
                               return static_cast<std::int32_t>(std::min<std::int64_t>(q, levels - 1));
                             })
                             .eval();
  return GrayImage(std::move(px), img.bit_depth());
}

Eigen::VectorXd Histogram::normalized() const {
  const double t = total();
  if (!(t > 0.0)) throw std::invalid_argument("cannot normalize an empty histogram");
  return counts / t;
}

Histogram Histogram::tally(std::span<const std::int64_t> values) {
  Histogram h;
  if (values.empty()) return h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.origin = *lo;
  h.counts = Eigen::VectorXd::Zero(*hi - *lo + 1);
  for (auto v : values) h.counts(v - h.origin) += 1.0;
  return h;
}

Histogram histogram(const GrayImage& img, const RoiSpec& region) {
  const GrayImage roi = extract_roi(img, region);
  std::vector<std::int64_t> values(roi.pixels().data(), roi.pixels().data() + roi.pixels().size());
  return Histogram::tally(values);
}

Moments moments(const Histogram& h) {
  const double total = h.total();
  if (h.bins() == 0 || !(total > 0.0)) throw std::invalid_argument("moments of an empty histogram");
  const Eigen::VectorXd p = h.counts / total;
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(h.bins(), 0.0, static_cast<double>(h.bins() - 1));
  // Shifting by the origin keeps the second moment well conditioned.
  const double offset_mean = p.dot(z);
  const double variance = p.dot((z.array() - offset_mean).square().matrix());
  return {static_cast<double>(h.origin) + offset_mean, std::max(variance, 0.0)};
}

double psnr(const Field& reference, const Field& test) {
  if (reference.rows() != test.rows() || reference.cols() != test.cols()) {
    throw std::invalid_argument("psnr: dimension mismatch");
  }
  const double mse = (reference - test).square().mean();
  const double peak = reference.maxCoeff();
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace texnoise

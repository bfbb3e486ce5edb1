#include "ada/image.hpp"

#include <cctype>

#include "ada/error.hpp"
#include "ada/text_format.hpp"

namespace ada {

Image::Image(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw DataError("image dimensions must be positive");
  rgb.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

namespace {

class PpmReader {
 public:
  PpmReader(const std::string& bytes, const std::string& context)
      : bytes_(bytes), context_(context) {}

  std::string token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw DataError(context_ + ": truncated header");
    return bytes_.substr(start, pos_ - start);
  }

  int integer(const char* what) {
    const auto v = text::parse_int(token(), context_ + " " + what);
    if (v <= 0 || v > 1 << 20) throw DataError(context_ + ": bad " + what);
    return static_cast<int>(v);
  }

  // Exactly one whitespace byte separates the header from binary data.
  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw DataError(context_ + ": malformed header");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::string context_;
  std::size_t pos_ = 0;
};

}  // namespace

Image parse_ppm(const std::string& bytes, const std::string& context) {
  PpmReader reader(bytes, context);
  const std::string magic = reader.token();
  if (magic != "P3" && magic != "P6") throw DataError(context + ": not a P3/P6 pixmap");
  const int w = reader.integer("width");
  const int h = reader.integer("height");
  const int maxval = reader.integer("maxval");
  if (maxval > 255) throw DataError(context + ": 16-bit pixmaps are not supported");
  Image image(w, h);
  const std::size_t n = image.rgb.size();
  auto scale = [maxval](long long v) {
    return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  };
  if (magic == "P6") {
    reader.skip_single_space();
    if (bytes.size() - reader.pos() < n) throw DataError(context + ": truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<unsigned char>(bytes[reader.pos() + i]);
      if (v > maxval) throw DataError(context + ": sample exceeds maxval");
      image.rgb[i] = scale(v);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = text::parse_int(reader.token(), context + " sample");
      if (v < 0 || v > maxval) throw DataError(context + ": sample out of range");
      image.rgb[i] = scale(v);
    }
  }
  return image;
}

Image read_ppm(const std::string& path) { return parse_ppm(text::read_file(path), path); }

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  return out;
}

void write_ppm(const std::string& path, const Image& image) {
  text::write_file(path, encode_ppm(image));
}

}  // namespace ada

#include "ada/text_format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ada/error.hpp"

namespace ada::text {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw DataError("cannot format number");
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::string_view context) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    throw DataError(std::string(context) + ": cannot parse number '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError(std::string(context) + ": non-finite value '" + std::string(token) + "'");
  }
  return value;
}

long long parse_int(std::string_view token, std::string_view context) {
  token = trim(token);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    throw DataError(std::string(context) + ": cannot parse integer '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, std::string_view delims) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find_first_of(delims, pos);
    const auto piece = s.substr(pos, next == std::string_view::npos ? s.npos : next - pos);
    if (!piece.empty()) out.push_back(piece);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string format_box(const BoundingBox& box) {
  return "[" + format_double(box.x_min()) + ", " + format_double(box.y_min()) + ", " +
         format_double(box.x_max()) + ", " + format_double(box.y_max()) + "]";
}

BoundingBox parse_box(std::string_view text, std::string_view context) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw DataError(std::string(context) + ": expected [x_min, y_min, x_max, y_max]");
  }
  const auto fields = split(text.substr(1, text.size() - 2), ", \t");
  if (fields.size() != 4) {
    throw DataError(std::string(context) + ": box needs exactly 4 numbers");
  }
  double v[4];
  for (int i = 0; i < 4; ++i) v[i] = parse_double(fields[i], context);
  try {
    return BoundingBox(v[0], v[1], v[2], v[3]);
  } catch (const DataError& e) {
    throw DataError(std::string(context) + ": " + e.what());
  }
}

std::string format_vector(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double(values[i]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace ada::text

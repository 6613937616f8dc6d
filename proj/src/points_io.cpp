#include "vorann/points_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "vorann/error.hpp"

namespace vorann {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": cannot parse '" +
                                             std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<PointRecord> parse_points_csv(std::istream& in) {
  std::vector<PointRecord> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;

    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos) {
      throw Error(ErrorCode::InvalidInput,
                  "line " + std::to_string(line_no) + ": expected 'id,x,y'");
    }
    PointRecord p;
    p.id = parse_field<PointId>(view.substr(0, c1), line_no);
    p.x = parse_field<double>(view.substr(c1 + 1, c2 - c1 - 1), line_no);
    p.y = parse_field<double>(view.substr(c2 + 1), line_no);
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::NonFiniteCoordinate, "line " + std::to_string(line_no));
    }
    if (p.id != points.size()) {
      throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": expected id " +
                                               std::to_string(points.size()));
    }
    points.push_back(p);
  }
  return points;
}

std::vector<PointRecord> read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return parse_points_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_points_csv(std::ostream& out, std::span<const PointRecord> points) {
  for (const PointRecord& p : points) {
    out << p.id << ',' << format_double(p.x) << ',' << format_double(p.y) << '\n';
  }
}

void write_points_csv(const std::filesystem::path& path, std::span<const PointRecord> points) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
  write_points_csv(out, points);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

}  // namespace vorann

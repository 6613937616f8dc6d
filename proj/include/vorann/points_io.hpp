#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vorann/geom.hpp"

namespace vorann {

/// Point dataset CSV: one `id,x,y` record per line, no header, ids 0,1,2,...
/// in order. Lines starting with `#` and blank lines are skipped.
std::vector<PointRecord> parse_points_csv(std::istream& in);
std::vector<PointRecord> read_points_csv(const std::filesystem::path& path);

void write_points_csv(std::ostream& out, std::span<const PointRecord> points);
void write_points_csv(const std::filesystem::path& path, std::span<const PointRecord> points);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace vorann

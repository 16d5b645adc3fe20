#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qks/core.hpp"

namespace qks {

/// One point per row, comma-separated numeric columns. Blank lines and lines
/// starting with '#' are skipped.
std::vector<Point> read_points_csv(std::istream& in);
std::vector<Point> load_points_csv(const std::filesystem::path& path);

void write_points_csv(std::ostream& out, std::span<const Point> points);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

}  // namespace qks

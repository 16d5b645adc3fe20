#include "qks/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "qks/error.hpp"

namespace qks {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw Error(ErrorCode::io_error,
                "line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<Point> read_points_csv(std::istream& in) {
  std::vector<Point> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    Point p;
    std::size_t start = 0;
    while (true) {
      const auto comma = row.find(',', start);
      p.push_back(parse_double(row.substr(start, comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!points.empty() && p.size() != points.front().size()) {
      throw Error(ErrorCode::io_error, "line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(points.front().size()) + " columns");
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<Point> load_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return read_points_csv(in);
}

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_points_csv(std::ostream& out, std::span<const Point> points) {
  for (const auto& p : points) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(p[i]);
    }
    out << '\n';
  }
}

}  // namespace qks

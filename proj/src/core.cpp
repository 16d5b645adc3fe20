#include "qks/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qks/error.hpp"

namespace qks {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

double squared_distance(PointView p, PointView q) {
  require(p.size() == q.size(), "dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p[i] - q[i];
    s += diff * diff;
  }
  return s;
}

double euclidean_distance(PointView p, PointView q) {
  return std::sqrt(squared_distance(p, q));
}

namespace {

template <typename Range>
Point centroid_of(const Range& points) {
  require(!points.empty(), "centroid of an empty multiset");
  const std::size_t dim = points.front().size();
  std::vector<CompensatedSum> sums(dim);
  for (const auto& p : points) {
    require(p.size() == dim, "dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) sums[i].add(p[i]);
  }
  Point mean(dim);
  const auto n = static_cast<double>(points.size());
  for (std::size_t i = 0; i < dim; ++i) mean[i] = sums[i].value() / n;
  return mean;
}

}  // namespace

Point centroid(std::span<const Point> points) { return centroid_of(points); }
Point centroid(std::span<const PointView> points) { return centroid_of(points); }

CenterSetView::CenterSetView(std::span<const double> coords, std::size_t dim)
    : coords_(coords), dim_(dim) {
  require(dim > 0 || coords.empty(), "center set with zero dimension");
  require(dim == 0 || coords.size() % dim == 0, "ragged center coordinates");
}

CenterSet::CenterSet(std::span<const Point> centers) {
  for (const auto& c : centers) push_back(c);
}

std::vector<Point> CenterSet::centers() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t j = 0; j < size(); ++j) {
    const auto c = center(j);
    out.emplace_back(c.begin(), c.end());
  }
  return out;
}

void CenterSet::push_back(PointView c) {
  require(!c.empty(), "center with zero dimension");
  if (dim_ == 0) dim_ = c.size();
  require(c.size() == dim_, "dimension mismatch");
  coords_.insert(coords_.end(), c.begin(), c.end());
}

void CenterSetList::push_back(std::span<const double> coords) {
  require(coords.size() == k_ * dim_, "center set has the wrong shape");
  coords_.insert(coords_.end(), coords.begin(), coords.end());
}

NearestCenter nearest_center(PointView p, CenterSetView centers) {
  require(!centers.empty(), "empty center set");
  require(p.size() == centers.dim(), "dimension mismatch");
  NearestCenter best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double d2 = squared_distance(p, centers.center(j));
    if (d2 < best.squared_distance) best = {j, d2};
  }
  return best;
}

Dataset::Dataset(std::vector<double> coords, std::size_t dim, double eta, double scale)
    : coords_(std::move(coords)), size_(coords_.size() / dim), dim_(dim), eta_(eta), scale_(scale) {}

std::vector<Point> Dataset::points() const {
  std::vector<Point> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto p = point(i);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

Dataset normalize_dataset(std::span<const Point> raw) {
  require(raw.size() >= 2, "dataset needs at least two points");
  const std::size_t dim = raw.front().size();
  require(dim >= 1, "points need at least one coordinate");
  for (const auto& p : raw) {
    require(p.size() == dim, "dimension mismatch");
    for (double x : p) require(std::isfinite(x), "non-finite coordinate");
  }

  double min_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      const double d2 = squared_distance(raw[i], raw[j]);
      if (d2 > 0.0) min_d2 = std::min(min_d2, d2);
    }
  }
  if (!std::isfinite(min_d2)) {
    throw Error(ErrorCode::degenerate_dataset, "degenerate dataset: aspect ratio undefined");
  }

  const double scale = std::sqrt(min_d2);
  std::vector<double> coords;
  coords.reserve(raw.size() * dim);
  for (const auto& p : raw) {
    for (double x : p) coords.push_back(x / scale);
  }

  double max_d2 = 0.0;
  const std::span<const double> flat(coords);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      max_d2 = std::max(max_d2, squared_distance(flat.subspan(i * dim, dim), flat.subspan(j * dim, dim)));
    }
  }
  // Rounding can leave the scaled maximum a hair under 1 on two-point sets.
  const double eta = std::max(1.0, std::sqrt(max_d2));
  return Dataset(std::move(coords), dim, eta, scale);
}

double aspect_ratio(const Dataset& data) { return data.eta(); }

double exact_cost(const Dataset& data, CenterSetView centers) {
  CompensatedSum total;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total.add(nearest_center(data.point(i), centers).squared_distance);
  }
  return total.value();
}

double exact_cost(std::span<const Point> points, CenterSetView centers) {
  CompensatedSum total;
  for (const auto& p : points) total.add(nearest_center(p, centers).squared_distance);
  return total.value();
}

}  // namespace qks

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qks {

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Neumaier-compensated accumulator. Cost sums span many orders of magnitude
/// (up to N * eta^2), so plain summation is not good enough here.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

double squared_distance(PointView p, PointView q);
double euclidean_distance(PointView p, PointView q);

/// Coordinate-wise mean of a nonempty multiset of points.
Point centroid(std::span<const Point> points);
Point centroid(std::span<const PointView> points);

/// Non-owning view of t centers stored row-major.
class CenterSetView {
 public:
  CenterSetView() = default;
  CenterSetView(std::span<const double> coords, std::size_t dim);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }
  PointView center(std::size_t j) const { return coords_.subspan(j * dim_, dim_); }
  std::span<const double> coords() const noexcept { return coords_; }

 private:
  std::span<const double> coords_;
  std::size_t dim_ = 0;
};

/// Ordered list of centers. May be empty (the first D^2 round uses no centers).
class CenterSet {
 public:
  CenterSet() = default;
  explicit CenterSet(std::size_t dim) : dim_(dim) {}
  explicit CenterSet(std::span<const Point> centers);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }
  PointView center(std::size_t j) const { return view().center(j); }
  std::span<const double> coords() const noexcept { return coords_; }
  std::vector<Point> centers() const;

  void push_back(PointView c);

  CenterSetView view() const noexcept { return {coords_, dim_}; }
  operator CenterSetView() const noexcept { return view(); }  // NOLINT(google-explicit-constructor)

  bool operator==(const CenterSet&) const = default;

 private:
  std::vector<double> coords_;
  std::size_t dim_ = 0;
};

/// Flat storage for many center sets that all have k centers of dimension d.
class CenterSetList {
 public:
  CenterSetList(std::size_t k, std::size_t dim) : k_(k), dim_(dim) {}

  std::size_t size() const noexcept { return k_ * dim_ == 0 ? 0 : coords_.size() / (k_ * dim_); }
  bool empty() const noexcept { return coords_.empty(); }
  std::size_t k() const noexcept { return k_; }
  std::size_t dim() const noexcept { return dim_; }

  CenterSetView operator[](std::size_t l) const {
    return {std::span<const double>(coords_).subspan(l * k_ * dim_, k_ * dim_), dim_};
  }

  /// Appends one center set given as k*d row-major coordinates.
  void push_back(std::span<const double> coords);
  void reserve(std::size_t count) { coords_.reserve(count * k_ * dim_); }

 private:
  std::vector<double> coords_;
  std::size_t k_;
  std::size_t dim_;
};

struct NearestCenter {
  std::size_t index;
  double squared_distance;
};

/// Ties go to the lowest center index.
NearestCenter nearest_center(PointView p, CenterSetView centers);

/// N points scaled so the minimum distance between distinct points is 1.
class Dataset {
 public:
  std::size_t size() const noexcept { return size_; }
  std::size_t dim() const noexcept { return dim_; }
  /// Maximum pairwise distance after scaling (the aspect ratio).
  double eta() const noexcept { return eta_; }
  /// Raw minimum distance; raw coordinates are point(i) * scale().
  double scale() const noexcept { return scale_; }

  PointView point(std::size_t i) const {
    return std::span<const double>(coords_).subspan(i * dim_, dim_);
  }
  std::span<const double> coords() const noexcept { return coords_; }
  std::vector<Point> points() const;

 private:
  friend Dataset normalize_dataset(std::span<const Point> raw);

  Dataset(std::vector<double> coords, std::size_t dim, double eta, double scale);

  std::vector<double> coords_;
  std::size_t size_;
  std::size_t dim_;
  double eta_;
  double scale_;
};

/// Divides every coordinate by the minimum distance over distinct pairs.
/// Exact duplicates are kept. Throws Error(degenerate_dataset) when all
/// points coincide.
Dataset normalize_dataset(std::span<const Point> raw);

double aspect_ratio(const Dataset& data);

/// Phi(V, C): sum over points of the squared distance to the nearest center.
double exact_cost(const Dataset& data, CenterSetView centers);
/// Same, over raw (unnormalized) points.
double exact_cost(std::span<const Point> points, CenterSetView centers);

}  // namespace qks

#include "charax/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "charax/error.hpp"

namespace charax {

Grid1D::Grid1D(std::size_t n, double x_min, double x_max, Topology topology)
    : n_(n), x_min_(x_min), x_max_(x_max), dx_(0.0), topology_(topology) {
  if (n < kMinCells) {
    throw ConfigError("Grid1D needs at least " + std::to_string(kMinCells) +
                      " cells, got " + std::to_string(n));
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw ConfigError("Grid1D needs finite x_min < x_max");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n);
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

TorusGrid2D::TorusGrid2D(std::size_t n1, std::size_t n2) : n1_(n1), n2_(n2) {
  if (n1 < Grid1D::kMinCells || n2 < Grid1D::kMinCells) {
    throw ConfigError("TorusGrid2D needs at least 8 cells per axis");
  }
}

Grid1D TorusGrid2D::axis_grid(int axis) const {
  return Grid1D(axis == 0 ? n1_ : n2_, 0.0, 1.0, Topology::periodic);
}

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) {
      throw NonFiniteError(std::string(what) + ": non-finite value at index " +
                           std::to_string(j));
    }
  }
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

GridFunction::GridFunction(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ConfigError("GridFunction: value count " +
                      std::to_string(values_.size()) + " != grid size " +
                      std::to_string(grid_.size()));
  }
  require_finite(values_, "GridFunction");
}

GridFunction GridFunction::sample(const Grid1D& grid,
                                  const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
  return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::constant(const Grid1D& grid, double c) {
  return GridFunction(grid, std::vector<double>(grid.size(), c));
}

double GridFunction::min() const {
  return *std::min_element(values_.begin(), values_.end());
}
double GridFunction::max() const {
  return *std::max_element(values_.begin(), values_.end());
}
double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}
double GridFunction::integral() const {
  return compensated_sum(values_) * grid_.dx();
}

GridFunction2D::GridFunction2D(TorusGrid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ConfigError("GridFunction2D: value count does not match grid");
  }
  require_finite(values_, "GridFunction2D");
}

GridFunction2D GridFunction2D::sample(
    const TorusGrid2D& grid, const std::function<double(double, double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.n1(); ++i) {
    for (std::size_t j = 0; j < grid.n2(); ++j) {
      v[grid.index(i, j)] = f(grid.x1(i), grid.x2(j));
    }
  }
  return GridFunction2D(grid, std::move(v));
}

GridFunction2D GridFunction2D::constant(const TorusGrid2D& grid, double c) {
  return GridFunction2D(grid, std::vector<double>(grid.size(), c));
}

double GridFunction2D::min() const {
  return *std::min_element(values_.begin(), values_.end());
}
double GridFunction2D::max() const {
  return *std::max_element(values_.begin(), values_.end());
}
double GridFunction2D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}
double GridFunction2D::integral() const {
  return compensated_sum(values_) * grid_.cell_area();
}

}  // namespace charax

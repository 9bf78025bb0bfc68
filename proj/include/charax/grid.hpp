#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace charax {

enum class Topology { periodic, line };

/// Uniform 1D grid. Samples live at cell centres x_j = x_min + (j + 1/2) dx.
class Grid1D {
 public:
  static constexpr std::size_t kMinCells = 8;

  Grid1D(std::size_t n, double x_min, double x_max,
         Topology topology = Topology::periodic);

  std::size_t size() const { return n_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double length() const { return x_max_ - x_min_; }
  double dx() const { return dx_; }
  Topology topology() const { return topology_; }
  bool periodic() const { return topology_ == Topology::periodic; }

  double x(std::size_t j) const {
    return x_min_ + (static_cast<double>(j) + 0.5) * dx_;
  }
  std::vector<double> nodes() const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  std::size_t n_;
  double x_min_;
  double x_max_;
  double dx_;
  Topology topology_;
};

/// The periodic unit square [0,1]^2. Index (i, j) is stored at i * n2 + j,
/// i running along x1.
class TorusGrid2D {
 public:
  TorusGrid2D(std::size_t n1, std::size_t n2);

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t size() const { return n1_ * n2_; }
  double dx1() const { return 1.0 / static_cast<double>(n1_); }
  double dx2() const { return 1.0 / static_cast<double>(n2_); }
  double dx(int axis) const { return axis == 0 ? dx1() : dx2(); }
  double cell_area() const { return dx1() * dx2(); }
  double x1(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx1(); }
  double x2(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dx2(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * n2_ + j; }

  /// The 1D grid along one axis.
  Grid1D axis_grid(int axis) const;

  friend bool operator==(const TorusGrid2D&, const TorusGrid2D&) = default;

 private:
  std::size_t n1_;
  std::size_t n2_;
};

/// Field sampled at the nodes of a Grid1D. Every value is finite.
class GridFunction {
 public:
  GridFunction(Grid1D grid, std::vector<double> values);

  static GridFunction sample(const Grid1D& grid,
                             const std::function<double(double)>& f);
  static GridFunction constant(const Grid1D& grid, double c);

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  double min() const;
  double max() const;
  double max_abs() const;
  /// sum_j q_j dx, compensated.
  double integral() const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Field on the torus grid.
class GridFunction2D {
 public:
  GridFunction2D(TorusGrid2D grid, std::vector<double> values);

  static GridFunction2D sample(const TorusGrid2D& grid,
                               const std::function<double(double, double)>& f);
  static GridFunction2D constant(const TorusGrid2D& grid, double c);

  const TorusGrid2D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[grid_.index(i, j)];
  }

  double min() const;
  double max() const;
  double max_abs() const;
  double integral() const;

 private:
  TorusGrid2D grid_;
  std::vector<double> values_;
};

/// Throws NonFiniteError naming `what` if any value is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values);

}  // namespace charax

#include "charax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "charax/error.hpp"

namespace charax {

namespace {

// d/dy f'(u0(y))
double foot_slope(const std::function<double(double)>& u0,
                  const std::function<double(double)>& du0,
                  const ScalarFlux& flux, double y) {
  return flux.second_derivative(u0(y)) * du0(y);
}

}  // namespace

double characteristics_solution(const std::function<double(double)>& u0,
                                const std::function<double(double)>& du0,
                                const ScalarFlux& flux, double t, double x,
                                double tol) {
  if (t < 0.0) throw DomainError("characteristics_solution: t < 0");
  if (t == 0.0) return u0(x);
  const auto g = [&](double y) { return y + flux.df(u0(y)) * t - x; };

  // Bracket the foot of the characteristic.
  double reach = t * std::abs(flux.df(u0(x))) + 1e-3;
  double lo = x - reach, hi = x + reach;
  for (int k = 0; k < 60 && !(g(lo) <= 0.0 && g(hi) >= 0.0); ++k) {
    reach *= 2.0;
    lo = x - reach;
    hi = x + reach;
  }
  if (!(g(lo) <= 0.0 && g(hi) >= 0.0)) {
    throw DomainError("characteristics_solution: no root bracket");
  }
  // The foot map must be increasing on the bracket, otherwise characteristics
  // have crossed.
  constexpr int kChecks = 1024;
  for (int k = 0; k <= kChecks; ++k) {
    const double y = lo + (hi - lo) * k / kChecks;
    if (!(1.0 + t * foot_slope(u0, du0, flux, y) > 0.0)) {
      std::ostringstream msg;
      msg << "characteristics_solution: characteristics cross near y=" << y
          << " at t=" << t << " (past the shock time)";
      throw DomainError(msg.str());
    }
  }
  double y = std::clamp(x - flux.df(u0(x)) * t, lo, hi);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double gy = g(y);
    if (gy == 0.0) return u0(y);
    if (gy < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    const double slope = 1.0 + t * foot_slope(u0, du0, flux, y);
    double next = y - gy / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= tol) {
      y = next;
      break;
    }
    y = next;
  }
  return u0(y);
}

double breaking_time(const std::function<double(double)>& u0,
                     const std::function<double(double)>& du0,
                     const ScalarFlux& flux, double lo, double hi,
                     int samples) {
  double m = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double y = lo + (hi - lo) * k / (samples - 1);
    m = std::min(m, foot_slope(u0, du0, flux, y));
  }
  return m < 0.0 ? -1.0 / m : std::numeric_limits<double>::infinity();
}

RiemannSolution::RiemannSolution(RiemannDatum datum) : datum_(std::move(datum)) {
  if (degenerate()) return;
  const double a = std::min(datum_.u_left, datum_.u_right);
  const double b = std::max(datum_.u_left, datum_.u_right);
  constexpr int kSamples = 257;
  for (int k = 0; k < kSamples; ++k) {
    const double u = a + (b - a) * k / (kSamples - 1);
    // Flat points (u = 0 for u^4/4) are allowed; f' must still increase.
    if (datum_.flux.second_derivative(u) < 0.0) {
      throw DomainError("RiemannSolution: flux is not convex on the data range");
    }
  }
  if (!(datum_.flux.df(b) > datum_.flux.df(a))) {
    throw DomainError("RiemannSolution: f' is not increasing on the data range");
  }
}

double RiemannSolution::shock_speed() const {
  const double ul = datum_.u_left, ur = datum_.u_right;
  if (!is_shock()) throw DomainError("shock_speed: datum is not a shock");
  return (datum_.flux.f(ul) - datum_.flux.f(ur)) / (ul - ur);
}

double RiemannSolution::inverse_speed(double xi) const {
  double lo = datum_.u_left, hi = datum_.u_right;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (datum_.flux.df(mid) < xi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double RiemannSolution::operator()(double xi) const {
  const double ul = datum_.u_left, ur = datum_.u_right;
  if (degenerate()) return ul;
  if (is_shock()) return xi < shock_speed() ? ul : ur;
  if (xi <= datum_.flux.df(ul)) return ul;
  if (xi >= datum_.flux.df(ur)) return ur;
  return inverse_speed(xi);
}

double RiemannSolution::at(double t, double x, double x0) const {
  if (t <= 0.0) return x < x0 ? datum_.u_left : datum_.u_right;
  return (*this)((x - x0) / t);
}

double riemann_solution(const RiemannDatum& datum, double xi) {
  return RiemannSolution(datum)(xi);
}

double l1_distance(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("l1_distance: grid mismatch");
  std::vector<double> d(a.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = std::abs(a[j] - b[j]);
  return compensated_sum(d) * a.grid().dx();
}

double linf_distance(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("linf_distance: grid mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace charax

#include "charax/flux.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "charax/error.hpp"

namespace charax {

ScalarFlux ScalarFlux::burgers() {
  return {"burgers", [](double u) { return 0.5 * u * u; },
          [](double u) { return u; }, [](double) { return 1.0; }};
}

ScalarFlux ScalarFlux::quartic() {
  return {"quartic", [](double u) { return 0.25 * u * u * u * u; },
          [](double u) { return u * u * u; },
          [](double u) { return 3.0 * u * u; }};
}

ScalarFlux ScalarFlux::linear(double c) {
  return {"linear", [c](double u) { return c * u; },
          [c](double) { return c; }, [](double) { return 0.0; }};
}

ScalarFlux ScalarFlux::zero() {
  return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

ScalarFlux ScalarFlux::scaled(const ScalarFlux& base, double scale) {
  ScalarFlux out;
  out.name = base.name + "*" + std::to_string(scale);
  out.f = [f = base.f, scale](double u) { return scale * f(u); };
  out.df = [df = base.df, scale](double u) { return scale * df(u); };
  if (base.d2f) {
    out.d2f = [d2f = base.d2f, scale](double u) { return scale * d2f(u); };
  }
  return out;
}

double ScalarFlux::second_derivative(double u) const {
  if (d2f) return d2f(u);
  const double h = 1e-5 * std::max(1.0, std::abs(u));
  return (df(u + h) - df(u - h)) / (2.0 * h);
}

double max_abs_speed(const ScalarFlux& flux, std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(flux.df(v)));
  return m;
}

void check_flux_derivative(const ScalarFlux& flux, double lo, double hi,
                           int samples, double tol) {
  if (!flux.f || !flux.df) throw ConfigError("flux needs f and df");
  if (hi <= lo) {
    const double mid = lo;
    lo = mid - 1.0;
    hi = mid + 1.0;
  }
  for (int k = 0; k < samples; ++k) {
    const double u = lo + (hi - lo) * (k + 0.5) / samples;
    const double h = 1e-5 * std::max(1.0, std::abs(u));
    const double fd = (flux.f(u + h) - flux.f(u - h)) / (2.0 * h);
    const double exact = flux.df(u);
    const double residual = std::abs(fd - exact) / std::max(1.0, std::abs(exact));
    if (!(residual < tol)) {
      std::ostringstream msg;
      msg << "flux '" << flux.name << "': df is not the derivative of f at u="
          << u << " (residual " << residual << ")";
      throw ConfigError(msg.str());
    }
  }
}

}  // namespace charax

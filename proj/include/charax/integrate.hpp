#pragma once

#include <algorithm>
#include <cmath>
#include <span>

namespace charax {

/// Marches `state` (any type with a public `double t`) to t_end with the
/// largest admissible step, shortening steps so that every time listed in
/// `stops` is hit exactly. `observe(state, at_stop)` runs after each step.
template <class State, class MaxDt, class Step, class Observe>
State integrate(State state, double t_end, MaxDt&& max_dt, Step&& step,
                Observe&& observe, std::span<const double> stops = {}) {
  std::size_t next = 0;
  const auto tiny = [](double t) { return 1e-12 * std::max(1.0, std::abs(t)); };
  while (next < stops.size() && stops[next] <= state.t + tiny(state.t)) ++next;
  while (state.t < t_end - tiny(t_end)) {
    double target = t_end;
    if (next < stops.size()) target = std::min(target, stops[next]);
    double dt = max_dt(state);
    bool lands = false;
    if (dt >= target - state.t - tiny(target)) {
      dt = target - state.t;
      lands = true;
    }
    state = step(state, dt);
    bool at_stop = false;
    if (lands) {
      state.t = target;
      if (next < stops.size() && target == stops[next]) {
        at_stop = true;
        ++next;
      }
    }
    observe(state, at_stop);
  }
  return state;
}

}  // namespace charax

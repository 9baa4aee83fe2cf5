#include "cyclogait/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cyclogait {

double zmp_actual(const LinkComStates& links, const std::array<double, 9>& masses,
                  double g, double k_slope, bool use_k_term) {
  double num = 0, den = 0, ax_sum = 0;
  for (int i = 0; i < 9; ++i) {
    const double m = masses[i];
    num += m * links.x[i] * (links.zddot[i] + g) - m * links.xddot[i] * links.z[i];
    den += m * (links.zddot[i] + g);
    ax_sum += m * links.xddot[i];
  }
  if (use_k_term) den -= k_slope * ax_sum;
  if (std::abs(den) < 1e-6)
    throw std::runtime_error("zmp_actual: degenerate (free-fall) denominator");
  return num / den;
}

SupportInterval support_polygon(const std::vector<ActiveContact>& contacts,
                                double force_threshold) {
  SupportInterval iv;
  bool any = false;
  for (const auto& c : contacts) {
    if (c.normal_force <= force_threshold) continue;
    if (!any) {
      iv.x_min = iv.x_max = c.x;
      any = true;
    } else {
      iv.x_min = std::min(iv.x_min, c.x);
      iv.x_max = std::max(iv.x_max, c.x);
    }
  }
  if (!any) throw std::runtime_error("support_polygon: no active contacts (airborne)");
  return iv;
}

double stability_margin(double x_zmp, const SupportInterval& polygon) {
  return std::min(x_zmp - polygon.x_min, polygon.x_max - x_zmp);
}

}  // namespace cyclogait

#pragma once

#include <vector>

#include "cyclogait/robot_model.hpp"

namespace cyclogait {

struct ZmpRecord {
  double t = 0;
  double x_zmp = 0;
  double x_min = 0, x_max = 0;  // support interval
  double margin = 0;            // min distance to a boundary, negative outside
  bool supported = false;
};

// Multi-mass ZMP with the virtual-slope denominator term:
//   x = [sum m x (zdd + g) - sum m xdd z] / [sum m (zdd + g) - k sum m xdd]
// Set use_k_term = false for the classic formula (cross-check route).
double zmp_actual(const LinkComStates& links, const std::array<double, 9>& masses,
                  double g, double k_slope, bool use_k_term = true);

struct SupportInterval {
  double x_min = 0, x_max = 0;
};

struct ActiveContact {
  double x = 0;
  double normal_force = 0;
};

// x-interval spanned by contacts with normal force above the threshold;
// throws when none is active (airborne).
SupportInterval support_polygon(const std::vector<ActiveContact>& contacts,
                                double force_threshold = 0.1);

double stability_margin(double x_zmp, const SupportInterval& polygon);

}  // namespace cyclogait

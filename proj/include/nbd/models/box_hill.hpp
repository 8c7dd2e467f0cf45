#pragma once

#include "nbd/model.hpp"

namespace nbd::models {

/// Four competing mean functions for a chemical-reaction yield measured at
/// temperature x1 in [0,150] and reaction time x2 in [450,600]:
///   m=1: eta = exp(-t1 x1 exp(-t2/x2))
///   m=2: eta = 1/(1 + t1 x1 exp(-t2/x2))
///   m=3: eta = (1 + t1 x1 exp(-t2/x2))^-1/2
///   m=4: eta = (1 + t1 x1 exp(-t2/x2))^-1/3
/// with y_i ~ N(eta_m, sigma2), theta = (t1, t2, sigma2),
/// t1 ~ N(400, 25^2), t2 ~ N(5000, 250^2), sigma2 ~ U[1e-6, 1], pi(m) = 1/4.
/// The default transform of interest is phi = (t1, t2).

inline constexpr double box_hill_sigma2_min = 1e-6;

std::vector<Interval> box_hill_bounds();  // [0,150] x [450,600]

ModelSpec build_box_hill_model(int which);  // which in 1..4

ModelSet build_box_hill();

/// phi = t2/t1 (scalar ratio of interest).
TransformSpec box_hill_ratio_transform();

}  // namespace nbd::models

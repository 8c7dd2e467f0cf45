#pragma once

#include <array>
#include <vector>

#include "nbd/model.hpp"

namespace nbd::models {

/// First-order logistic regression in k=4 factors on [-1,1]^4. The inclusion
/// vector v = (v0,...,v4) switches factors on and off (v0 = intercept, always
/// 1). Regression coefficients carry independent uniform priors on
/// [logistic_lower[t], logistic_upper[t]].
inline constexpr std::array<double, 5> logistic_lower = {-3.0, 4.0, 5.0, -6.0, -2.5};
inline constexpr std::array<double, 5> logistic_upper = {3.0, 10.0, 11.0, 0.0, 3.5};

/// Half-widths Z_t of the block-effect supports in the hierarchical variant;
/// gamma_ti | zeta_t ~ U[-zeta_t, zeta_t] with zeta_t triangular on (0, Z_t).
inline constexpr std::array<double, 5> logistic_gamma_z = {3.0, 3.0, 3.0, 1.0, 1.0};

inline constexpr int logistic_block_runs = 6;  // n_G, runs per block

using Inclusion = std::array<int, 5>;

std::vector<Interval> logistic_bounds();  // [-1,1]^4

/// Bernoulli likelihood with logit link on the active columns, uniform box
/// prior on beta. Parameter order follows the active t's ascending.
ModelSpec build_standard_logistic(const Inclusion& v);

/// Adds block-specific effects gamma_i for G blocks of 6 runs each:
/// logit rho_ij = x_ij' (v o (beta + gamma_i)), theta = (beta, gamma_1..gamma_G),
/// p_m = (1+G)(1 + sum v_t). The zeta_t are marginalized out of the gamma prior
/// (see hier_gamma_log_prior); prior variance of each gamma_ti is Z_t^2/18.
ModelSpec build_hier_logistic(const Inclusion& v, int G);

/// log of the marginal prior density of one factor's block effects
/// (gamma_t1,...,gamma_tG) after integrating zeta_t out:
///   log int_M^Z (2 zeta)^-G 2(Z-zeta)/Z^2 dzeta,  M = max_i |gamma_ti|.
/// Evaluated in closed form. The integrand's pole at zeta = 0 makes the
/// density diverge as M -> 0; M is floored at 1e-4*Z so the value at
/// gamma = 0 is the finite maximum of the floored density. Returns -inf when
/// M >= Z.
double hier_gamma_log_prior(const Eigen::VectorXd& gamma_t, double z);

/// Prior model probabilities 1/(5*C(4, b_m-1)) with b_m = 1 + (active count),
/// correcting for multiplicity across the 2^4 inclusion patterns.
/// active_counts[m] = sum_{t=1..4} v_t for model m.
Eigen::VectorXd multiplicity_model_prior(const std::vector<int>& active_counts);

/// All 16 inclusion patterns (v1..v4), v0 = 1, ordered by binary counting
/// v1 fastest: (0,0,0,0), (1,0,0,0), (0,1,0,0), ...
std::vector<Inclusion> logistic_model_grid();

/// The 16-model discrimination set (standard or hierarchical) with the
/// multiplicity-corrected model prior.
ModelSet logistic_selection_set(bool hierarchical, int G, int n_runs);

/// Single-model set wrapper.
ModelSet single_model_set(ModelSpec m);

}  // namespace nbd::models

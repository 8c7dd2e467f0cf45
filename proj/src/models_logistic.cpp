#include "nbd/models/logistic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nbd/numdiff.hpp"

namespace nbd::models {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative floor on max|gamma| when evaluating the marginalized block-effect
// prior; keeps the density finite at gamma = 0 (integrable pole).
constexpr double kGammaFloor = 1e-4;
// Projection margin keeping scoring iterates strictly inside |gamma| < Z.
constexpr double kGammaMargin = 1e-9;

std::vector<int> active_indices(const Inclusion& v) {
  if (v[0] != 1) throw std::invalid_argument("logistic model: v0 (intercept) must be 1");
  std::vector<int> act;
  for (int t = 0; t < 5; ++t) {
    if (v[t] != 0 && v[t] != 1) throw std::invalid_argument("logistic model: v must be 0/1");
    if (v[t] == 1) act.push_back(t);
  }
  return act;
}

// n x a model matrix on the active columns of (1, d_1..d_4).
Eigen::MatrixXd model_matrix(const Design& d, const std::vector<int>& act) {
  const int n = d.runs();
  const int a = static_cast<int>(act.size());
  Eigen::MatrixXd x(n, a);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < a; ++s) x(i, s) = act[s] == 0 ? 1.0 : d(i, act[s] - 1);
  return x;
}

inline double softplus(double eta) {
  return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

inline double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

double bernoulli_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  double ll = 0.0;
  for (int i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return ll;
}

std::string inclusion_tag(const Inclusion& v) {
  std::string s = "v=";
  for (int t = 0; t < 5; ++t) s += char('0' + v[t]);
  return s;
}

PriorSpec uniform_beta_prior(const std::vector<int>& act) {
  const int a = static_cast<int>(act.size());
  Eigen::VectorXd lo(a), hi(a);
  for (int s = 0; s < a; ++s) {
    lo[s] = logistic_lower[act[s]];
    hi[s] = logistic_upper[act[s]];
  }
  PriorSpec prior;
  prior.support = Box{lo, hi};
  prior.mean = 0.5 * (lo + hi);
  prior.variance = ((hi - lo).array().square() / 12.0).matrix().asDiagonal();
  double log_vol = 0.0;
  for (int s = 0; s < a; ++s) log_vol += std::log(hi[s] - lo[s]);
  prior.sample = [lo, hi, a](RngStream& rng) {
    Eigen::VectorXd th(a);
    for (int s = 0; s < a; ++s) th[s] = rng.uniform(lo[s], hi[s]);
    return th;
  };
  prior.log_density = [lo, hi, log_vol](const Eigen::VectorXd& th) {
    for (int s = 0; s < th.size(); ++s)
      if (th[s] < lo[s] || th[s] > hi[s]) return -kInf;
    return -log_vol;
  };
  // Flat inside the box; the interior value is used on the boundary too.
  prior.grad_log_density = [a](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(a).eval();
  };
  prior.neg_hess_log_density = [a](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(a, a).eval();
  };
  return prior;
}

}  // namespace

std::vector<Interval> logistic_bounds() {
  return std::vector<Interval>(4, Interval{-1.0, 1.0});
}

ModelSpec build_standard_logistic(const Inclusion& v) {
  const auto act = active_indices(v);
  const int a = static_cast<int>(act.size());

  ModelSpec m;
  m.id = "logistic_standard[" + inclusion_tag(v) + "]";
  m.dim = a;
  m.prior = uniform_beta_prior(act);
  m.transform = identity_transform(a);

  m.log_likelihood = [act](const Eigen::VectorXd& th, const Eigen::VectorXd& y,
                           const Design& d) {
    return bernoulli_loglik(model_matrix(d, act) * th, y);
  };
  m.score = [act](const Eigen::VectorXd& th, const Eigen::VectorXd& y, const Design& d) {
    const Eigen::MatrixXd x = model_matrix(d, act);
    const Eigen::VectorXd eta = x * th;
    Eigen::VectorXd resid(eta.size());
    for (int i = 0; i < eta.size(); ++i) resid[i] = y[i] - logistic(eta[i]);
    return (x.transpose() * resid).eval();
  };
  m.fisher_information = [act](const Eigen::VectorXd& th, const Design& d) {
    const Eigen::MatrixXd x = model_matrix(d, act);
    const Eigen::VectorXd eta = x * th;
    Eigen::VectorXd w(eta.size());
    for (int i = 0; i < eta.size(); ++i) {
      const double rho = logistic(eta[i]);
      w[i] = rho * (1.0 - rho);
    }
    return (x.transpose() * w.asDiagonal() * x).eval();
  };
  m.simulate_response = [act](const Eigen::VectorXd& th, const Design& d, RngStream& rng) {
    const Eigen::VectorXd eta = model_matrix(d, act) * th;
    Eigen::VectorXd y(eta.size());
    for (int i = 0; i < eta.size(); ++i) y[i] = rng.uniform() < logistic(eta[i]) ? 1.0 : 0.0;
    return y;
  };
  m.log_likelihood_batch = [act](const Eigen::MatrixXd& thetas, const Eigen::VectorXd& y,
                                 const Design& d) {
    const Eigen::MatrixXd x = model_matrix(d, act);
    const Eigen::MatrixXd eta = thetas * x.transpose();  // R x n
    const auto e = eta.array();
    Eigen::ArrayXXd sp = e.max(0.0) + (-e.abs()).exp().log1p();
    return ((e.rowwise() * y.transpose().array()).rowwise().sum() - sp.rowwise().sum())
        .matrix()
        .eval();
  };
  return m;
}

double hier_gamma_log_prior(const Eigen::VectorXd& gamma_t, double z) {
  const int g = static_cast<int>(gamma_t.size());
  if (g < 1 || z <= 0.0) throw std::invalid_argument("hier_gamma_log_prior: need G >= 1, Z > 0");
  double m = gamma_t.cwiseAbs().maxCoeff();
  if (m >= z) return -kInf;
  m = std::max(m, kGammaFloor * z);
  const double aa = m / z;
  double j;  // int_a^1 u^-G (1-u) du
  if (g == 1) {
    j = -std::log(aa) - (1.0 - aa);
  } else if (g == 2) {
    j = 1.0 / aa - 1.0 + std::log(aa);
  } else {
    const double gm1 = g - 1.0, gm2 = g - 2.0;
    j = std::pow(aa, 1.0 - g) / gm1 - std::pow(aa, 2.0 - g) / gm2 - (1.0 / gm1 - 1.0 / gm2);
  }
  return (1.0 - g) * std::log(2.0) - g * std::log(z) + std::log(j);
}

ModelSpec build_hier_logistic(const Inclusion& v, int blocks) {
  if (blocks < 2) throw std::invalid_argument("build_hier_logistic: G must be >= 2");
  const auto act = active_indices(v);
  const int a = static_cast<int>(act.size());
  const int g = blocks;
  const int p = a * (1 + g);
  const int ng = logistic_block_runs;

  // theta = (beta[0..a), gamma_1[0..a), ..., gamma_G[0..a)); block of run i is i/ng.
  ModelSpec m;
  m.id = "logistic_hier[" + inclusion_tag(v) + ",G=" + std::to_string(g) + "]";
  m.dim = p;
  m.arrow = ArrowStructure{a, a, g};

  auto check_runs = [g, ng](const Design& d) {
    if (d.runs() != g * ng)
      throw std::invalid_argument("hierarchical logistic: design must have G*6 = " +
                                  std::to_string(g * ng) + " runs, got " +
                                  std::to_string(d.runs()));
  };
  auto linear_predictor = [act, a, g, ng, check_runs](const Eigen::VectorXd& th,
                                                      const Design& d) {
    check_runs(d);
    const Eigen::MatrixXd x = model_matrix(d, act);
    Eigen::VectorXd eta(x.rows());
    for (int i = 0; i < x.rows(); ++i) {
      const int blk = i / ng;
      double e = 0.0;
      for (int s = 0; s < a; ++s) e += x(i, s) * (th[s] + th[a + blk * a + s]);
      eta[i] = e;
    }
    return eta;
  };

  m.log_likelihood = [linear_predictor](const Eigen::VectorXd& th, const Eigen::VectorXd& y,
                                        const Design& d) {
    return bernoulli_loglik(linear_predictor(th, d), y);
  };
  m.score = [act, a, g, ng, linear_predictor](const Eigen::VectorXd& th,
                                              const Eigen::VectorXd& y, const Design& d) {
    const Eigen::MatrixXd x = model_matrix(d, act);
    const Eigen::VectorXd eta = linear_predictor(th, d);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(a * (1 + g));
    for (int i = 0; i < x.rows(); ++i) {
      const double r = y[i] - logistic(eta[i]);
      const int blk = i / ng;
      for (int t = 0; t < a; ++t) {
        s[t] += r * x(i, t);
        s[a + blk * a + t] += r * x(i, t);
      }
    }
    return s;
  };
  m.fisher_information = [act, a, g, ng, linear_predictor](const Eigen::VectorXd& th,
                                                           const Design& d) {
    const Eigen::MatrixXd x = model_matrix(d, act);
    const Eigen::VectorXd eta = linear_predictor(th, d);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(a * (1 + g), a * (1 + g));
    for (int i = 0; i < x.rows(); ++i) {
      const double rho = logistic(eta[i]);
      const double w = rho * (1.0 - rho);
      const int off = a + (i / ng) * a;
      for (int s = 0; s < a; ++s)
        for (int t = 0; t < a; ++t) {
          const double ws = w * x(i, s) * x(i, t);
          info(s, t) += ws;
          info(off + s, t) += ws;
          info(s, off + t) += ws;
          info(off + s, off + t) += ws;
        }
    }
    return info;
  };
  m.simulate_response = [act, a, g, ng, check_runs](const Eigen::VectorXd& th, const Design& d,
                                                    RngStream& rng) {
    check_runs(d);
    const Eigen::MatrixXd x = model_matrix(d, act);
    Eigen::VectorXd y(x.rows());
    for (int i = 0; i < x.rows(); ++i) {
      const int blk = i / ng;
      double e = 0.0;
      for (int s = 0; s < a; ++s) e += x(i, s) * (th[s] + th[a + blk * a + s]);
      y[i] = rng.uniform() < logistic(e) ? 1.0 : 0.0;
    }
    return y;
  };

  // Prior: beta as in the standard model; block effects enter through the
  // zeta-marginalized density, factor by factor.
  const PriorSpec beta_prior = uniform_beta_prior(act);
  Eigen::VectorXd zs(a);
  for (int s = 0; s < a; ++s) zs[s] = logistic_gamma_z[act[s]];

  PriorSpec prior;
  prior.mean = Eigen::VectorXd::Zero(p);
  prior.mean.head(a) = beta_prior.mean;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(p);
  var.head(a) = beta_prior.variance.diagonal();
  for (int blk = 0; blk < g; ++blk)
    for (int s = 0; s < a; ++s) var[a + blk * a + s] = zs[s] * zs[s] / 18.0;
  prior.variance = var.asDiagonal();

  Eigen::VectorXd lo = Eigen::VectorXd::Zero(p), hi = Eigen::VectorXd::Zero(p);
  lo.head(a) = beta_prior.support.lo;
  hi.head(a) = beta_prior.support.hi;
  for (int blk = 0; blk < g; ++blk)
    for (int s = 0; s < a; ++s) {
      lo[a + blk * a + s] = -zs[s] * (1.0 - kGammaMargin);
      hi[a + blk * a + s] = zs[s] * (1.0 - kGammaMargin);
    }
  prior.support = Box{lo, hi};

  // gamma_t* for factor t across blocks, as a G-vector.
  auto factor_slice = [a, g](const Eigen::VectorXd& th, int s) {
    Eigen::VectorXd out(g);
    for (int blk = 0; blk < g; ++blk) out[blk] = th[a + blk * a + s];
    return out;
  };

  prior.log_density = [beta_prior, factor_slice, zs, a](const Eigen::VectorXd& th) {
    double ld = beta_prior.log_density(th.head(a));
    if (!std::isfinite(ld)) return -kInf;
    for (int s = 0; s < a; ++s) {
      ld += hier_gamma_log_prior(factor_slice(th, s), zs[s]);
      if (!std::isfinite(ld)) return -kInf;
    }
    return ld;
  };
  prior.sample = [beta_prior, zs, a, g](RngStream& rng) {
    Eigen::VectorXd th(a * (1 + g));
    th.head(a) = beta_prior.sample(rng);
    for (int s = 0; s < a; ++s) {
      // triangular on (0, Z): F(z) = 1 - (1 - z/Z)^2
      const double zeta = zs[s] * (1.0 - std::sqrt(1.0 - rng.uniform()));
      for (int blk = 0; blk < g; ++blk) {
        double val = rng.uniform(-zeta, zeta);
        const double cap = zs[s] * (1.0 - kGammaMargin);
        th[a + blk * a + s] = std::min(std::max(val, -cap), cap);
      }
    }
    return th;
  };
  // Derivatives: exact zeros for the flat beta block; finite differences of
  // the marginalized density per factor block (the blocks are independent).
  prior.grad_log_density = [factor_slice, zs, a, g, p](const Eigen::VectorXd& th) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
    for (int s = 0; s < a; ++s) {
      const double z = zs[s];
      auto f = [z](const Eigen::VectorXd& gvec) { return hier_gamma_log_prior(gvec, z); };
      const Eigen::VectorXd gs = fd::gradient(f, factor_slice(th, s));
      for (int blk = 0; blk < g; ++blk) grad[a + blk * a + s] = gs[blk];
    }
    return grad;
  };
  prior.neg_hess_log_density = [factor_slice, zs, a, g, p](const Eigen::VectorXd& th) {
    Eigen::MatrixXd nh = Eigen::MatrixXd::Zero(p, p);
    for (int s = 0; s < a; ++s) {
      const double z = zs[s];
      auto f = [z](const Eigen::VectorXd& gvec) { return hier_gamma_log_prior(gvec, z); };
      const Eigen::MatrixXd hs = -fd::hessian(f, factor_slice(th, s));
      for (int b1 = 0; b1 < g; ++b1)
        for (int b2 = 0; b2 < g; ++b2) nh(a + b1 * a + s, a + b2 * a + s) = hs(b1, b2);
    }
    return nh;
  };
  m.prior = std::move(prior);

  // phi = beta: selects the shared block.
  Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(a, p);
  sel.leftCols(a).setIdentity();
  m.transform = linear_transform(std::move(sel));
  return m;
}

Eigen::VectorXd multiplicity_model_prior(const std::vector<int>& active_counts) {
  static constexpr double choose4[5] = {1.0, 4.0, 6.0, 4.0, 1.0};
  Eigen::VectorXd probs(static_cast<int>(active_counts.size()));
  for (size_t i = 0; i < active_counts.size(); ++i) {
    const int c = active_counts[i];
    if (c < 0 || c > 4)
      throw std::invalid_argument("multiplicity_model_prior: active count must be in 0..4");
    probs[static_cast<int>(i)] = 1.0 / (5.0 * choose4[c]);
  }
  return probs;
}

std::vector<Inclusion> logistic_model_grid() {
  std::vector<Inclusion> out;
  for (int mask = 0; mask < 16; ++mask) {
    Inclusion v = {1, 0, 0, 0, 0};
    for (int t = 0; t < 4; ++t) v[t + 1] = (mask >> t) & 1;
    out.push_back(v);
  }
  return out;
}

ModelSet logistic_selection_set(bool hierarchical, int blocks, int n_runs) {
  ModelSet ms;
  std::vector<int> counts;
  for (const auto& v : logistic_model_grid()) {
    counts.push_back(v[1] + v[2] + v[3] + v[4]);
    ms.models.push_back(hierarchical ? build_hier_logistic(v, blocks)
                                     : build_standard_logistic(v));
    // Discrimination losses need no parameter transform.
    ms.models.back().transform.reset();
  }
  if (hierarchical && n_runs != blocks * logistic_block_runs)
    throw std::invalid_argument("logistic_selection_set: n must equal G*6");
  ms.prior_probs = multiplicity_model_prior(counts);
  return ms;
}

ModelSet single_model_set(ModelSpec m) {
  ModelSet ms;
  ms.models.push_back(std::move(m));
  ms.prior_probs = Eigen::VectorXd::Ones(1);
  return ms;
}

}  // namespace nbd::models

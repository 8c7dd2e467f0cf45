#include "nbd/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nbd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double gaussian_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& cov) {
  ScoringConfig cfg;
  auto llt = jittered_llt(cov, cfg);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const Eigen::VectorXd diff = x - mean;
  const double maha = diff.dot(llt.solve(diff));
  return -0.5 * (x.size() * kLogTwoPi + log_det + maha);
}

Eigen::VectorXd true_phi(const JointDraw& draw, const ModelSet& ms) {
  const auto& t = ms.models[draw.model_index].transform;
  if (!t)
    throw std::invalid_argument("parameter-estimation loss needs a transform on model " +
                                ms.models[draw.model_index].id);
  return t->g(draw.theta);
}

}  // namespace

const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::si: return "SI";
    case LossKind::ae: return "AE";
    case LossKind::se: return "SE";
    case LossKind::zero_one: return "01";
    case LossKind::msi: return "MSI";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "SI" || s == "si") return LossKind::si;
  if (s == "AE" || s == "ae") return LossKind::ae;
  if (s == "SE" || s == "se") return LossKind::se;
  if (s == "01" || s == "0-1" || s == "zero_one") return LossKind::zero_one;
  if (s == "MSI" || s == "msi") return LossKind::msi;
  throw std::invalid_argument("unknown loss kind: " + s);
}

bool is_parameter_loss(LossKind k) {
  return k == LossKind::si || k == LossKind::ae || k == LossKind::se;
}

double MixtureOfNormals::log_density(const Eigen::VectorXd& x) const {
  const int nc = static_cast<int>(weights.size());
  Eigen::VectorXd lw(nc);
  for (int i = 0; i < nc; ++i)
    lw[i] = weights[i] > 0.0 ? std::log(weights[i]) + gaussian_log_density(x, means[i], covs[i])
                             : -kInf;
  const double mx = lw.maxCoeff();
  if (!std::isfinite(mx)) return -kInf;
  return mx + std::log((lw.array() - mx).exp().sum());
}

MixtureOfNormals posterior_phi_mixture(const ModelPosteriorSet& mps, const ModelSet& ms) {
  MixtureOfNormals mix;
  mix.weights = mps.probs;
  for (int i = 0; i < ms.size(); ++i) {
    auto [mean, cov] = transform_posterior(mps.fits[i], *ms.models[i].transform);
    mix.means.push_back(std::move(mean));
    mix.covs.push_back(std::move(cov));
  }
  return mix;
}

MixtureOfNormals prior_phi_mixture(const ModelSet& ms) {
  MixtureOfNormals mix;
  mix.weights = ms.prior_probs;
  for (const auto& m : ms.models) {
    const TransformSpec& t = *m.transform;
    const Eigen::MatrixXd j = t.jacobian_at(m.prior.mean);
    Eigen::MatrixXd cov = j * m.prior.variance * j.transpose();
    mix.means.push_back(t.g(m.prior.mean));
    mix.covs.push_back(0.5 * (cov + cov.transpose()));
  }
  return mix;
}

double nb_si_loss(const JointDraw& draw, const ModelPosteriorSet& mps, const ModelSet& ms) {
  const Eigen::VectorXd phi = true_phi(draw, ms);
  return prior_phi_mixture(ms).log_density(phi) -
         posterior_phi_mixture(mps, ms).log_density(phi);
}

double nb_ae_loss(const JointDraw& draw, const ModelPosteriorSet& mps, const ModelSet& ms,
                  int c, RngStream& rng) {
  const Eigen::VectorXd phi = true_phi(draw, ms);
  Eigen::VectorXd median;
  if (ms.size() == 1) {
    median = ms.models[0].transform->g(mps.fits[0].mode);
  } else {
    auto draws = sample_approx_posterior(mps, ms, c, rng);
    const int q = static_cast<int>(phi.size());
    median.resize(q);
    std::vector<double> col(draws.size());
    for (int j = 0; j < q; ++j) {
      for (size_t i = 0; i < draws.size(); ++i) col[i] = draws[i][j];
      std::sort(col.begin(), col.end());
      const size_t n = col.size();
      median[j] = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
    }
  }
  return (phi - median).cwiseAbs().sum();
}

double nb_se_loss(const JointDraw& draw, const ModelPosteriorSet& mps, const ModelSet& ms,
                  int c, RngStream& rng) {
  const Eigen::VectorXd phi = true_phi(draw, ms);
  const bool all_linear = std::all_of(ms.models.begin(), ms.models.end(),
                                      [](const ModelSpec& m) { return m.transform->linear; });
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(phi.size());
  if (all_linear) {
    for (int i = 0; i < ms.size(); ++i)
      mean += mps.probs[i] * ms.models[i].transform->g(mps.fits[i].mode);
  } else {
    auto draws = sample_approx_posterior(mps, ms, c, rng);
    for (const auto& ph : draws) mean += ph;
    mean /= static_cast<double>(draws.size());
  }
  return (phi - mean).squaredNorm();
}

double nb_zero_one_loss(const JointDraw& draw, const ModelPosteriorSet& mps,
                        const ModelSet& ms) {
  int best = 0;
  double best_lw = -kInf;
  for (int i = 0; i < ms.size(); ++i) {
    const double lw = ms.prior_probs[i] > 0.0
                          ? mps.fits[i].log_evidence + std::log(ms.prior_probs[i])
                          : -kInf;
    if (lw > best_lw) {  // strict: ties keep the lowest index
      best_lw = lw;
      best = i;
    }
  }
  return best == draw.model_index ? 0.0 : 1.0;
}

double nb_msi_loss(const JointDraw& draw, const ModelPosteriorSet& mps, const ModelSet& ms,
                   const LossSpec& spec, LossDiagnostics* diag) {
  const double prior = ms.prior_probs[draw.model_index];
  if (!(prior > 0.0)) throw std::invalid_argument("nb_msi_loss: true model has zero prior");
  const double log_prior = std::log(prior);
  const double post = mps.probs[draw.model_index];
  if (post <= 0.0) {
    if (diag) ++diag->msi_caps;
    return log_prior + spec.msi_cap;
  }
  return log_prior - std::log(post);
}

double nb_loss(const LossSpec& spec, const JointDraw& draw, const ModelPosteriorSet& mps,
               const ModelSet& ms, RngStream& rng, LossDiagnostics* diag) {
  switch (spec.kind) {
    case LossKind::si: return nb_si_loss(draw, mps, ms);
    case LossKind::ae: return nb_ae_loss(draw, mps, ms, spec.c, rng);
    case LossKind::se: return nb_se_loss(draw, mps, ms, spec.c, rng);
    case LossKind::zero_one: return nb_zero_one_loss(draw, mps, ms);
    case LossKind::msi: return nb_msi_loss(draw, mps, ms, spec, diag);
  }
  throw std::logic_error("nb_loss: unreachable");
}

}  // namespace nbd

#pragma once

#include "nbd/laplace.hpp"
#include "nbd/model.hpp"

namespace nbd {

enum class LossKind { si, ae, se, zero_one, msi };

const char* to_string(LossKind k);
LossKind loss_kind_from_string(const std::string& s);

/// Which loss to evaluate and its internal simulation size C (used by AE, and
/// by SE when some transform is nonlinear).
struct LossSpec {
  LossKind kind = LossKind::si;
  int c = 1000;
  /// When the true model's posterior probability underflows to zero, the MSI
  /// loss is capped at log pi(m_true) + msi_cap instead of returning infinity.
  double msi_cap = 745.0;
};

bool is_parameter_loss(LossKind k);  // SI/AE/SE (need transforms)

/// Counters a caller may pass to collect numeric-edge events across draws.
struct LossDiagnostics {
  long msi_caps = 0;
};

struct MixtureOfNormals {
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;

  /// log density with log-sum-exp over components; zero-weight components are
  /// skipped, singular covariances get the standard jitter schedule.
  double log_density(const Eigen::VectorXd& x) const;
};

/// Posterior mixture over phi (delta-method component per model, weights =
/// approximate posterior model probabilities).
MixtureOfNormals posterior_phi_mixture(const ModelPosteriorSet& mps, const ModelSet& ms);

/// Moment-matched prior mixture over phi: each model's prior pushed through
/// g_m at the prior mean (exact for linear g), weights = prior probabilities.
MixtureOfNormals prior_phi_mixture(const ModelSet& ms);

/// Self-information: log prior density - log posterior density at the true phi.
double nb_si_loss(const JointDraw& draw, const ModelPosteriorSet& mps, const ModelSet& ms);

/// Absolute error to the model-averaged posterior marginal medians. A single
/// model uses the closed-form median g(mode); otherwise the coordinatewise
/// sample median of C posterior draws.
double nb_ae_loss(const JointDraw& draw, const ModelPosteriorSet& mps, const ModelSet& ms,
                  int c, RngStream& rng);

/// Squared error to the model-averaged posterior mean: closed form (weighted
/// delta means) when every transform is linear, otherwise a C-sample mean.
double nb_se_loss(const JointDraw& draw, const ModelPosteriorSet& mps, const ModelSet& ms,
                  int c, RngStream& rng);

/// 0 iff the true model attains the evidence*prior argmax; ties break to the
/// lowest model index.
double nb_zero_one_loss(const JointDraw& draw, const ModelPosteriorSet& mps,
                        const ModelSet& ms);

/// log pi(m_true) - log approximate posterior probability of m_true.
double nb_msi_loss(const JointDraw& draw, const ModelPosteriorSet& mps, const ModelSet& ms,
                   const LossSpec& spec = {}, LossDiagnostics* diag = nullptr);

/// Dispatch on spec.kind; rng feeds the AE/SE internal simulation.
double nb_loss(const LossSpec& spec, const JointDraw& draw, const ModelPosteriorSet& mps,
               const ModelSet& ms, RngStream& rng, LossDiagnostics* diag = nullptr);

}  // namespace nbd

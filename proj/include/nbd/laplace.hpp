#pragma once

#include <Eigen/Cholesky>
#include <utility>
#include <vector>

#include "nbd/model.hpp"

namespace nbd {

struct ScoringConfig {
  double kappa = 0.25;
  double epsilon = 1e-4;  // squared step-norm convergence threshold
  int max_iter = 100;
  // Cholesky jitter schedule: start at jitter_scale*max(diag), escalate x10.
  double jitter_scale = 1e-8;
  int jitter_escalations = 3;
};

/// Normal approximation to one model's conditional posterior: mode, inverse
/// expected-information covariance, and the Laplace evidence.
struct NormalPosterior {
  Eigen::VectorXd mode;
  Eigen::MatrixXd covariance;
  double log_evidence = 0.0;
  int iterations = 0;
  bool converged = false;
  bool boundary_hit = false;
  int jitter_escalations_used = 0;
};

/// H(theta; m) = Fisher information + negative Hessian of the log prior.
/// Throws std::runtime_error naming the non-finite term.
Eigen::MatrixXd information_matrix(const ModelSpec& m, const Eigen::VectorXd& theta,
                                   const Design& d);

/// Solves H x = b and returns log|H|, exploiting arrow sparsity when declared.
/// Applies the jitter schedule on factorization failure.
struct InformationSolve {
  Eigen::VectorXd x;
  double log_det;
  int jitter_escalations_used;
};
InformationSolve solve_information(const Eigen::MatrixXd& h, const Eigen::VectorXd& b,
                                   const std::optional<ArrowStructure>& arrow,
                                   const ScoringConfig& cfg = {});

/// Posterior-mode search: scoring iterations
///   theta <- theta + kappa * H(theta)^-1 (score + prior gradient)
/// from the prior mean, iterates projected onto the prior support box,
/// convergence when the squared step norm drops below epsilon.
NormalPosterior scoring_mode(const ModelSpec& m, const Eigen::VectorXd& y, const Design& d,
                             const ScoringConfig& cfg = {});

/// (p/2) log 2pi + 0.5 log|Sigma| + log-likelihood(mode) + log prior(mode).
double laplace_log_evidence(const ModelSpec& m, const NormalPosterior& post,
                            const Eigen::VectorXd& y, const Design& d);

struct ModelPosteriorSet {
  std::vector<NormalPosterior> fits;
  Eigen::VectorXd probs;  // approximate posterior model probabilities
  bool any_diverged = false;
};

/// Fits every model and normalizes evidence * prior into model probabilities
/// (log-sum-exp). Throws if no model produced a finite evidence.
ModelPosteriorSet approx_model_posteriors(const ModelSet& ms, const Eigen::VectorXd& y,
                                          const Design& d, const ScoringConfig& cfg = {});

/// Recomputes probs from fits' log_evidence and the model prior.
Eigen::VectorXd normalize_model_posteriors(const std::vector<NormalPosterior>& fits,
                                           const Eigen::VectorXd& prior_probs);

/// Delta method: mean g(mode), covariance J Sigma J' (symmetrized).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> transform_posterior(const NormalPosterior& post,
                                                                const TransformSpec& t);

/// C draws of phi from the approximate model-averaged posterior: model from
/// probs, theta from N(mode, Sigma), phi = g_m(theta).
std::vector<Eigen::VectorXd> sample_approx_posterior(const ModelPosteriorSet& mps,
                                                     const ModelSet& ms, int c,
                                                     RngStream& rng);

/// Cholesky with the jitter schedule; returns the factor of (a + jitter*I).
Eigen::LLT<Eigen::MatrixXd> jittered_llt(const Eigen::MatrixXd& a, const ScoringConfig& cfg,
                                         int* escalations_used = nullptr);

}  // namespace nbd

#include "nbd/laplace.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nbd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double llt_log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

Eigen::LLT<Eigen::MatrixXd> jittered_llt(const Eigen::MatrixXd& a, const ScoringConfig& cfg,
                                         int* escalations_used) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (escalations_used) *escalations_used = 0;
  if (llt.info() == Eigen::Success) return llt;
  const double base = cfg.jitter_scale * std::max(a.diagonal().maxCoeff(), 1.0);
  double jitter = base;
  for (int k = 0; k <= cfg.jitter_escalations; ++k) {
    Eigen::MatrixXd aj = a;
    aj.diagonal().array() += jitter;
    llt.compute(aj);
    if (llt.info() == Eigen::Success) {
      if (escalations_used) *escalations_used = k + 1;
      return llt;
    }
    jitter *= 10.0;
  }
  throw std::runtime_error("Cholesky factorization failed after jitter escalation");
}

Eigen::MatrixXd information_matrix(const ModelSpec& m, const Eigen::VectorXd& theta,
                                   const Design& d) {
  Eigen::MatrixXd fisher = m.fisher_information(theta, d);
  if (!fisher.allFinite())
    throw std::runtime_error("information_matrix: non-finite Fisher information for " + m.id);
  Eigen::MatrixXd prior_term = m.prior.neg_hess_log_density(theta);
  if (!prior_term.allFinite())
    throw std::runtime_error("information_matrix: non-finite prior Hessian for " + m.id);
  Eigen::MatrixXd h = fisher + prior_term;
  return 0.5 * (h + h.transpose());
}

InformationSolve solve_information(const Eigen::MatrixXd& h, const Eigen::VectorXd& b,
                                   const std::optional<ArrowStructure>& arrow,
                                   const ScoringConfig& cfg) {
  const int p = static_cast<int>(h.rows());
  if (!arrow || arrow->groups < 2 || arrow->dim() != p) {
    int esc = 0;
    auto llt = jittered_llt(h, cfg, &esc);
    return {llt.solve(b), llt_log_det(llt), esc};
  }

  // Arrow solve via the Schur complement on the shared block:
  //   H = [ A   B_i' ]   S = A - sum_i B_i' D_i^-1 B_i
  //       [ B_i  D_i ]
  // Group-group cross blocks are structurally zero.
  const int a = arrow->shared;
  const int gsz = arrow->group;
  const int ng = arrow->groups;

  // One jitter schedule for the whole matrix: retry everything on failure.
  const double base = cfg.jitter_scale * std::max(h.diagonal().maxCoeff(), 1.0);
  double jitter = 0.0;
  for (int attempt = 0; attempt <= cfg.jitter_escalations + 1; ++attempt) {
    bool ok = true;
    double log_det = 0.0;
    Eigen::MatrixXd s = h.topLeftCorner(a, a);
    s.diagonal().array() += jitter;
    Eigen::VectorXd rhs_shared = b.head(a);
    std::vector<Eigen::LLT<Eigen::MatrixXd>> dchol(ng);
    for (int i = 0; i < ng && ok; ++i) {
      const int off = a + i * gsz;
      Eigen::MatrixXd di = h.block(off, off, gsz, gsz);
      di.diagonal().array() += jitter;
      dchol[i].compute(di);
      if (dchol[i].info() != Eigen::Success) {
        ok = false;
        break;
      }
      log_det += llt_log_det(dchol[i]);
      const Eigen::MatrixXd bi = h.block(off, 0, gsz, a);
      const Eigen::MatrixXd di_inv_bi = dchol[i].solve(bi);
      s.noalias() -= bi.transpose() * di_inv_bi;
      rhs_shared.noalias() -= di_inv_bi.transpose() * b.segment(off, gsz);
    }
    if (ok) {
      Eigen::LLT<Eigen::MatrixXd> schol(s);
      if (schol.info() == Eigen::Success) {
        log_det += llt_log_det(schol);
        Eigen::VectorXd x(p);
        x.head(a) = schol.solve(rhs_shared);
        for (int i = 0; i < ng; ++i) {
          const int off = a + i * gsz;
          const Eigen::MatrixXd bi = h.block(off, 0, gsz, a);
          x.segment(off, gsz) = dchol[i].solve(b.segment(off, gsz) - bi * x.head(a));
        }
        return {std::move(x), log_det, attempt};
      }
    }
    jitter = attempt == 0 ? base : jitter * 10.0;
  }
  throw std::runtime_error("block information solve failed after jitter escalation");
}

NormalPosterior scoring_mode(const ModelSpec& m, const Eigen::VectorXd& y, const Design& d,
                             const ScoringConfig& cfg) {
  NormalPosterior post;
  const Box& box = m.prior.support;
  Eigen::VectorXd theta = box.clamp(m.prior.mean);

  for (int r = 0; r < cfg.max_iter; ++r) {
    const Eigen::MatrixXd h = information_matrix(m, theta, d);
    Eigen::VectorXd f = m.score_at(theta, y, d) + m.prior.grad_log_density(theta);
    if (!f.allFinite())
      throw std::runtime_error("scoring_mode: non-finite gradient for " + m.id);
    const InformationSolve sol = solve_information(h, f, m.arrow, cfg);
    Eigen::VectorXd proposal = theta + cfg.kappa * sol.x;
    Eigen::VectorXd clamped = box.clamp(proposal);
    if (clamped != proposal) post.boundary_hit = true;
    const double step2 = (clamped - theta).squaredNorm();
    theta = std::move(clamped);
    post.iterations = r + 1;
    if (step2 < cfg.epsilon) {
      post.converged = true;
      break;
    }
  }

  post.mode = theta;
  const Eigen::MatrixXd h = information_matrix(m, theta, d);
  int esc = 0;
  auto llt = jittered_llt(h, cfg, &esc);
  post.jitter_escalations_used = esc;
  const int p = m.dim;
  post.covariance = llt.solve(Eigen::MatrixXd::Identity(p, p));
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();
  post.log_evidence = laplace_log_evidence(m, post, y, d);
  return post;
}

double laplace_log_evidence(const ModelSpec& m, const NormalPosterior& post,
                            const Eigen::VectorXd& y, const Design& d) {
  const int p = m.dim;
  if (p == 0) return m.log_likelihood(post.mode, y, d);
  ScoringConfig cfg;
  int esc = 0;
  auto llt = jittered_llt(post.covariance, cfg, &esc);
  const double half_log_det_sigma = 0.5 * llt_log_det(llt);
  if (!std::isfinite(half_log_det_sigma))
    throw std::runtime_error("laplace_log_evidence: covariance is not positive definite");
  return 0.5 * p * kLogTwoPi + half_log_det_sigma + m.log_likelihood(post.mode, y, d) +
         m.prior.log_density(post.mode);
}

Eigen::VectorXd normalize_model_posteriors(const std::vector<NormalPosterior>& fits,
                                           const Eigen::VectorXd& prior_probs) {
  const int nm = static_cast<int>(fits.size());
  Eigen::VectorXd lw(nm);
  for (int i = 0; i < nm; ++i)
    lw[i] = prior_probs[i] > 0.0 ? fits[i].log_evidence + std::log(prior_probs[i]) : -kInf;
  const double mx = lw.maxCoeff();
  if (!std::isfinite(mx))
    throw std::runtime_error("model posteriors: no model has finite evidence");
  Eigen::VectorXd w = (lw.array() - mx).exp();
  return w / w.sum();
}

ModelPosteriorSet approx_model_posteriors(const ModelSet& ms, const Eigen::VectorXd& y,
                                          const Design& d, const ScoringConfig& cfg) {
  ModelPosteriorSet out;
  out.fits.reserve(ms.size());
  for (const auto& m : ms.models) {
    out.fits.push_back(scoring_mode(m, y, d, cfg));
    out.any_diverged = out.any_diverged || !out.fits.back().converged;
  }
  out.probs = normalize_model_posteriors(out.fits, ms.prior_probs);
  return out;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> transform_posterior(const NormalPosterior& post,
                                                                const TransformSpec& t) {
  const Eigen::MatrixXd j = t.jacobian_at(post.mode);
  Eigen::MatrixXd cov = j * post.covariance * j.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {t.g(post.mode), std::move(cov)};
}

std::vector<Eigen::VectorXd> sample_approx_posterior(const ModelPosteriorSet& mps,
                                                     const ModelSet& ms, int c,
                                                     RngStream& rng) {
  if (c < 1) throw std::invalid_argument("sample_approx_posterior: C must be >= 1");
  const int nm = ms.size();
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chols(nm);
  std::vector<bool> have(nm, false);
  std::vector<Eigen::VectorXd> out;
  out.reserve(c);
  ScoringConfig cfg;
  for (int i = 0; i < c; ++i) {
    const int mi = nm == 1 ? 0
                           : rng.categorical({mps.probs.data(),
                                              static_cast<size_t>(mps.probs.size())});
    if (!have[mi]) {
      chols[mi] = jittered_llt(mps.fits[mi].covariance, cfg);
      have[mi] = true;
    }
    const int p = ms.models[mi].dim;
    Eigen::VectorXd z(p);
    for (int jj = 0; jj < p; ++jj) z[jj] = rng.normal();
    Eigen::VectorXd theta = mps.fits[mi].mode + chols[mi].matrixL() * z;
    out.push_back(ms.models[mi].transform ? ms.models[mi].transform->g(theta)
                                          : std::move(theta));
  }
  return out;
}

}  // namespace nbd

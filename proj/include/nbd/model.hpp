#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nbd/design.hpp"
#include "nbd/rng.hpp"

namespace nbd {

/// Axis-aligned support box; +-inf entries mean unbounded.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box unbounded(int p);
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
};

/// Prior of one model's parameter vector. log_density must return -inf outside
/// the support; grad/neg_hess may be left empty, in which case finalize() fills
/// them with central finite differences of log_density.
struct PriorSpec {
  std::function<Eigen::VectorXd(RngStream&)> sample;
  std::function<double(const Eigen::VectorXd&)> log_density;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_log_density;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> neg_hess_log_density;
  Eigen::VectorXd mean;
  Eigen::MatrixXd variance;
  Box support;
};

/// Fills missing derivative callbacks with finite differences of log_density.
void finalize(PriorSpec& prior);

/// phi = g(theta), a q-vector with a consistent meaning across models.
struct TransformSpec {
  int q = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> g;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;  // empty -> fd
  bool linear = false;

  Eigen::MatrixXd jacobian_at(const Eigen::VectorXd& theta) const;
};

TransformSpec identity_transform(int p);
TransformSpec linear_transform(Eigen::MatrixXd a);

/// Arrow sparsity of the information matrix for hierarchical models:
/// theta = (shared block, group block 1, ..., group block G), with zero
/// information between distinct group blocks.
struct ArrowStructure {
  int shared = 0;
  int group = 0;
  int groups = 0;

  int dim() const { return shared + group * groups; }
};

/// One statistical model: likelihood, simulator, expected information, prior,
/// and the optional parameter transform of interest.
struct ModelSpec {
  std::string id;
  int dim = 0;
  std::function<double(const Eigen::VectorXd& theta, const Eigen::VectorXd& y,
                       const Design& d)>
      log_likelihood;
  std::function<Eigen::VectorXd(const Eigen::VectorXd& theta, const Design& d, RngStream&)>
      simulate_response;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd& theta, const Design& d)>
      fisher_information;
  /// Gradient of log_likelihood in theta; empty -> finite differences.
  std::function<Eigen::VectorXd(const Eigen::VectorXd& theta, const Eigen::VectorXd& y,
                                const Design& d)>
      score;
  /// Log-likelihood at many parameter vectors (rows of thetas); empty -> loop.
  /// Hot path of the nested Monte Carlo inner loop.
  std::function<Eigen::VectorXd(const Eigen::MatrixXd& thetas, const Eigen::VectorXd& y,
                                const Design& d)>
      log_likelihood_batch;
  PriorSpec prior;
  std::optional<TransformSpec> transform;
  std::optional<ArrowStructure> arrow;

  Eigen::VectorXd score_at(const Eigen::VectorXd& theta, const Eigen::VectorXd& y,
                           const Design& d) const;
  Eigen::VectorXd log_likelihood_rows(const Eigen::MatrixXd& thetas, const Eigen::VectorXd& y,
                                      const Design& d) const;
};

struct ModelSet {
  std::vector<ModelSpec> models;
  Eigen::VectorXd prior_probs;

  int size() const { return static_cast<int>(models.size()); }
  /// Common transform output dimension, or -1 when no model has a transform.
  int common_q() const;
  void validate() const;  // throws on bad prior_probs or mismatched q
};

struct JointDraw {
  int model_index = 0;
  Eigen::VectorXd theta;
  Eigen::VectorXd y;
};

/// B independent draws of (m, theta, y) given the design: m ~ prior model
/// probabilities, theta ~ that model's prior, y ~ its simulator.
std::vector<JointDraw> sample_joint(const ModelSet& ms, const Design& d, int B,
                                    RngStream& rng);

JointDraw sample_joint_one(const ModelSet& ms, const Design& d, RngStream& rng);

}  // namespace nbd

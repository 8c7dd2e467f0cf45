#include "nbd/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nbd/numdiff.hpp"

namespace nbd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Box Box::unbounded(int p) {
  return Box{Eigen::VectorXd::Constant(p, -kInf), Eigen::VectorXd::Constant(p, kInf)};
}

bool Box::contains(const Eigen::VectorXd& x) const {
  for (int j = 0; j < x.size(); ++j)
    if (x[j] < lo[j] || x[j] > hi[j]) return false;
  return true;
}

Eigen::VectorXd Box::clamp(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = x;
  for (int j = 0; j < x.size(); ++j) out[j] = std::min(std::max(out[j], lo[j]), hi[j]);
  return out;
}

void finalize(PriorSpec& prior) {
  if (!prior.grad_log_density) {
    auto f = prior.log_density;
    prior.grad_log_density = [f](const Eigen::VectorXd& x) { return fd::gradient(f, x); };
  }
  if (!prior.neg_hess_log_density) {
    auto f = prior.log_density;
    prior.neg_hess_log_density = [f](const Eigen::VectorXd& x) {
      return (-fd::hessian(f, x)).eval();
    };
  }
}

Eigen::MatrixXd TransformSpec::jacobian_at(const Eigen::VectorXd& theta) const {
  if (jacobian) return jacobian(theta);
  return fd::jacobian(g, theta, q);
}

TransformSpec identity_transform(int p) {
  TransformSpec t;
  t.q = p;
  t.g = [](const Eigen::VectorXd& th) { return th; };
  t.jacobian = [p](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(p, p).eval();
  };
  t.linear = true;
  return t;
}

TransformSpec linear_transform(Eigen::MatrixXd a) {
  TransformSpec t;
  t.q = static_cast<int>(a.rows());
  t.g = [a](const Eigen::VectorXd& th) { return (a * th).eval(); };
  t.jacobian = [a](const Eigen::VectorXd&) { return a; };
  t.linear = true;
  return t;
}

Eigen::VectorXd ModelSpec::score_at(const Eigen::VectorXd& theta, const Eigen::VectorXd& y,
                                    const Design& d) const {
  if (score) return score(theta, y, d);
  auto f = [&](const Eigen::VectorXd& th) { return log_likelihood(th, y, d); };
  return fd::gradient(f, theta);
}

Eigen::VectorXd ModelSpec::log_likelihood_rows(const Eigen::MatrixXd& thetas,
                                               const Eigen::VectorXd& y,
                                               const Design& d) const {
  if (log_likelihood_batch) return log_likelihood_batch(thetas, y, d);
  Eigen::VectorXd out(thetas.rows());
  for (int r = 0; r < thetas.rows(); ++r)
    out[r] = log_likelihood(thetas.row(r).transpose(), y, d);
  return out;
}

int ModelSet::common_q() const {
  int q = -1;
  for (const auto& m : models) {
    if (!m.transform) continue;
    if (q == -1) q = m.transform->q;
    if (m.transform->q != q)
      throw std::invalid_argument("ModelSet: transforms disagree on output dimension");
  }
  return q;
}

void ModelSet::validate() const {
  if (models.empty()) throw std::invalid_argument("ModelSet: no models");
  if (prior_probs.size() != size())
    throw std::invalid_argument("ModelSet: prior_probs size mismatch");
  double sum = 0.0;
  for (int i = 0; i < prior_probs.size(); ++i) {
    if (prior_probs[i] < 0.0)
      throw std::invalid_argument("ModelSet: negative prior model probability");
    sum += prior_probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("ModelSet: prior model probabilities sum to " +
                                std::to_string(sum));
  (void)common_q();
}

JointDraw sample_joint_one(const ModelSet& ms, const Design& d, RngStream& rng) {
  JointDraw draw;
  draw.model_index =
      ms.size() == 1
          ? 0
          : rng.categorical({ms.prior_probs.data(), static_cast<size_t>(ms.prior_probs.size())});
  const ModelSpec& m = ms.models[draw.model_index];
  draw.theta = m.prior.sample(rng);
  draw.y = m.simulate_response(draw.theta, d, rng);
  return draw;
}

std::vector<JointDraw> sample_joint(const ModelSet& ms, const Design& d, int B,
                                    RngStream& rng) {
  if (B < 1) throw std::invalid_argument("sample_joint: B must be >= 1");
  require_valid(d);
  std::vector<JointDraw> draws;
  draws.reserve(B);
  for (int b = 0; b < B; ++b) draws.push_back(sample_joint_one(ms, d, rng));
  return draws;
}

}  // namespace nbd

#include "nbd/models/box_hill.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nbd::models {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925287;

constexpr double kMu1 = 400.0, kSd1 = 25.0;
constexpr double kMu2 = 5000.0, kSd2 = 250.0;

// eta and (d eta/d t1, d eta/d t2) for model `which` at one run.
struct EtaGrad {
  double eta;
  double d1;
  double d2;
};

EtaGrad eta_grad(int which, double t1, double t2, double x1, double x2) {
  const double w = std::exp(-t2 / x2);
  const double u = t1 * x1 * w;
  EtaGrad out{};
  // du/dt1 = x1 w, du/dt2 = -u/x2
  const double du1 = x1 * w;
  const double du2 = -u / x2;
  switch (which) {
    case 1: {
      const double eta = std::exp(-u);
      out = {eta, -eta * du1, -eta * du2};
      break;
    }
    case 2: {
      const double s = 1.0 + u;
      const double eta = 1.0 / s;
      const double c = -eta * eta;
      out = {eta, c * du1, c * du2};
      break;
    }
    case 3: {
      const double s = 1.0 + u;
      const double eta = 1.0 / std::sqrt(s);
      const double c = -0.5 * eta / s;
      out = {eta, c * du1, c * du2};
      break;
    }
    case 4: {
      const double s = 1.0 + u;
      const double eta = std::pow(s, -1.0 / 3.0);
      const double c = -(1.0 / 3.0) * eta / s;
      out = {eta, c * du1, c * du2};
      break;
    }
    default:
      throw std::invalid_argument("box_hill: model index must be 1..4");
  }
  return out;
}

PriorSpec box_hill_prior() {
  PriorSpec prior;
  prior.mean = Eigen::Vector3d(kMu1, kMu2, 0.5 * (box_hill_sigma2_min + 1.0));
  prior.variance = Eigen::Vector3d(kSd1 * kSd1, kSd2 * kSd2,
                                   (1.0 - box_hill_sigma2_min) *
                                       (1.0 - box_hill_sigma2_min) / 12.0)
                       .asDiagonal();
  prior.support = Box{Eigen::Vector3d(-kInf, -kInf, box_hill_sigma2_min),
                      Eigen::Vector3d(kInf, kInf, 1.0)};
  prior.sample = [](RngStream& rng) {
    Eigen::VectorXd th(3);
    th[0] = kMu1 + kSd1 * rng.normal();
    th[1] = kMu2 + kSd2 * rng.normal();
    th[2] = rng.uniform(box_hill_sigma2_min, 1.0);
    return th;
  };
  prior.log_density = [](const Eigen::VectorXd& th) {
    if (th[2] < box_hill_sigma2_min || th[2] > 1.0) return -kInf;
    const double z1 = (th[0] - kMu1) / kSd1;
    const double z2 = (th[1] - kMu2) / kSd2;
    return -std::log(kTwoPi) - std::log(kSd1) - std::log(kSd2) -
           0.5 * (z1 * z1 + z2 * z2) - std::log(1.0 - box_hill_sigma2_min);
  };
  prior.grad_log_density = [](const Eigen::VectorXd& th) {
    return Eigen::Vector3d(-(th[0] - kMu1) / (kSd1 * kSd1),
                           -(th[1] - kMu2) / (kSd2 * kSd2), 0.0)
        .eval();
  };
  prior.neg_hess_log_density = [](const Eigen::VectorXd&) {
    return Eigen::Vector3d(1.0 / (kSd1 * kSd1), 1.0 / (kSd2 * kSd2), 0.0)
        .asDiagonal()
        .toDenseMatrix()
        .eval();
  };
  return prior;
}

}  // namespace

std::vector<Interval> box_hill_bounds() {
  return {Interval{0.0, 150.0}, Interval{450.0, 600.0}};
}

ModelSpec build_box_hill_model(int which) {
  if (which < 1 || which > 4)
    throw std::invalid_argument("build_box_hill_model: index must be 1..4");

  ModelSpec m;
  m.id = "box_hill[m=" + std::to_string(which) + "]";
  m.dim = 3;
  m.prior = box_hill_prior();

  m.log_likelihood = [which](const Eigen::VectorXd& th, const Eigen::VectorXd& y,
                             const Design& d) {
    const double s2 = th[2];
    if (s2 <= 0.0) return -kInf;
    const int n = d.runs();
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = y[i] - eta_grad(which, th[0], th[1], d(i, 0), d(i, 1)).eta;
      ssr += r * r;
    }
    return -0.5 * n * std::log(kTwoPi * s2) - 0.5 * ssr / s2;
  };
  m.score = [which](const Eigen::VectorXd& th, const Eigen::VectorXd& y, const Design& d) {
    const double s2 = th[2];
    const int n = d.runs();
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
      const EtaGrad e = eta_grad(which, th[0], th[1], d(i, 0), d(i, 1));
      const double r = y[i] - e.eta;
      s[0] += r * e.d1 / s2;
      s[1] += r * e.d2 / s2;
      ssr += r * r;
    }
    s[2] = -0.5 * n / s2 + 0.5 * ssr / (s2 * s2);
    return s.eval();
  };
  m.fisher_information = [which](const Eigen::VectorXd& th, const Design& d) {
    const double s2 = th[2];
    const int n = d.runs();
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < n; ++i) {
      const EtaGrad e = eta_grad(which, th[0], th[1], d(i, 0), d(i, 1));
      info(0, 0) += e.d1 * e.d1;
      info(0, 1) += e.d1 * e.d2;
      info(1, 1) += e.d2 * e.d2;
    }
    info(1, 0) = info(0, 1);
    info.topLeftCorner(2, 2) /= s2;
    info(2, 2) = 0.5 * n / (s2 * s2);
    return info;
  };
  m.simulate_response = [which](const Eigen::VectorXd& th, const Design& d, RngStream& rng) {
    const double sd = std::sqrt(th[2]);
    Eigen::VectorXd y(d.runs());
    for (int i = 0; i < d.runs(); ++i)
      y[i] = eta_grad(which, th[0], th[1], d(i, 0), d(i, 1)).eta + sd * rng.normal();
    return y;
  };
  m.log_likelihood_batch = [which](const Eigen::MatrixXd& thetas, const Eigen::VectorXd& y,
                                   const Design& d) {
    const int r = static_cast<int>(thetas.rows());
    const int n = d.runs();
    Eigen::ArrayXd ssr = Eigen::ArrayXd::Zero(r);
    const Eigen::ArrayXd t1 = thetas.col(0).array();
    const Eigen::ArrayXd t2 = thetas.col(1).array();
    const Eigen::ArrayXd s2 = thetas.col(2).array();
    for (int i = 0; i < n; ++i) {
      const double x1 = d(i, 0), x2 = d(i, 1);
      Eigen::ArrayXd u = t1 * x1 * (-t2 / x2).exp();
      Eigen::ArrayXd eta;
      switch (which) {
        case 1: eta = (-u).exp(); break;
        case 2: eta = (1.0 + u).inverse(); break;
        case 3: eta = (1.0 + u).sqrt().inverse(); break;
        default: eta = (1.0 + u).pow(-1.0 / 3.0); break;
      }
      ssr += (y[i] - eta).square();
    }
    return (-0.5 * n * (kTwoPi * s2).log() - 0.5 * ssr / s2).matrix().eval();
  };

  // Common interpretation across models: phi = (t1, t2).
  Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(2, 3);
  sel(0, 0) = 1.0;
  sel(1, 1) = 1.0;
  m.transform = linear_transform(std::move(sel));
  return m;
}

ModelSet build_box_hill() {
  ModelSet ms;
  for (int which = 1; which <= 4; ++which) ms.models.push_back(build_box_hill_model(which));
  ms.prior_probs = Eigen::VectorXd::Constant(4, 0.25);
  return ms;
}

TransformSpec box_hill_ratio_transform() {
  TransformSpec t;
  t.q = 1;
  t.g = [](const Eigen::VectorXd& th) {
    Eigen::VectorXd out(1);
    out[0] = th[1] / th[0];
    return out;
  };
  t.jacobian = [](const Eigen::VectorXd& th) {
    Eigen::MatrixXd j(1, 3);
    j << -th[1] / (th[0] * th[0]), 1.0 / th[0], 0.0;
    return j;
  };
  t.linear = false;
  return t;
}

}  // namespace nbd::models

#include "nbd/numdiff.hpp"

#include <cmath>
#include <limits>

namespace nbd::fd {
namespace {

bool finite(double v) { return std::isfinite(v); }

// f(x + sign*h e_j), shrinking h while the probe is non-finite. On success h
// holds the step actually used; on failure returns NaN.
double probe(const ScalarFn& f, Eigen::VectorXd& x, int j, double sign, double& h) {
  const double saved = x[j];
  for (int attempt = 0; attempt < 4; ++attempt) {
    x[j] = saved + sign * h;
    const double v = f(x);
    x[j] = saved;
    if (finite(v)) return v;
    h *= 0.1;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Eigen::VectorXd gradient(const ScalarFn& f, const Eigen::VectorXd& x, double scale) {
  const int p = static_cast<int>(x.size());
  Eigen::VectorXd g(p);
  Eigen::VectorXd xx = x;
  const double f0 = f(x);
  for (int j = 0; j < p; ++j) {
    double hp = scale * (1.0 + std::abs(x[j]));
    double hm = hp;
    const double fp = probe(f, xx, j, +1.0, hp);
    const double fm = probe(f, xx, j, -1.0, hm);
    if (finite(fp) && finite(fm) && hp == hm) {
      g[j] = (fp - fm) / (2.0 * hp);
    } else if (finite(fp)) {
      g[j] = (fp - f0) / hp;  // one-sided at a support boundary
    } else if (finite(fm)) {
      g[j] = (f0 - fm) / hm;
    } else {
      g[j] = 0.0;
    }
  }
  return g;
}

Eigen::MatrixXd hessian(const ScalarFn& f, const Eigen::VectorXd& x, double scale) {
  const int p = static_cast<int>(x.size());
  Eigen::MatrixXd h(p, p);
  Eigen::VectorXd xx = x;
  const double f0 = f(x);
  Eigen::VectorXd steps(p);
  for (int j = 0; j < p; ++j) steps[j] = scale * (1.0 + std::abs(x[j]));

  auto at = [&](int a, double da, int b, double db) {
    const double sa = xx[a];
    xx[a] += da;
    const double sb = xx[b];
    xx[b] += db;
    const double v = f(xx);
    xx[a] = sa;
    xx[b] = sb;
    return v;
  };

  for (int j = 0; j < p; ++j) {
    double hj = steps[j];
    double fp = at(j, hj, j, 0.0);
    double fm = at(j, -hj, j, 0.0);
    for (int attempt = 0; (!finite(fp) || !finite(fm)) && attempt < 3; ++attempt) {
      hj *= 0.1;
      fp = at(j, hj, j, 0.0);
      fm = at(j, -hj, j, 0.0);
    }
    steps[j] = hj;
    h(j, j) = (fp - 2.0 * f0 + fm) / (hj * hj);
  }
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      const double ha = steps[a], hb = steps[b];
      const double v = (at(a, ha, b, hb) - at(a, ha, b, -hb) - at(a, -ha, b, hb) +
                        at(a, -ha, b, -hb)) /
                       (4.0 * ha * hb);
      h(a, b) = h(b, a) = finite(v) ? v : 0.0;
    }
  }
  return h;
}

Eigen::MatrixXd jacobian(const VectorFn& g, const Eigen::VectorXd& x, int q, double scale) {
  const int p = static_cast<int>(x.size());
  Eigen::MatrixXd jac(q, p);
  Eigen::VectorXd xx = x;
  for (int j = 0; j < p; ++j) {
    const double h = scale * (1.0 + std::abs(x[j]));
    const double saved = xx[j];
    xx[j] = saved + h;
    const Eigen::VectorXd gp = g(xx);
    xx[j] = saved - h;
    const Eigen::VectorXd gm = g(xx);
    xx[j] = saved;
    jac.col(j) = (gp - gm) / (2.0 * h);
  }
  return jac;
}

}  // namespace nbd::fd

#pragma once

#include <Eigen/Core>
#include <functional>

namespace nbd {

/// Central finite differences with the step h_j = scale*(1+|x_j|). Probes that
/// land outside a density's support return -inf; the helpers shrink the step
/// (up to 3 times) and then fall back to a one-sided difference so boundary
/// points stay usable.
namespace fd {

inline constexpr double kDefaultStep = 1e-5;

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Eigen::VectorXd gradient(const ScalarFn& f, const Eigen::VectorXd& x,
                         double scale = kDefaultStep);

Eigen::MatrixXd hessian(const ScalarFn& f, const Eigen::VectorXd& x,
                        double scale = kDefaultStep);

/// q x p Jacobian of a vector-valued map.
Eigen::MatrixXd jacobian(const VectorFn& g, const Eigen::VectorXd& x, int q,
                         double scale = kDefaultStep);

}  // namespace fd
}  // namespace nbd

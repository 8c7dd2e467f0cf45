#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace nbd {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

struct BoundsViolation {
  int run;     // 0-based row
  int factor;  // 0-based column
  double value;
  Interval bound;
};

std::string to_string(const BoundsViolation& v);

/// An n x k matrix of factor settings with a closed interval [lo_j, hi_j] per
/// factor. Coordinates flatten run-major: w = run * k + factor, W = n*k.
class Design {
 public:
  Design(Eigen::MatrixXd values, std::vector<Interval> bounds);

  /// n x k design filled with a constant (default 0).
  static Design constant(int n, std::vector<Interval> bounds, double value = 0.0);

  int runs() const { return static_cast<int>(values_.rows()); }
  int factors() const { return static_cast<int>(values_.cols()); }
  int coords() const { return runs() * factors(); }

  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<Interval>& bounds() const { return bounds_; }

  double operator()(int run, int factor) const { return values_(run, factor); }
  void set(int run, int factor, double v) { values_(run, factor) = v; }

  double coord(int w) const { return values_(w / factors(), w % factors()); }
  void set_coord(int w, double v) { values_(w / factors(), w % factors()) = v; }
  const Interval& coord_bound(int w) const { return bounds_[w % factors()]; }

  Eigen::VectorXd flattened() const;

  bool operator==(const Design& other) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<Interval> bounds_;
};

/// Every (run, factor) outside its closed interval; empty means valid.
std::vector<BoundsViolation> validate_design(const Design& d);

/// Throws std::invalid_argument naming the first offending coordinate.
void require_valid(const Design& d);

/// CSV with header x1,...,xk, one row per run, 17 significant digits so a
/// reload is bit-equal.
void write_design_csv(const Design& d, std::ostream& os);
void save_design_csv(const Design& d, const std::string& path);

/// Parses a design CSV; bounds are supplied by the caller (they are part of
/// the problem, not of the file). Throws std::runtime_error naming the
/// offending row on malformed input.
Design read_design_csv(std::istream& is, std::vector<Interval> bounds);
Design load_design_csv(const std::string& path, std::vector<Interval> bounds);

}  // namespace nbd

#include "nbd/design.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nbd {

std::string to_string(const BoundsViolation& v) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "run %d, factor x%d: value %.17g outside [%.17g, %.17g]",
                v.run + 1, v.factor + 1, v.value, v.bound.lo, v.bound.hi);
  return buf;
}

Design::Design(Eigen::MatrixXd values, std::vector<Interval> bounds)
    : values_(std::move(values)), bounds_(std::move(bounds)) {
  if (static_cast<int>(bounds_.size()) != values_.cols())
    throw std::invalid_argument("Design: bounds size must equal the factor count");
  for (const auto& b : bounds_)
    if (!(b.lo <= b.hi)) throw std::invalid_argument("Design: interval with lo > hi");
}

Design Design::constant(int n, std::vector<Interval> bounds, double value) {
  const int k = static_cast<int>(bounds.size());
  return Design(Eigen::MatrixXd::Constant(n, k, value), std::move(bounds));
}

Eigen::VectorXd Design::flattened() const {
  Eigen::VectorXd out(coords());
  for (int i = 0; i < runs(); ++i)
    for (int j = 0; j < factors(); ++j) out[i * factors() + j] = values_(i, j);
  return out;
}

bool Design::operator==(const Design& other) const {
  if (runs() != other.runs() || factors() != other.factors()) return false;
  for (int j = 0; j < factors(); ++j)
    if (bounds_[j].lo != other.bounds_[j].lo || bounds_[j].hi != other.bounds_[j].hi)
      return false;
  return values_ == other.values_;
}

std::vector<BoundsViolation> validate_design(const Design& d) {
  std::vector<BoundsViolation> out;
  for (int i = 0; i < d.runs(); ++i)
    for (int j = 0; j < d.factors(); ++j) {
      const double v = d(i, j);
      const Interval& b = d.bounds()[j];
      if (!(v >= b.lo && v <= b.hi)) out.push_back({i, j, v, b});
    }
  return out;
}

void require_valid(const Design& d) {
  auto viol = validate_design(d);
  if (!viol.empty())
    throw std::invalid_argument("invalid design: " + to_string(viol.front()) +
                                (viol.size() > 1 ? " (+" + std::to_string(viol.size() - 1) +
                                                       " more)"
                                                 : ""));
}

void write_design_csv(const Design& d, std::ostream& os) {
  for (int j = 0; j < d.factors(); ++j) os << (j ? "," : "") << 'x' << (j + 1);
  os << '\n';
  char buf[32];
  for (int i = 0; i < d.runs(); ++i) {
    for (int j = 0; j < d.factors(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", d(i, j));
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
}

void save_design_csv(const Design& d, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_design_csv(d, os);
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Design read_design_csv(std::istream& is, std::vector<Interval> bounds) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("design CSV: empty file");
  const auto header = split_csv_row(line);
  const int k = static_cast<int>(header.size());
  if (static_cast<int>(bounds.size()) != k)
    throw std::runtime_error("design CSV: header has " + std::to_string(k) +
                             " columns, expected " + std::to_string(bounds.size()));
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_row(line);
    if (static_cast<int>(cells.size()) != k)
      throw std::runtime_error("design CSV: row " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(k));
    std::vector<double> row(k);
    for (int j = 0; j < k; ++j) {
      const std::string& s = cells[j];
      const char* b = s.data();
      const char* e = b + s.size();
      auto [p, ec] = std::from_chars(b, e, row[j]);
      if (ec != std::errc{} || p != e)
        throw std::runtime_error("design CSV: row " + std::to_string(lineno) +
                                 ": cannot parse '" + s + "'");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd values(static_cast<int>(rows.size()), k);
  for (int i = 0; i < values.rows(); ++i)
    for (int j = 0; j < k; ++j) values(i, j) = rows[i][j];
  return Design(std::move(values), std::move(bounds));
}

Design load_design_csv(const std::string& path, std::vector<Interval> bounds) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open design CSV: " + path);
  return read_design_csv(is, std::move(bounds));
}

}  // namespace nbd

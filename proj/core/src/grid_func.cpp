#include "halfmom/grid_func.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "halfmom/errors.hpp"
#include "halfmom/quadrature.hpp"

namespace halfmom {

namespace {

// int_0^d e^{-mu t} dt and int_0^d t e^{-mu t} dt, stable for small mu*d.
double em0(double mu, double d) {
  const double x = mu * d;
  if (std::abs(x) < 1e-5) return d * (1.0 - x / 2.0 + x * x / 6.0);
  return (1.0 - std::exp(-x)) / mu;
}

double em1(double mu, double d) {
  const double x = mu * d;
  if (std::abs(x) < 1e-4)
    return d * d * (0.5 - x / 3.0 + x * x / 8.0);
  return (1.0 - std::exp(-x) * (1.0 + x)) / (mu * mu);
}

}  // namespace

GridVec::GridVec(Eigen::VectorXd y, Eigen::MatrixXd values)
    : y_(std::move(y)), values_(std::move(values)) {
  if (values_.cols() != y_.size())
    throw InvalidArgument("GridVec: sample count does not match grid size");
  if (y_.size() < 2) throw InvalidArgument("GridVec: need at least 2 nodes");
  for (int i = 1; i < y_.size(); ++i)
    if (y_(i) <= y_(i - 1))
      throw InvalidArgument("GridVec: grid must be strictly increasing");
}

GridVec GridVec::zero(const Eigen::VectorXd& y, int dim) {
  return GridVec(y, Eigen::MatrixXd::Zero(dim, y.size()));
}

GridVec GridVec::exponential(const Eigen::VectorXd& y,
                             const Eigen::VectorXd& c, double rate) {
  Eigen::MatrixXd vals(c.size(), y.size());
  for (int j = 0; j < y.size(); ++j) vals.col(j) = c * std::exp(-rate * y(j));
  return GridVec(y, std::move(vals));
}

GridVec GridVec::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header line
      throw InvalidArgument("malformed CSV row: " + line);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidArgument("inconsistent CSV column count");
    if (row.size() < 2) throw InvalidArgument("CSV rows need y plus values");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw InvalidArgument("CSV needs at least 2 data rows");
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.front().size()) - 1;
  Eigen::VectorXd y(n);
  Eigen::MatrixXd vals(d, n);
  for (int j = 0; j < n; ++j) {
    y(j) = rows[j][0];
    for (int i = 0; i < d; ++i) vals(i, j) = rows[j][i + 1];
  }
  return GridVec(std::move(y), std::move(vals));
}

Eigen::VectorXd GridVec::eval(double y) const {
  const int n = points();
  if (y <= y_(0)) return values_.col(0);
  if (y >= y_(n - 1)) return values_.col(n - 1) * (y == y_(n - 1) ? 1.0 : 0.0);
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (y_(mid) <= y ? lo : hi) = mid;
  }
  const double t = (y - y_(lo)) / (y_(lo + 1) - y_(lo));
  return (1.0 - t) * values_.col(lo) + t * values_.col(lo + 1);
}

GridVec GridVec::derivative() const {
  const int n = points();
  Eigen::MatrixXd d(dim(), n);
  d.col(0) = (values_.col(1) - values_.col(0)) / (y_(1) - y_(0));
  d.col(n - 1) =
      (values_.col(n - 1) - values_.col(n - 2)) / (y_(n - 1) - y_(n - 2));
  for (int j = 1; j + 1 < n; ++j)
    d.col(j) = (values_.col(j + 1) - values_.col(j - 1)) / (y_(j + 1) - y_(j - 1));
  return GridVec(y_, std::move(d));
}

GridVec GridVec::component(int i) const {
  return GridVec(y_, values_.row(i));
}

GridVec GridVec::promote(int dim, int component) const {
  if (this->dim() != 1)
    throw InvalidArgument("GridVec::promote: source must be 1-dimensional");
  Eigen::MatrixXd vals = Eigen::MatrixXd::Zero(dim, points());
  vals.row(component) = values_.row(0);
  return GridVec(y_, std::move(vals));
}

double GridVec::min_rate() const {
  // Log-slope of the envelope over the last part of the grid.
  const int n = points();
  const int j0 = std::max(1, (3 * n) / 5);
  const double f0 = values_.col(j0).cwiseAbs().maxCoeff();
  const double f1 = values_.col(n - 1).cwiseAbs().maxCoeff();
  if (f0 <= 0.0 || f1 <= 0.0) return 1.0;
  const double rate = std::log(f0 / f1) / (y_(n - 1) - y_(j0));
  return rate > 0.0 ? rate : 1.0;
}

GridVec& GridVec::operator+=(const GridVec& other) {
  if (dim() != other.dim() || points() != other.points() ||
      (y_ - other.y_).cwiseAbs().maxCoeff() > 0.0)
    throw InvalidArgument("GridVec: incompatible grids in addition");
  values_ += other.values_;
  return *this;
}

GridVec& GridVec::operator*=(double s) {
  values_ *= s;
  return *this;
}

GridVec operator-(const GridVec& a, const GridVec& b) {
  GridVec nb = b;
  nb *= -1.0;
  nb += a;
  return nb;
}

GridVec apply(const Eigen::MatrixXd& M, const GridVec& f) {
  if (M.cols() != f.dim())
    throw InvalidArgument("apply: matrix/function dimension mismatch");
  return GridVec(f.grid(), M * f.values());
}

GridVec integrate_tail(const GridVec& f) {
  const int n = f.points();
  const Eigen::VectorXd& y = f.grid();
  const Eigen::MatrixXd& v = f.values();
  Eigen::MatrixXd r(f.dim(), n);
  r.col(n - 1).setZero();  // interpolant vanishes beyond the last node
  for (int j = n - 2; j >= 0; --j)
    r.col(j) =
        r.col(j + 1) - 0.5 * (y(j + 1) - y(j)) * (v.col(j) + v.col(j + 1));
  return GridVec(y, std::move(r));
}

GridVec convolve_decay(double lambda, const GridVec& f) {
  if (lambda <= 0.0)
    throw InvalidArgument("convolve_decay: lambda must be > 0");
  const double mu = 1.0 / lambda;
  const int n = f.points();
  const Eigen::VectorXd& y = f.grid();
  const Eigen::MatrixXd& v = f.values();
  Eigen::MatrixXd g(f.dim(), n);
  g.col(0).setZero();
  for (int j = 0; j + 1 < n; ++j) {
    const double d = y(j + 1) - y(j);
    // g(y_{j+1}) = e^{-mu d} g(y_j)
    //            + mu int_0^d e^{mu(t-d)} (a + b t) dt, linear panel data.
    const Eigen::VectorXd a = v.col(j);
    const Eigen::VectorXd b = (v.col(j + 1) - v.col(j)) / d;
    const double i0 = em0(mu, d);          // int e^{-mu s} ds over [0,d]
    const double i1 = d / mu - i0 / mu;    // int t e^{mu(t-d)} dt = d/mu - i0/mu
    g.col(j + 1) = std::exp(-mu * d) * g.col(j) + mu * (a * i0 + b * i1);
  }
  return GridVec(y, std::move(g));
}

GridVec convolve_growth_tail(double lambda, const GridVec& f) {
  if (lambda >= 0.0)
    throw InvalidArgument("convolve_growth_tail: lambda must be < 0");
  const double mu = -1.0 / lambda;
  const int n = f.points();
  const Eigen::VectorXd& y = f.grid();
  const Eigen::MatrixXd& v = f.values();
  Eigen::MatrixXd z(f.dim(), n);
  z.col(n - 1).setZero();
  for (int j = n - 2; j >= 0; --j) {
    const double d = y(j + 1) - y(j);
    const Eigen::VectorXd a = v.col(j);
    const Eigen::VectorXd b = (v.col(j + 1) - v.col(j)) / d;
    z.col(j) = std::exp(-mu * d) * z.col(j + 1) +
               mu * (a * em0(mu, d) + b * em1(mu, d));
  }
  return GridVec(y, std::move(z));
}

double weighted_norm(const GridVec& f, double a) {
  const int n = f.points();
  const Eigen::VectorXd& y = f.grid();
  double sum = 0.0;
  for (int j = 0; j + 1 < n; ++j)
    sum += integrate_gauss(
        [&](double s) {
          return std::exp(2.0 * a * s) * f.eval(s).squaredNorm();
        },
        y(j), y(j + 1), 8);
  return std::sqrt(std::max(0.0, sum));
}

}  // namespace halfmom

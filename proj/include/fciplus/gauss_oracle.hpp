#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "fciplus/oracle.hpp"

namespace fciplus {

struct FisherZResult {
  bool independent = false;
  double partial_correlation = 0.0;
  double statistic = 0.0;
  bool singular = false;  // submatrix not invertible; reported as dependent
};

// Fisher z test of x _||_ y | z on a covariance matrix estimated from n samples.
inline FisherZResult fisher_z_test(const Eigen::MatrixXd& cov, std::size_t n, VarId x, VarId y,
                                   const VarSet& z, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (n <= z.size() + 3) throw InputError("too few samples for conditioning set of size " + std::to_string(z.size()));
  std::vector<VarId> vars{x, y};
  vars.insert(vars.end(), z.begin(), z.end());
  const auto k = static_cast<Eigen::Index>(vars.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = cov(vars[static_cast<std::size_t>(i)], vars[static_cast<std::size_t>(j)]);

  FisherZResult r;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
  const double scale = sub.diagonal().cwiseAbs().maxCoeff();
  const auto d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-12 * std::max(scale, 1.0)) {
    r.singular = true;
    return r;
  }
  const Eigen::MatrixXd prec = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  double rho = -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
  rho = std::clamp(rho, -1.0 + 1e-15, 1.0 - 1e-15);
  r.partial_correlation = rho;
  r.statistic = std::sqrt(static_cast<double>(n - z.size() - 3)) * std::abs(0.5 * std::log((1.0 + rho) / (1.0 - rho)));
  const boost::math::normal standard;
  r.independent = r.statistic <= boost::math::quantile(standard, 1.0 - alpha / 2.0);
  return r;
}

// Sample data with a header row of names and one numeric row per sample.
struct Dataset {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // rows = samples
};

inline Dataset read_csv(std::istream& in) {
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      ds.names.push_back(cell);
    }
  }
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw InputError("");
      } catch (const std::exception&) {
        throw InputError("non-numeric CSV cell on line " + std::to_string(lineno));
      }
    }
    if (row.size() != ds.names.size()) throw InputError("CSV line " + std::to_string(lineno) + " has wrong column count");
    rows.push_back(std::move(row));
  }
  ds.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ds.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return ds;
}

inline Dataset read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  return read_csv(f);
}

// Oracle answering from Fisher z tests on a sample covariance matrix.
class GaussOracle final : public IndependenceOracle {
 public:
  static constexpr double kDefaultAlpha = 0.01;

  GaussOracle(Eigen::MatrixXd cov, std::size_t samples, double alpha = kDefaultAlpha)
      : cov_(std::move(cov)), samples_(samples), alpha_(alpha) {
    if (cov_.rows() != cov_.cols()) throw InputError("covariance matrix is not square");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    for (Eigen::Index i = 0; i < cov_.rows(); ++i)
      if (!(cov_(i, i) > 0.0)) throw InputError("variable " + std::to_string(i) + " has zero variance");
  }

  // Rejects constant columns up front.
  static GaussOracle from_data(const Dataset& ds, double alpha = kDefaultAlpha) {
    const Eigen::Index n = ds.values.rows();
    if (n < 4) throw InputError("need at least 4 samples");
    for (Eigen::Index j = 0; j < ds.values.cols(); ++j) {
      if ((ds.values.col(j).array() == ds.values(0, j)).all())
        throw InputError("column '" + ds.names[static_cast<std::size_t>(j)] + "' is constant");
    }
    Eigen::MatrixXd centered = ds.values.rowwise() - ds.values.colwise().mean();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    return GaussOracle(std::move(cov), static_cast<std::size_t>(n), alpha);
  }

  int size() const override { return static_cast<int>(cov_.rows()); }
  double alpha() const { return alpha_; }
  std::size_t samples() const { return samples_; }
  std::size_t test_errors() const { return test_errors_; }

 protected:
  bool test(VarId x, VarId y, const VarSet& z) override {
    if (samples_ <= z.size() + 3) {
      ++test_errors_;
      return false;
    }
    FisherZResult r = fisher_z_test(cov_, samples_, x, y, z, alpha_);
    if (r.singular) ++test_errors_;
    return r.independent;
  }

 private:
  Eigen::MatrixXd cov_;
  std::size_t samples_;
  double alpha_;
  std::size_t test_errors_ = 0;
};

}  // namespace fciplus

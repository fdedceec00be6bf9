#include "rnnpg/lstsq.hpp"

#include <lapacke.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rnnpg {

LstsqReport solve_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                const Eigen::Ref<const Eigen::VectorXd>& b, double rcond) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index m = a.rows(), n = a.cols();
  if (m == 0 || n == 0) throw std::invalid_argument("least-squares system is empty");
  if (b.size() != m) throw std::invalid_argument("rhs length does not match matrix rows");
  if (!(rcond >= 0.0 && rcond < 1.0)) throw std::invalid_argument("rcond must lie in [0, 1)");
  if (!a.allFinite() || !b.allFinite())
    throw std::invalid_argument("least-squares system has non-finite entries");

  LstsqReport report;
  report.rcond_used = rcond;
  const Eigen::Index k = std::min(m, n);
  report.singular_values = Eigen::VectorXd::Zero(k);

  if (a.cwiseAbs().maxCoeff() == 0.0) {
    report.coefficients = Eigen::VectorXd::Zero(n);
    report.residual_norm = b.norm();
  } else {
    Eigen::MatrixXd work = a;  // dgelsd overwrites A
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(std::max(m, n));
    rhs.head(m) = b;
    lapack_int rank = 0;
    const lapack_int info = LAPACKE_dgelsd(
        LAPACK_COL_MAJOR, static_cast<lapack_int>(m), static_cast<lapack_int>(n), 1,
        work.data(), static_cast<lapack_int>(m), rhs.data(),
        static_cast<lapack_int>(rhs.size()), report.singular_values.data(), rcond, &rank);
    if (info > 0) throw std::runtime_error("SVD failed to converge in dgelsd");
    if (info < 0)
      throw std::runtime_error("dgelsd rejected argument " + std::to_string(-info));
    report.coefficients = rhs.head(n);
    report.effective_rank = rank;
    report.residual_norm = (a * report.coefficients - b).norm();
  }
  report.sigma_max = report.singular_values(0);
  report.sigma_min_kept =
      report.effective_rank > 0 ? report.singular_values(report.effective_rank - 1) : 0.0;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

LstsqReport solve(const LinearSystem& system, double rcond) {
  return solve_least_squares(Eigen::MatrixXd(system.matrix), system.rhs, rcond);
}

ConditionSummary diagnostics(const LinearSystem& system, const LstsqReport& report) {
  ConditionSummary s;
  s.rows = system.rows();
  s.cols = system.cols();
  s.sigma_max = report.sigma_max;
  s.sigma_min_kept = report.sigma_min_kept;
  s.effective_rank = report.effective_rank;
  s.condition = report.sigma_min_kept > 0.0 ? report.sigma_max / report.sigma_min_kept
                                            : std::numeric_limits<double>::infinity();
  for (int e = 0; e <= 16; ++e) {
    const double cut = report.sigma_max * std::pow(10.0, -e);
    s.rank_profile.push_back((report.singular_values.array() >= cut).count());
  }
  if (report.coefficients.size() == system.cols()) {
    const Eigen::VectorXd r = system.matrix * report.coefficients - system.rhs;
    std::map<RowKind, double> sq;
    for (Eigen::Index i = 0; i < r.size(); ++i) sq[system.row_tags[i].kind] += r(i) * r(i);
    for (const auto& [kind, v] : sq) s.residual_by_kind[kind] = std::sqrt(v);
  }
  return s;
}

}  // namespace rnnpg

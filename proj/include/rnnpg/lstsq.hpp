#pragma once

#include <map>
#include <vector>

#include "rnnpg/assembly.hpp"

namespace rnnpg {

/// Default relative singular-value cutoff.
inline constexpr double kDefaultRcond = 1e-14;

struct LstsqReport {
  Eigen::VectorXd coefficients;
  double residual_norm = 0.0;
  Eigen::Index effective_rank = 0;
  double sigma_max = 0.0;
  double sigma_min_kept = 0.0;
  double rcond_used = kDefaultRcond;
  double wall_time = 0.0;  // seconds
  Eigen::VectorXd singular_values;  // descending
};

/// Minimum-norm least-squares solution of min |A x - b| via the SVD
/// (LAPACK dgelsd). Singular values <= rcond * sigma_max are treated as zero.
/// Throws std::invalid_argument on empty input, non-finite entries, or
/// rcond outside [0, 1); std::runtime_error if LAPACK fails to converge.
LstsqReport solve_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                const Eigen::Ref<const Eigen::VectorXd>& b,
                                double rcond = kDefaultRcond);

LstsqReport solve(const LinearSystem& system, double rcond = kDefaultRcond);

struct ConditionSummary {
  double sigma_max = 0.0;
  double sigma_min_kept = 0.0;
  double condition = 0.0;  // sigma_max / sigma_min_kept
  Eigen::Index effective_rank = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  /// Count of singular values >= sigma_max * 10^-k for k = 0..16.
  std::vector<Eigen::Index> rank_profile;
  /// Residual 2-norm restricted to each row kind.
  std::map<RowKind, double> residual_by_kind;
};

ConditionSummary diagnostics(const LinearSystem& system, const LstsqReport& report);

}  // namespace rnnpg

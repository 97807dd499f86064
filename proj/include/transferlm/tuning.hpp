#pragma once

#include <Eigen/Dense>
#include <vector>

#include "transferlm/errors.hpp"
#include "transferlm/finetune.hpp"
#include "transferlm/ols.hpp"

namespace transferlm {

/// Optimal-speed gradient step 2 / (lambda_max + lambda_min) of gram_T.
double alpha_star(const Eigen::MatrixXd& gram_T);

/// alpha_star / divisor. Convergence to the target-only estimator is not
/// wanted, so the step is deliberately smaller than optimal; divisor 5 or 10
/// works well in practice.
double pick_alpha(const Eigen::MatrixXd& gram_T, double divisor = 10.0);

struct UCurvePoint {
  long k = 0;
  double u_bar = 0.0;
};

struct UCurve {
  std::vector<UCurvePoint> points;
  int skipped_rows = 0;
};

/// Training-averaged log-variance-ratio criterion, with the true variances
/// replaced by their fitted counterparts. Rows where the criterion is
/// undefined (zero predictive variance) are skipped and counted.
UCurve u_bar_curve(const FittedModel& source, const FittedModel& target,
                   const Eigen::MatrixXd& joint_inputs, double alpha,
                   const std::vector<long>& k_grid);

enum class KRule { LocalMax, Elbow };

struct KSelection {
  long k_hat = 0;
  KRule rule = KRule::LocalMax;
};

/// First interior strict local maximum of the curve; when none exists, the
/// elbow point: on the curve normalized to [0,1]^2, the point of maximum
/// perpendicular distance to the chord joining the endpoints.
KSelection select_k(const std::vector<UCurvePoint>& curve);

struct RhoCurvePoint {
  double rho = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct RhoCalibration {
  double rho_hat = 0.0;
  std::vector<RhoCurvePoint> curve;
  bool no_positive_labels = false;
};

/// Calibrates the prior radius on the joint training data: samples where the
/// fine-tuned prediction beats the target one are labeled positive, the test
/// is run at each rho, and rho_hat maximizes precision among grid points with
/// recall >= 0.5 (ties toward larger rho). Without such a point, the rho just
/// before the largest single-step recall drop is taken.
RhoCalibration calibrate_rho(const Dataset& source, const Dataset& target,
                             const FittedModel& fitted_S, const FittedModel& fitted_T,
                             const TransferOperator& op,
                             const std::vector<double>& rho_grid, double level);

/// Dense for k <= 10, then geometric up to 10^4 (~60 points).
std::vector<long> default_k_grid();

/// Log-spaced grid over [1e-5, 1].
std::vector<double> default_rho_grid();

struct TuningOptions {
  double alpha_divisor = 10.0;
  std::vector<long> k_grid;      // empty: default_k_grid()
  std::vector<double> rho_grid;  // empty: default_rho_grid()
  double level = 0.05;
};

struct TuningReport {
  double alpha_star = 0.0;
  double alpha = 0.0;
  long k_hat = 0;
  double rho_hat = 0.0;
  std::vector<UCurvePoint> u_curve;
  std::vector<RhoCurvePoint> rho_curve;
  KRule k_rule = KRule::LocalMax;
  int skipped_rows = 0;
  bool no_positive_labels = false;
};

/// Full recipe: alpha from the target Gram, k from the u_bar curve, rho from
/// precision/recall calibration.
TuningReport tune_transfer(const Dataset& source, const Dataset& target,
                           const FittedModel& fitted_S, const FittedModel& fitted_T,
                           const TuningOptions& opts = {});

}  // namespace transferlm

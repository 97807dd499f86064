#include "transferlm/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "transferlm/fdist.hpp"
#include "transferlm/gain.hpp"
#include "transferlm/transfer_test.hpp"

namespace transferlm {

double alpha_star(const Eigen::MatrixXd& gram_T) {
  const EigenDecomposition eig = eigendecompose_spd(gram_T);
  return 2.0 / (eig.lambdas(0) + eig.lambdas(eig.lambdas.size() - 1));
}

double pick_alpha(const Eigen::MatrixXd& gram_T, double divisor) {
  if (!(divisor > 0.0)) throw DomainError("alpha divisor must be positive");
  return alpha_star(gram_T) / divisor;
}

UCurve u_bar_curve(const FittedModel& source, const FittedModel& target,
                   const Eigen::MatrixXd& joint_inputs, double alpha,
                   const std::vector<long>& k_grid) {
  if (k_grid.empty()) throw DomainError("k grid must be nonempty");
  for (std::size_t i = 1; i < k_grid.size(); ++i)
    if (k_grid[i] <= k_grid[i - 1]) throw DomainError("k grid must be increasing");
  if (joint_inputs.cols() != target.d || source.d != target.d)
    throw DimensionMismatch("inputs and models disagree on dimension");

  const Eigen::Index rows = joint_inputs.rows();
  const TaskTruth plugin{source.beta_hat, target.beta_hat, source.sigma2_hat,
                         target.sigma2_hat};
  const EigenDecomposition eig = eigendecompose_spd(target.gram);

  // x' gram_T_inv x per row, fixed across k.
  const Eigen::VectorXd target_quad =
      (joint_inputs * target.gram_inv).cwiseProduct(joint_inputs).rowwise().sum();

  std::vector<char> skipped(static_cast<std::size_t>(rows), 0);
  for (Eigen::Index i = 0; i < rows; ++i)
    if (!(target.sigma2_hat * target_quad(i) > 0.0)) skipped[i] = 1;

  UCurve curve;
  curve.points.reserve(k_grid.size());
  for (long k : k_grid) {
    const TransferOperator op = make_transfer_operator(eig, target.gram, alpha, k);
    const Eigen::MatrixXd v_hat =
        variance_matrix(plugin, source.gram_inv, target.gram_inv, op);
    const Eigen::VectorXd tuned_quad =
        (joint_inputs * v_hat).cwiseProduct(joint_inputs).rowwise().sum();

    double sum = 0.0;
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (skipped[i]) continue;
      const double pv_target = target.sigma2_hat * target_quad(i);
      const double pv_tuned = tuned_quad(i);
      if (!(pv_tuned > 0.0)) {
        skipped[i] = 1;
        continue;
      }
      sum += -pv_target * std::log(pv_tuned / pv_target);
      ++kept;
    }
    curve.points.push_back({k, kept > 0 ? sum / static_cast<double>(kept) : 0.0});
  }
  curve.skipped_rows = static_cast<int>(std::count(skipped.begin(), skipped.end(), 1));
  return curve;
}

KSelection select_k(const std::vector<UCurvePoint>& curve) {
  const std::size_t n = curve.size();
  if (n < 3) throw CurveTooShort("k selection needs at least 3 curve points");

  for (std::size_t i = 1; i + 1 < n; ++i)
    if (curve[i].u_bar > curve[i - 1].u_bar && curve[i].u_bar > curve[i + 1].u_bar)
      return {curve[i].k, KRule::LocalMax};

  // Elbow: max perpendicular distance to the endpoint chord, on the curve
  // normalized to the unit square (scale invariance).
  const double k_lo = static_cast<double>(curve.front().k);
  const double k_hi = static_cast<double>(curve.back().k);
  double u_lo = curve[0].u_bar, u_hi = curve[0].u_bar;
  for (const auto& p : curve) {
    u_lo = std::min(u_lo, p.u_bar);
    u_hi = std::max(u_hi, p.u_bar);
  }
  const double k_span = k_hi > k_lo ? k_hi - k_lo : 1.0;
  const double u_span = u_hi > u_lo ? u_hi - u_lo : 1.0;

  const double x0 = 0.0;
  const double y0 = (curve.front().u_bar - u_lo) / u_span;
  const double x1 = (k_hi - k_lo) / k_span;
  const double y1 = (curve.back().u_bar - u_lo) / u_span;
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double chord_len = std::hypot(dx, dy);

  std::size_t best = 0;
  double best_dist = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double px = (static_cast<double>(curve[i].k) - k_lo) / k_span;
    const double py = (curve[i].u_bar - u_lo) / u_span;
    const double dist = chord_len > 0.0
                            ? std::fabs(dx * (py - y0) - dy * (px - x0)) / chord_len
                            : 0.0;
    if (dist > best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return {curve[best].k, KRule::Elbow};
}

RhoCalibration calibrate_rho(const Dataset& source, const Dataset& target,
                             const FittedModel& fitted_S, const FittedModel& fitted_T,
                             const TransferOperator& op,
                             const std::vector<double>& rho_grid, double level) {
  if (rho_grid.empty()) throw DomainError("rho grid must be nonempty");
  for (std::size_t i = 1; i < rho_grid.size(); ++i)
    if (rho_grid[i] <= rho_grid[i - 1]) throw DomainError("rho grid must be increasing");
  if (rho_grid.front() < 0.0) throw DomainError("rho must be nonnegative");
  if (source.dim() != target.dim())
    throw DimensionMismatch("source and target designs disagree on dimension");

  const Eigen::Index n_joint = source.n() + target.n();
  Eigen::MatrixXd joint(n_joint, source.dim());
  joint << source.X, target.X;
  Eigen::VectorXd y(n_joint);
  y << source.y, target.y;

  const Eigen::VectorXd beta_k =
      fine_tune(fitted_S.beta_hat, fitted_T.beta_hat, op);
  const Eigen::VectorXd resid_target = y - joint * fitted_T.beta_hat;
  const Eigen::VectorXd resid_tuned = y - joint * beta_k;

  std::vector<char> label(static_cast<std::size_t>(n_joint));
  long positives = 0;
  for (Eigen::Index i = 0; i < n_joint; ++i) {
    label[i] = resid_target(i) * resid_target(i) > resid_tuned(i) * resid_tuned(i);
    positives += label[i];
  }

  const int d1 = static_cast<int>(fitted_T.n - fitted_T.d);
  const int d2 = static_cast<int>(fitted_S.n - fitted_S.d);
  const double threshold = f_quantile(1.0 - level, d1, d2);

  std::vector<TestStatParts> parts;
  std::vector<char> usable(static_cast<std::size_t>(n_joint), 0);
  parts.reserve(static_cast<std::size_t>(n_joint));
  for (Eigen::Index i = 0; i < n_joint; ++i) {
    try {
      parts.push_back(test_statistic_parts(joint.row(i).transpose(), fitted_S,
                                           fitted_T, op));
      usable[i] = 1;
    } catch (const DegenerateDirection&) {
      parts.push_back({});  // never rejects
    }
  }

  RhoCalibration cal;
  cal.curve.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    long tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < n_joint; ++i) {
      const bool reject = usable[i] && parts[i].psi(rho) > threshold;
      if (reject && label[i]) ++tp;
      if (reject && !label[i]) ++fp;
      if (!reject && label[i]) ++fn;
    }
    RhoCurvePoint pt;
    pt.rho = rho;
    pt.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 1.0;
    pt.recall = positives > 0 ? static_cast<double>(tp) / positives : 1.0;
    cal.curve.push_back(pt);
  }

  if (positives == 0) {
    cal.no_positive_labels = true;
    cal.rho_hat = rho_grid.back();
    return cal;
  }

  bool found = false;
  double best_precision = -1.0;
  for (const auto& pt : cal.curve) {
    if (pt.recall >= 0.5 && pt.precision >= best_precision) {
      best_precision = pt.precision;
      cal.rho_hat = pt.rho;
      found = true;
    }
  }
  if (!found) {
    // No grid point keeps decent recall: take the rho right before the
    // largest single-step recall drop.
    std::size_t best = 0;
    double best_drop = -1.0;
    for (std::size_t i = 0; i + 1 < cal.curve.size(); ++i) {
      const double drop = cal.curve[i].recall - cal.curve[i + 1].recall;
      if (drop > best_drop) {
        best_drop = drop;
        best = i;
      }
    }
    cal.rho_hat = cal.curve[best].rho;
  }
  return cal;
}

std::vector<long> default_k_grid() {
  std::vector<long> grid;
  for (long k = 0; k <= 10; ++k) grid.push_back(k);
  long k = 10;
  while (k < 10000) {
    k = std::max(k + 1, static_cast<long>(std::llround(k * 1.18)));
    grid.push_back(std::min(k, 10000L));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  const int steps = 25;
  for (int i = 0; i <= steps; ++i)
    grid.push_back(std::pow(10.0, -5.0 + 5.0 * i / steps));
  return grid;
}

TuningReport tune_transfer(const Dataset& source, const Dataset& target,
                           const FittedModel& fitted_S, const FittedModel& fitted_T,
                           const TuningOptions& opts) {
  TuningReport report;
  report.alpha_star = alpha_star(fitted_T.gram);
  report.alpha = pick_alpha(fitted_T.gram, opts.alpha_divisor);

  const std::vector<long> k_grid =
      opts.k_grid.empty() ? default_k_grid() : opts.k_grid;
  const std::vector<double> rho_grid =
      opts.rho_grid.empty() ? default_rho_grid() : opts.rho_grid;

  Eigen::MatrixXd joint(source.n() + target.n(), source.dim());
  joint << source.X, target.X;

  UCurve curve = u_bar_curve(fitted_S, fitted_T, joint, report.alpha, k_grid);
  report.u_curve = std::move(curve.points);
  report.skipped_rows = curve.skipped_rows;

  const KSelection sel = select_k(report.u_curve);
  report.k_hat = sel.k_hat;
  report.k_rule = sel.rule;

  const TransferOperator op =
      make_transfer_operator(fitted_T.gram, report.alpha, report.k_hat);
  RhoCalibration cal = calibrate_rho(source, target, fitted_S, fitted_T, op,
                                     rho_grid, opts.level);
  report.rho_hat = cal.rho_hat;
  report.rho_curve = std::move(cal.curve);
  report.no_positive_labels = cal.no_positive_labels;
  return report;
}

}  // namespace transferlm

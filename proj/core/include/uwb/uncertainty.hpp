#pragma once

#include <string>
#include <vector>

#include "uwb/types.hpp"

namespace uwb {

/// Which closed forms to evaluate.
///
/// `first_order` is the complete linearization: the offset estimate shares
/// beacon noise with the rate estimate, so gamma carries a (1 + 2k) factor on
/// both timestamp variances and every beta/offset cross term is referenced to
/// the beacon midpoint. `literal` keeps the simpler textbook forms
/// ((1 - 2k) on the anchor term, sync-epoch reference in sigma_eps^2, no
/// nu_bar^2 on the master term of gamma_bar); it disagrees with Monte Carlo
/// whenever tau(t_sync) is comparable to the beacon gap and is only kept for
/// comparison.
enum class VarianceModel { first_order, literal };

/// Everything the closed forms need for one anchor. Times are ideal times;
/// tau(t) = master_offset + master_rate * t is the master reading.
struct NoiseBudget {
  double sigma_ts_m = 0.0;  // master timestamp std, s
  double sigma_ts_i = 0.0;  // anchor
  double sigma_ts = 0.0;    // tag

  double master_offset = 0.0;
  double master_rate = 1.0;
  double anchor_rate = 1.0;
  double tag_rate = 1.0;

  double sync_epoch = 0.0;        // first beacon
  double sync_gap = 1e-3;         // beacon spacing
  double slot_offset = 1e-3;      // t_i - t_m
  double anchor_pair_gap = 2e-4;  // spacing of the anchor's two frames
  double master_pair_gap = 2e-4;
  double master_tx_time = 2e-3;   // t_m
  double tof_im = 0.0;
  double c = kSpeedOfLight;

  /// Extra master-rate variance inside sigma_phi^2. Zero unless set; equals
  /// sigma_ts_m^2 when the master's transmit stamp is the only other source.
  double sigma2_master_term = 0.0;

  VarianceModel model = VarianceModel::first_order;

  [[nodiscard]] double rel_rate() const { return anchor_rate / master_rate; }
  [[nodiscard]] double tag_ratio() const { return tag_rate / master_rate; }
  [[nodiscard]] double residual() const { return (1.0 - anchor_rate) / rel_rate() * tof_im; }
  [[nodiscard]] double master_reading(double t) const { return master_offset + master_rate * t; }
  [[nodiscard]] double anchor_tx_time() const { return master_tx_time + slot_offset; }

  /// Throws InvalidArgument (negative sigma, bad rate) or ZeroInterval.
  void validate() const;
};

struct VarianceReport {
  double sigma2_beta = 0;           // dimensionless^2
  double sigma2_gamma = 0;          // s^2
  double sigma2_gamma_delayed = 0;  // s^2
  double sigma2_gamma_bar = 0;      // s^2
  double sigma2_epsilon = 0;        // s^2 at t_i
  double corr_epsilon = 0;          // s^2, between t_i and t_i + anchor gap
  double sigma2_xi = 0;             // dimensionless^2
  double sigma2_phi = 0;            // s^2
  double sigma2_lambda = 0;         // m^2, tag rate from the anchor pair
  double sigma2_lambda_master = 0;  // m^2, tag rate from the master pair
  std::vector<std::string> diagnostics;  // negative outputs, never clipped
};

double var_beta(const NoiseBudget& b);
double var_gamma(const NoiseBudget& b);
double var_gamma_delayed(const NoiseBudget& b);
double var_gamma_bar(const NoiseBudget& b);
double var_epsilon(const NoiseBudget& b, double t);
/// Covariance of the conversion errors of two stamps `lag` apart; lag == 0
/// is the same stamp and includes its own white noise.
double corr_epsilon(const NoiseBudget& b, double t, double lag);
double var_xi(const NoiseBudget& b, double anchor_pair_gap);
double var_phi(const NoiseBudget& b, double t_i, double t_m);
double var_lambda(const NoiseBudget& b, double t_i, double t_m);
/// DTDoA variance when the tag rate comes from the master's own pair.
double var_lambda_master_rate(const NoiseBudget& b, double t_i, double t_m);

/// All variances at the budget's own evaluation times.
VarianceReport report(const NoiseBudget& b);

}  // namespace uwb

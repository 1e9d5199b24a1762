#include "uwb/uncertainty.hpp"

#include <cmath>

#include "uwb/error.hpp"

namespace uwb {
namespace {

double sq(double x) { return x * x; }

void require_positive(double interval, const char* what) {
  if (!(interval > 0.0)) throw Error(ErrorCode::ZeroInterval, std::string(what) + " must be > 0");
}

// Offset-estimate reference time in the beta cross covariance.
double beta_reference(const NoiseBudget& b) {
  return b.model == VarianceModel::first_order ? b.master_reading(b.sync_epoch + b.sync_gap / 2)
                                               : b.master_reading(b.sync_epoch);
}

// Shared by both beacons: (1 + 2k) form for the first, (1 - 2k) for the delayed.
double gamma_at(const NoiseBudget& b, double tau, double sign) {
  const double k = tau / (b.master_rate * b.sync_gap);
  const double si2 = sq(b.sigma_ts_i);
  const double sm2 = sq(b.rel_rate()) * sq(b.sigma_ts_m);
  if (b.model == VarianceModel::first_order) {
    return (1.0 + sign * 2.0 * k) * (si2 + sm2) + sq(tau) * var_beta(b);
  }
  return (1.0 - 2.0 * k) * si2 + (1.0 + 2.0 * k) * sm2 + sq(tau) * var_beta(b);
}

}  // namespace

void NoiseBudget::validate() const {
  if (sigma_ts_m < 0 || sigma_ts_i < 0 || sigma_ts < 0 || sigma2_master_term < 0) {
    throw Error(ErrorCode::InvalidArgument, "noise budget sigmas must be >= 0");
  }
  if (!(master_rate > 0) || !(anchor_rate > 0) || !(tag_rate > 0)) {
    throw Error(ErrorCode::InvalidArgument, "clock rates must be > 0");
  }
  require_positive(sync_gap, "sync gap");
  require_positive(slot_offset, "slot offset");
  require_positive(anchor_pair_gap, "anchor pair gap");
  require_positive(master_pair_gap, "master pair gap");
}

double var_beta(const NoiseBudget& b) {
  require_positive(b.sync_gap, "sync gap");
  return 2.0 / sq(b.master_rate * b.sync_gap) *
         (sq(b.sigma_ts_i) + sq(b.rel_rate()) * sq(b.sigma_ts_m));
}

double var_gamma(const NoiseBudget& b) {
  return gamma_at(b, b.master_reading(b.sync_epoch), +1.0);
}

double var_gamma_delayed(const NoiseBudget& b) {
  return gamma_at(b, b.master_reading(b.sync_epoch + b.sync_gap), -1.0);
}

double var_gamma_bar(const NoiseBudget& b) {
  const double mid = b.master_reading(b.sync_epoch + b.sync_gap / 2);
  const double master_scale = b.model == VarianceModel::first_order ? sq(b.rel_rate()) : 1.0;
  return sq(b.sigma_ts_i) / 2 + master_scale * sq(b.sigma_ts_m) / 2 + sq(mid) * var_beta(b);
}

double var_epsilon(const NoiseBudget& b, double t) {
  const double nu2 = sq(b.rel_rate());
  const double shifted = b.master_reading(t) + b.residual();
  return sq(b.sigma_ts_i) / nu2 + var_gamma_bar(b) / nu2 +
         (sq(shifted) - 2.0 * shifted * beta_reference(b)) / nu2 * var_beta(b);
}

double corr_epsilon(const NoiseBudget& b, double t, double lag) {
  const double nu2 = sq(b.rel_rate());
  const double e = b.residual();
  const double first = b.master_reading(t) + e;
  const double second = b.master_reading(t + lag) + e;
  const double mid = b.master_reading(b.sync_epoch + b.sync_gap / 2);
  const double sb2 = var_beta(b);
  double cov = first * second / nu2 * sb2 + var_gamma_bar(b) / nu2 - (first + second) / nu2 * mid * sb2;
  if (lag == 0.0) cov += sq(b.sigma_ts_i) / nu2;
  return cov;
}

double var_xi(const NoiseBudget& b, double anchor_pair_gap) {
  require_positive(anchor_pair_gap, "anchor pair gap");
  const double tr2 = sq(b.tag_ratio());
  return 2.0 * tr2 / sq(b.anchor_rate * anchor_pair_gap) * sq(b.sigma_ts_i) +
         2.0 / sq(b.master_rate * anchor_pair_gap) * sq(b.sigma_ts) +
         tr2 / sq(b.rel_rate()) * var_beta(b);
}

double var_phi(const NoiseBudget& b, double t_i, double t_m) {
  const double gap = b.anchor_pair_gap;
  require_positive(gap, "anchor pair gap");
  const double tr2 = sq(b.tag_ratio());
  const double span = b.master_rate * (t_i - t_m) + b.residual();
  const double ve = var_epsilon(b, t_i);
  return tr2 * (ve + b.sigma2_master_term) +
         2.0 * tr2 / (b.master_rate * gap) * span * (ve - corr_epsilon(b, t_i, gap)) +
         sq(span) * var_xi(b, gap);
}

double var_lambda(const NoiseBudget& b, double t_i, double t_m) {
  const double gap = b.anchor_pair_gap;
  require_positive(gap, "anchor pair gap");
  const double span = b.master_rate * (t_i - t_m) + b.residual();
  return sq(b.c) * (2.0 * (1.0 + span / (b.master_rate * gap)) * sq(b.sigma_ts) + var_phi(b, t_i, t_m));
}

double var_lambda_master_rate(const NoiseBudget& b, double t_i, double t_m) {
  require_positive(b.master_pair_gap, "master pair gap");
  const double span = b.master_rate * (t_i - t_m) + b.residual();
  const double r = span / (b.master_rate * b.master_pair_gap);
  const double spread = sq(1.0 - r) + sq(r);
  const double tr2 = sq(b.tag_ratio());
  return sq(b.c) * (sq(b.sigma_ts) * (1.0 + spread) + tr2 * var_epsilon(b, t_i) +
                    tr2 * sq(b.sigma_ts_m) * spread);
}

VarianceReport report(const NoiseBudget& b) {
  b.validate();
  VarianceReport r;
  const double t_m = b.master_tx_time;
  const double t_i = b.anchor_tx_time();
  r.sigma2_beta = var_beta(b);
  r.sigma2_gamma = var_gamma(b);
  r.sigma2_gamma_delayed = var_gamma_delayed(b);
  r.sigma2_gamma_bar = var_gamma_bar(b);
  r.sigma2_epsilon = var_epsilon(b, t_i);
  r.corr_epsilon = corr_epsilon(b, t_i, b.anchor_pair_gap);
  r.sigma2_xi = var_xi(b, b.anchor_pair_gap);
  r.sigma2_phi = var_phi(b, t_i, t_m);
  r.sigma2_lambda = var_lambda(b, t_i, t_m);
  r.sigma2_lambda_master = var_lambda_master_rate(b, t_i, t_m);
  const std::pair<const char*, double> checks[] = {
      {"sigma2_beta", r.sigma2_beta},       {"sigma2_gamma", r.sigma2_gamma},
      {"sigma2_gamma_delayed", r.sigma2_gamma_delayed},
      {"sigma2_gamma_bar", r.sigma2_gamma_bar}, {"sigma2_epsilon", r.sigma2_epsilon},
      {"sigma2_xi", r.sigma2_xi},           {"sigma2_phi", r.sigma2_phi},
      {"sigma2_lambda", r.sigma2_lambda},   {"sigma2_lambda_master", r.sigma2_lambda_master},
  };
  for (const auto& [name, value] : checks) {
    if (value < 0.0 || !std::isfinite(value)) {
      r.diagnostics.push_back(std::string(name) + " = " + std::to_string(value) + " is negative or not finite");
    }
  }
  return r;
}

}  // namespace uwb

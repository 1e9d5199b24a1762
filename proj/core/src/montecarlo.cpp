#include "uwb/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "uwb/dtdoa.hpp"
#include "uwb/error.hpp"
#include "uwb/geometry.hpp"
#include "uwb/random.hpp"
#include "uwb/sync.hpp"

namespace uwb {
namespace {

constexpr std::array<std::string_view, kMcTargetCount> kTargetNames = {
    "gamma", "gamma-delayed", "gamma-bar", "epsilon", "epsilon-corr", "xi", "phi", "lambda"};

constexpr std::size_t idx(McTarget t) { return static_cast<std::size_t>(t); }

// Every estimate of one trial, in target order; Epsilon and EpsilonCorr are
// the conversions of the anchor's first and second frames.
using Estimates = std::array<long double, kMcTargetCount>;

Estimates run_chain(const McSetup& s, RandomStream& rng) {
  const Seconds tof_im = tof(s.master_pos, s.anchor_pos, s.budget.c);
  const Seconds tof_tm = tof(s.tag_pos, s.master_pos, s.budget.c);
  const Seconds tof_ti = tof(s.tag_pos, s.anchor_pos, s.budget.c);
  const Seconds t_m = s.master_tx_time;
  const Seconds t_i = t_m + static_cast<Seconds>(s.slot_offset);
  const Seconds gap = s.pair_gap;

  const SyncObservation obs = observe_sync(s.master, s.anchor, tof_im, 0, s.sync_gap, rng);
  const Rate rel_rate = estimate_rel_rate(obs);
  const Seconds first = estimate_rel_offset(obs, rel_rate);
  const Seconds delayed = estimate_rel_offset_delayed(obs, rel_rate);
  const SyncState state{rel_rate, average_rel_offset(first, delayed), 0};

  ReceivedFrame a1{1, PairIndex::First, 0, 0};
  ReceivedFrame a2{1, PairIndex::Second, 0, 0};
  ReceivedFrame m1{kMasterId, PairIndex::First, 0, 0};
  a1.tx_master_ts = to_master_timescale(read_measured(s.anchor, t_i, rng), state);
  a2.tx_master_ts = to_master_timescale(read_measured(s.anchor, t_i + gap, rng), state);
  m1.tx_master_ts = read_measured(s.master, t_m, rng);
  m1.rx_tag_ts = read_measured(s.tag, t_m + tof_tm, rng);
  a1.rx_tag_ts = read_measured(s.tag, t_i + tof_ti, rng);
  a2.rx_tag_ts = read_measured(s.tag, t_i + gap + tof_ti, rng);

  const Rate tag_rate = estimate_tag_rate(a1.rx_tag_ts, a2.rx_tag_ts, a1.tx_master_ts, a2.tx_master_ts);
  const Seconds g = protocol_interval(a1, m1, tag_rate);
  const Seconds lambda = static_cast<Seconds>(s.budget.c) * ((a1.rx_tag_ts - m1.rx_tag_ts) - g);
  return {first, delayed, state.rel_offset, a1.tx_master_ts, a2.tx_master_ts, tag_rate, g, lambda};
}

McSetup noiseless(const McSetup& s) {
  McSetup q = s;
  q.master = s.master.with_noise(NoiseSpec::none());
  q.anchor = s.anchor.with_noise(NoiseSpec::none());
  q.tag = s.tag.with_noise(NoiseSpec::none());
  return q;
}

ClockModel draw_clock(const McConfig& cfg, RandomStream& rng, const NoiseSpec& noise) {
  const double offset = rng.uniform(-cfg.offset_max, cfg.offset_max);
  const double rate = 1.0 + 1e-6 * rng.uniform(-cfg.rate_ppm_max, cfg.rate_ppm_max);
  return ClockModel(offset, rate, noise);
}

Point draw_point(const McConfig& cfg, RandomStream& rng) {
  const double x = rng.uniform(0, cfg.box);
  const double y = rng.uniform(0, cfg.box);
  return {x, y};
}

double pct(double theory, double mc) {
  if (mc == 0.0) return theory == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return 100.0 * std::abs(theory - mc) / std::abs(mc);
}

struct Moments {
  long double mean = 0;
  long double var = 0;
};

// Fixed left-to-right reduction in trial order.
Moments moments(std::span<const double> x) {
  Moments m;
  if (x.empty()) return m;
  long double sum = 0;
  for (double v : x) sum += v;
  m.mean = sum / static_cast<long double>(x.size());
  if (x.size() < 2) return m;
  long double ss = 0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.var = ss / static_cast<long double>(x.size() - 1);
  return m;
}

long double covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2) return 0;
  const Moments mx = moments(x);
  const Moments my = moments(y);
  long double s = 0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - mx.mean) * (y[k] - my.mean);
  return s / static_cast<long double>(x.size() - 1);
}

// Analytic spread of one target under `b`.
double analytic(McTarget t, const NoiseBudget& b) {
  const double t_m = b.master_tx_time;
  const double t_i = b.anchor_tx_time();
  switch (t) {
    case McTarget::Gamma: return std::sqrt(var_gamma(b));
    case McTarget::GammaDelayed: return std::sqrt(var_gamma_delayed(b));
    case McTarget::GammaBar: return std::sqrt(var_gamma_bar(b));
    case McTarget::Epsilon: return std::sqrt(var_epsilon(b, t_i));
    case McTarget::EpsilonCorr: return corr_epsilon(b, t_i, b.anchor_pair_gap);
    case McTarget::Xi: return std::sqrt(var_xi(b, b.anchor_pair_gap));
    case McTarget::Phi: return std::sqrt(var_phi(b, t_i, t_m));
    case McTarget::Lambda: return std::sqrt(var_lambda(b, t_i, t_m));
  }
  return 0;
}

std::string row_csv(const McAnchorResult& r) {
  std::ostringstream out;
  out << (r.anchor + 1) << ',' << format_sig(r.truth) << ',' << format_sig(r.empirical_mean) << ','
      << format_sig(r.standard_error) << ',' << format_sig(r.empirical_std) << ','
      << format_sig(r.analytic_std) << ',' << format_sig(r.analytic_std_literal) << ','
      << format_sig(r.rel_err_mean_pct) << ',' << format_sig(r.rel_err_std_pct) << '\n';
  return out.str();
}

}  // namespace

std::string_view to_string(McTarget target) { return kTargetNames[idx(target)]; }

std::optional<McTarget> parse_target(std::string_view name) {
  for (std::size_t k = 0; k < kMcTargetCount; ++k) {
    if (kTargetNames[k] == name) return static_cast<McTarget>(k);
  }
  return std::nullopt;
}

void McConfig::validate() const {
  if (trials < 100) throw Error(ErrorCode::InvalidArgument, "montecarlo needs trials >= 100");
  if (anchors < 1) throw Error(ErrorCode::InvalidArgument, "montecarlo needs anchors >= 1");
  if (!(half_width >= 0)) throw Error(ErrorCode::InvalidArgument, "noise half-width must be >= 0");
  if (!(interval_min > 0) || !(interval_max >= interval_min)) {
    throw Error(ErrorCode::InvalidArgument, "interval range must be positive and ordered");
  }
  if (!(offset_max >= 0) || !(rate_ppm_max >= 0) || !(cycle_delay_max >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "parameter bounds must be >= 0");
  }
  if (!(box > 2 * min_separation)) throw Error(ErrorCode::InvalidArgument, "box too small");
  if (!(c > 0)) throw Error(ErrorCode::InvalidArgument, "c must be > 0");
}

NoiseSpec McConfig::noise_spec() const {
  if (half_width == 0.0) return NoiseSpec::none();
  switch (noise) {
    case NoiseDistribution::Gaussian: return NoiseSpec::gaussian(half_width / 3.0);
    case NoiseDistribution::Uniform: return NoiseSpec::uniform(half_width);
    case NoiseDistribution::None: break;
  }
  return NoiseSpec::none();
}

void McConfig::describe(OutputHeader& h) const {
  h.set("trials", static_cast<double>(trials));
  h.set("anchors", static_cast<double>(anchors));
  h.set("noise", noise == NoiseDistribution::Uniform    ? "uniform"
                 : noise == NoiseDistribution::Gaussian ? "gaussian"
                                                        : "none");
  h.set("noise_half_width_s", half_width);
  h.set("noise_sigma_s", noise_spec().sigma());
  h.set("offset_range_s", "+-" + format_sig(offset_max));
  h.set("rate_range_ppm", "+-" + format_sig(rate_ppm_max));
  h.set("position_box_m", format_sig(box) + "x" + format_sig(box));
  h.set("interval_range_s", "[" + format_sig(interval_min) + "," + format_sig(interval_max) + "]");
  h.set("cycle_delay_max_s", cycle_delay_max);
  h.set("min_separation_m", min_separation);
  h.set("sync_epoch_s", 0.0);
  h.set("sync_gap", "slot offset");
  h.set("tag_rate_source", "anchor pair");
}

std::vector<McSetup> draw_setups(const McConfig& cfg, std::size_t& degenerate) {
  cfg.validate();
  const NoiseSpec noise = cfg.noise_spec();
  degenerate = 0;

  ClockModel master, tag;
  Point master_pos, tag_pos;
  for (std::uint64_t attempt = 0;; ++attempt) {
    RandomStream rng = RandomStream::derive(cfg.seed, {static_cast<std::uint64_t>(Stream::Layout), 0, attempt});
    master = draw_clock(cfg, rng, noise);
    tag = draw_clock(cfg, rng, noise);
    master_pos = draw_point(cfg, rng);
    tag_pos = draw_point(cfg, rng);
    if (distance(master_pos, tag_pos) >= cfg.min_separation) break;
    ++degenerate;
  }

  std::vector<McSetup> setups;
  setups.reserve(cfg.anchors);
  for (std::size_t i = 0; i < cfg.anchors; ++i) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      RandomStream rng =
          RandomStream::derive(cfg.seed, {static_cast<std::uint64_t>(Stream::Layout), i + 1, attempt});
      McSetup s;
      s.master = master;
      s.tag = tag;
      s.master_pos = master_pos;
      s.tag_pos = tag_pos;
      s.anchor = draw_clock(cfg, rng, noise);
      s.anchor_pos = draw_point(cfg, rng);
      s.slot_offset = rng.uniform(cfg.interval_min, cfg.interval_max);
      s.sync_gap = s.slot_offset;
      s.pair_gap = rng.uniform(cfg.interval_min, cfg.interval_max);
      s.master_tx_time = s.sync_gap + rng.uniform(0, cfg.cycle_delay_max);
      if (distance(s.anchor_pos, master_pos) < cfg.min_separation ||
          distance(s.anchor_pos, tag_pos) < cfg.min_separation) {
        ++degenerate;
        continue;
      }
      NoiseBudget& b = s.budget;
      b.sigma_ts_m = b.sigma_ts_i = b.sigma_ts = noise.sigma();
      b.master_offset = static_cast<double>(master.offset());
      b.master_rate = master.rate();
      b.anchor_rate = s.anchor.rate();
      b.tag_rate = tag.rate();
      b.sync_epoch = 0;
      b.sync_gap = s.sync_gap;
      b.slot_offset = s.slot_offset;
      b.anchor_pair_gap = s.pair_gap;
      b.master_pair_gap = s.pair_gap;
      b.master_tx_time = s.master_tx_time;
      b.tof_im = static_cast<double>(tof(master_pos, s.anchor_pos, cfg.c));
      b.c = cfg.c;
      b.sigma2_master_term = b.sigma_ts_m * b.sigma_ts_m;
      setups.push_back(s);
      break;
    }
  }
  return setups;
}

McBatch run_mc_all(const McConfig& cfg, std::size_t first_trial,
                   std::optional<std::size_t> trial_count) {
  McBatch batch;
  batch.config = cfg;
  batch.first_trial = first_trial;
  batch.trial_count = trial_count.value_or(cfg.trials);
  batch.setups = draw_setups(cfg, batch.degenerate_draws);
  const std::size_t n = batch.trial_count;

  for (std::size_t a = 0; a < batch.setups.size(); ++a) {
    const McSetup& s = batch.setups[a];
    RandomStream unused(0);
    const Estimates truth = run_chain(noiseless(s), unused);

    std::array<std::vector<double>, kMcTargetCount> err;
    for (auto& v : err) v.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      RandomStream rng = RandomStream::derive(
          cfg.seed, {static_cast<std::uint64_t>(Stream::Trial), a, first_trial + k});
      const Estimates est = run_chain(s, rng);
      for (std::size_t t = 0; t < kMcTargetCount; ++t) {
        err[t][k] = static_cast<double>(est[t] - truth[t]);
      }
    }

    NoiseBudget literal = s.budget;
    literal.model = VarianceModel::literal;
    for (std::size_t t = 0; t < kMcTargetCount; ++t) {
      const auto target = static_cast<McTarget>(t);
      const Moments m = moments(err[t]);
      McAnchorResult r;
      r.anchor = a;
      r.truth = static_cast<double>(truth[t]);
      r.empirical_mean = static_cast<double>(m.mean);
      r.standard_error = n > 0 ? static_cast<double>(std::sqrt(m.var / n)) : 0.0;
      r.analytic_std = analytic(target, s.budget);
      r.analytic_std_literal = analytic(target, literal);
      if (target == McTarget::EpsilonCorr) {
        r.empirical_std = static_cast<double>(covariance(err[idx(McTarget::Epsilon)], err[t]));
        r.rel_err_mean_pct = std::numeric_limits<double>::quiet_NaN();
      } else {
        r.empirical_std = static_cast<double>(std::sqrt(m.var));
        const long double estimate_mean = truth[t] + m.mean;
        r.rel_err_mean_pct =
            estimate_mean == 0 ? 0.0
                               : static_cast<double>(100.0L * std::abs(m.mean) / std::abs(estimate_mean));
      }
      r.rel_err_std_pct = pct(r.analytic_std, r.empirical_std);
      batch.results[t].push_back(r);
    }
    if (a == 0) batch.first_anchor_samples = std::move(err);
  }
  return batch;
}

McRun run_mc(const McConfig& cfg, McTarget target) {
  McBatch batch = run_mc_all(cfg);
  McRun run;
  run.target = target;
  run.degenerate_draws = batch.degenerate_draws;
  run.anchors = batch.results[idx(target)];
  run.first_anchor_samples = batch.first_anchor_samples[idx(target)];
  return run;
}

std::string mc_csv(std::span<const McAnchorResult> rows, const OutputHeader& header) {
  std::ostringstream out;
  header.write(out);
  out << "anchor,truth,empirical_mean,standard_error,empirical_std,analytic_std,"
         "analytic_std_literal,rel_err_mean_pct,rel_err_std_pct\n";
  for (const McAnchorResult& r : rows) out << row_csv(r);
  return out.str();
}

Figure emit_offset_errors(std::span<const McAnchorResult> gamma, std::span<const McAnchorResult> delayed,
                 std::span<const McAnchorResult> bar, const OutputHeader& header) {
  const std::size_t n = std::min({gamma.size(), delayed.size(), bar.size()});
  std::ostringstream out;
  header.write(out);
  out << "anchor,gamma_mu_pct,gamma_sigma_pct,gamma_delayed_mu_pct,gamma_delayed_sigma_pct,"
         "gamma_bar_mu_pct,gamma_bar_sigma_pct\n";
  std::vector<std::string> categories;
  std::vector<svg::BarSeries> series = {
      {"gamma mu%", {}}, {"gamma sigma%", {}},   {"gamma(+D) mu%", {}},
      {"gamma(+D) sigma%", {}}, {"gamma-bar mu%", {}}, {"gamma-bar sigma%", {}}};
  for (std::size_t k = 0; k < n; ++k) {
    const double v[6] = {gamma[k].rel_err_mean_pct, gamma[k].rel_err_std_pct,
                         delayed[k].rel_err_mean_pct, delayed[k].rel_err_std_pct,
                         bar[k].rel_err_mean_pct, bar[k].rel_err_std_pct};
    out << (gamma[k].anchor + 1);
    for (std::size_t j = 0; j < 6; ++j) {
      out << ',' << format_sig(v[j]);
      series[j].values.push_back(v[j]);
    }
    out << '\n';
    categories.push_back("a" + std::to_string(gamma[k].anchor + 1));
  }
  Figure fig;
  fig.csv = out.str();
  fig.svg = svg::bar_chart("Absolute relative error of the closed forms, offset estimators",
                           categories, series, "relative error [%]");
  return fig;
}

Figure emit_error_histograms(std::span<const double> gaussian_errors, double gaussian_sigma,
                 std::span<const double> uniform_errors, double uniform_sigma,
                 const OutputHeader& header, std::size_t bins) {
  const svg::HistogramPanel panels[2] = {
      {"gaussian noise", make_histogram(gaussian_errors, bins), gaussian_sigma,
       gaussian_errors.size()},
      {"uniform noise", make_histogram(uniform_errors, bins), uniform_sigma,
       uniform_errors.size()},
  };
  std::ostringstream out;
  header.write(out);
  out << "noise,bin_lo_m,bin_hi_m,count,reference_sigma_m\n";
  for (const auto& p : panels) {
    const std::string name = p.title.substr(0, p.title.find(' '));
    for (std::size_t k = 0; k < p.histogram.counts.size(); ++k) {
      out << name << ',' << format_sig(p.histogram.edges[k]) << ','
          << format_sig(p.histogram.edges[k + 1]) << ',' << p.histogram.counts[k] << ','
          << format_sig(p.reference_sigma) << '\n';
    }
  }
  Figure fig;
  fig.csv = out.str();
  fig.svg = svg::histograms("DTDoA error distribution, first anchor", panels);
  return fig;
}

}  // namespace uwb

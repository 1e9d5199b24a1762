// dtdoa: command-line front end of the DTDoA simulation library.
//
// Every stochastic subcommand takes an explicit --seed; outputs depend on
// nothing else, so repeated invocations are byte-identical.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uwb/error.hpp"
#include "uwb/io.hpp"
#include "uwb/montecarlo.hpp"
#include "uwb/scenario.hpp"
#include "uwb/solver.hpp"
#include "uwb/uncertainty.hpp"

namespace {

using namespace uwb;

struct Common {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool no_svg = false;
};

Scenario load(const Common& c) {
  if (c.scenario_path.empty()) return default_room(c.seed.value_or(1));
  return load_scenario(c.scenario_path, c.seed);
}

// Writes an artifact into --out, or the primary one to stdout without --out.
void emit(const Common& c, const std::string& name, const std::string& content, bool primary) {
  if (c.out_dir.empty()) {
    if (primary) std::cout << content;
    return;
  }
  write_text_file(std::filesystem::path(c.out_dir) / name, content);
}

void emit_svg(const Common& c, const std::string& name, const std::string& content) {
  if (!c.no_svg) emit(c, name, content, false);
}

void add_common(CLI::App* cmd, Common& c, bool scenario, bool seed_required) {
  if (scenario) {
    cmd->add_option("--scenario", c.scenario_path, "scenario JSON file (default: built-in room)");
  }
  auto* s = cmd->add_option("--seed", c.seed, "64-bit seed");
  if (seed_required) s->required();
  cmd->add_option("--out", c.out_dir, "output directory (default: primary CSV to stdout)");
  cmd->add_flag("--no-svg", c.no_svg, "skip SVG artifacts");
}

// ---- sync-demo ---------------------------------------------------------------

int sync_demo(const Common& c) {
  const Scenario s = load(c);
  const ProtocolSimulator sim(s);
  const SyncEpoch epoch = sync_epoch_at(0, s.sync);
  OutputHeader h = scenario_header(s, "sync-demo");
  h.set("sync_epoch_first_beacon_s", static_cast<double>(epoch.first_beacon));
  std::ostringstream out;
  h.write(out);
  out << "anchor,rel_rate_true,rel_rate_est,rel_offset_true_s,rel_offset_first_s,"
         "rel_offset_delayed_s,rel_offset_avg_s,residual_s,conversion_error_s\n";
  for (std::size_t i = 0; i < s.geometry.anchors.size(); ++i) {
    const ClockModel& m = s.clocks.master;
    const ClockModel& a = s.clocks.anchors[i];
    const SyncObservation obs = sim.observe(i, epoch);
    const Rate est = estimate_rel_rate(obs);
    const Rate truth = static_cast<Rate>(a.rate()) / m.rate();
    const Seconds first = estimate_rel_offset(obs, est);
    const Seconds delayed = estimate_rel_offset_delayed(obs, est);
    const SyncState state = synchronize(obs, s.sync.use_averaged_offset);
    const Seconds t = sim.schedule().tx_offset(static_cast<int>(i + 1), PairIndex::First);
    const Seconds conv = to_master_timescale(read_ideal(a, t), state) - read_ideal(m, t);
    out << (i + 1) << ',' << format_sig(truth, 18) << ',' << format_sig(est, 18) << ','
        << format_sig(a.offset() - truth * m.offset(), 18) << ',' << format_sig(first, 18) << ','
        << format_sig(delayed, 18) << ',' << format_sig(state.rel_offset, 18) << ','
        << format_sig(conversion_residual(a.rate(), truth, s.geometry.anchor_tof(i)), 18) << ','
        << format_sig(conv, 18) << '\n';
  }
  emit(c, "sync.csv", out.str(), true);
  return 0;
}

// ---- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string mode = "static";
  std::optional<std::size_t> repetitions;
  std::int64_t cycles = 3;
};

int simulate(const Common& c, const SimulateArgs& a) {
  const Scenario s = load(c);
  if (a.mode == "static") {
    const std::size_t reps = a.repetitions.value_or(s.repetitions);
    OutputHeader h = scenario_header(s, "simulate");
    h.set("mode", "static").set("repetitions", static_cast<double>(reps));
    const StaticResult r = run_static(s, reps);
    for (std::size_t p = 0; p < r.positions.size(); ++p) {
      h.set("position_" + std::to_string(p + 1) + "_failures",
            static_cast<double>(r.positions[p].failures));
    }
    const Figure hist = static_histograms(r, h);
    emit(c, "static_errors.csv", static_errors_csv(r, h), false);
    emit(c, "static_hist.csv", hist.csv, true);
    emit_svg(c, "static_hist.svg", hist.svg);
  } else if (a.mode == "walk") {
    OutputHeader h = scenario_header(s, "simulate");
    h.set("mode", "walk");
    const WalkResult r = run_walk(s);
    h.set("failures", static_cast<double>(r.failures));
    const Figure track = walk_track(r, s, h);
    emit(c, "walk_track.csv", track.csv, true);
    emit_svg(c, "walk_track.svg", track.svg);
  } else if (a.mode == "frames") {
    OutputHeader h = scenario_header(s, "simulate");
    h.set("mode", "frames").set("cycles", static_cast<double>(a.cycles));
    if (s.static_positions.empty()) {
      throw Error(ErrorCode::InvalidArgument, "frames mode needs a static position");
    }
    ProtocolSimulator sim(s);
    std::vector<FrameLogRow> rows;
    const TagState tag{s.static_positions.front(), {}, s.tag_clock};
    for (std::int64_t k = 0; k < a.cycles; ++k) {
      const auto tx = sim.broadcast(k);
      for (const ReceivedFrame& f : sim.receive(tx, tag, 0, k)) rows.push_back({k, f});
    }
    std::ostringstream out;
    h.write(out);
    write_frames_csv(out, rows);
    emit(c, "frames.csv", out.str(), true);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown mode '" + a.mode + "'");
  }
  return 0;
}

// ---- montecarlo --------------------------------------------------------------

struct McArgs {
  std::string target = "all";
  std::size_t trials = 10000;
  std::size_t anchors = 10;
  std::string noise = "gaussian";
};

NoiseDistribution parse_noise(const std::string& n) {
  if (n == "gaussian") return NoiseDistribution::Gaussian;
  if (n == "uniform") return NoiseDistribution::Uniform;
  throw Error(ErrorCode::InvalidArgument, "noise must be gaussian or uniform");
}

int montecarlo(const Common& c, const McArgs& a) {
  McConfig cfg;
  cfg.seed = *c.seed;
  cfg.trials = a.trials;
  cfg.anchors = a.anchors;
  cfg.noise = parse_noise(a.noise);
  const bool all = a.target == "all";
  const std::optional<McTarget> target = parse_target(a.target);
  if (!all && !target) throw Error(ErrorCode::InvalidArgument, "unknown target '" + a.target + "'");
  if (all && c.out_dir.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--target all writes several files and needs --out");
  }

  auto header = [&](const McConfig& mc, const std::string& what) {
    OutputHeader h;
    h.command = "montecarlo";
    h.seed = mc.seed;
    h.has_seed = true;
    h.set("target", what);
    mc.describe(h);
    return h;
  };

  const McBatch batch = run_mc_all(cfg);
  for (std::size_t t = 0; t < kMcTargetCount; ++t) {
    const auto tt = static_cast<McTarget>(t);
    if (!all && tt != *target) continue;
    OutputHeader h = header(cfg, std::string(to_string(tt)));
    h.set("degenerate_draws", static_cast<double>(batch.degenerate_draws));
    if (tt == McTarget::EpsilonCorr) h.set("spread_columns", "covariance s^2");
    emit(c, "mc_" + std::string(to_string(tt)) + ".csv", mc_csv(batch.of(tt), h), !all);
  }

  const bool offsets = all || *target == McTarget::Gamma || *target == McTarget::GammaDelayed ||
                       *target == McTarget::GammaBar;
  if (offsets) {
    const Figure f2 = emit_offset_errors(batch.of(McTarget::Gamma), batch.of(McTarget::GammaDelayed),
                                batch.of(McTarget::GammaBar), header(cfg, "gamma,gamma-delayed,gamma-bar"));
    emit(c, "offset_errors.csv", f2.csv, false);
    emit_svg(c, "offset_errors.svg", f2.svg);
  }
  if (all || *target == McTarget::Lambda) {
    McConfig other = cfg;
    other.noise = cfg.noise == NoiseDistribution::Gaussian ? NoiseDistribution::Uniform
                                                           : NoiseDistribution::Gaussian;
    const McBatch second = run_mc_all(other);
    const bool gaussian_first = cfg.noise == NoiseDistribution::Gaussian;
    const McBatch& g = gaussian_first ? batch : second;
    const McBatch& u = gaussian_first ? second : batch;
    OutputHeader h = header(cfg, "lambda, both noise families");
    h.set("histogram_anchor", "1");
    const Figure f3 = emit_error_histograms(g.samples(McTarget::Lambda), g.of(McTarget::Lambda)[0].analytic_std,
                                u.samples(McTarget::Lambda), u.of(McTarget::Lambda)[0].analytic_std, h);
    emit(c, "error_histograms.csv", f3.csv, false);
    emit_svg(c, "error_histograms.svg", f3.svg);
  }
  return 0;
}

// ---- report ------------------------------------------------------------------

int report_cmd(const Common& c, std::int64_t cycle, const std::string& model) {
  const Scenario s = load(c);
  const ProtocolSimulator sim(s);
  OutputHeader h = scenario_header(s, "report");
  h.set("cycle", static_cast<double>(cycle)).set("model", model);
  std::ostringstream out;
  h.write(out);
  out << "anchor,sigma2_beta,sigma2_gamma_s2,sigma2_gamma_delayed_s2,sigma2_gamma_bar_s2,"
         "sigma2_epsilon_s2,corr_epsilon_s2,sigma2_xi,sigma2_phi_s2,sigma2_lambda_m2,"
         "sigma2_lambda_master_m2\n";
  for (std::size_t i = 0; i < s.geometry.anchors.size(); ++i) {
    NoiseBudget b = sim.budget(i, cycle);
    if (model == "literal") b.model = VarianceModel::literal;
    else if (model != "first-order") throw Error(ErrorCode::InvalidArgument, "model must be first-order or literal");
    const VarianceReport r = report(b);
    for (const std::string& d : r.diagnostics) std::cerr << "warning: NEGATIVE_VARIANCE: anchor " << (i + 1) << ": " << d << '\n';
    out << (i + 1);
    for (double v : {r.sigma2_beta, r.sigma2_gamma, r.sigma2_gamma_delayed, r.sigma2_gamma_bar,
                     r.sigma2_epsilon, r.corr_epsilon, r.sigma2_xi, r.sigma2_phi, r.sigma2_lambda,
                     r.sigma2_lambda_master}) {
      out << ',' << format_sig(v);
    }
    out << '\n';
  }
  emit(c, "report.csv", out.str(), true);
  return 0;
}

// ---- solve -------------------------------------------------------------------

std::vector<DtdoaMeasurement> read_measurements(const std::string& path, std::size_t anchors) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigNotFound, "cannot open measurements '" + path + "'");
  std::vector<DtdoaMeasurement> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.empty() || cells[0] == "anchor") continue;
    try {
      if (cells.size() < 2) throw std::invalid_argument("need anchor,value_m");
      const long id = std::stol(cells[0]);
      if (id < 1 || static_cast<std::size_t>(id) > anchors) throw std::out_of_range("anchor id");
      DtdoaMeasurement m;
      m.anchor = static_cast<std::size_t>(id - 1);
      m.value = std::stod(cells[1]);
      if (cells.size() > 2) m.predicted_variance = std::stod(cells[2]);
      out.push_back(m);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ConfigParse,
                  path + ":" + std::to_string(lineno) + ": bad measurement row (" + e.what() + ")");
    }
  }
  return out;
}

int solve_cmd(const Common& c, const std::string& input, std::optional<std::vector<double>> guess,
              bool multi_start) {
  const Scenario s = load(c);
  const auto meas = read_measurements(input, s.geometry.anchors.size());
  SolverOptions opt = s.solver;
  opt.multi_start = opt.multi_start || multi_start;
  std::optional<Point> start;
  if (guess) start = Point{(*guess)[0], (*guess)[1]};
  const PositionFix fix = solve(meas, s.geometry, start, opt);
  OutputHeader h;
  h.command = "solve";
  h.set("measurements", static_cast<double>(meas.size()));
  h.set("geometry", s.name);
  std::ostringstream out;
  h.write(out);
  out << "x_m,y_m,residual_norm_m,iterations,pdop,cov_xx_m2,cov_xy_m2,cov_yy_m2,converged\n";
  out << format_sig(fix.position.x) << ',' << format_sig(fix.position.y) << ','
      << format_sig(fix.residual_norm) << ',' << fix.iterations << ',' << format_sig(fix.pdop) << ','
      << format_sig(fix.covariance(0, 0)) << ',' << format_sig(fix.covariance(0, 1)) << ','
      << format_sig(fix.covariance(1, 1)) << ',' << (fix.converged ? 1 : 0) << '\n';
  emit(c, "fix.csv", out.str(), true);
  return 0;
}

// ---- pdop-map ----------------------------------------------------------------

int pdop_cmd(const Common& c, double resolution, std::optional<std::vector<double>> bounds) {
  const Scenario s = load(c);
  Bounds b;
  if (bounds) {
    b = {(*bounds)[0], (*bounds)[1], (*bounds)[2], (*bounds)[3]};
  } else {
    b = {s.geometry.master.x, s.geometry.master.x, s.geometry.master.y, s.geometry.master.y};
    for (const Point& a : s.geometry.anchors) {
      b.x_min = std::min(b.x_min, a.x);
      b.x_max = std::max(b.x_max, a.x);
      b.y_min = std::min(b.y_min, a.y);
      b.y_max = std::max(b.y_max, a.y);
    }
  }
  const PdopMap map = pdop_map(s.geometry, b, resolution);
  OutputHeader h;
  h.command = "pdop-map";
  h.set("geometry", s.name).set("resolution_m", resolution);
  h.set("bounds_m", format_sig(b.x_min) + "," + format_sig(b.x_max) + "," + format_sig(b.y_min) +
                        "," + format_sig(b.y_max));
  std::size_t singular = 0;
  for (bool f : map.singular) singular += f ? 1 : 0;
  h.set("singular_cells", static_cast<double>(singular));
  std::ostringstream out;
  h.write(out);
  out << "x_m,y_m,pdop\n";
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      const Point p = map.center(ix, iy);
      out << format_sig(p.x) << ',' << format_sig(p.y) << ',' << format_sig(map.at(ix, iy)) << '\n';
    }
  }
  emit(c, "pdop_map.csv", out.str(), true);
  svg::Heatmap hm{map.x0, map.y0, map.dx, map.dy, map.nx, map.ny, map.values};
  std::vector<Point> nodes = s.geometry.anchors;
  nodes.insert(nodes.begin(), s.geometry.master);
  emit_svg(c, "pdop_map.svg", svg::heatmap("PDoP map", hm, nodes));
  return 0;
}

// ---- scalability -------------------------------------------------------------

int scalability_cmd(const Common& c, const std::vector<std::size_t>& tags, std::size_t cycles) {
  const Scenario s = load(c);
  OutputHeader h = scenario_header(s, "scalability");
  h.set("cycles", static_cast<double>(cycles));
  const auto rows = run_scalability(s, tags, cycles);
  emit(c, "scalability.csv", scalability_csv(rows, h), true);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DTDoA UWB localization: protocol simulation, uncertainty analysis and solving"};
  app.set_version_flag("--version", std::string(UWB_DTDOA_VERSION));
  app.require_subcommand(1);

  Common common;

  auto* sync_cmd = app.add_subcommand("sync-demo", "estimate anchor-to-master sync parameters once");
  add_common(sync_cmd, common, true, true);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "run a scenario (static histograms, walk, frame log)");
  add_common(sim_cmd, common, true, true);
  sim_cmd->add_option("--mode", sim_args.mode, "static | walk | frames")
      ->check(CLI::IsMember({"static", "walk", "frames"}));
  sim_cmd->add_option("--repetitions", sim_args.repetitions, "cycles per static position");
  sim_cmd->add_option("--cycles", sim_args.cycles, "cycles logged in frames mode")
      ->check(CLI::PositiveNumber);

  McArgs mc_args;
  auto* mc_cmd = app.add_subcommand("montecarlo", "closed forms vs randomized trials");
  add_common(mc_cmd, common, false, true);
  mc_cmd->add_option("--target", mc_args.target,
                     "gamma | gamma-delayed | gamma-bar | epsilon | epsilon-corr | xi | phi | lambda | all");
  mc_cmd->add_option("--trials", mc_args.trials, "trials per anchor (>= 100)");
  mc_cmd->add_option("--anchors", mc_args.anchors, "random anchors");
  mc_cmd->add_option("--noise", mc_args.noise, "gaussian | uniform")
      ->check(CLI::IsMember({"gaussian", "uniform"}));

  std::int64_t report_cycle = 0;
  std::string report_model = "first-order";
  auto* rep_cmd = app.add_subcommand("report", "closed-form variances per anchor");
  add_common(rep_cmd, common, true, false);
  rep_cmd->add_option("--cycle", report_cycle, "cycle index the evaluation times refer to");
  rep_cmd->add_option("--model", report_model, "first-order | literal");

  std::string solve_input;
  std::optional<std::vector<double>> solve_guess;
  bool multi_start = false;
  auto* solve_sub = app.add_subcommand("solve", "position fix from a measurement CSV (anchor,value_m[,variance_m2])");
  add_common(solve_sub, common, true, false);
  solve_sub->add_option("--input", solve_input, "measurement CSV")->required();
  solve_sub->add_option("--initial", solve_guess, "initial guess x y")->expected(2);
  solve_sub->add_flag("--multi-start", multi_start, "centroid plus four perturbed starts");

  double resolution = 0.1;
  std::optional<std::vector<double>> bounds;
  auto* pdop_sub = app.add_subcommand("pdop-map", "PDoP over a rectangle");
  add_common(pdop_sub, common, true, false);
  pdop_sub->add_option("--resolution", resolution, "cell size, m");
  pdop_sub->add_option("--bounds", bounds, "x_min x_max y_min y_max (default: node bounding box)")
      ->expected(4);

  std::vector<std::size_t> tag_counts{1, 10, 1000};
  std::size_t cycles = 1;
  auto* scal_cmd = app.add_subcommand("scalability", "update rate for growing tag counts");
  add_common(scal_cmd, common, true, true);
  scal_cmd->add_option("--tags", tag_counts, "tag counts")->delimiter(',');
  scal_cmd->add_option("--cycles", cycles, "broadcast cycles per count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: USAGE: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*sync_cmd) return sync_demo(common);
    if (*sim_cmd) return simulate(common, sim_args);
    if (*mc_cmd) return montecarlo(common, mc_args);
    if (*rep_cmd) return report_cmd(common, report_cycle, report_model);
    if (*solve_sub) return solve_cmd(common, solve_input, solve_guess, multi_start);
    if (*pdop_sub) return pdop_cmd(common, resolution, bounds);
    if (*scal_cmd) return scalability_cmd(common, tag_counts, cycles);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: INTERNAL: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

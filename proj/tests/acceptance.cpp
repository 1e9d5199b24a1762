// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and runtime ceilings are fixed here, not configurable.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "uwb/dtdoa.hpp"
#include "uwb/error.hpp"
#include "uwb/montecarlo.hpp"
#include "uwb/random.hpp"
#include "uwb/scenario.hpp"
#include "uwb/solver.hpp"
#include "uwb/sync.hpp"

using namespace uwb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0 || dt < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s [%d] %s: %s; %.2f s%s\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt,
              limit_s > 0 ? fmt(" (limit %.0f s)", limit_s).c_str() : "");
  std::fflush(stdout);
}

// ---- 1 ---------------------------------------------------------------------

struct IdentityRun {
  double worst = 0;
  std::size_t checked = 0;
};

// `span` bounds the sync epoch, the beacon spacing and the delay before the
// cycle, so absolute timestamps stay below ~3 span plus the clock offsets.
IdentityRun protocol_identity_at(double span) {
  RandomStream rng(20240601);
  double worst = 0;
  std::size_t checked = 0;
  const auto random_clock = [&] {
    return ClockModel(rng.uniform(-1e-3, 1e-3), 1 + rng.uniform(-10e-6, 10e-6));
  };
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform(0, 6));
    NetworkGeometry g;
    g.master = {rng.uniform(0, 20), rng.uniform(0, 20)};
    const auto far_point = [&](const std::vector<Point>& taken) {
      for (;;) {
        const Point p{rng.uniform(0, 20), rng.uniform(0, 20)};
        bool ok = distance(p, g.master) > 1;
        for (const Point& q : taken) ok = ok && distance(p, q) > 1;
        if (ok) return p;
      }
    };
    while (g.anchors.size() < n) g.anchors.push_back(far_point(g.anchors));
    const Point tag_pos = far_point(g.anchors);
    NetworkClocks clocks{random_clock(), {}};
    for (std::size_t i = 0; i < n; ++i) clocks.anchors.push_back(random_clock());
    const TagState tag{tag_pos, {0, 0}, random_clock()};

    // noiseless two-beacon sync observed through the clocks
    const Seconds first = rng.uniform(0, span);
    const Seconds gap = rng.uniform(1e-3, span);
    std::vector<SyncState> syncs;
    for (std::size_t i = 0; i < n; ++i) {
      const Seconds tof_im = g.anchor_tof(i);
      const SyncObservation obs{read_ideal(clocks.master, first), read_ideal(clocks.master, first + gap),
                                read_ideal(clocks.anchors[i], first + tof_im),
                                read_ideal(clocks.anchors[i], first + gap + tof_im), tof_im};
      syncs.push_back(synchronize(obs, rng.uniform(0, 1) < 0.5));
    }
    const BroadcastSchedule s = BroadcastSchedule::make_default(n);
    const Seconds cycle_start = first + gap + rng.uniform(0, span);
    const auto frames = simulate_cycle(g, clocks, tag, s, syncs, cycle_start, rng);

    for (TagRateSource src : {TagRateSource::MasterPair, TagRateSource::PerAnchor}) {
      const auto meas = measure_cycle(frames, n, g.c, src);
      for (const DtdoaMeasurement& m : meas) {
        // nu (rho_i - rho_m) - c * nu_tag/nu_m * e,  e = (1 - nu_i) nu_m / nu_i * tof_im
        const long double nu = tag.clock.rate();
        const long double nu_m = clocks.master.rate();
        const long double nu_i = clocks.anchors[m.anchor].rate();
        const long double rho_i = std::hypot(tag_pos.x - g.anchors[m.anchor].x, tag_pos.y - g.anchors[m.anchor].y);
        const long double rho_m = std::hypot(tag_pos.x - g.master.x, tag_pos.y - g.master.y);
        const long double d_im = std::hypot(g.master.x - g.anchors[m.anchor].x, g.master.y - g.anchors[m.anchor].y);
        const long double e = (1 - nu_i) * nu_m / nu_i * (d_im / g.c);
        const long double oracle = nu * (rho_i - rho_m) - g.c * (nu / nu_m) * e;
        worst = std::max(worst, static_cast<double>(std::fabs(m.value - oracle)));
        ++checked;
      }
    }
  }
  return {worst, checked};
}

Outcome protocol_identity() {
  // ms-scale sync and cycle timing, as in the Monte Carlo draws
  const IdentityRun ms = protocol_identity_at(1e-2);
  // info only: at second-scale timestamps the long double rounding of the
  // stamps, amplified by slot offset / pair gap, approaches the tolerance
  const IdentityRun s = protocol_identity_at(1.0);
  return {ms.worst < 1e-9,
          fmt("%zu measurements over 500 configs, max |dtdoa - oracle| = %.3g m (tol 1e-9); "
              "info: same draws with second-scale timing %.3g m",
              ms.checked, ms.worst, s.worst)};
}

// ---- 2, 3 ------------------------------------------------------------------

struct McRuns {
  McBatch gaussian, uniform;
};

const McRuns& mc_runs() {
  static const McRuns runs = [] {
    McConfig cfg;  // 10 anchors, 10000 trials, seed 42
    McRuns r{run_mc_all(cfg), {}};
    cfg.noise = NoiseDistribution::Uniform;
    r.uniform = run_mc_all(cfg);
    return r;
  }();
  return runs;
}

Outcome mc_vs_analytic() {
  const McRuns& r = mc_runs();
  struct Limit {
    McTarget target;
    double pct;
    const McBatch* batch;
  };
  const Limit limits[] = {
      {McTarget::Gamma, 5, &r.gaussian},      {McTarget::GammaDelayed, 5, &r.gaussian},
      {McTarget::GammaBar, 5, &r.gaussian},   {McTarget::Xi, 5, &r.gaussian},
      {McTarget::EpsilonCorr, 10, &r.gaussian}, {McTarget::Phi, 10, &r.gaussian},
      {McTarget::Lambda, 10, &r.gaussian},    {McTarget::Lambda, 20, &r.uniform},
  };
  bool ok = true;
  std::string detail;
  for (const Limit& l : limits) {
    double worst = 0;
    for (const McAnchorResult& a : l.batch->of(l.target)) worst = std::max(worst, a.rel_err_std_pct);
    const bool pass = worst < l.pct;
    ok = ok && pass;
    detail += fmt("%s%s%s %.2f%%/%.0f%%", detail.empty() ? "" : ", ", std::string(to_string(l.target)).c_str(),
                  l.batch == &r.uniform ? "(uniform)" : "", worst, l.pct);
    if (!pass) detail += " OVER";
  }
  return {ok, "worst sigma rel. error per target: " + detail};
}

Outcome zero_mean() {
  const McRuns& r = mc_runs();
  double worst = 0;
  std::string where;
  std::size_t n = 0;
  for (const McBatch* b : {&r.gaussian, &r.uniform}) {
    for (std::size_t t = 0; t < kMcTargetCount; ++t) {
      for (const McAnchorResult& a : b->results[t]) {
        const double z = std::abs(a.empirical_mean) / a.standard_error;
        ++n;
        if (!(z <= worst)) {
          worst = z;
          where = fmt("%s anchor %zu %s", std::string(to_string(static_cast<McTarget>(t))).c_str(), a.anchor + 1,
                      b == &r.uniform ? "uniform" : "gaussian");
        }
      }
    }
  }
  return {worst < 3, fmt("%zu means, max |mean|/SE = %.2f at %s (limit 3)", n, worst, where.c_str())};
}

// ---- 4 ---------------------------------------------------------------------

Outcome solver_round_trip() {
  RandomStream rng(777);
  double worst = 0;
  std::size_t accepted = 0, guarded = 0;
  while (accepted < 200) {
    const std::size_t n = 4 + static_cast<std::size_t>(rng.uniform(0, 5));
    NetworkGeometry g;
    g.master = {rng.uniform(0, 20), rng.uniform(0, 20)};
    for (std::size_t i = 0; i < n; ++i) g.anchors.push_back({rng.uniform(0, 20), rng.uniform(0, 20)});
    std::vector<double> w(n + 1);
    double sum = 0;
    for (double& v : w) sum += (v = rng.uniform(0.05, 1));
    Point p = (w[0] / sum) * g.master;
    for (std::size_t i = 0; i < n; ++i) p = p + (w[i + 1] / sum) * g.anchors[i];
    double dop = INFINITY;
    try {
      g.validate();
      dop = pdop(g, p);
    } catch (const Error&) {
    }
    if (!(dop < 100)) {
      ++guarded;
      continue;
    }
    std::vector<DtdoaMeasurement> meas;
    for (std::size_t i = 0; i < n; ++i) {
      meas.push_back({i, distance(p, g.anchors[i]) - distance(p, g.master)});
    }
    SolverOptions opt;
    opt.multi_start = true;
    worst = std::max(worst, distance(solve(meas, g, std::nullopt, opt).position, p));
    ++accepted;
  }
  return {worst < 1e-8,
          fmt("200 geometries (%zu redrawn by PDoP < 100 guard), max error %.3g m (tol 1e-8)", guarded, worst)};
}

// ---- 5 ---------------------------------------------------------------------

Outcome static_precision() {
  const Scenario s = default_room(1);
  const StaticResult r = run_static(s, 30000);
  double worst = 0;
  std::size_t fails = 0, fixes = 0;
  for (const auto& p : r.positions) {
    fails += p.failures;
    fixes += p.errors.size();
    for (const Point& e : p.errors) worst = std::max(worst, e.norm());
  }
  return {worst < 0.2 && fails == 0 && fixes == 60000,
          fmt("%zu fixes, %zu solver failures, max error %.4f m (limit 0.20)", fixes, fails, worst)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome update_rate() {
  const std::size_t counts[] = {1, 10, 1000};
  const auto rows = run_scalability(default_room(1), counts);
  bool identical = true;
  for (const ScalabilityRow& r : rows) {
    identical = identical && std::memcmp(&r.cycle_duration, &rows[0].cycle_duration, sizeof(double)) == 0;
    identical = identical && r.fixes == r.tags;
  }
  const double hz = rows[0].fixes_per_second_per_tag;
  return {identical && std::abs(hz - 67) < 1,
          fmt("%.3f fixes/s per tag, cycle %.6g s, bit-identical for 1/10/1000 tags: %s", hz, rows[0].cycle_duration,
              identical ? "yes" : "no")};
}

// ---- 7 ---------------------------------------------------------------------

Outcome pdop_properties() {
  RandomStream rng(99);
  double worst_rigid = 0;
  int tried = 0;
  while (tried < 200) {
    NetworkGeometry g;
    g.master = {rng.uniform(0, 20), rng.uniform(0, 20)};
    for (int i = 0; i < 5; ++i) g.anchors.push_back({rng.uniform(0, 20), rng.uniform(0, 20)});
    const Point q{rng.uniform(0, 20), rng.uniform(0, 20)};
    double before = INFINITY;
    try {
      before = pdop(g, q);
    } catch (const Error&) {
    }
    if (!(before < 100)) continue;
    const double a = rng.uniform(0, 6.283185307179586);
    const Point shift{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    const auto move = [&](Point p) {
      return Point{std::cos(a) * p.x - std::sin(a) * p.y + shift.x, std::sin(a) * p.x + std::cos(a) * p.y + shift.y};
    };
    NetworkGeometry moved{move(g.master), {}};
    for (const Point& p : g.anchors) moved.anchors.push_back(move(p));
    worst_rigid = std::max(worst_rigid, std::abs(pdop(moved, move(q)) - before));
    ++tried;
  }

  // master at a corner: the diagonal through it maps the square onto itself
  const NetworkGeometry square{{0, 0}, {{10, 0}, {10, 10}, {0, 10}}};
  const PdopMap m = pdop_map(square, {0, 10, 0, 10}, 0.1);
  double worst_mirror = 0, rot90 = 0;
  for (std::size_t iy = 0; iy < m.ny; ++iy) {
    for (std::size_t ix = 0; ix < m.nx; ++ix) {
      const double v = m.at(ix, iy);
      if (std::isnan(v)) continue;
      worst_mirror = std::max(worst_mirror, std::abs(v - m.at(iy, ix)));
      const double r = m.at(m.nx - 1 - iy, ix);
      if (!std::isnan(r)) rot90 = std::max(rot90, std::abs(v - r));
    }
  }

  bool degenerate = false;
  try {
    pdop(NetworkGeometry{{0, 0}, {{5, 0}, {10, 0}, {15, 0}}}, {7, 0});
  } catch (const Error& e) {
    degenerate = e.code() == ErrorCode::Degenerate;
  }
  return {worst_rigid < 1e-9 && worst_mirror < 1e-9 && degenerate,
          fmt("rigid motion max diff %.3g (200 geometries), square map %zux%zu diagonal-mirror max diff %.3g, "
              "collinear flagged: %s; info: 90-degree rotation diff %.3g (master changes role)",
              worst_rigid, m.nx, m.ny, worst_mirror, degenerate ? "yes" : "no", rot90)};
}

// ---- 8 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism(const std::string& cli, const fs::path& work) {
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sync-demo", "sync-demo --seed 11"},
      {"static", "simulate --mode static --repetitions 300 --seed 11"},
      {"walk", "simulate --mode walk --seed 11"},
      {"frames", "simulate --mode frames --cycles 20 --seed 11"},
      {"montecarlo", "montecarlo --trials 500 --anchors 4 --seed 11"},
      {"scalability", "scalability --tags 1,10,50 --cycles 2 --seed 11"},
  };
  std::size_t files = 0;
  std::string bad;
  for (const auto& [name, args] : commands) {
    for (const char* run : {"a", "b"}) {
      const fs::path dir = work / run / name;
      fs::remove_all(dir);
      const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + dir.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
    }
    const fs::path a = work / "a" / name, b = work / "b" / name;
    std::size_t here = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path other = b / entry.path().filename();
      ++here;
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) bad += " " + name + "/" + entry.path().filename().string();
    }
    std::size_t there = std::distance(fs::directory_iterator(b), fs::directory_iterator{});
    if (here == 0 || here != there) bad += " " + name + "(file set)";
    files += here;
  }
  return {bad.empty(), bad.empty() ? fmt("%zu output files from %zu subcommand runs byte-identical across two executions",
                                         files, commands.size())
                                   : "differences:" + bad};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  fs::path work = fs::temp_directory_path() / "uwb_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--cli") == 0) cli = argv[i + 1];
    if (std::strcmp(argv[i], "--work") == 0) work = argv[i + 1];
  }

  run(1, "zero-noise protocol identity", 10, protocol_identity);
  run(2, "Monte Carlo vs closed forms", 120, mc_vs_analytic);
  run(3, "zero-mean uncertainties", 0, zero_mean);
  run(4, "noiseless solver round trip", 5, solver_round_trip);
  run(5, "static-tag precision", 300, static_precision);
  run(6, "update rate", 10, update_rate);
  run(7, "PDoP properties", 10, pdop_properties);
  if (cli.empty()) {
    ++failures;
    std::printf("FAIL [8] CLI determinism: no --cli executable given\n");
  } else {
    run(8, "CLI determinism", 0, [&] { return cli_determinism(cli, work); });
  }
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}

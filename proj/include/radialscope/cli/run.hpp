#pragma once

// Subcommand orchestration. Each section returns its report and a pass flag; execute() writes
// the reports, then maps the outcome to an exit code:
//   0 all enabled verifications pass, 1 invalid input, 2 verification failure, 3 numeric failure.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "radialscope/cli/config.hpp"
#include "radialscope/cli/report.hpp"
#include "radialscope/commutant.hpp"
#include "radialscope/dynamics.hpp"
#include "radialscope/geometry.hpp"
#include "radialscope/probe.hpp"
#include "radialscope/threshold.hpp"

namespace radialscope {

struct ModelSetup {
  OperatorSpec op;
  RadialChart chart;
  std::vector<double> q;
};

inline ModelSetup make_model(const RunConfig& cfg) {
  ModelSetup m;
  m.op.chart = cfg.chart();
  m.op.order = cfg.op.order;
  m.op.terms = {ComplexSym(parse(cfg.op.principal, m.op.chart)),
                ComplexSym(parse(cfg.op.lower_re, m.op.chart), parse(cfg.op.lower_im, m.op.chart))};
  m.op.density = parse(cfg.op.density, m.op.chart);
  m.chart = build_normal_coordinates(m.op.principal(), {m.op.chart, cfg.lagrangian.branch});
  m.q = cfg.lagrangian.q;
  return m;
}

struct Section {
  Json report = Json::object();
  bool passed = true;
  std::vector<std::string> failures;

  void fail(std::string why) {
    passed = false;
    failures.push_back(std::move(why));
  }

  void close() {
    report["verified"] = passed;
    report["failures"] = failures;
  }
};

namespace detail {

inline Json threshold_json(const ThresholdReport& th) {
  Json j = {{"s0", th.s0},
            {"s1_lower_bound", th.s1_lower_bound},
            {"homogeneous", th.homogeneous},
            {"f_at_q", th.f_at_q},
            {"subprincipal", th.subprincipal.to_string()}};
  if (!th.sweep.empty()) {
    Json rows = Json::array();
    for (const auto& e : th.sweep) {
      rows.push_back({{"radius", e.radius}, {"zeta0", e.zeta0}, {"inf_f", e.inf_f}, {"sup_f", e.sup_f}});
    }
    j["sweep"] = rows;
    j["s0_sweep"] = th.s0_sweep;
    j["s1_sweep"] = th.s1_sweep;
  }
  return j;
}

inline double relative_gap(double measured, double expected) {
  return std::fabs(measured - expected) / std::max(std::fabs(expected), 1e-300);
}

inline void append_path(ColumnWriter& out, std::size_t start, const char* direction, const Trajectory& traj) {
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    std::vector<double> cells = {static_cast<double>(start), traj.t[i]};
    cells.insert(cells.end(), traj.states[i].begin(), traj.states[i].end());
    cells.push_back(traj.monitor[i]);
    out.row_values(cells, direction);
  }
}

inline double max_monitor(const Trajectory& traj) {
  double m = 0.0;
  for (double v : traj.monitor) m = std::max(m, v);
  return m;
}

/// Slope of log x against t where floor < |z - root| <= radius (one-dimensional base).
inline std::optional<RateEstimate> fiber_rate(const Trajectory& traj, double root, double radius = 0.05,
                                              double floor = 1e-9) {
  std::vector<double> ts, ls;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double d = std::fabs(traj.states[i][0] - root);
    const double x = traj.states[i].back();
    if (d > floor && d <= radius && x > 0.0) {
      ts.push_back(traj.t[i]);
      ls.push_back(std::log(x));
    }
  }
  if (ts.size() < 5) return std::nullopt;
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i] / n;
    ml += ls[i] / n;
  }
  double stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    stl += (ts[i] - mt) * (ls[i] - ml);
  }
  RateEstimate est;
  est.rate = stl / stt;
  est.samples = ts.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ls[i] - (ml + est.rate * (ts[i] - mt));
    ss += r * r;
  }
  est.residual = std::sqrt(ss / n);
  return est;
}

inline Json rate_json(const RateEstimate& r, double lambda0) {
  return {{"rate", r.rate},
          {"residual", r.residual},
          {"samples", r.samples},
          {"relative_error", relative_gap(r.rate, lambda0)}};
}

}  // namespace detail

inline Section analyze_section(const ModelSetup& m, const RunConfig& cfg, std::uint64_t seed) {
  Section s;
  const auto cls = sink_source_classify(m.chart, m.q);
  s.report["radial"] = {{"kind", to_string(cls.kind)}, {"lambda0", cls.lambda0}, {"q", m.q}};

  EigenOptions eo;
  eo.tol = cfg.analyze.eigen_tolerance;
  eo.samples = cfg.analyze.eigen_samples;
  eo.seed = seed;
  const auto eig = verify_eigen_relations(m.chart, eo);
  Json relations = Json::array();
  for (const auto& r : eig.relations) {
    relations.push_back({{"name", r.name}, {"max_value", r.max_value}, {"max_derivative", r.max_derivative}});
  }
  s.report["eigen_relations"] = {{"passed", eig.passed},     {"max_residual", eig.max_residual},
                                 {"tolerance", eo.tol},      {"relations", relations},
                                 {"samples", eo.samples},    {"first_violation", eig.first_violation},
                                 {"witness", eig.witness}};
  if (!eig.passed) s.fail("eigen relation " + eig.first_violation + " exceeds tolerance");

  s.report["thresholds"] = detail::threshold_json(compute_thresholds(m.op, m.chart, m.q));

  InvarianceOptions io;
  io.zeta_changes = cfg.analyze.zeta_changes;
  io.density_changes = cfg.analyze.density_changes;
  io.tol = cfg.analyze.invariance_tolerance;
  io.seed = seed;
  const auto inv = invariance_check(m.op, m.chart, m.q, io);
  Json cases = Json::array();
  for (const auto& c : inv.cases) {
    cases.push_back({{"kind", c.kind},
                     {"change", c.change},
                     {"s0", c.s0},
                     {"delta", c.delta},
                     {"tolerance", c.tolerance},
                     {"same_classification", c.same_classification},
                     {"passed", c.passed}});
    if (!c.passed) s.fail("invariance case failed: " + c.change);
  }
  s.report["invariance"] = {{"passed", inv.passed}, {"s0", inv.s0}, {"cases", cases}};
  s.close();
  return s;
}

inline Section flow_section(const ModelSetup& m, const RunConfig& cfg, std::uint64_t seed, ColumnWriter& paths) {
  Section s;
  const auto cls = sink_source_classify(m.chart, m.q);
  const double lambda0 = cls.lambda0;
  const std::size_t k = m.chart.alpha.size();
  const SymExpr p = m.chart.conic.to_canonical(m.chart.principal);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(0.3, 1.0), coin(0.0, 1.0);
  auto random_sign = [&] { return coin(rng) < 0.5 ? -1.0 : 1.0; };

  double monitor = 0.0;
  std::size_t rates = 0, members = 0;
  Json starts = Json::array();
  if (k > 0) {
    const NormalCoordinates normal(m.chart);
    auto rep = m.chart.representative(m.q);
    rep.back() = 0.0;
    const auto ab = normal(rep);
    const std::vector<double> beta_q(ab.begin() + static_cast<std::ptrdiff_t>(k), ab.end());
    GammaConfig gc;
    gc.max_time = cfg.flow.max_time;
    for (std::size_t i = 0; i < cfg.flow.starts; ++i) {
      std::vector<double> x0(2 * k);
      for (std::size_t j = 0; j < k; ++j) x0[j] = random_sign() * magnitude(rng) * cfg.flow.alpha_radius;
      for (std::size_t j = 0; j < k; ++j) {
        // Odd starts leave the stable fiber through q.
        x0[k + j] = beta_q[j] + (i % 2 ? random_sign() * magnitude(rng) * cfg.flow.beta_offset : 0.0);
      }
      const auto g = gamma_membership(m.chart, m.q, x0, gc);
      monitor = std::max({monitor, detail::max_monitor(g.forward_path), detail::max_monitor(g.backward_path)});
      detail::append_path(paths, i, "forward", g.forward_path);
      detail::append_path(paths, i, "backward", g.backward_path);
      Json entry = {{"index", i},
                    {"alpha", std::vector<double>(x0.begin(), x0.begin() + static_cast<std::ptrdiff_t>(k))},
                    {"beta", std::vector<double>(x0.begin() + static_cast<std::ptrdiff_t>(k), x0.end())},
                    {"status", to_string(g.status)},
                    {"forward", to_string(g.forward)},
                    {"backward", to_string(g.backward)},
                    {"closest_distance", g.closest_distance}};
      if (g.status == GammaStatus::member) {
        ++members;
        entry["direction"] = g.direction;
        entry["entry_time"] = g.entry_time;
        try {
          const auto r = linearization_rate(g.direction == "forward" ? g.forward_path : g.backward_path, m.chart,
                                            0.05, 5, 1e-9);
          entry["rate"] = detail::rate_json(r, lambda0);
          ++rates;
          if (detail::relative_gap(r.rate, lambda0) > cfg.flow.rate_tolerance) {
            s.fail("start " + std::to_string(i) + ": rate " + std::to_string(r.rate) + " misses lambda0");
          }
        } catch (const PreconditionError& e) {
          entry["rate_error"] = e.what();
        }
      }
      starts.push_back(entry);
    }
  } else {
    const ConicChart& cc = m.chart.conic;
    FlowConfig fc;
    fc.sample_interval = 0.05;
    fc.domain_radius = 10.0;
    for (std::size_t i = 0; i < cfg.flow.starts; ++i) {
      std::vector<double> start = {0.0, 1.0};
      const double root = evaluate(m.chart.root, cc.coordinates(), start);
      start[0] = root + random_sign() * magnitude(rng) * cfg.flow.alpha_radius;
      const auto fwd = integrate_rescaled(p, m.chart.order, cc, start, 0.0, cfg.flow.max_time, fc);
      const auto bwd = integrate_rescaled(p, m.chart.order, cc, start, 0.0, -cfg.flow.max_time, fc);
      monitor = std::max({monitor, detail::max_monitor(fwd), detail::max_monitor(bwd)});
      detail::append_path(paths, i, "forward", fwd);
      detail::append_path(paths, i, "backward", bwd);
      const double d0 = std::fabs(start[0] - root);
      const bool forward_in = std::fabs(fwd.states.back()[0] - root) < d0;
      const bool backward_in = std::fabs(bwd.states.back()[0] - root) < d0;
      Json entry = {{"index", i}, {"z", start[0]}};
      entry["converges"] = forward_in ? "forward" : (backward_in ? "backward" : "neither");
      if (forward_in || backward_in) {
        ++members;
        if (auto r = detail::fiber_rate(forward_in ? fwd : bwd, root)) {
          entry["rate"] = detail::rate_json(*r, lambda0);
          ++rates;
          if (detail::relative_gap(r->rate, lambda0) > cfg.flow.rate_tolerance) {
            s.fail("start " + std::to_string(i) + ": fiber rate " + std::to_string(r->rate) + " misses lambda0");
          }
        } else {
          entry["rate_error"] = "trajectory tail inside the linearization radius is too short";
        }
      }
      starts.push_back(entry);
    }
  }
  if (monitor > cfg.flow.monitor_tolerance) s.fail("W x = lambda0 x residual " + std::to_string(monitor));
  if (rates == 0) s.fail("no trajectory reached the radial set closely enough to measure a rate");
  s.report["lambda0"] = lambda0;
  s.report["kind"] = to_string(cls.kind);
  s.report["starts"] = starts;
  s.report["converging_starts"] = members;
  s.report["rates_measured"] = rates;
  s.report["monitor_max"] = monitor;
  s.report["monitor_tolerance"] = cfg.flow.monitor_tolerance;
  s.report["rate_tolerance"] = cfg.flow.rate_tolerance;
  s.report["rate_measure"] = k > 0 ? "log|alpha|" : "log x";
  s.close();
  return s;
}

inline Section commutant_section(const ModelSetup& m, const RunConfig& cfg) {
  Section s;
  const auto th = compute_thresholds(m.op, m.chart, m.q);
  RegularizerSpec reg;
  reg.kind = cfg.commutant.kind;
  reg.m = m.op.order;
  if (reg.kind == RegularizerCase::below_s0) {
    reg.s = cfg.commutant.s.value_or(th.s0 + cfg.commutant.s_offset);
  } else {
    reg.s1 = th.s1_lower_bound + cfg.commutant.s1_offset;
    reg.s = cfg.commutant.s.value_or(reg.s1 + cfg.commutant.s_offset);
  }
  reg.validate();
  s.report["regularizer"] = {{"case", to_string(reg.kind)}, {"s", reg.s},     {"s0", th.s0},
                             {"s1", reg.s1},                 {"m", reg.m},     {"exponent", reg.exponent()},
                             {"s1_lower_bound", th.s1_lower_bound}};

  CommutantOptions opt;
  opt.t_ladder = cfg.commutant.t_ladder;
  CutoffSearch search;
  search.per_axis = cfg.commutant.grid_per_axis;
  const SymExpr a = subprincipal_difference(m.op);
  try {
    const auto cut = make_cutoffs(m.chart, m.q, reg.kind, search, RadicandConstraint{reg, a, opt});
    s.report["cutoffs"] = {{"C", cut.C},
                           {"eps", cut.eps},
                           {"T", cut.T},
                           {"zeta0", cut.zeta0},
                           {"lambda_sign", cut.lambda_sign},
                           {"box",
                            {{"y_center", cut.box.y_center},
                             {"y_half", cut.box.y_half},
                             {"z_half", cut.box.z_half},
                             {"theta_half", cut.box.theta_half},
                             {"per_axis", cut.box.per_axis}}}};
    const auto sym = build_symbols(m.chart, reg, cut, a, opt);
    const auto id = verify_commutator_identity(sym, m.op.principal(), a, cfg.commutant.identity_tolerance);
    s.report["identity"] = {{"t", id.t},
                            {"residual", id.residual},
                            {"max_residual", id.max_residual},
                            {"transition_residual", id.transition_residual},
                            {"points_per_t", id.points_per_t},
                            {"tolerance", cfg.commutant.identity_tolerance},
                            {"witness", id.witness},
                            {"sign", sym.sign},
                            {"passed", id.passed}};
    if (!id.passed) s.fail("commutator identity residual " + std::to_string(id.max_residual));
    const auto sup = verify_support_conditions(sym);
    Json conditions = Json::array();
    for (const auto& c : sup.conditions) {
      conditions.push_back(
          {{"name", c.name}, {"passed", c.passed}, {"max_value", c.max_value}, {"witness", c.witness}});
      if (!c.passed) s.fail("support condition failed: " + c.name);
    }
    s.report["support"] = {{"passed", sup.passed}, {"conditions", conditions}};
  } catch (const SignViolation& e) {
    s.report["sign_violation"] = {{"message", e.what()}, {"point", e.point()}, {"value", e.value()}};
    s.fail(std::string("sign violation: ") + e.what());
  } catch (const SearchExhausted& e) {
    s.report["search_exhausted"] = e.what();
    s.fail(std::string("cutoff search exhausted: ") + e.what());
  }
  s.close();
  return s;
}

struct ProbeOutputs {
  ColumnWriter spectra{{"label", "j", "log2_energy"}};
  ColumnWriter thresholds{{"c_re", "c_im", "s_star", "s0", "error", "s_star_aligned"}};
};

inline Section probe_section(const RunConfig& cfg, unsigned threads, ProbeOutputs& out) {
  Section s;
  ProbeConfig pc;
  pc.grid.points = cfg.probe.points;
  pc.grid.length = cfg.probe.length;
  pc.window.half_width = cfg.probe.window;
  pc.threads = threads;

  auto spectrum_rows = [&](const std::string& label, const ShellSpectrum& spec) {
    for (int j = spec.band.lo; j <= spec.band.hi; ++j) {
      out.spectra.row(label, j, spec.at(j) > 0.0 ? std::log2(spec.at(j)) : -INFINITY);
    }
  };
  auto estimate_json = [](const RegularityEstimate& e) {
    return Json{{"s_star", e.s_star},
                {"slope", e.slope},
                {"residual", e.residual},
                {"fit_band", {e.fit_band.lo, e.fit_band.hi}},
                {"beyond_cap", e.beyond_cap},
                {"smooth", e.smooth}};
  };

  const auto table = threshold_experiment(cfg.probe.c, pc);
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"c", complex_json(r.c)},
                    {"s0", r.s0},
                    {"s_star", r.s_star},
                    {"error", r.error},
                    {"s_star_aligned", r.s_star_aligned},
                    {"offset_sensitivity", r.offset_sensitivity},
                    {"estimate", estimate_json(r.estimate)},
                    {"within_tolerance", r.error <= cfg.probe.tolerance}});
    spectrum_rows("c=" + complex_label(r.c), r.spectrum);
    out.thresholds.row(r.c.real(), r.c.imag(), r.s_star, r.s0, r.error, r.s_star_aligned);
    if (r.error > cfg.probe.tolerance) s.fail("c = " + complex_label(r.c) + ": |s* - s0| = " + std::to_string(r.error));
  }
  s.report["threshold_table"] = rows;
  s.report["max_error"] = table.max_error;
  s.report["tolerance"] = cfg.probe.tolerance;
  s.report["grid"] = {{"points", pc.grid.points}, {"length", pc.grid.length}, {"offset", pc.grid.offset}};
  s.report["window"] = {{"half_width", pc.window.half_width}, {"flat", pc.window.flat}};

  if (cfg.probe.calibration) {
    Json checks = Json::array();
    auto check = [&](const std::string& name, double value, double expected, double tol) {
      const bool ok = std::fabs(value - expected) <= tol;
      checks.push_back({{"name", name}, {"value", value}, {"expected", expected}, {"tolerance", tol}, {"passed", ok}});
      if (!ok) s.fail("calibration: " + name);
    };
    const ModelSpec heaviside{ModelKind::heaviside}, delta{ModelKind::delta}, gaussian{ModelKind::gaussian};
    const auto h = probe_model(heaviside, pc), d = probe_model(delta, pc), g = probe_model(gaussian, pc);
    spectrum_rows("heaviside", h.spectrum);
    spectrum_rows("delta", d.spectrum);
    spectrum_rows("gaussian", g.spectrum);
    check("heaviside s*", h.estimate.s_star, 0.5, 0.05);
    check("delta s*", d.estimate.s_star, -0.5, 0.05);
    check("heaviside - delta", h.estimate.s_star - d.estimate.s_star, 1.0, 0.07);
    checks.push_back({{"name", "gaussian flagged smooth"}, {"value", g.estimate.smooth}, {"passed", g.estimate.smooth}});
    if (!g.estimate.smooth) s.fail("calibration: gaussian not flagged smooth");

    ProbeConfig narrow = pc, fine = pc;
    narrow.window.half_width /= 2.0;
    fine.grid.points *= 2;
    for (const auto& [label, model, base] :
         {std::tuple{"heaviside", heaviside, h.estimate.s_star}, std::tuple{"delta", delta, d.estimate.s_star}}) {
      check(std::string(label) + " window halving", probe_model(model, narrow).estimate.s_star - base, 0.0, 0.05);
      check(std::string(label) + " grid doubling", probe_model(model, fine).estimate.s_star - base, 0.0, 0.03);
    }
    s.report["calibration"] = {{"heaviside", estimate_json(h.estimate)},
                               {"delta", estimate_json(d.estimate)},
                               {"gaussian", estimate_json(g.estimate)},
                               {"checks", checks}};
  }
  s.close();
  return s;
}

struct RunRequest {
  Analysis analysis = Analysis::full;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string command_line;
};

struct RunResult {
  int exit_code = 0;
  std::filesystem::path out;
  std::vector<std::string> failures;
  std::string error;
};

namespace detail {

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline bool needs_seed(Analysis a) { return a == Analysis::analyze || a == Analysis::flow || a == Analysis::full; }

// Input that the library rejects as outside its hypotheses.
inline bool is_validation_error(const std::exception& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const InvalidParameters*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
         dynamic_cast<const DegeneracyError*>(&e) || dynamic_cast<const NotCanonical*>(&e) ||
         dynamic_cast<const BandUnsafe*>(&e);
}

}  // namespace detail

inline RunResult execute(const RunRequest& req, std::ostream& log) {
  RunResult result;
  const std::string started = detail::utc_now();
  Json meta = {{"command", req.command_line}, {"analysis", to_string(req.analysis)}, {"started_utc", started},
               {"config_path", req.config_path}, {"threads", req.threads}};
  auto finish_meta = [&](const std::string& status) {
    if (result.out.empty()) return;
    meta["finished_utc"] = detail::utc_now();
    meta["status"] = status;
    meta["exit_code"] = result.exit_code;
    if (!result.error.empty()) meta["error"] = result.error;
    try {
      write_json(result.out / "metadata.json", meta);
    } catch (const std::exception&) {
    }
  };

  try {
    const RunConfig cfg = load_config(req.config_path);
    if (cfg.analysis && *cfg.analysis != req.analysis) {
      throw ConfigError("config selects '" + to_string(*cfg.analysis) + "' but the command is '" +
                            to_string(req.analysis) + "'",
                        0, "run.analysis");
    }
    const std::optional<std::uint64_t> seed = req.seed ? req.seed : cfg.seed;
    if (detail::needs_seed(req.analysis) && !seed) {
      throw ConfigError("randomized checks need a seed (run.seed or --seed)", 0, "run.seed");
    }
    const std::uint64_t effective_seed = seed.value_or(0);
    result.out = req.out_dir ? std::filesystem::path(*req.out_dir) : std::filesystem::path(cfg.output);
    std::filesystem::create_directories(result.out);
    const std::string hash = config_hash(cfg.text, effective_seed);
    meta["config_hash"] = hash;
    meta["seed"] = effective_seed;

    auto stamp = [&](Json report, const char* name) {
      report["config_hash"] = hash;
      report["seed"] = effective_seed;
      report["section"] = name;
      return report;
    };
    Json verdict_sections = Json::object();
    bool all_passed = true;
    auto record = [&](const char* name, Section& sec) {
      write_json(result.out / (std::string(name) + ".json"), stamp(sec.report, name));
      verdict_sections[name] = sec.passed;
      all_passed = all_passed && sec.passed;
      for (const auto& f : sec.failures) result.failures.push_back(std::string(name) + ": " + f);
      log << name << ": " << (sec.passed ? "verified" : "FAILED") << "\n";
    };

    const bool model_needed = req.analysis != Analysis::probe;
    std::optional<ModelSetup> model;
    if (model_needed) model = make_model(cfg);
    Json operator_summary;
    if (req.analysis == Analysis::analyze || req.analysis == Analysis::full) {
      Section sec = analyze_section(*model, cfg, effective_seed);
      operator_summary = {{"s0", sec.report["thresholds"]["s0"]},
                          {"s1_lower_bound", sec.report["thresholds"]["s1_lower_bound"]},
                          {"kind", sec.report["radial"]["kind"]},
                          {"lambda0", sec.report["radial"]["lambda0"]}};
      record("analyze", sec);
    }
    if (req.analysis == Analysis::flow || req.analysis == Analysis::full) {
      std::vector<std::string> header = {"direction", "start", "t"};
      const auto names = model->chart.conic.coordinates();
      header.insert(header.end(), names.begin(), names.end() - 1);
      header.push_back("x");
      header.push_back("monitor");
      ColumnWriter paths(header);
      Section sec = flow_section(*model, cfg, effective_seed, paths);
      paths.write(result.out / "flow_trajectories.dat");
      record("flow", sec);
    }
    if (req.analysis == Analysis::commutant || req.analysis == Analysis::full) {
      Section sec = commutant_section(*model, cfg);
      record("commutant", sec);
    }
    if (req.analysis == Analysis::probe || req.analysis == Analysis::full) {
      ProbeOutputs plots;
      Section sec = probe_section(cfg, req.threads, plots);
      plots.spectra.write(result.out / "probe_spectra.dat");
      plots.thresholds.write(result.out / "probe_thresholds.dat");
      if (req.analysis == Analysis::full) {
        Json rows = Json::array();
        for (const auto& r : sec.report["threshold_table"]) {
          rows.push_back({{"c", r["c"]},
                          {"s0_predicted", r["s0"]},
                          {"s_star_measured", r["s_star"]},
                          {"error", r["error"]},
                          {"within_tolerance", r["within_tolerance"]}});
        }
        Json verdict = {{"operator", operator_summary}, {"rows", rows}, {"tolerance", cfg.probe.tolerance}};
        record("probe", sec);
        verdict["sections"] = verdict_sections;
        verdict["verdict"] = all_passed ? "pass" : "fail";
        write_json(result.out / "verdict.json", stamp(verdict, "verdict"));
      } else {
        record("probe", sec);
      }
    }
    result.exit_code = all_passed ? 0 : 2;
    finish_meta(all_passed ? "verified" : "verification_failed");
  } catch (const std::exception& e) {
    result.error = e.what();
    result.exit_code = detail::is_validation_error(e) ? 1 : 3;
    log << "error: " << e.what() << "\n";
    finish_meta(result.exit_code == 1 ? "invalid_input" : "numeric_failure");
  }
  return result;
}

}  // namespace radialscope

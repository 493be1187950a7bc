#pragma once

// Run configuration: TOML text validated into typed blocks. Every rejection names the field
// and, when the document has one, the line.

#include <toml.hpp>

#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "radialscope/commutant.hpp"
#include "radialscope/threshold.hpp"

namespace radialscope {

enum class Analysis { analyze, flow, commutant, probe, full };

inline std::string to_string(Analysis a) {
  switch (a) {
    case Analysis::analyze: return "analyze";
    case Analysis::flow: return "flow";
    case Analysis::commutant: return "commutant";
    case Analysis::probe: return "probe";
    default: return "full";
  }
}

inline std::optional<Analysis> analysis_from_string(const std::string& s) {
  for (Analysis a : {Analysis::analyze, Analysis::flow, Analysis::commutant, Analysis::probe, Analysis::full}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

struct OperatorBlock {
  std::size_t dimension = 1;
  double order = 1.0;
  std::string principal;
  std::string lower_re = "0";
  std::string lower_im = "0";
  std::string density = "1";
};

struct LagrangianBlock {
  int branch = 1;
  std::vector<double> q;
};

struct AnalyzeBlock {
  double eigen_tolerance = 1e-9;
  std::size_t eigen_samples = 50;
  int zeta_changes = 10;
  int density_changes = 5;
  double invariance_tolerance = 1e-9;
};

struct FlowBlock {
  std::size_t starts = 20;
  double alpha_radius = 0.1;
  double beta_offset = 0.3;
  double max_time = 40.0;
  double rate_tolerance = 0.05;
  double monitor_tolerance = 1e-8;
};

struct CommutantBlock {
  RegularizerCase kind = RegularizerCase::below_s0;
  std::optional<double> s;        // absolute order
  double s_offset = -0.25;        // used when s is absent: s0 + offset (below) or s1 + offset (above)
  double s1_offset = 0.05;        // above case: s1 = bound + offset
  std::vector<double> t_ladder = CommutantOptions{}.t_ladder;
  double identity_tolerance = 1e-8;
  std::size_t grid_per_axis = 9;
};

struct ProbeBlock {
  std::size_t points = std::size_t{1} << 20;
  double length = 8.0;
  double window = 1.0;
  std::vector<std::complex<double>> c = {0.0, {0.0, 0.25}, {0.0, -0.25}};
  double tolerance = 0.1;
  bool calibration = true;
};

struct RunConfig {
  std::string text;  // verbatim source, hashed into every report
  std::optional<std::uint64_t> seed;
  std::string output = "radialscope-out";
  std::optional<Analysis> analysis;
  OperatorBlock op;
  LagrangianBlock lagrangian;
  AnalyzeBlock analyze;
  FlowBlock flow;
  CommutantBlock commutant;
  ProbeBlock probe;

  ChartSpec chart() const { return ChartSpec::standard(op.dimension); }
};

namespace detail {

/// Typed access to one table that remembers which keys were consumed.
class TableReader {
 public:
  TableReader(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  bool present() const { return table_ != nullptr; }

  template <typename T>
  std::optional<T> get(const std::string& key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    if constexpr (std::is_same_v<T, bool>) {
      if (auto v = node->value_exact<bool>()) return *v;
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = node->value_exact<std::string>()) return *v;
    } else if constexpr (std::is_integral_v<T>) {
      if (auto v = node->value_exact<std::int64_t>()) {
        if constexpr (std::is_unsigned_v<T>) {
          if (*v < 0) fail(key, node, "must be nonnegative");
        }
        return static_cast<T>(*v);
      }
    } else {
      if (auto v = node->value<double>()) return *v;
    }
    fail(key, node, "has the wrong type");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (auto v = get<T>(key)) out = *v;
  }

  template <typename T>
  T required(const std::string& key) {
    auto v = get<T>(key);
    if (!v) throw ConfigError("missing required key", line(), qualified(key));
    return *v;
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    const toml::array* arr = node->as_array();
    if (!arr) fail(key, node, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& item : *arr) {
      auto v = item.value<double>();
      if (!v) fail(key, &item, "must be an array of numbers");
      out.push_back(*v);
    }
    return out;
  }

  /// [[re, im], ...]
  std::optional<std::vector<std::complex<double>>> complex_list(const std::string& key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    const toml::array* arr = node->as_array();
    if (!arr) fail(key, node, "must be an array of [re, im] pairs");
    std::vector<std::complex<double>> out;
    for (const auto& item : *arr) {
      const toml::array* pair = item.as_array();
      if (!pair || pair->size() != 2) fail(key, &item, "entries must be [re, im] pairs");
      auto re = (*pair)[0].value<double>(), im = (*pair)[1].value<double>();
      if (!re || !im) fail(key, &item, "entries must be [re, im] pairs");
      out.emplace_back(*re, *im);
    }
    return out;
  }

  /// Unknown keys are configuration typos, not extensions.
  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (!used_.count(key)) {
        throw ConfigError("unknown key", v.source().begin.line, qualified(key));
      }
    }
  }

  std::size_t line() const { return table_ ? table_->source().begin.line : 0; }
  std::size_t line_of(const std::string& key) {
    const toml::node* node = find(key);
    return node ? node->source().begin.line : line();
  }
  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const toml::node* node, const std::string& what) const {
    throw ConfigError(what, node ? node->source().begin.line : line(), qualified(key));
  }

 private:
  const toml::node* find(const std::string& key) {
    used_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> used_;
};

inline void expect(bool ok, const std::string& what, std::size_t line, const std::string& field) {
  if (!ok) throw ConfigError(what, line, field);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text, const std::string& source_name = "config") {
  toml::table doc;
  try {
    doc = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    throw ConfigError("malformed TOML: " + std::string(e.description()), e.source().begin.line);
  }
  RunConfig cfg;
  cfg.text = text;
  static const std::set<std::string> kTables = {"run", "operator", "lagrangian", "analyze", "flow", "commutant", "probe"};
  for (const auto& [k, v] : doc) {
    const std::string key(k.str());
    if (!kTables.count(key) || !v.is_table()) throw ConfigError("unknown top-level entry", v.source().begin.line, key);
  }
  auto table = [&](const char* name) { return detail::TableReader(doc[name].as_table(), name); };
  using detail::expect;

  auto run = table("run");
  if (auto seed = run.get<std::int64_t>("seed")) {
    expect(*seed >= 0, "seed must be nonnegative", run.line_of("seed"), "run.seed");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }
  run.read("output", cfg.output);
  if (auto a = run.get<std::string>("analysis")) {
    cfg.analysis = analysis_from_string(*a);
    expect(cfg.analysis.has_value(), "analysis must be one of analyze, flow, commutant, probe, full",
           run.line_of("analysis"), "run.analysis");
  }
  run.finish();

  auto op = table("operator");
  expect(op.present(), "missing [operator] table", 0, "operator");
  const auto dim = op.required<std::int64_t>("dimension");
  expect(dim >= 1 && dim <= 4, "dimension must be between 1 and 4", op.line_of("dimension"), "operator.dimension");
  cfg.op.dimension = static_cast<std::size_t>(dim);
  op.read("order", cfg.op.order);
  expect(std::isfinite(cfg.op.order), "order must be finite", op.line_of("order"), "operator.order");
  cfg.op.principal = op.required<std::string>("principal");
  op.read("lower_re", cfg.op.lower_re);
  op.read("lower_im", cfg.op.lower_im);
  op.read("density", cfg.op.density);
  // Symbols may only reference the chart's coordinates.
  const ChartSpec chart = cfg.chart();
  for (const auto& [key, value] : {std::pair{"principal", cfg.op.principal}, std::pair{"lower_re", cfg.op.lower_re},
                                   std::pair{"lower_im", cfg.op.lower_im}, std::pair{"density", cfg.op.density}}) {
    try {
      parse(value, chart);
    } catch (const ParseError& e) {
      throw ConfigError(e.what(), op.line_of(key), op.qualified(key));
    }
  }
  op.finish();

  auto lag = table("lagrangian");
  if (auto b = lag.get<std::int64_t>("branch")) {
    expect(*b == 1 || *b == -1, "branch must be 1 or -1", lag.line_of("branch"), "lagrangian.branch");
    cfg.lagrangian.branch = static_cast<int>(*b);
  }
  if (auto q = lag.numbers("q")) cfg.lagrangian.q = *q;
  expect(cfg.lagrangian.q.size() + 1 == cfg.op.dimension, "q needs one coordinate per base direction beyond the first",
         lag.line_of("q"), "lagrangian.q");
  lag.finish();

  auto an = table("analyze");
  an.read("eigen_tolerance", cfg.analyze.eigen_tolerance);
  an.read("eigen_samples", cfg.analyze.eigen_samples);
  an.read("zeta_changes", cfg.analyze.zeta_changes);
  an.read("density_changes", cfg.analyze.density_changes);
  an.read("invariance_tolerance", cfg.analyze.invariance_tolerance);
  expect(cfg.analyze.eigen_tolerance > 0.0 && cfg.analyze.invariance_tolerance > 0.0, "tolerances must be positive",
         an.line(), "analyze");
  expect(cfg.analyze.zeta_changes >= 0 && cfg.analyze.density_changes >= 0, "change counts must be nonnegative",
         an.line(), "analyze");
  an.finish();

  auto fl = table("flow");
  fl.read("starts", cfg.flow.starts);
  fl.read("alpha_radius", cfg.flow.alpha_radius);
  fl.read("beta_offset", cfg.flow.beta_offset);
  fl.read("max_time", cfg.flow.max_time);
  fl.read("rate_tolerance", cfg.flow.rate_tolerance);
  fl.read("monitor_tolerance", cfg.flow.monitor_tolerance);
  expect(cfg.flow.starts >= 1, "at least one start is needed", fl.line_of("starts"), "flow.starts");
  expect(cfg.flow.alpha_radius > 0.0 && cfg.flow.max_time > 0.0, "radius and time must be positive", fl.line(), "flow");
  fl.finish();

  auto cm = table("commutant");
  if (auto k = cm.get<std::string>("case")) {
    if (*k == "below_s0") {
      cfg.commutant.kind = RegularizerCase::below_s0;
    } else if (*k == "above_s1") {
      cfg.commutant.kind = RegularizerCase::above_s1;
    } else {
      throw ConfigError("case must be below_s0 or above_s1", cm.line_of("case"), "commutant.case");
    }
  }
  cfg.commutant.s = cm.get<double>("s");
  cm.read("s_offset", cfg.commutant.s_offset);
  cm.read("s1_offset", cfg.commutant.s1_offset);
  if (auto t = cm.numbers("t_ladder")) cfg.commutant.t_ladder = *t;
  cm.read("identity_tolerance", cfg.commutant.identity_tolerance);
  cm.read("grid_per_axis", cfg.commutant.grid_per_axis);
  for (double t : cfg.commutant.t_ladder) {
    expect(t >= 0.0 && t <= 1.0, "t values must lie in [0, 1]", cm.line_of("t_ladder"), "commutant.t_ladder");
  }
  expect(!cfg.commutant.t_ladder.empty(), "t_ladder must not be empty", cm.line_of("t_ladder"), "commutant.t_ladder");
  expect(cfg.commutant.grid_per_axis >= 2, "grid_per_axis must be at least 2", cm.line_of("grid_per_axis"),
         "commutant.grid_per_axis");
  cm.finish();

  auto pr = table("probe");
  pr.read("points", cfg.probe.points);
  pr.read("length", cfg.probe.length);
  pr.read("window", cfg.probe.window);
  if (auto c = pr.complex_list("c")) cfg.probe.c = *c;
  pr.read("tolerance", cfg.probe.tolerance);
  pr.read("calibration", cfg.probe.calibration);
  expect(cfg.probe.points >= 64 && (cfg.probe.points & (cfg.probe.points - 1)) == 0,
         "points must be a power of two >= 64", pr.line_of("points"), "probe.points");
  expect(cfg.probe.window > 0.0 && cfg.probe.window < cfg.probe.length / 2.0,
         "window half-width must be positive and inside the grid", pr.line_of("window"), "probe.window");
  for (const auto& c : cfg.probe.c) {
    expect(std::fabs(c.imag()) < 0.5, "each c needs |Im c| < 1/2", pr.line_of("c"), "probe.c");
  }
  pr.finish();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace radialscope

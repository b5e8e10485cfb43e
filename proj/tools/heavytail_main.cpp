// Command-line front end: config ingestion, calibration, tail/VaR
// computation, MC validation, and comparison-table emission. One structured
// JSON config per run so results stay archivable and diffable; outputs are
// plot-ready CSV or JSON. Exit codes: 0 success, 2 input error, 3 numerical
// failure.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "heavytail/asymptotics.hpp"
#include "heavytail/compound.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/mc_oracle.hpp"
#include "heavytail/severity.hpp"
#include "heavytail/varsolve.hpp"

using nlohmann::json;
using namespace heavytail;

namespace {

// ---------------------------------------------------------------- helpers

std::string fmt(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

const json& require_key(const json& j, const char* key, const char* where) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null())
    throw ConfigError(std::string(where) + ": missing required key '" + key +
                      "'");
  return *it;
}

double require_num(const json& j, const char* key, const char* where) {
  const json& v = require_key(j, key, where);
  if (!v.is_number())
    throw ConfigError(std::string(where) + ": '" + key +
                      "' must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double dflt, const char* where) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return dflt;
  if (!it->is_number())
    throw ConfigError(std::string(where) + ": '" + key +
                      "' must be a number");
  return it->get<double>();
}

std::string require_str(const json& j, const char* key, const char* where) {
  const json& v = require_key(j, key, where);
  if (!v.is_string())
    throw ConfigError(std::string(where) + ": '" + key +
                      "' must be a string");
  return v.get<std::string>();
}

// ------------------------------------------------------------ config model

struct MethodSpec {
  QuadratureSpec quad{};
  bool include_poisson_term = true;
  int n_terms = 6;          // asymptotic partial sum used by `compare`
  double var_tol_rel = 1e-6;
};

struct Query {
  enum class Kind { kTail, kVar, kSweep, kNone } kind = Kind::kNone;
  double s = 0.0;
  double confidence = 0.0;
  double s_lo = 0.0, s_hi = 0.0;
  int n_points = 0;
};

struct RunConfig {
  std::optional<CompoundModel> model;
  std::optional<Portfolio> portfolio;
  Query query;
  MethodSpec method;
  McConfig mc;
  std::string out_path;
  std::string format;
  std::string data_path;  // severity.data of the single model block, if any
};

SplicedSeverity parse_severity(const json& j, std::string* data_path_out) {
  SplicedSeverity sev;
  sev.x0 = require_num(j, "x0", "severity");

  if (const auto it = j.find("data"); it != j.end() && it->is_string() &&
                                      data_path_out)
    *data_path_out = it->get<std::string>();

  std::vector<double> losses;
  bool loaded = false;
  auto need_losses = [&]() -> const std::vector<double>& {
    if (!loaded) {
      const auto it = j.find("data");
      if (it == j.end() || !it->is_string())
        throw ConfigError(
            "severity: calibration requested but no 'data' CSV path given");
      losses = load_losses_csv(it->get<std::string>());
      loaded = true;
    }
    return losses;
  };

  const json& w = require_key(j, "omega", "severity");
  if (w.is_string() && w.get<std::string>() == "empirical") {
    sev.omega = fit_omega(need_losses(), sev.x0);
  } else if (w.is_number()) {
    sev.omega = w.get<double>();
  } else {
    throw ConfigError("severity: 'omega' must be a number or \"empirical\"");
  }

  if (const auto it = j.find("body"); it != j.end() && !it->is_null()) {
    const json& b = *it;
    const std::string type = require_str(b, "type", "severity.body");
    if (type == "uniform") {
      sev.body = UniformBody{require_num(b, "lo", "severity.body"),
                             require_num(b, "hi", "severity.body")};
    } else if (type == "point") {
      sev.body = PointMassBody{require_num(b, "at", "severity.body")};
    } else if (type == "moments") {
      sev.body = MomentBody{require_num(b, "m1", "severity.body"),
                            require_num(b, "m2", "severity.body")};
    } else {
      throw ConfigError("severity.body: unknown type '" + type +
                        "' (uniform|point|moments)");
    }
  } else {
    sev.body = MomentBody{0.0, 0.0};  // no body mass away from zero
  }

  const json& t = require_key(j, "tail", "severity");
  const std::string type = require_str(t, "type", "severity.tail");
  if (type == "pareto") {
    const json& a = require_key(t, "alpha", "severity.tail");
    double alpha;
    if (a.is_string() && a.get<std::string>() == "empirical") {
      alpha = fit_alpha(need_losses(), sev.x0).alpha;
    } else if (a.is_number()) {
      alpha = a.get<double>();
    } else {
      throw ConfigError(
          "severity.tail: 'alpha' must be a number or \"empirical\"");
    }
    sev.tail = ParetoTail{alpha};
  } else if (type == "lognormal") {
    sev.tail = LognormalTail{require_num(t, "mu", "severity.tail"),
                             require_num(t, "sigma", "severity.tail")};
  } else {
    throw ConfigError("severity.tail: unknown type '" + type +
                      "' (pareto|lognormal)");
  }
  validate(sev);
  return sev;
}

CompoundModel parse_model(const json& j, std::string* data_path_out = nullptr) {
  CompoundModel m;
  m.severity = parse_severity(require_key(j, "severity", "model"), data_path_out);
  const json& f = require_key(j, "frequency", "model");
  m.frequency.lambda = require_num(f, "lambda", "model.frequency");
  m.frequency.horizon = num_or(f, "horizon", 1.0, "model.frequency");
  if (!(m.frequency.lambda > 0.0) || !(m.frequency.horizon > 0.0))
    throw ConfigError("model.frequency: lambda and horizon must be > 0");
  return m;
}

Portfolio parse_portfolio(const json& j) {
  Portfolio pf;
  const json& units = require_key(j, "units", "portfolio");
  if (!units.is_array() || units.empty())
    throw ConfigError("portfolio: 'units' must be a non-empty array");
  for (const json& u : units) pf.units.push_back(parse_model(u));
  if (const auto it = j.find("factor_grid"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->empty())
      throw ConfigError("portfolio: 'factor_grid' must be a non-empty array");
    double psum = 0.0;
    for (const json& pt : *it) {
      FactorPoint fp;
      fp.prob = require_num(pt, "prob", "portfolio.factor_grid");
      const json& mult = require_key(pt, "multipliers", "portfolio.factor_grid");
      if (!mult.is_array() || mult.size() != pf.units.size())
        throw ConfigError(
            "portfolio.factor_grid: 'multipliers' must list one factor per "
            "unit");
      for (const json& v : mult) fp.multipliers.push_back(v.get<double>());
      psum += fp.prob;
      pf.factor_grid.push_back(std::move(fp));
    }
    if (std::fabs(psum - 1.0) > 1e-9)
      throw ConfigError("portfolio.factor_grid: probabilities must sum to 1");
  }
  return pf;
}

Query parse_query(const json& root) {
  Query q;
  const auto it = root.find("query");
  if (it == root.end() || it->is_null()) return q;
  const json& j = *it;
  const std::string kind = require_str(j, "kind", "query");
  if (kind == "tail") {
    q.kind = Query::Kind::kTail;
    q.s = require_num(j, "s", "query");
    if (!(q.s > 0.0)) throw ConfigError("query: 's' must be > 0");
  } else if (kind == "var") {
    q.kind = Query::Kind::kVar;
    q.confidence = require_num(j, "confidence", "query");
    if (!(q.confidence > 0.5) || !(q.confidence < 1.0))
      throw ConfigError("query: 'confidence' must lie in (0.5, 1)");
  } else if (kind == "sweep") {
    q.kind = Query::Kind::kSweep;
    q.s_lo = require_num(j, "s_lo", "query");
    q.s_hi = require_num(j, "s_hi", "query");
    q.n_points = static_cast<int>(num_or(j, "n_points", 10, "query"));
    if (!(q.s_lo > 0.0) || !(q.s_hi > q.s_lo))
      throw ConfigError("query: need 0 < s_lo < s_hi");
    if (q.n_points < 2) throw ConfigError("query: 'n_points' must be >= 2");
  } else {
    throw ConfigError("query: unknown kind '" + kind + "' (tail|var|sweep)");
  }
  return q;
}

MethodSpec parse_method(const json& root) {
  MethodSpec m;
  const auto it = root.find("method");
  if (it == root.end() || it->is_null()) return m;
  const json& j = *it;
  m.quad.rel_tol = num_or(j, "rel_tol", m.quad.rel_tol, "method");
  m.quad.abs_tol = num_or(j, "abs_tol", m.quad.abs_tol, "method");
  m.quad.max_subdivisions = static_cast<int>(
      num_or(j, "max_subdivisions", m.quad.max_subdivisions, "method"));
  if (const auto c = j.find("cutoff"); c != j.end() && !c->is_null()) {
    m.quad.cutoff_policy = QuadratureSpec::CutoffPolicy::kFixed;
    m.quad.fixed_cutoff = c->get<double>();
  }
  if (const auto p = j.find("include_poisson_term");
      p != j.end() && !p->is_null()) {
    if (!p->is_boolean())
      throw ConfigError("method: 'include_poisson_term' must be boolean");
    m.include_poisson_term = p->get<bool>();
  }
  m.n_terms = static_cast<int>(num_or(j, "n_terms", m.n_terms, "method"));
  if (m.n_terms < 1 || m.n_terms > 6)
    throw ConfigError("method: 'n_terms' must lie in 1..6");
  m.var_tol_rel = num_or(j, "var_tol_rel", m.var_tol_rel, "method");
  return m;
}

McConfig parse_mc(const json& root) {
  McConfig cfg;
  const auto it = root.find("mc");
  if (it == root.end() || it->is_null()) return cfg;
  const json& j = *it;
  cfg.n_paths = static_cast<long long>(
      num_or(j, "paths", static_cast<double>(cfg.n_paths), "mc"));
  cfg.n_reps = static_cast<int>(num_or(j, "reps", cfg.n_reps, "mc"));
  cfg.seed = static_cast<std::uint64_t>(num_or(j, "seed", 0.0, "mc"));
  cfg.percentile = num_or(j, "percentile", cfg.percentile, "mc");
  if (cfg.n_paths < 1) throw ConfigError("mc: 'paths' must be >= 1");
  if (cfg.n_reps < 1) throw ConfigError("mc: 'reps' must be >= 1");
  if (!(cfg.percentile > 0.0) || !(cfg.percentile < 1.0))
    throw ConfigError("mc: 'percentile' must lie in (0, 1)");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }

  RunConfig cfg;
  const bool has_model = root.contains("model") && !root["model"].is_null();
  const bool has_pf = root.contains("portfolio") && !root["portfolio"].is_null();
  if (has_model && has_pf)
    throw ConfigError("config: give either 'model' or 'portfolio', not both");
  if (has_model) cfg.model = parse_model(root["model"], &cfg.data_path);
  if (has_pf) cfg.portfolio = parse_portfolio(root["portfolio"]);
  cfg.query = parse_query(root);
  cfg.method = parse_method(root);
  cfg.mc = parse_mc(root);
  if (const auto it = root.find("output"); it != root.end() && !it->is_null()) {
    const json& o = *it;
    if (o.contains("path") && !o["path"].is_null())
      cfg.out_path = o["path"].get<std::string>();
    if (o.contains("format") && !o["format"].is_null()) {
      cfg.format = o["format"].get<std::string>();
      if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("output: 'format' must be csv or json");
    }
  }
  return cfg;
}

// ------------------------------------------------------------------ output

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

// RFC-4180: CRLF line ends, '.' decimal separator, minimal quoting.
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << csv_cell(header[i]);
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_cell(row[i]);
    out << "\r\n";
  }
  return out.str();
}

json tail_to_json(double s, const TailResult& r) {
  json o;
  o["s"] = s;
  o["prob"] = r.prob;
  o["abs_err_estimate"] = r.abs_err_estimate;
  o["cutoff_used"] = r.cutoff_used;
  o["n_evaluations"] = r.n_evaluations;
  if (r.n0 >= 0) {
    o["n0"] = r.n0;
    o["poisson_term"] = r.poisson_term;
  }
  o["warnings"] = r.warnings;
  return o;
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// --------------------------------------------------------------- commands

TailResult eval_tail(const RunConfig& cfg, double s) {
  if (cfg.model)
    return tail_compound(*cfg.model, s, cfg.method.quad,
                         cfg.method.include_poisson_term);
  if (cfg.portfolio)
    return tail_portfolio(*cfg.portfolio, s, cfg.method.quad,
                          cfg.method.include_poisson_term);
  throw ConfigError("config: a 'model' or 'portfolio' block is required");
}

int cmd_fit(const RunConfig& cfg, const std::string& out_path) {
  if (!cfg.model)
    throw ConfigError("fit: config must contain a single 'model' block");
  if (cfg.data_path.empty())
    throw ConfigError("fit: severity.data must point to a loss CSV");
  const std::vector<double> losses = load_losses_csv(cfg.data_path);
  const double x0 = cfg.model->severity.x0;
  const AlphaFit f = fit_alpha(losses, x0);
  json report;
  report["alpha_hat"] = f.alpha;
  report["alpha_std_err"] = f.std_err;
  report["n_tail"] = f.n_tail;
  report["omega"] = fit_omega(losses, x0);
  report["n_total"] = losses.size();
  report["x0"] = x0;
  emit(report.dump(2) + "\n", out_path);
  return 0;
}

int cmd_tail(const RunConfig& cfg, const std::string& out_path,
             const std::string& format) {
  if (cfg.query.kind != Query::Kind::kTail)
    throw ConfigError("tail: config query.kind must be \"tail\"");
  const TailResult r = eval_tail(cfg, cfg.query.s);
  if (format == "csv") {
    emit(to_csv({"s", "prob", "abs_err"},
                {{fmt(cfg.query.s), fmt(r.prob), fmt(r.abs_err_estimate)}}),
         out_path);
  } else {
    emit(tail_to_json(cfg.query.s, r).dump(2) + "\n", out_path);
  }
  return 0;
}

VarResult solve_query_var(const RunConfig& cfg) {
  VarQuery q;
  if (cfg.model)
    q.model = *cfg.model;
  else if (cfg.portfolio)
    q.model = *cfg.portfolio;
  else
    throw ConfigError("config: a 'model' or 'portfolio' block is required");
  q.confidence = cfg.query.confidence;
  q.tol_rel = cfg.method.var_tol_rel;
  q.quad = cfg.method.quad;
  q.include_poisson_term = cfg.method.include_poisson_term;
  return solve_var(q);
}

int cmd_var(const RunConfig& cfg, const std::string& out_path,
            const std::string& format) {
  if (cfg.query.kind != Query::Kind::kVar)
    throw ConfigError("var: config query.kind must be \"var\"");
  const VarResult r = solve_query_var(cfg);
  if (format == "csv") {
    emit(to_csv({"confidence", "var", "tail_at_var"},
                {{fmt(cfg.query.confidence), fmt(r.var), fmt(r.tail_at_var)}}),
         out_path);
  } else {
    json o;
    o["confidence"] = cfg.query.confidence;
    o["var"] = r.var;
    o["tail_at_var"] = r.tail_at_var;
    o["iterations"] = r.iterations;
    o["tail_evaluations"] = r.tail_evaluations;
    emit(o.dump(2) + "\n", out_path);
  }
  return 0;
}

int cmd_mc(const RunConfig& cfg, const std::string& out_path,
           const std::string& format) {
  McEstimate e;
  if (cfg.model)
    e = simulate_quantile(*cfg.model, cfg.mc);
  else if (cfg.portfolio)
    e = simulate_quantile(*cfg.portfolio, cfg.mc);
  else
    throw ConfigError("config: a 'model' or 'portfolio' block is required");
  if (format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < e.rep_quantiles.size(); ++i)
      rows.push_back({fmt(static_cast<double>(i)), fmt(e.rep_quantiles[i])});
    emit(to_csv({"rep", "quantile"}, rows), out_path);
  } else {
    json o;
    o["percentile"] = cfg.mc.percentile;
    o["n_paths"] = cfg.mc.n_paths;
    o["n_reps"] = cfg.mc.n_reps;
    o["seed"] = cfg.mc.seed;
    o["quantile_mean"] = e.quantile_mean;
    o["quantile_sd"] = e.quantile_sd;
    o["ci95_lo"] = e.ci95_lo;
    o["ci95_hi"] = e.ci95_hi;
    o["rep_quantiles"] = e.rep_quantiles;
    emit(o.dump(2) + "\n", out_path);
  }
  return 0;
}

// Invert the asymptotic partial sum for P(S > s) = p by bisection in ln s.
double invert_series(const AsymptoticExpansion& ex, double p, int n_terms,
                     double s_seed) {
  const double t_min = std::log(ex.x0 * (1.0 + 1e-9));
  auto f = [&](double t) { return eval_expansion(ex, std::exp(t), n_terms); };
  double lo = std::max(t_min, std::log(s_seed) - std::log(16.0));
  double hi = std::log(s_seed) + std::log(16.0);
  for (int i = 0; i < 60 && f(lo) <= p && lo > t_min; ++i)
    lo = std::max(t_min, lo - std::log(4.0));
  for (int i = 0; i < 60 && f(hi) >= p; ++i) hi += std::log(4.0);
  if (!(f(lo) > p) || !(f(hi) < p))
    throw NonConvergence("series quantile: cannot bracket the target");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > p ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

int cmd_compare(const RunConfig& cfg, const std::string& out_path,
                const std::string& format) {
  if (cfg.query.kind != Query::Kind::kVar)
    throw ConfigError("compare: config query.kind must be \"var\"");
  if (!cfg.model)
    throw ConfigError("compare: requires a single 'model' block");
  const auto* pareto = std::get_if<ParetoTail>(&cfg.model->severity.tail);
  if (!pareto)
    throw ConfigError(
        "compare: the asymptotic-series column requires a Pareto tail");
  const double p = 1.0 - cfg.query.confidence;

  struct Row {
    std::string method;
    long long rep;
    double value;
    std::optional<double> ci_lo, ci_hi, runtime_ms;
  };
  std::vector<Row> rows;

  // Quadrature VaR, with the tail error pushed through the local slope
  // dP/ds ~ (alpha-1) P / s to an s-uncertainty.
  double t0 = now_ms();
  const VarResult vr = solve_query_var(cfg);
  const TailResult at_var = eval_tail(cfg, vr.var);
  const double quad_ms = now_ms() - t0;
  const double ds = (at_var.abs_err_estimate + cfg.method.var_tol_rel * p) *
                    vr.var / ((pareto->alpha - 1.0) * p);
  rows.push_back({"quadrature", 0, vr.var, vr.var - ds, vr.var + ds, quad_ms});

  // Asymptotic-series VaR.
  t0 = now_ms();
  const AsymptoticExpansion ex = expand_compound_pareto(*cfg.model);
  const double s_series = invert_series(ex, p, cfg.method.n_terms, vr.var);
  rows.push_back(
      {"series", 0, s_series, std::nullopt, std::nullopt, now_ms() - t0});

  // MC repetitions at the same percentile.
  McConfig mc = cfg.mc;
  mc.percentile = cfg.query.confidence;
  t0 = now_ms();
  const McEstimate e = simulate_quantile(*cfg.model, mc);
  const double mc_ms = now_ms() - t0;
  for (std::size_t i = 0; i < e.rep_quantiles.size(); ++i)
    rows.push_back({"mc", static_cast<long long>(i), e.rep_quantiles[i],
                    std::nullopt, std::nullopt, std::nullopt});
  rows.push_back(
      {"mc_mean", 0, e.quantile_mean, e.ci95_lo, e.ci95_hi, mc_ms});

  if (format == "json") {
    json arr = json::array();
    for (const Row& r : rows) {
      json o;
      o["method"] = r.method;
      o["rep"] = r.rep;
      o["value"] = r.value;
      o["ci_lo"] = r.ci_lo ? json(*r.ci_lo) : json();
      o["ci_hi"] = r.ci_hi ? json(*r.ci_hi) : json();
      o["runtime_ms"] = r.runtime_ms ? json(*r.runtime_ms) : json();
      arr.push_back(std::move(o));
    }
    emit(arr.dump(2) + "\n", out_path);
  } else {
    std::vector<std::vector<std::string>> cells;
    for (const Row& r : rows)
      cells.push_back({r.method, fmt(static_cast<double>(r.rep)),
                       fmt(r.value), r.ci_lo ? fmt(*r.ci_lo) : "",
                       r.ci_hi ? fmt(*r.ci_hi) : "",
                       r.runtime_ms ? fmt(*r.runtime_ms) : ""});
    emit(to_csv({"method", "rep", "value", "ci_lo", "ci_hi", "runtime_ms"},
                cells),
         out_path);
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_path,
              const std::string& format) {
  if (cfg.query.kind != Query::Kind::kSweep)
    throw ConfigError("sweep: config query.kind must be \"sweep\"");
  const double lr = std::log(cfg.query.s_hi / cfg.query.s_lo);
  std::vector<std::vector<std::string>> rows;
  json arr = json::array();
  for (int i = 0; i < cfg.query.n_points; ++i) {
    const double s =
        cfg.query.s_lo * std::exp(lr * i / (cfg.query.n_points - 1));
    const TailResult r = eval_tail(cfg, s);
    if (format == "json")
      arr.push_back(tail_to_json(s, r));
    else
      rows.push_back({fmt(s), fmt(r.prob), fmt(r.abs_err_estimate)});
  }
  if (format == "json")
    emit(arr.dump(2) + "\n", out_path);
  else
    emit(to_csv({"s", "prob", "abs_err"}, rows), out_path);
  return 0;
}

bool is_input_error(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) ||
         dynamic_cast<const IoError*>(&e) ||
         dynamic_cast<const EmptyData*>(&e) ||
         dynamic_cast<const InsufficientTailData*>(&e) ||
         dynamic_cast<const DegenerateData*>(&e) ||
         dynamic_cast<const InvalidSeverity*>(&e) ||
         dynamic_cast<const BodyNotSamplable*>(&e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Tail probabilities and extreme quantiles of compound Poisson models "
      "with spliced heavy-tailed severities"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string format_override;
  std::optional<std::uint64_t> seed_override;
  app.add_option("--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("--out", out_override,
                 "output file (overrides config; default stdout)");
  app.add_option("--format", format_override, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed_override, "override mc.seed");

  const char* descriptions[][2] = {
      {"fit", "calibrate alpha and omega from a loss CSV"},
      {"tail", "P(S > s) by cut-integral quadrature"},
      {"var", "quantile at query.confidence by tail inversion"},
      {"mc", "Monte Carlo quantile estimate"},
      {"compare", "quadrature vs series vs MC at one confidence"},
      {"sweep", "tail curve over a log-spaced grid of s"},
  };
  for (const auto& d : descriptions) app.add_subcommand(d[0], d[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = parse_config(config_path);
    if (seed_override) cfg.mc.seed = *seed_override;
    const std::string out = !out_override.empty() ? out_override : cfg.out_path;
    std::string format = !format_override.empty() ? format_override : cfg.format;
    if (format.empty())
      format = (cmd == "compare" || cmd == "sweep") ? "csv" : "json";

    if (cmd == "fit") return cmd_fit(cfg, out);
    if (cmd == "tail") return cmd_tail(cfg, out, format);
    if (cmd == "var") return cmd_var(cfg, out, format);
    if (cmd == "mc") return cmd_mc(cfg, out, format);
    if (cmd == "compare") return cmd_compare(cfg, out, format);
    if (cmd == "sweep") return cmd_sweep(cfg, out, format);
    throw ConfigError("unknown command " + cmd);
  } catch (const Error& e) {
    if (is_input_error(e)) {
      std::cerr << "input error: " << e.what() << "\n";
      return 2;
    }
    std::cerr << "numerical failure in '" << cmd << "' (config " << config_path
              << "): " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error in '" << cmd << "': " << e.what() << "\n";
    return 3;
  }
}

#pragma once

// Run configuration and file output.  JSON for structured data, CSV for
// arrays.  Every file carries the full configuration of the run that wrote it.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvwave/analyze.hpp"
#include "lvwave/certify.hpp"
#include "lvwave/pulse.hpp"
#include "lvwave/solve.hpp"

namespace lvwave {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string command = "solve";
  SystemParams params;
  std::optional<double> speed;
  std::string out;

  // envelope selection
  std::string mode = "default";
  std::string critical_bound = "restricted";
  double theta_mu = 0.5, q_factor = 1.1, delta_fraction = 0.5;
  std::optional<double> mu1, mu2, q1, q2, delta1, delta2;

  // certification grid
  int grid = 20001;

  // operator
  std::optional<double> left, right;
  double beta = 0, h = 0, tol = 1e-10, damping = 1.0;
  int n_points = 0, max_iters = 3000;
  bool polish = true;

  // scan
  double s_min = 2.1, s_max = 6.0, second_min = 0.01, second_max = 0.5;
  int s_count = 40, second_count = 40;
  std::string axis = "gap";

  // pulse
  std::string target = "c_to_1_over_a";
  int steps = 8;
  bool extrapolate = true;
  bool refine = true;
};

namespace detail {

inline void put(Json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

inline void get(const Json& j, const char* key, std::optional<double>& v) {
  if (j.contains(key) && !j[key].is_null()) v = j[key].get<double>();
}

template <class T>
void get(const Json& j, const char* key, T& v) {
  if (j.contains(key)) v = j[key].get<T>();
}

}  // namespace detail

inline Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["params"] = {{"a", c.params.a}, {"b", c.params.b}, {"c", c.params.c}, {"d", c.params.d}};
  detail::put(j, "speed", c.speed);
  j["out"] = c.out;
  j["mode"] = c.mode;
  j["critical_bound"] = c.critical_bound;
  j["theta_mu"] = c.theta_mu;
  j["q_factor"] = c.q_factor;
  j["delta_fraction"] = c.delta_fraction;
  detail::put(j, "mu1", c.mu1);
  detail::put(j, "mu2", c.mu2);
  detail::put(j, "q1", c.q1);
  detail::put(j, "q2", c.q2);
  detail::put(j, "delta1", c.delta1);
  detail::put(j, "delta2", c.delta2);
  j["grid"] = c.grid;
  detail::put(j, "left", c.left);
  detail::put(j, "right", c.right);
  j["beta"] = c.beta;
  j["h"] = c.h;
  j["n_points"] = c.n_points;
  j["tol"] = c.tol;
  j["damping"] = c.damping;
  j["max_iters"] = c.max_iters;
  j["polish"] = c.polish;
  j["scan"] = {{"s_min", c.s_min},           {"s_max", c.s_max},
               {"s_count", c.s_count},       {"second_min", c.second_min},
               {"second_max", c.second_max}, {"second_count", c.second_count},
               {"axis", c.axis}};
  j["pulse"] = {{"target", c.target}, {"steps", c.steps}, {"extrapolate", c.extrapolate}, {"refine", c.refine}};
  return j;
}

inline RunConfig config_from_json(const Json& j, RunConfig c = {}) {
  using detail::get;
  get(j, "command", c.command);
  if (j.contains("params")) {
    const Json& p = j["params"];
    if (p.is_array()) {
      if (p.size() != 4) throw Error("params must have four entries");
      c.params = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>(), p[3].get<double>()};
    } else {
      get(p, "a", c.params.a);
      get(p, "b", c.params.b);
      get(p, "c", c.params.c);
      get(p, "d", c.params.d);
    }
  }
  get(j, "speed", c.speed);
  get(j, "out", c.out);
  get(j, "mode", c.mode);
  get(j, "critical_bound", c.critical_bound);
  get(j, "theta_mu", c.theta_mu);
  get(j, "q_factor", c.q_factor);
  get(j, "delta_fraction", c.delta_fraction);
  get(j, "mu1", c.mu1);
  get(j, "mu2", c.mu2);
  get(j, "q1", c.q1);
  get(j, "q2", c.q2);
  get(j, "delta1", c.delta1);
  get(j, "delta2", c.delta2);
  get(j, "grid", c.grid);
  get(j, "left", c.left);
  get(j, "right", c.right);
  get(j, "beta", c.beta);
  get(j, "h", c.h);
  get(j, "n_points", c.n_points);
  get(j, "tol", c.tol);
  get(j, "damping", c.damping);
  get(j, "max_iters", c.max_iters);
  get(j, "polish", c.polish);
  if (j.contains("scan")) {
    const Json& s = j["scan"];
    get(s, "s_min", c.s_min);
    get(s, "s_max", c.s_max);
    get(s, "s_count", c.s_count);
    get(s, "second_min", c.second_min);
    get(s, "second_max", c.second_max);
    get(s, "second_count", c.second_count);
    get(s, "axis", c.axis);
  }
  if (j.contains("pulse")) {
    const Json& s = j["pulse"];
    get(s, "target", c.target);
    get(s, "steps", c.steps);
    get(s, "extrapolate", c.extrapolate);
    get(s, "refine", c.refine);
  }
  return c;
}

inline RunConfig read_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(std::string("malformed config file: ") + e.what());
  }
  return config_from_json(j, base);
}

inline SelectionKnobs knobs_of(const RunConfig& c) {
  SelectionKnobs k;
  k.mode = parse_mode(c.mode);
  if (c.critical_bound == "restricted")
    k.critical_bound = CriticalBound::Restricted;
  else if (c.critical_bound == "literal")
    k.critical_bound = CriticalBound::Literal;
  else
    throw Error("unknown critical bound: " + c.critical_bound);
  k.theta_mu = c.theta_mu;
  k.q_factor = c.q_factor;
  k.delta_fraction = c.delta_fraction;
  k.mu1 = c.mu1;
  k.mu2 = c.mu2;
  k.q1 = c.q1;
  k.q2 = c.q2;
  k.delta1 = c.delta1;
  k.delta2 = c.delta2;
  return k;
}

inline OperatorConfig operator_of(const RunConfig& c) {
  OperatorConfig o;
  o.beta = c.beta;
  o.h = c.h;
  o.n_points = static_cast<std::size_t>(std::max(0, c.n_points));
  if (c.left) o.left = *c.left;
  if (c.right) o.right = *c.right;
  o.tol = c.tol;
  o.damping = c.damping;
  o.max_iters = c.max_iters;
  o.polish = c.polish;
  return o;
}

/// Text that reads back to the same double.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// CSV with a leading comment line carrying the JSON header.
inline void write_csv(const std::filesystem::path& path, const Json& header, const std::vector<std::string>& columns,
                      const std::vector<const std::vector<double>*>& data) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# " << header.dump() << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  const std::size_t n = data.empty() ? 0 : data.front()->size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < data.size(); ++c) out << (c ? "," : "") << fmt((*data[c])[i]);
    out << '\n';
  }
}

struct CsvTable {
  Json header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // per column
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      t.header = Json::parse(line.substr(2));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (t.columns.empty()) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      t.data.resize(t.columns.size());
      continue;
    }
    for (std::size_t c = 0; std::getline(ss, cell, ','); ++c) t.data.at(c).push_back(std::stod(cell));
  }
  return t;
}

inline Json to_json(const TailReport& t) {
  return {{"eps", t.eps},         {"thetas", t.thetas},       {"entry", t.entry},         {"boxes_ok", t.boxes_ok},
          {"right_gap", t.right_gap}, {"right_ok", t.right_ok}, {"left_u", t.left_u},     {"left_v", t.left_v},
          {"left_ok", t.left_ok},   {"pass", t.pass}};
}

inline Json to_json(const ShapeClass& c) {
  Json ex = Json::array();
  for (const auto& e : c.extrema)
    ex.push_back({{"component", e.component == 0 ? "u" : "v"},
                  {"location", e.location},
                  {"value", e.value},
                  {"kind", e.maximum ? "max" : "min"}});
  return {{"tag", to_string(c.tag)}, {"extrema", ex}};
}

inline Json to_json(const IterationReport& r) {
  return {{"converged", r.converged},
          {"message", r.message},
          {"iterations_used", r.iterations_used},
          {"newton_iterations", r.newton_iterations},
          {"clip_events", r.clip_events},
          {"max_violation", r.max_violation},
          {"damping", r.damping},
          {"bracket_gap", r.bracket_gap},
          {"bracket_excursion", r.bracket_excursion},
          {"sandwich_excursion", r.sandwich_excursion},
          {"translation", r.translation},
          {"inside_sandwich", r.inside_sandwich},
          {"final_step", r.residual_history.empty() ? 0.0 : r.residual_history.back()},
          {"newton_history", r.newton_history}};
}

inline Json to_json(const EnvelopeParams& e) {
  Json j = {{"case", to_string(e.kase)},
            {"lambda1", e.lambda1},
            {"lambda2", e.lambda2},
            {"mu1", e.mu1},
            {"mu2", e.mu2},
            {"q1", e.q1},
            {"q2", e.q2},
            {"delta1", e.delta1},
            {"delta2", e.delta2},
            {"xi1", e.xi1},
            {"xi2", e.xi2},
            {"lower_max1", e.lower_max1},
            {"lower_max2", e.lower_max2},
            {"swapped", e.swapped}};
  auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) j[k] = *v;
  };
  opt("h1", e.h1);
  opt("h2", e.h2);
  opt("qhat1", e.qhat1);
  opt("qhat2", e.qhat2);
  opt("deltahat1", e.deltahat1);
  opt("deltahat2", e.deltahat2);
  opt("xihat1", e.xihat1);
  opt("xihat2", e.xihat2);
  opt("muhat2", e.muhat2);
  opt("Qhat2", e.Qhat2);
  Json m = Json::object();
  for (const auto& x : e.margins) m[x.name] = x.value;
  j["margins"] = m;
  j["min_margin"] = e.min_margin();
  return j;
}

inline Json to_json(const Certificate& c) {
  Json corners = Json::array();
  for (const auto& k : c.corners)
    corners.push_back({{"component", component_name(k.component)},
                       {"at", k.xi},
                       {"left", k.left},
                       {"right", k.right},
                       {"pass", k.pass}});
  Json worst = Json::array();
  for (int i = 0; i < 4; ++i) worst.push_back({{"component", component_name(i)}, {"value", c.worst[i]}});
  return {{"verdict", c.verdict},
          {"error", c.error},
          {"ordering_ok", c.ordering_ok},
          {"worst_gap", c.worst_gap},
          {"inequalities_ok", c.inequalities_ok},
          {"worst_residual", worst},
          {"skipped", c.skipped},
          {"corners", corners},
          {"grid", {{"left", c.spec.left}, {"right", c.spec.right}, {"n", c.spec.n}}}};
}

inline Json profile_header(const Profile& p, const IterationReport& r, const std::optional<ShapeClass>& shape,
                           const RunConfig& cfg) {
  Json j = {{"config", to_json(cfg)},
            {"params", {{"a", p.params.a}, {"b", p.params.b}, {"c", p.params.c}, {"d", p.params.d}}},
            {"speed", p.speed},
            {"beta", p.beta},
            {"h", p.h()},
            {"points", p.size()},
            {"residual", p.residual},
            {"ode_residual", ode_residual(p).max_residual},
            {"converged", p.converged},
            {"tail", to_json(p.tail)},
            {"iteration", to_json(r)}};
  if (shape) j["shape"] = to_json(*shape);
  return j;
}

inline void write_profile(const std::filesystem::path& prefix, const Profile& p, const Json& header) {
  write_csv(prefix.string() + ".csv", header, {"xi", "u", "v"}, {&p.xi, &p.u, &p.v});
  write_json(prefix.string() + ".json", header);
}

inline void write_envelopes(const std::filesystem::path& prefix, const EnvelopeSet& env, const std::vector<double>& xi,
                            const RunConfig& cfg) {
  std::vector<double> uu, ul, vu, vl;
  for (double x : xi) {
    uu.push_back(env.u_upper.value(x));
    ul.push_back(env.u_lower.value(x));
    vu.push_back(env.v_upper.value(x));
    vl.push_back(env.v_lower.value(x));
  }
  const Json header = {{"config", to_json(cfg)}, {"envelope", to_json(env.params)}};
  write_csv(prefix.string() + "_envelopes.csv", header, {"xi", "u_upper", "u_lower", "v_upper", "v_lower"},
            {&xi, &uu, &ul, &vu, &vl});
  write_json(prefix.string() + "_envelopes.json", header);
}

inline Json to_json(const RegionScan& r) {
  Json holds = Json::array(), fmax = Json::array(), errors = Json::array();
  for (const auto& row : r.cells) {
    Json h = Json::array(), f = Json::array();
    for (const auto& c : row) {
      h.push_back(c.holds);
      f.push_back(c.fmax);
      if (!c.error.empty()) errors.push_back(c.error);
    }
    holds.push_back(h);
    fmax.push_back(f);
  }
  return {{"axis", r.axis == ScanAxis::Gap ? "gap" : "c"},
          {"s_values", r.s_values},
          {"second_values", r.second_values},
          {"holds", holds},
          {"fmax", fmax},
          {"errors", errors}};
}

/// Matrix CSV: one row per s, one column per second-axis value; cells 1/0 (criterion holds).
inline void write_scan(const std::filesystem::path& prefix, const RegionScan& r, const RunConfig& cfg) {
  Json j = to_json(r);
  j["config"] = to_json(cfg);
  write_json(prefix.string() + ".json", j);
  const std::filesystem::path csv = prefix.string() + ".csv";
  ensure_parent(csv);
  std::ofstream out(csv);
  if (!out) throw Error("cannot write " + csv.string());
  out << "# " << Json({{"config", to_json(cfg)}}).dump() << '\n';
  out << "s";
  for (double w : r.second_values) out << ',' << fmt(w);
  out << '\n';
  for (std::size_t i = 0; i < r.s_values.size(); ++i) {
    out << fmt(r.s_values[i]);
    for (const auto& c : r.cells[i]) out << ',' << (c.holds ? 1 : 0);
    out << '\n';
  }
}

inline Json to_json(const PulseTailReport& r) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) conds.push_back({{"location", c.location}, {"value", c.value}, {"ok", c.ok}});
  return {{"case", static_cast<int>(r.kase)},
          {"pulsed_extrema", r.pulsed_extrema},
          {"companion_extrema", r.companion_extrema},
          {"conditions", conds},
          {"pass", r.pass}};
}

inline Json pulse_summary(const PulseResult& res, const PulseTailReport& diag, const RunConfig& cfg) {
  Json steps = Json::array();
  for (const auto& s : res.steps)
    steps.push_back({{"parameter", s.parameter},
                     {"converged", s.converged},
                     {"message", s.message},
                     {"newton_iterations", s.newton_iterations},
                     {"cold_newton_iterations", s.cold_newton_iterations},
                     {"residual", s.residual},
                     {"pulse_max", s.pulse_max},
                     {"floor_ok", s.floor_ok}});
  const auto& t = res.tails;
  Json j = {{"config", to_json(cfg)},
            {"target", to_string(res.plan.target)},
            {"ratio", res.plan.ratio},
            {"floor", res.floor},
            {"floor_preserved", res.floor_preserved},
            {"completed", res.completed},
            {"steps", steps},
            {"tails",
             {{"pulsed_left", t.pulsed_left},
              {"pulsed_right", t.pulsed_right},
              {"companion_left", t.companion_left},
              {"companion_right", t.companion_right},
              {"carrying", t.carrying},
              {"pass", t.pass}}},
            {"degenerate_residual", res.degenerate_residual},
            {"degenerate_residual_fine", res.degenerate_residual_fine},
            {"tail_diagnostics", to_json(diag)}};
  if (res.failed_step) j["failed_step"] = *res.failed_step;
  return j;
}

/// Directory with one profile CSV per step, the limit profile and a summary.
inline void write_pulse(const std::filesystem::path& dir, const PulseResult& res, const PulseTailReport& diag,
                        const RunConfig& cfg) {
  std::filesystem::create_directories(dir);
  const Json summary = pulse_summary(res, diag, cfg);
  for (std::size_t k = 0; k < res.profiles.size(); ++k) {
    const Profile& p = res.profiles[k];
    char name[32];
    std::snprintf(name, sizeof name, "step_%02zu.csv", k);
    write_csv(dir / name, {{"config", to_json(cfg)}, {"step", k}, {"parameter", res.steps[k].parameter}},
              {"xi", "u", "v"}, {&p.xi, &p.u, &p.v});
  }
  if (!res.profiles.empty()) {
    const Profile& p = res.limit_profile;
    write_csv(dir / "limit.csv", {{"config", to_json(cfg)}, {"limit", true}}, {"xi", "u", "v"}, {&p.xi, &p.u, &p.v});
  }
  write_json(dir / "summary.json", summary);
}

}  // namespace lvwave

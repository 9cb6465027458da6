// lvwave: command-line driver.
// Exit codes: 0 pass, 1 usage or malformed input, 2 criterion failed, 3 no convergence.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lvwave/lvwave.hpp"

using namespace lvwave;

namespace {

enum Exit { kPass = 0, kUsage = 1, kFail = 2, kNoConvergence = 3 };

struct Usage : Error {
  using Error::Error;
};

std::vector<double> split_numbers(const std::string& s, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Usage(std::string("malformed ") + what + ": " + s);
    }
  }
  if (out.size() != expected) throw Usage(std::string(what) + " needs " + std::to_string(expected) + " values");
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return v;
}

struct Flags {
  std::string params, domain, config, s_range, second_range;
  double speed = NAN;
};

void add_common(CLI::App* sub, RunConfig& cfg, Flags& f) {
  sub->add_option("--params", f.params, "a,b,c,d");
  sub->add_option("--speed", f.speed, "wave speed s");
  sub->add_option("--mode", cfg.mode, "default|nonmonotone-u|nonmonotone-v");
  sub->add_option("--grid", cfg.grid, "certification grid points");
  sub->add_option("--domain", f.domain, "left,right truncation");
  sub->add_option("--out", cfg.out, "output path prefix or directory");
  sub->add_option("--config", f.config, "JSON run configuration; its entries override flags");
  sub->add_option("--step", cfg.h, "solver grid spacing");
  sub->add_option("--tol", cfg.tol, "solver tolerance");
  sub->add_option("--mu1", cfg.mu1);
  sub->add_option("--mu2", cfg.mu2);
  sub->add_option("--q1", cfg.q1);
  sub->add_option("--q2", cfg.q2);
  sub->add_option("--delta1", cfg.delta1);
  sub->add_option("--delta2", cfg.delta2);
}

RunConfig finalize(RunConfig cfg, const Flags& f, const std::string& command) {
  if (!f.params.empty()) {
    const auto p = split_numbers(f.params, 4, "params");
    cfg.params = {p[0], p[1], p[2], p[3]};
  }
  if (std::isfinite(f.speed)) cfg.speed = f.speed;
  if (!f.domain.empty()) {
    const auto d = split_numbers(f.domain, 2, "domain");
    cfg.left = d[0];
    cfg.right = d[1];
  }
  if (!f.s_range.empty()) {
    const auto r = split_numbers(f.s_range, 3, "s-range");
    cfg.s_min = r[0];
    cfg.s_max = r[1];
    cfg.s_count = static_cast<int>(r[2]);
  }
  if (!f.second_range.empty()) {
    const auto r = split_numbers(f.second_range, 3, "second-range");
    cfg.second_min = r[0];
    cfg.second_max = r[1];
    cfg.second_count = static_cast<int>(r[2]);
  }
  if (!f.config.empty()) {
    try {
      cfg = read_config(f.config, cfg);
    } catch (const Error& e) {
      throw Usage(e.what());
    } catch (const std::exception& e) {
      throw Usage(std::string("malformed config file: ") + e.what());
    }
  }
  cfg.command = command;
  try {
    cfg.params.validate();
    knobs_of(cfg);
  } catch (const Error& e) {
    throw Usage(e.what());
  }
  if (command != "scan" && !cfg.speed) throw Usage("--speed is required");
  if (cfg.out.empty() && command != "speed") cfg.out = "lvwave_out/" + command;
  return cfg;
}

int cmd_speed(const RunConfig& cfg) {
  const SystemParams& p = cfg.params;
  const double s = *cfg.speed;
  const double star = critical_speed(p);
  const auto adm = admissibility(p, s);
  Json j = {{"config", to_json(cfg)}, {"s_star", star}, {"speed", s}, {"admissible", adm.admissible}};
  std::printf("s* = %.10g\n", star);
  if (adm.admissible) {
    const auto r = decay_rates(p, s);
    j["roots"] = {{"lambda1", r.lambda1}, {"lambda2", r.lambda2}, {"lambda3", r.lambda3}, {"lambda4", r.lambda4}};
    std::printf("s = %.10g admissible\n", s);
    std::printf("u roots: %.10g %.10g\nv roots: %.10g %.10g\n", r.lambda1, r.lambda3, r.lambda2, r.lambda4);
  } else {
    j["reason"] = adm.reason;
    // complex pairs s/2 +- i sqrt(1 - s^2/4) and (s +- i sqrt(4ad - s^2)) / 2d
    const double du = 4 - s * s, dv = 4 * p.a * p.d - s * s;
    Json roots = Json::object();
    roots["u"] = {{"re", s / 2}, {"im", du > 0 ? std::sqrt(du) / 2 : 0.0}};
    roots["v"] = {{"re", s / (2 * p.d)}, {"im", dv > 0 ? std::sqrt(dv) / (2 * p.d) : 0.0}};
    j["roots"] = roots;
    std::printf("s = %.10g too slow: %s\n", s, adm.reason.c_str());
  }
  if (!cfg.out.empty()) write_json(cfg.out + ".json", j);
  return adm.admissible ? kPass : kFail;
}

void write_certificate(const std::string& prefix, const Certificate& c, const RunConfig& cfg) {
  Json j = to_json(c);
  j["config"] = to_json(cfg);
  write_json(prefix + "_certificate.json", j);
  if (!c.grid.empty())
    write_csv(prefix + "_residuals.csv", {{"config", to_json(cfg)}}, {"xi", "u_upper", "u_lower", "v_upper", "v_lower"},
              {&c.grid, &c.residuals[0], &c.residuals[1], &c.residuals[2], &c.residuals[3]});
}

/// Returns the certificate; the envelope set is filled when construction succeeds.
Certificate run_certify(const RunConfig& cfg, EnvelopeSet& env, bool& built) {
  const double s = *cfg.speed;
  require_strict_weak(cfg.params);
  const auto adm = admissibility(cfg.params, s);
  if (!adm.admissible) throw Error("subcritical speed: " + adm.reason);
  built = false;
  Certificate cert;
  try {
    env = construct_envelopes(cfg.params, s, knobs_of(cfg));
    built = true;
  } catch (const Error& e) {
    cert.error = e.what();
    return cert;
  }
  cert = certify_envelopes(env, default_grid(env, cfg.grid));
  return cert;
}

int cmd_certify(const RunConfig& cfg) {
  EnvelopeSet env;
  bool built = false;
  const Certificate cert = run_certify(cfg, env, built);
  write_certificate(cfg.out, cert, cfg);
  if (built) {
    Json j = to_json(env.params);
    write_json(cfg.out + "_envelope_params.json", {{"config", to_json(cfg)}, {"envelope", j}});
    std::printf("min margin %.6g\n", env.params.min_margin());
  }
  std::printf("certificate %s%s%s\n", cert.verdict ? "pass" : "fail", cert.error.empty() ? "" : ": ",
              cert.error.c_str());
  return cert.verdict ? kPass : kFail;
}

int cmd_solve(const RunConfig& cfg) {
  EnvelopeSet env;
  bool built = false;
  const Certificate cert = run_certify(cfg, env, built);
  write_certificate(cfg.out, cert, cfg);
  if (!cert.verdict) {
    std::printf("certificate fail%s%s\n", cert.error.empty() ? "" : ": ", cert.error.c_str());
    return kFail;
  }
  SolveResult res;
  try {
    res = iterate(env, operator_of(cfg));
  } catch (const Error& e) {
    write_json(cfg.out + ".json", {{"config", to_json(cfg)}, {"converged", false}, {"message", e.what()}});
    std::printf("no convergence: %s\n", e.what());
    return kNoConvergence;
  }
  const Profile& p = res.profile;
  std::optional<ShapeClass> shape;
  if (p.converged) shape = classify(p);
  write_profile(cfg.out, p, profile_header(p, res.report, shape, cfg));
  write_envelopes(cfg.out, env, p.xi, cfg);
  std::printf("%s, residual %.3g, ode residual %.3g\n", res.report.message.c_str(), p.residual,
              ode_residual(p).max_residual);
  if (!p.converged) return kNoConvergence;
  std::printf("shape %s, tail %s\n", to_string(shape->tag), p.tail.pass ? "pass" : "fail");
  return p.tail.pass ? kPass : kFail;
}

int cmd_scan(const RunConfig& cfg) {
  ScanAxis axis;
  if (cfg.axis == "gap")
    axis = ScanAxis::Gap;
  else if (cfg.axis == "c")
    axis = ScanAxis::C;
  else
    throw Usage("unknown scan axis: " + cfg.axis);
  if (cfg.s_count < 0 || cfg.second_count < 0) throw Usage("scan counts must be non-negative");
  const auto s_values = linspace(cfg.s_min, cfg.s_max, cfg.s_count);
  const auto second = linspace(cfg.second_min, cfg.second_max, cfg.second_count);
  RegionScan r;
  r.axis = axis;
  if (!s_values.empty() && !second.empty())
    r = scan_region(cfg.params, s_values, second, knobs_of(cfg), axis);
  else {
    r.s_values = s_values;
    r.second_values = second;
    r.cells.assign(s_values.size(), std::vector<RegionCell>(second.size()));
  }
  write_scan(cfg.out, r, cfg);
  std::size_t holds = 0;
  for (const auto& row : r.cells)
    for (const auto& c : row) holds += c.holds;
  std::printf("%zu of %zu cells satisfy the criterion\n", holds, s_values.size() * second.size());
  return kPass;
}

int cmd_pulse(const RunConfig& cfg) {
  PulseTarget target;
  try {
    target = parse_pulse_target(cfg.target);
  } catch (const Error& e) {
    throw Usage(e.what());
  }
  OperatorConfig op = operator_of(cfg);
  auto plan = plan_continuation(cfg.params, *cfg.speed, target, cfg.steps, op, knobs_of(cfg));
  plan.extrapolate = cfg.extrapolate;
  PulseResult res = run_continuation(plan);
  if (res.completed && cfg.refine) refine_final_step(res);
  const auto pdeg = degenerate_params(cfg.params, target);
  PulseTailReport diag;
  if (!res.profiles.empty()) diag = pulse_tail_diagnostics(res.limit_profile, pdeg, target);
  write_pulse(cfg.out, res, diag, cfg);
  if (!res.completed) {
    std::printf("step %zu failed: %s\n", res.failed_step.value_or(0),
                res.steps.empty() ? "" : res.steps.back().message.c_str());
    return kNoConvergence;
  }
  std::printf("floor %s, tails %s, degenerate residual %.3g -> %.3g\n", res.floor_preserved ? "kept" : "lost",
              res.tails.pass ? "pass" : "fail", res.degenerate_residual, res.degenerate_residual_fine);
  return res.floor_preserved && res.tails.pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling waves of the weak-competition Lotka-Volterra system"};
  app.require_subcommand(1);
  RunConfig cfg;
  Flags flags;

  auto* speed = app.add_subcommand("speed", "critical speed and admissibility");
  auto* certify = app.add_subcommand("certify", "build and check the envelope pair");
  auto* solve = app.add_subcommand("solve", "compute a wave profile between the envelopes");
  auto* scan = app.add_subcommand("scan", "non-monotonicity region over speed and a second parameter");
  auto* pulse = app.add_subcommand("pulse", "front-pulse continuation");
  for (auto* sub : {speed, certify, solve, scan, pulse}) add_common(sub, cfg, flags);
  scan->add_option("--s-range", flags.s_range, "min,max,count");
  scan->add_option("--second-range", flags.second_range, "min,max,count");
  scan->add_option("--axis", cfg.axis, "gap|c");
  pulse->add_option("--target", cfg.target, "c_to_1_over_a|b_to_a");
  pulse->add_option("--steps", cfg.steps, "continuation steps");
  pulse->add_flag("!--no-extrapolate", cfg.extrapolate, "report the last step instead of the extrapolated limit");
  pulse->add_flag("!--no-refine", cfg.refine, "skip the refined re-solve of the final step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  RunConfig run;
  try {
    run = finalize(cfg, flags, command);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }

  try {
    if (command == "speed") return cmd_speed(run);
    if (command == "certify") return cmd_certify(run);
    if (command == "solve") return cmd_solve(run);
    if (command == "scan") return cmd_scan(run);
    return cmd_pulse(run);
  } catch (const Usage& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
}

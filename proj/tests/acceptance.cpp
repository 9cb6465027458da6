// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lvwave/lvwave.hpp"

using namespace lvwave;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body, double limit_s = INFINITY) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (dt > limit_s) {
    o.pass = false;
    o.detail += "; over time budget";
  }
  failures += !o.pass;
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), dt);
  std::fflush(stdout);
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(LVWAVE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

SamplePair constant(std::size_t n, double u, double v) { return {std::vector<double>(n, u), std::vector<double>(n, v)}; }

const SystemParams kBase{1, 0.5, 0.5, 1};
const SystemParams kExample{1, 25.0 / 26, 0.5, 1};

SelectionKnobs tuned_knobs() {
  SelectionKnobs k;
  k.mu2 = 1 + 1 / 1.1;
  k.q2 = 2.6;
  return k;
}

std::vector<std::pair<std::string, Profile>> healthy;

Outcome solve_pipeline(const SystemParams& p, double s, const SelectionKnobs& k, SolveResult& out) {
  const auto env = construct_envelopes(p, s, k);
  if (!certify_envelopes(env).verdict) return {false, "certificate failed"};
  out = iterate(env);
  if (!out.report.converged) return {false, out.report.message};
  return {true, {}};
}

}  // namespace

int main() {
  run(1, "decay rates", [] {
    const auto r = decay_rates(kBase, 4.5);
    const bool ok = std::abs(r.lambda1 - 0.2344) <= 1e-3 && std::abs(r.lambda2 - 0.2344) <= 1e-3;
    return Outcome{ok, "lambda1 " + num(r.lambda1) + ", lambda2 " + num(r.lambda2)};
  });

  run(2, "envelope maximum and threshold", [] {
    const auto c = nonmonotone_condition_v(kExample, 4.5, tuned_knobs());
    const int n = nonmonotone_threshold_n(c.fmax);
    const bool ok = std::abs(c.fmax - 0.0817) <= 5e-4 && n == 24;
    return Outcome{ok, "fmax " + num(c.fmax) + ", n " + std::to_string(n)};
  });

  run(
      3, "certificate suite",
      [] {
        int total = 0, passed = 0;
        std::string first_fail;
        const double fr[] = {0.1, 0.3, 0.5, 0.7, 0.9};
        for (double a : {0.5, 0.8, 1.0, 1.5, 2.0})
          for (double fb : fr)
            for (double fc : fr) {
              const SystemParams p{a, fb * a, fc / a, 1};
              const double star = critical_speed(p);
              for (double s : {star + 0.1, star + 1, 2 * star}) {
                ++total;
                const auto c = certify(p, s);
                if (c.verdict)
                  ++passed;
                else if (first_fail.empty())
                  first_fail = "; first failure a=" + num(p.a) + " b=" + num(p.b) + " c=" + num(p.c) + " s=" + num(s);
              }
            }
        for (const SystemParams& p : {kBase, SystemParams{0.5, 0.25, 1, 1}}) {
          ++total;
          if (certify(p, critical_speed(p)).verdict)
            ++passed;
          else if (first_fail.empty())
            first_fail = "; critical case failed a=" + num(p.a);
        }
        return Outcome{passed == total, std::to_string(passed) + "/" + std::to_string(total) + " pass" + first_fail};
      },
      30);

  run(4, "fixed-point normalization", [] {
    const SystemParams p{1, 0.5, 0.5, 1.3};
    const double s = 3.0, beta = 1.05 * beta_floor(p);
    const auto grid = UniformGrid::over(-20, 20, 801);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0, 1), V(0, p.a);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
      const double K1 = U(rng), K2 = V(rng);
      const auto out = apply_P(constant(grid.n, K1, K2), p, s, beta, grid, {{K1, K2}, {K1, K2}, {}, {}});
      for (std::size_t i = 0; i < grid.n; ++i)
        worst = std::max({worst, std::abs(out.u[i] - F1(p, beta, K1, K2) / beta),
                          std::abs(out.v[i] - F2(p, beta, K1, K2) / beta)});
    }
    double fixed = 0;
    const auto g2 = UniformGrid::over(-30, 30, 1201);
    for (Point e : {Point{0, 0}, Point{1, 0}, coexistence_state(kBase)}) {
      const auto out = apply_P(constant(g2.n, e.u, e.v), kBase, 4.5, 1.05 * beta_floor(kBase), g2, {e, e, {}, {}});
      for (std::size_t i = 0; i < g2.n; ++i) fixed = std::max({fixed, std::abs(out.u[i] - e.u), std::abs(out.v[i] - e.v)});
    }
    return Outcome{worst <= 1e-10 && fixed <= 1e-10, "constants " + num(worst) + ", equilibria " + num(fixed)};
  });

  run(
      5, "solver acceptance",
      [] {
        SelectionKnobs k;
        k.mode = Mode::NonMonotoneV;
        SolveResult r;
        Outcome o = solve_pipeline(kExample, 4.5, k, r);
        if (!o.pass) return o;
        const Profile& p = r.profile;
        healthy.emplace_back("solver", p);
        const double ode = ode_residual(p).max_residual;
        const auto shape = classify(p);
        const double vmax = *std::max_element(p.v.begin(), p.v.end());
        const bool ok = p.residual < 1e-6 && r.report.clip_events == 0 && r.report.inside_sandwich && ode < 1e-4 &&
                        p.tail.pass && shape.tag == Shape::NonMonotoneV && vmax > 2.0 / 27;
        return Outcome{ok, "residual " + num(p.residual) + ", clips " + std::to_string(r.report.clip_events) +
                               ", ode " + num(ode) + ", tail " + (p.tail.pass ? "ok" : "bad") + ", shape " +
                               to_string(shape.tag) + ", max v " + num(vmax)};
      },
      60);

  run(
      6, "critical-speed wave",
      [] {
        SolveResult r;
        Outcome o = solve_pipeline(kBase, 2.0, {}, r);
        if (!o.pass) return o;
        healthy.emplace_back("critical", r.profile);
        return Outcome{r.profile.tail.pass,
                       "residual " + num(r.profile.residual) + ", tail " + (r.profile.tail.pass ? "ok" : "bad")};
      },
      120);

  run(7, "nonexistence gate", [] {
    bool ok = true;
    std::string d;
    for (double s : {0.5, 1.0, 1.9}) {
      const auto adm = admissibility(kBase, s);
      const int code = cli("speed --params 1,0.5,0.5,1 --speed " + num(s));
      ok = ok && !adm.admissible && code == 2;
      d += "s=" + num(s) + " exit " + std::to_string(code) + "; ";
    }
    const auto st = sturm_interval(kBase, 1.0, 0.5, 10.0);
    const double w = std::acos(-1.0) / std::sqrt(0.5);
    const bool sturm = st.M == 2 && std::abs(st.xi1 + 4 * w) <= 1e-9 && std::abs(st.xi2 + 3 * w) <= 1e-9;
    return Outcome{ok && sturm, d + "interval [" + num(st.xi1) + ", " + num(st.xi2) + "]"};
  });

  run(
      8, "front-pulse continuation",
      [] {
        const SystemParams start{1, 0.5, 0.9, 1};
        const auto plan = plan_continuation(start, 2.5, PulseTarget::CToOneOverA, 8);
        PulseResult res = run_continuation(plan);
        if (!res.completed) return Outcome{false, "step " + std::to_string(res.failed_step.value_or(0)) + " failed"};
        refine_final_step(res);
        for (std::size_t k = 0; k < res.profiles.size(); ++k)
          healthy.emplace_back("pulse step " + std::to_string(k), res.profiles[k]);
        const auto& t = res.tails;
        const bool tails = std::abs(t.pulsed_right) <= 1e-2 && std::abs(t.companion_right - 1) <= 1e-2;
        const bool resid = res.degenerate_residual <= 1e-3 && res.degenerate_residual_fine <= 0.5 * res.degenerate_residual;
        return Outcome{res.floor_preserved && tails && resid,
                       std::string("floor ") + (res.floor_preserved ? "kept" : "lost") + ", U(right) " +
                           num(t.pulsed_right) + ", V(right) " + num(t.companion_right) + ", degenerate residual " +
                           num(res.degenerate_residual) + " -> " + num(res.degenerate_residual_fine)};
      },
      300);

  run(9, "alarms quiet on healthy runs", [] {
    if (healthy.empty()) return Outcome{false, "no profiles"};
    std::string fired;
    for (const auto& [name, p] : healthy) {
      const bool box = interior_box_implies_monotone(p, p.params).pass;
      const bool osc = oscillation_coupling(p).check.pass;
      if (!box || !osc) fired += name + (box ? "" : " box") + (osc ? "" : " oscillation") + "; ";
    }
    return Outcome{fired.empty(), std::to_string(healthy.size()) + " profiles" + (fired.empty() ? "" : ", fired: " + fired)};
  });

  run(10, "determinism", [] {
    const fs::path root = fs::temp_directory_path() / "lvwave_acceptance";
    fs::remove_all(root);
    const std::string args = "solve --params 1," + std::string("0.96153846153846156") +
                             ",0.5,1 --speed 4.5 --mode nonmonotone-v --out front";
    for (const char* d : {"a", "b"}) {
      fs::create_directories(root / d);
      const std::string cmd = "cd " + (root / d).string() + " && " + std::string(LVWAVE_CLI_PATH) + " " + args;
      const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
      if (!WIFEXITED(st) || WEXITSTATUS(st) != 0) return Outcome{false, std::string("run ") + d + " did not pass"};
    }
    int files = 0;
    for (const auto& e : fs::directory_iterator(root / "a")) {
      const fs::path other = root / "b" / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other))
        return Outcome{false, e.path().filename().string() + " differs"};
      ++files;
    }
    return Outcome{files > 0, std::to_string(files) + " files identical"};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

// Batch experiment runner: solve instances, evaluate Weiss sweeps, extract
// blow-ups, classify profiles, emit fixtures and run the verification suites.
// Every subcommand writes a deterministic summary.json into --out; wall-clock
// metadata goes to meta.json so summaries stay byte-comparable across runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "membranes/blowup.hpp"
#include "membranes/geometry.hpp"
#include "membranes/io.hpp"
#include "membranes/profiles.hpp"
#include "membranes/solver.hpp"
#include "membranes/weiss.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace membranes;

namespace {

constexpr double kPi = std::numbers::pi;

struct Options {
  int n = 257;
  double R = 1.0;
  int N = 3;
  std::string forcing = "1,0,-1";
  double theta = 1.0;
  std::string bc = "example46-i";
  double omega = -1.0;  // < 0 selects optimal_omega(n)
  double tol = -1.0;
  int max_sweeps = 50000;
  std::string radii;
  std::string out = "out";
  unsigned seed = 0;
  std::string suite = "all";  // verify only
  std::string config;
};

std::vector<double> parse_doubles(const std::string &s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) v.push_back(std::stod(item));
  }
  return v;
}

void apply_config_file(Options &o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + o.config);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.contains("n")) o.n = j["n"].get<int>();
  if (j.contains("R")) o.R = j["R"].get<double>();
  if (j.contains("N")) o.N = j["N"].get<int>();
  if (j.contains("forcing")) o.forcing = j["forcing"].get<std::string>();
  if (j.contains("theta")) o.theta = j["theta"].get<double>();
  if (j.contains("bc")) o.bc = j["bc"].get<std::string>();
  if (j.contains("omega")) o.omega = j["omega"].get<double>();
  if (j.contains("tol")) o.tol = j["tol"].get<double>();
  if (j.contains("max_sweeps")) o.max_sweeps = j["max_sweeps"].get<int>();
  if (j.contains("radii")) o.radii = j["radii"].get<std::string>();
  if (j.contains("out")) o.out = j["out"].get<std::string>();
  if (j.contains("seed")) o.seed = j["seed"].get<unsigned>();
  if (j.contains("suite")) o.suite = j["suite"].get<std::string>();
}

void add_common_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--config", o.config, "JSON config file; flags override it");
  cmd->add_option("--n", o.n, "grid nodes per side (odd)");
  cmd->add_option("--R", o.R, "domain radius");
  cmd->add_option("--N", o.N, "number of membranes");
  cmd->add_option("--forcing", o.forcing, "comma list f_1,..,f_N");
  cmd->add_option("--theta", o.theta, "declared forcing separation");
  cmd->add_option("--bc", o.bc,
                  "boundary data selector NAME[:params]: example46-i..v[:deg], "
                  "halfspace:a;b;deg, constant-ordered:g1,.., radial-eps:eps");
  cmd->add_option("--omega", o.omega, "SOR relaxation; <0 picks the optimum");
  cmd->add_option("--tol", o.tol, "sweep stopping tolerance; <0 auto");
  cmd->add_option("--max-sweeps", o.max_sweeps, "sweep cap");
  cmd->add_option("--radii", o.radii, "comma list of radii");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "seed for randomized suites");
}

// resolved instance: domain + forcing + boundary data, and the analytic
// profile when the selector denotes one
struct Instance {
  DomainPtr dom;
  Forcing forcing;
  BoundaryData bc;
  bool analytic = false;
  AnalyticStack profile;
  std::string name;
};

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

Instance resolve_instance(const Options &o) {
  Instance inst;
  std::string name = o.bc, params;
  if (auto pos = name.find(':'); pos != std::string::npos) {
    params = name.substr(pos + 1);
    name = name.substr(0, pos);
  }
  inst.name = name;
  inst.dom = build_domain(o.n, o.R);

  if (name.rfind("example46-", 0) == 0) {
    const Category cat = category_from_string(name.substr(10));
    const double angle = params.empty() ? 0.0 : std::stod(params) * kPi / 180.0;
    inst.profile = example46_profile(cat, angle);
    inst.analytic = true;
    inst.forcing = example46_forcing(o.theta);
  } else if (name == "halfspace") {
    const auto parts = split(params, ';');
    if (parts.size() < 2)
      throw CLI::ValidationError("--bc", "halfspace:a1,..;b1,..[;deg]");
    HalfSpaceProfile p;
    p.a = parse_doubles(parts[0]);
    p.b = parse_doubles(parts[1]);
    const double angle =
        parts.size() > 2 ? std::stod(parts[2]) * kPi / 180.0 : 0.0;
    p.ex = std::cos(angle);
    p.ey = std::sin(angle);
    double sb = 0.0;
    for (double b : p.b) sb += b;
    p.A = (2.0 * sb / p.N()) * outer(p.ex, p.ey);
    inst.profile = halfspace_profile_stack(p);
    inst.analytic = true;
    inst.forcing = Forcing(parse_doubles(o.forcing), o.theta);
  } else if (name == "constant-ordered") {
    const auto g = parse_doubles(params);
    std::vector<std::function<double(double, double)>> traces;
    for (double gv : g)
      traces.push_back([gv](double, double) { return gv; });
    inst.bc = sample_boundary(inst.dom, traces);
    inst.forcing = Forcing(parse_doubles(o.forcing), o.theta);
    if (inst.forcing.N() != static_cast<int>(g.size()))
      throw CLI::ValidationError("--bc", "constant-ordered size != forcing");
    return inst;
  } else if (name == "radial-eps") {
    const double eps = params.empty() ? 0.05 : std::stod(params);
    inst.bc = sample_boundary(
        inst.dom, {[eps](double, double) { return eps; },
                   [eps](double, double) { return -eps; }});
    inst.forcing = Forcing({1.0, -1.0}, 2.0);
    return inst;
  } else {
    throw CLI::ValidationError("--bc", "unknown selector '" + name + "'");
  }

  if (inst.forcing.N() != inst.profile.N)
    throw CLI::ValidationError("--bc", "selector N != forcing length");
  std::vector<std::function<double(double, double)>> traces;
  for (int j = 0; j < inst.profile.N; ++j)
    traces.push_back([&inst, j](double x, double y) {
      return inst.profile.value(j, x, y);
    });
  inst.bc = sample_boundary(inst.dom, traces);
  return inst;
}

SolveConfig solver_config(const Options &o) {
  SolveConfig cfg;
  cfg.omega = o.omega > 0.0 ? o.omega : optimal_omega(o.n);
  cfg.tol = o.tol;
  cfg.max_sweeps = o.max_sweeps;
  return cfg;
}

ordered_json config_echo(const Options &o) {
  ordered_json j;
  j["n"] = o.n;
  j["R"] = o.R;
  j["N"] = o.N;
  j["forcing"] = o.forcing;
  j["theta"] = o.theta;
  j["bc"] = o.bc;
  j["omega"] = o.omega;
  j["tol"] = o.tol;
  j["max_sweeps"] = o.max_sweeps;
  j["radii"] = o.radii;
  j["seed"] = o.seed;
  return j;
}

void write_json(const fs::path &path, const ordered_json &j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << "\n";
}

void write_meta(const fs::path &dir) {
  ordered_json meta;
  meta["timestamp"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
  write_json(dir / "meta.json", meta);
}

std::vector<double> resolve_radii(const Options &o, const GridDomain &dom) {
  if (!o.radii.empty()) return parse_doubles(o.radii);
  std::vector<double> radii;
  const double lo = 8.0 * dom.h, hi = dom.R / 3.0;
  for (int k = 0; k < 6; ++k)
    radii.push_back(lo * std::pow(hi / lo, k / 5.0));
  return radii;
}

int cmd_solve(const Options &o) {
  const Instance inst = resolve_instance(o);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  auto [stack, report] = solve(inst.dom, inst.forcing, inst.bc, solver_config(o));
  write_stack_csv((dir / "stack.csv").string(), stack);
  write_stack_header((dir / "stack.json").string(), stack, inst.forcing);
  ordered_json s;
  s["config"] = config_echo(o);
  s["report"]["converged"] = report.converged;
  s["report"]["sweeps"] = report.sweeps;
  s["report"]["residual"] = report.residual;
  s["report"]["energy"] = report.energy;
  s["report"]["tol"] = report.tol;
  s["report"]["ordering_violation"] = ordering_violation(stack);
  write_json(dir / "summary.json", s);
  write_meta(dir);
  return report.converged ? 0 : 1;
}

int cmd_weiss(const Options &o) {
  const Instance inst = resolve_instance(o);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  auto [stack, report] = solve(inst.dom, inst.forcing, inst.bc, solver_config(o));
  const auto radii = resolve_radii(o, *inst.dom);
  const auto sweep = weiss_sweep(stack, inst.forcing, 0.0, 0.0, radii);

  std::ofstream csv(dir / "sweep.csv");
  csv << "r,bulk,boundary,W\n";
  char buf[128];
  for (const auto &smp : sweep.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", smp.r,
                  smp.bulk, smp.boundary, smp.W);
    csv << buf;
  }
  ordered_json s;
  s["config"] = config_echo(o);
  s["converged"] = report.converged;
  s["radii"] = radii;
  ordered_json ws = ordered_json::array();
  for (const auto &smp : sweep.samples) ws.push_back(smp.W);
  s["W"] = ws;
  s["derivative"] = sweep.derivative;
  s["lower_bound"] = sweep.lower_bound;
  s["flagged_count"] = sweep.flagged_count;
  write_json(dir / "summary.json", s);
  write_meta(dir);
  return sweep.flagged_count == 0 ? 0 : 1;
}

int cmd_blowup(const Options &o) {
  const Instance inst = resolve_instance(o);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  auto [stack, report] = solve(inst.dom, inst.forcing, inst.bc, solver_config(o));
  MembraneStack normalized = normalize_average(stack);
  const auto cm = contact_sets(normalized, default_eps_c(*inst.dom, inst.forcing));
  const int p = find_blowup_base(normalized, cm, 0.0, 0.0);
  if (p < 0) {
    std::fprintf(stderr, "blowup: no highest-multiplicity node found\n");
    return 1;
  }
  const int p_ix = p % inst.dom->n, p_iy = p / inst.dom->n;
  std::vector<double> radii =
      o.radii.empty() ? std::vector<double>{0.4, 0.2, 0.1}
                      : parse_doubles(o.radii);
  ordered_json s;
  s["config"] = config_echo(o);
  s["converged"] = report.converged;
  s["base_point"] = {inst.dom->x(p_ix), inst.dom->y(p_iy)};
  ordered_json runs = ordered_json::array();
  for (double r : radii) {
    auto prof = rescale(normalized, inst.forcing, p_ix, p_iy, r);
    ordered_json jr;
    jr["r"] = r;
    jr["affine_correction"] = prof.affine_correction;
    jr["homogeneity_defect"] = homogeneity_defect(prof, {0.25, 0.5, 0.75});
    runs.push_back(jr);
  }
  s["blowups"] = runs;
  write_json(dir / "summary.json", s);
  write_meta(dir);
  return 0;
}

int cmd_classify(const Options &o) {
  const Options oo = o;
  const Instance inst = resolve_instance(oo);
  if (!inst.analytic)
    throw CLI::ValidationError("--bc", "classify needs an analytic selector");
  const fs::path dir(o.out);
  fs::create_directories(dir);
  const DomainPtr ref = reference_domain(o.n);
  MembraneStack stack = sample_stack(inst.profile, ref);
  auto res = classify_halfspace(stack);
  std::string label = res.label;
  if (inst.profile.N == 3 && inst.forcing.constants.size() == 3 &&
      inst.forcing.constants[0] == 1.0 && inst.forcing.constants[1] == 0.0 &&
      inst.forcing.constants[2] == -1.0)
    label = classify_example46(res, inst.forcing);
  ordered_json c;
  c["degenerate"] = res.degenerate;
  c["angle_deg"] = res.angle * 180.0 / kPi;
  c["e"] = {res.ex, res.ey};
  c["A"] = {res.A.xx, res.A.xy, res.A.yy};
  c["a"] = res.a;
  c["b"] = res.b;
  c["misfit"] = res.misfit;
  c["fb_offsets"] = res.fb_offsets;
  c["alignment_defect"] = res.alignment_defect;
  c["label"] = label;
  write_json(dir / "classification.json", c);
  ordered_json s;
  s["config"] = config_echo(o);
  s["label"] = label;
  s["misfit"] = res.misfit;
  write_json(dir / "summary.json", s);
  write_meta(dir);
  return 0;
}

int cmd_fixtures(const Options &o) {
  const Instance inst = resolve_instance(o);
  if (!inst.analytic)
    throw CLI::ValidationError("--bc", "fixtures needs an analytic selector");
  const fs::path dir(o.out);
  fs::create_directories(dir);
  MembraneStack stack = sample_stack(inst.profile, inst.dom);
  write_stack_csv((dir / "stack.csv").string(), stack);
  write_stack_header((dir / "stack.json").string(), stack, inst.forcing);
  ordered_json s;
  s["config"] = config_echo(o);
  s["selector"] = inst.name;
  if (inst.name.rfind("example46-", 0) == 0) {
    std::vector<double> fc(inst.forcing.constants);
    s["weiss_closed_form"] = weiss_closed_form(inst.profile, fc);
  }
  write_json(dir / "summary.json", s);
  write_meta(dir);
  return 0;
}

// ---- verify suites ---------------------------------------------------------

std::vector<double> isotonic_oracle(const std::vector<double> &a) {
  const int n = static_cast<int>(a.size());
  std::vector<double> best;
  double best_d = -1.0;
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    std::vector<double> cand(n);
    int start = 0;
    bool feasible = true;
    double prev_mean = 0.0;
    bool first = true;
    for (int i = 0; i < n; ++i) {
      const bool cut = (i == n - 1) || (mask & (1 << i));
      if (!cut) continue;
      double mean = 0.0;
      for (int t = start; t <= i; ++t) mean += a[t];
      mean /= (i - start + 1);
      if (!first && mean > prev_mean + 1e-14) feasible = false;
      for (int t = start; t <= i; ++t) cand[t] = mean;
      prev_mean = mean;
      first = false;
      start = i + 1;
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (int i = 0; i < n; ++i) dist += (cand[i] - a[i]) * (cand[i] - a[i]);
    if (best_d < 0.0 || dist < best_d) {
      best_d = dist;
      best = cand;
    }
  }
  return best;
}

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
};

void suite_pava(unsigned seed, std::vector<Check> &checks) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(len(rng));
    for (double &v : a) v = U(rng);
    const auto got = pava_project(a);
    const auto want = isotonic_oracle(a);
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  checks.push_back({"pava_oracle_linf", worst <= 1e-9, worst});
}

void suite_profiles(std::vector<Check> &checks) {
  const double wi = weiss_of_category(Category::I);
  const double wii = weiss_of_category(Category::II);
  const double wiii = weiss_of_category(Category::III);
  const double wiv = weiss_of_category(Category::IV);
  const double wv = weiss_of_category(Category::V);
  checks.push_back({"weiss_value_i", std::abs(wi - kPi / 8) <= 1e-6, wi});
  checks.push_back({"weiss_order_strict",
                    wii - wi > 1e-3 && wiii - wii > 1e-3 && wv - wiv > 1e-3,
                    std::min({wii - wi, wiii - wii, wv - wiv})});
  checks.push_back(
      {"weiss_iii_iv_equal", std::abs(wiii - wiv) <= 1e-6, wiii - wiv});

  const Forcing forcing = example46_forcing();
  auto ref = reference_domain(129);
  bool labels_ok = true;
  double worst_misfit = 0.0;
  for (Category c : {Category::I, Category::II, Category::III, Category::IV,
                     Category::V}) {
    auto st = example46_stack(c, ref);
    auto res = classify_halfspace(st);
    worst_misfit = std::max(worst_misfit, res.misfit);
    labels_ok = labels_ok && classify_example46(res, forcing) == to_string(c);
  }
  checks.push_back({"category_roundtrip_labels", labels_ok, worst_misfit});
  checks.push_back(
      {"category_roundtrip_misfit", worst_misfit <= 1e-8, worst_misfit});
}

int cmd_verify(const Options &o) {
  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::vector<Check> checks;
  if (o.suite == "pava" || o.suite == "all") suite_pava(o.seed, checks);
  if (o.suite == "profiles" || o.suite == "all") suite_profiles(checks);
  if (checks.empty())
    throw CLI::ValidationError("--suite", "unknown suite '" + o.suite + "'");

  ordered_json s;
  s["suite"] = o.suite;
  s["seed"] = o.seed;
  ordered_json list = ordered_json::array();
  ordered_json violations = ordered_json::array();
  for (const auto &c : checks) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["value"] = c.value;
    list.push_back(jc);
    if (!c.pass) violations.push_back(c.name);
  }
  s["checks"] = list;
  s["violations"] = violations;
  write_json(dir / "summary.json", s);
  write_meta(dir);
  return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"ordered membranes laboratory"};
  app.require_subcommand(1);
  Options o;
  auto *c_solve = app.add_subcommand("solve", "solve an instance");
  auto *c_weiss = app.add_subcommand("weiss", "solve and sweep the Weiss energy");
  auto *c_blow = app.add_subcommand("blowup", "solve and extract blow-ups");
  auto *c_class = app.add_subcommand("classify", "classify an analytic stack");
  auto *c_fix = app.add_subcommand("fixtures", "emit an analytic fixture");
  auto *c_verify = app.add_subcommand("verify", "run the invariant suites");
  for (auto *c : {c_solve, c_weiss, c_blow, c_class, c_fix, c_verify})
    add_common_flags(c, o);
  c_verify->add_option("--suite", o.suite, "pava | profiles | all");

  // config file values become the defaults, explicit flags then win
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) o.config = argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) o.config = arg.substr(9);
  }
  try {
    apply_config_file(o);
  } catch (const std::exception &e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (c_solve->parsed()) return cmd_solve(o);
    if (c_weiss->parsed()) return cmd_weiss(o);
    if (c_blow->parsed()) return cmd_blowup(o);
    if (c_class->parsed()) return cmd_classify(o);
    if (c_fix->parsed()) return cmd_fixtures(o);
    if (c_verify->parsed()) return cmd_verify(o);
  } catch (const CLI::ValidationError &e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

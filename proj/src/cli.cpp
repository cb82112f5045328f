#include "fracham/cli.hpp"

#include "fracham/concentration.hpp"
#include "fracham/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace fracham {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::vector<OperatorStudyRow> operator_convergence_study(double alpha, const std::vector<std::size_t>& sizes) {
  const FracOrder order(alpha);
  const double coef = std::tgamma(3.0) / std::tgamma(3.0 - alpha);
  std::vector<OperatorStudyRow> rows;
  for (std::size_t n : sizes) {
    const Grid1D g(0.0, 1.0, n + 1);
    const GridFunction u = GridFunction::sample(g, [](double t) { return t * t; });
    const GridFunction d = left_frac_derivative(u, order);
    OperatorStudyRow row;
    row.n_intervals = n;
    row.h = g.h();
    for (std::size_t i = 1; i < g.n_nodes(); ++i) {
      const double t = g.t(i);
      if (t < 0.1 - 1e-12 || t > 0.9 + 1e-12)
        continue;
      const double exact = coef * std::pow(t, 2.0 - alpha);
      row.max_rel_error = std::max(row.max_rel_error, std::abs(d(i, 0) - exact) / exact);
    }
    if (!rows.empty())
      row.ratio = rows.back().max_rel_error / row.max_rel_error;
    rows.push_back(row);
  }
  return rows;
}

SpectralComparison stiffness_vs_fourier(double alpha) {
  const FracOrder order(alpha);
  const Grid1D g(-20.0, 20.0, 8193);
  const GridFunction u = GridFunction::sample(g, [](double t) { return std::exp(-0.5 * t * t); });
  SpectralComparison c;
  c.alpha = alpha;
  c.stiffness = StiffnessForm(order, g).energy(u);
  const double f = fourier_seminorm(u, order);
  c.fourier = f * f;
  c.rel_diff = std::abs(c.stiffness - c.fourier) / c.fourier;
  return c;
}

double adjointness_defect(double alpha, std::size_t pairs, std::uint64_t seed) {
  const FracOrder order(alpha);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(16, 512);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t n = size(rng);
    const Grid1D g(0.0, 1.0, n);
    GridFunction u(g, 1), v(g, 1);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      u(i, 0) = normal(rng);
      v(i, 0) = normal(rng);
    }
    const GridFunction du = left_frac_derivative(u, order);
    const GridFunction dv = right_frac_derivative(v, order);
    double lhs = 0.0, rhs = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lhs += du(i, 0) * v(i, 0);
      rhs += u(i, 0) * dv(i, 0);
      nu += u(i, 0) * u(i, 0);
      nv += v(i, 0) * v(i, 0);
    }
    const double h = g.h();
    worst = std::max(worst, std::abs(h * lhs - h * rhs) / std::sqrt(h * nu * h * nv));
  }
  return worst;
}

namespace {

json config_json(const RunConfig& rc) { return json::parse(to_json_text(rc, -1)); }

std::string preamble(const RunConfig& rc, const std::string& what) {
  return what + "\nresolved configuration:\n" + to_ini(rc);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os)
    throw ConfigError("cannot write '" + p.string() + "'");
  os << text;
  if (!os)
    throw ConfigError("write failed for '" + p.string() + "'");
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

json check_json(const HypothesisCheck& c) {
  json j;
  j["name"] = c.name;
  j["status"] = to_string(c.status);
  j["message"] = c.message;
  if (c.witness) {
    j["witness"] = {{"t", c.witness->t}, {"u", c.witness->u}, {"violation", c.witness->violation}};
  }
  return j;
}

json embedding_json(const EmbeddingEstimate& e) {
  return {{"c_inf_lower", e.c_inf_lower},     {"c_inf_sharp", e.c_inf_sharp},
          {"c_inf", e.c_inf},                 {"meas_sublevel", e.meas_sublevel},
          {"theta_const", e.theta_const},     {"lambda_threshold", e.lambda_threshold},
          {"admissible", e.admissible}};
}

json ground_state_json(const GroundState& gs) {
  json j;
  j["lambda"] = gs.lambda;
  j["energy"] = gs.energy;
  j["gradient_norm"] = gs.gradient_norm;
  j["full_gradient_norm"] = gs.full_gradient_norm;
  j["nehari_residual"] = gs.nehari_residual;
  j["strong_residual"] = gs.strong_residual;
  j["x_norm"] = gs.x_norm;
  j["boundary_magnitude"] = gs.boundary_magnitude;
  j["multistart_spread"] = gs.multistart_spread;
  j["nu_observed"] = gs.nu_observed;
  j["rho_observed"] = gs.rho_observed;
  j["warnings"] = gs.warnings;
  json starts = json::array();
  for (const auto& s : gs.starts)
    starts.push_back({{"index", s.index},
                      {"energy", s.energy},
                      {"gradient_norm", s.gradient_norm},
                      {"x_norm", s.x_norm},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"diagnosis", s.diagnosis}});
  j["starts"] = starts;
  if (gs.interval_bounds) {
    const auto& b = *gs.interval_bounds;
    j["interval_bounds"] = {{"p", b.p},           {"lp", b.lp},
                            {"deriv_lp", b.deriv_lp}, {"lp_bound", b.lp_bound},
                            {"linf", b.linf},     {"linf_bound", b.linf_bound},
                            {"lp_holds", b.lp_holds}, {"linf_holds", b.linf_holds}};
  }
  if (gs.embedding)
    j["embedding"] = embedding_json(*gs.embedding);
  if (gs.validation) {
    json checks = json::array();
    for (const auto& c : gs.validation->checks)
      checks.push_back(check_json(c));
    j["validation"] = checks;
  }
  j["t"] = gs.u.grid().nodes();
  json u = json::array();
  for (std::size_t c = 0; c < gs.u.n_components(); ++c)
    u.push_back(gs.u.component(c));
  j["u"] = u;
  return j;
}

void write_log(const fs::path& p, const RunConfig& rc, const std::vector<IterationRecord>& log) {
  std::ostringstream os;
  os << json{{"config", config_json(rc)}}.dump() << '\n';
  for (const auto& r : log)
    os << json{{"iteration", r.iteration}, {"phi", r.phi}, {"gradient_norm", r.gradient_norm}, {"step", r.step}}
              .dump()
       << '\n';
  write_text(p, os.str());
}

std::string profile_text(const GridFunction& u, const RunConfig& rc, const std::string& what) {
  std::ostringstream os;
  write_profile(os, u, preamble(rc, what));
  return os.str();
}

std::string lambda_tag(double l) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", l);
  return buf;
}

int cmd_validate(const RunConfig& rc, const fs::path& dir, std::ostream& out) {
  const ProblemConfig pc = build_problem(rc, false);
  const EmbeddingEstimate est = embedding_for(pc);
  const SamplePlan plan = default_sample_plan(pc.weight, est.c_inf, static_cast<unsigned>(rc.seed));
  const ValidationReport rep = validate_hypotheses(pc.potential, pc.weight, plan);
  json j;
  j["config"] = config_json(rc);
  j["seed"] = rc.seed;
  j["all_pass"] = rep.all_pass();
  j["has_warnings"] = rep.has_warnings();
  j["embedding"] = embedding_json(est);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back(check_json(c));
    out << "  " << c.name << ": " << to_string(c.status) << (c.message.empty() ? "" : " (" + c.message + ")")
        << '\n';
  }
  j["checks"] = checks;
  write_json(dir / "validation.json", j);
  out << "validation " << (rep.all_pass() ? "passed" : "FAILED") << '\n';
  return rep.all_pass() ? kExitOk : kExitValidation;
}

int cmd_operators(const RunConfig& rc, const fs::path& dir, std::ostream& out) {
  const auto rows = operator_convergence_study(rc.operator_alpha, rc.operator_sizes);
  std::ostringstream csv;
  write_comment_block(csv, preamble(rc, "left GL derivative of t^2 on [0,1]; max relative error on [0.1, 0.9]"));
  csv << "n_intervals,h,max_rel_error,ratio\n";
  char buf[256];
  json table = json::array();
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.n_intervals, r.h, r.max_rel_error, r.ratio);
    csv << buf;
    table.push_back({{"n_intervals", r.n_intervals}, {"h", r.h}, {"max_rel_error", r.max_rel_error},
                     {"ratio", r.ratio}});
    std::snprintf(buf, sizeof buf, "  N=%-6zu err=%.4e ratio=%.3f  observed order=%.3f\n", r.n_intervals,
                  r.max_rel_error, r.ratio, r.ratio > 0 ? std::log2(r.ratio) : 0.0);
    out << buf;
  }
  write_text(dir / "operators.csv", csv.str());

  json spectral = json::array();
  for (double a : {0.6, 0.75, 0.9}) {
    const SpectralComparison c = stiffness_vs_fourier(a);
    spectral.push_back({{"alpha", a}, {"stiffness", c.stiffness}, {"fourier", c.fourier}, {"rel_diff", c.rel_diff}});
    std::snprintf(buf, sizeof buf, "  alpha=%.2f stiffness=%.8f fourier=%.8f rel diff=%.3e\n", a, c.stiffness,
                  c.fourier, c.rel_diff);
    out << buf;
  }
  const double adj = adjointness_defect(rc.operator_alpha, 100, rc.seed);
  out << "  adjointness defect over 100 pairs: " << adj << '\n';
  json j;
  j["config"] = config_json(rc);
  j["seed"] = rc.seed;
  j["convergence"] = table;
  j["spectral"] = spectral;
  j["adjointness_defect"] = adj;
  write_json(dir / "operators.json", j);
  return kExitOk;
}

int cmd_solve(const RunConfig& rc, const fs::path& dir, std::ostream& out, bool bvp) {
  const ProblemConfig pc = build_problem(rc);
  const GroundState gs = bvp ? solve_bvp(pc) : solve_line(pc);
  const std::string stem = bvp ? "bvp" : "ground_state";
  json j;
  j["config"] = config_json(rc);
  j["seed"] = rc.seed;
  j["problem"] = bvp ? "bvp" : "line";
  j["result"] = ground_state_json(gs);
  write_json(dir / (stem + ".json"), j);
  write_text(dir / (bvp ? "u_tilde.txt" : "u_lambda.txt"),
             profile_text(gs.u, rc, bvp ? "BVP ground state profile: t u" : "line ground state profile: t u"));
  write_log(dir / (stem + "_log.jsonl"), rc, gs.log);
  char buf[256];
  std::snprintf(buf, sizeof buf, "energy=%.12f |g|=%.3e nehari=%.3e strong=%.3e x_norm=%.8f spread=%.3e\n",
                gs.energy, gs.gradient_norm, gs.nehari_residual, gs.strong_residual, gs.x_norm,
                gs.multistart_spread);
  out << buf;
  for (const auto& w : gs.warnings)
    out << "warning: " << w << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& rc, const fs::path& dir, std::ostream& out) {
  const ProblemConfig pc = build_problem(rc);
  SweepOptions so;
  so.warm_start = rc.warm_start;
  const SweepReport rep = run_sweep(rc.lambda_list, pc, so);

  std::ostringstream csv;
  write_sweep_csv(csv, rep, preamble(rc, "concentration sweep"));
  write_text(dir / "sweep.csv", csv.str());
  const std::string summary = sweep_summary(rep);
  std::ostringstream txt;
  write_comment_block(txt, preamble(rc, "concentration sweep summary"));
  txt << summary;
  write_text(dir / "sweep_summary.txt", txt.str());
  if (rep.bvp)
    write_text(dir / "u_tilde.txt", profile_text(rep.bvp->u, rc, "BVP ground state profile: t u"));
  json states = json::array();
  for (const auto& gs : rep.states) {
    write_text(dir / ("u_lambda_" + lambda_tag(gs.lambda) + ".txt"),
               profile_text(gs.u, rc, "line ground state profile at lambda=" + lambda_tag(gs.lambda) + ": t u"));
    json s = ground_state_json(gs);
    s.erase("t");
    s.erase("u");
    states.push_back(s);
  }
  json j;
  j["config"] = config_json(rc);
  j["seed"] = rc.seed;
  j["complete"] = rep.complete;
  j["error"] = rep.error;
  j["c_tilde"] = rep.c_tilde;
  j["bump_bound"] = rep.bump_bound;
  j["u_tilde_h_alpha"] = rep.u_tilde_h_alpha;
  const auto& f = rep.flags;
  j["flags"] = {{"c_lambda_nondecreasing", f.c_lambda_nondecreasing},
                {"c_lambda_below_c_tilde", f.c_lambda_below_c_tilde},
                {"c_lambda_below_bump_bound", f.c_lambda_below_bump_bound},
                {"energy_above_rho", f.energy_above_rho},
                {"bound_ratio_ok", f.bound_ratio_ok},
                {"weighted_mass_ok", f.weighted_mass_ok},
                {"tail_mass_decreasing", f.tail_mass_decreasing},
                {"h_alpha_nonincreasing", f.h_alpha_nonincreasing}};
  j["violations"] = rep.violations;
  json recs = json::array();
  for (const auto& r : rep.records)
    recs.push_back({{"lambda", r.lambda},
                    {"c_lambda", r.c_lambda},
                    {"x_norm_sq", r.x_norm_sq},
                    {"tail_mass_fraction", r.tail_mass_fraction},
                    {"h_alpha_distance", r.h_alpha_distance},
                    {"bound_ratio", r.bound_ratio},
                    {"weighted_mass", r.weighted_mass},
                    {"weighted_mass_bound", r.weighted_mass_bound},
                    {"gradient_norm", r.gradient_norm},
                    {"strong_residual", r.strong_residual},
                    {"rho_observed", r.rho_observed},
                    {"multistart_spread", r.multistart_spread},
                    {"boundary_magnitude", r.boundary_magnitude},
                    {"starts", r.starts}});
  j["records"] = recs;
  if (rep.bvp) {
    json b = ground_state_json(*rep.bvp);
    b.erase("t");
    b.erase("u");
    j["bvp"] = b;
  }
  j["states"] = states;
  write_json(dir / "sweep.json", j);
  out << summary;
  if (!rep.complete)
    throw ConvergenceError(rep.error.empty() ? "sweep incomplete" : rep.error);
  return kExitOk;
}

fs::path resolve_output_dir(const CommandConfig& cmd, const std::optional<RunConfig>& rc) {
  if (cmd.output_dir)
    return *cmd.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env)
    return env;
  return rc ? fs::path(rc->output_dir) : fs::path("out");
}

} // namespace

int run(const CommandConfig& command, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> rc;
  int code = kExitOther;
  std::string type, message;
  try {
    rc = load_run_config(command.config_path, command.overrides);
    if (command.seed)
      rc->seed = *command.seed;
    const fs::path dir = resolve_output_dir(command, rc);
    rc->output_dir = dir.string();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
      throw ConfigError("cannot create output directory '" + dir.string() + "'");

    const std::string& sub = command.subcommand;
    if (sub == "validate")
      return cmd_validate(*rc, dir, out);
    if (sub == "operators")
      return cmd_operators(*rc, dir, out);
    if (sub == "solve")
      return cmd_solve(*rc, dir, out, false);
    if (sub == "bvp")
      return cmd_solve(*rc, dir, out, true);
    if (sub == "sweep")
      return cmd_sweep(*rc, dir, out);
    throw ConfigError("unknown subcommand '" + sub + "'");
  } catch (const ConfigError& e) {
    code = kExitConfig, type = "config", message = e.what();
  } catch (const ValidationError& e) {
    code = kExitValidation, type = "validation", message = e.what();
  } catch (const ConvergenceError& e) {
    code = kExitConvergence, type = "convergence", message = e.what();
  } catch (const DecayError& e) {
    code = kExitConvergence, type = "decay", message = e.what();
  } catch (const std::exception& e) {
    code = kExitOther, type = "other", message = e.what();
  }
  err << "error (" << type << "): " << message << '\n';
  try {
    const fs::path dir = resolve_output_dir(command, rc);
    fs::create_directories(dir);
    json j;
    j["status"] = "error";
    j["subcommand"] = command.subcommand;
    j["exit_code"] = code;
    j["error_type"] = type;
    j["message"] = message;
    j["config"] = rc ? config_json(*rc) : json(nullptr);
    write_json(dir / "error.json", j);
  } catch (const std::exception& e) {
    err << "could not write error record: " << e.what() << '\n';
  }
  return code;
}

} // namespace fracham

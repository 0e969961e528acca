#include "fincli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "finopt/finopt.hpp"

namespace fincli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace finopt;

struct ProblemFlags {
  double k = 0.0;
  double h = 0.0;
  std::optional<double> area;
  double q0 = 0.0;
  double t_inf = 0.0;
  double width = 1.0;

  FinProblem problem() const {
    FinProblem p;
    p.k = k;
    p.h = h;
    p.area = area.value_or(0.0);
    p.q0 = q0;
    p.t_inf = t_inf;
    p.width = width;
    return p;
  }
};

struct OutputFlags {
  std::string out_dir = ".";
  std::string format = "json";
};

struct ThresholdFlags {
  OptimalityThresholds limits;
};

void add_problem_options(CLI::App* cmd, ProblemFlags& f, bool with_h, bool area_required) {
  cmd->add_option("--k", f.k, "thermal conductivity [W/(m K)]")->required();
  if (with_h) cmd->add_option("--h", f.h, "convection coefficient [W/(m^2 K)]")->required();
  auto* area = cmd->add_option("--area", f.area, "profile area budget A [m^2]");
  if (area_required) area->required();
  cmd->add_option("--q0", f.q0, "root power per unit width [W/m]")->required();
  cmd->add_option("--t-inf", f.t_inf, "ambient temperature [K], reporting only")->capture_default_str();
  cmd->add_option("--width", f.width, "fin width b [m]")->capture_default_str();
}

void add_output_options(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--out", f.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--format", f.format, "summary format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_threshold_options(CLI::App* cmd, ThresholdFlags& f) {
  auto& t = f.limits;
  cmd->add_option("--max-grad-cv", t.max_grad_temp_cv, "limit on CV of dtheta/dx")->capture_default_str();
  cmd->add_option("--max-tip-ratio", t.max_tip_temp_ratio, "limit on theta(L)/theta0")->capture_default_str();
  cmd->add_option("--max-selfadjoint-gap", t.max_selfadjoint_gap, "limit on |w - theta|/theta0")
      ->capture_default_str();
  cmd->add_option("--max-linfit-residual", t.max_linfit_residual, "limit on dt/dx fit residual")
      ->capture_default_str();
  cmd->add_option("--slope-tol", t.slope_tolerance, "relative tolerance on fitted dt/dx slope")
      ->capture_default_str();
  cmd->add_option("--biot-tol", t.biot_tolerance, "tolerance on |Bi - 1|")->capture_default_str();
}

ordered_json problem_json(const FinProblem& p) {
  return ordered_json{{"k", p.k},         {"h", p.h},         {"area", p.area},
                      {"q0", p.q0},       {"t_inf", p.t_inf}, {"width", p.width}};
}

ordered_json thresholds_json(const OptimalityThresholds& t) {
  return ordered_json{{"max_grad_temp_cv", t.max_grad_temp_cv},
                      {"max_tip_temp_ratio", t.max_tip_temp_ratio},
                      {"max_selfadjoint_gap", t.max_selfadjoint_gap},
                      {"max_linfit_residual", t.max_linfit_residual},
                      {"slope_tolerance", t.slope_tolerance},
                      {"biot_tolerance", t.biot_tolerance}};
}

/// Summary record shared by analytic, sweep and optimize outputs.
struct Summary {
  double L, t0, theta0, compliance, r_fin, r_cond, r_conv, biot, duffin_flux;

  static constexpr const char* header = "L,t0,theta0,compliance,r_fin,r_cond,r_conv,biot,duffin_flux";

  std::string csv_row() const {
    std::string row;
    for (double v : {L, t0, theta0, compliance, r_fin, r_cond, r_conv, biot, duffin_flux}) {
      if (!row.empty()) row += ',';
      row += io::format_double(v);
    }
    return row;
  }

  void into(ordered_json& j) const {
    j["L"] = L;
    j["t0"] = t0;
    j["theta0"] = theta0;
    j["compliance"] = compliance;
    j["r_fin"] = r_fin;
    j["r_cond"] = r_cond;
    j["r_conv"] = r_conv;
    j["biot"] = biot;
    j["duffin_flux"] = duffin_flux;
  }
};

Summary analytic_summary(const FinProblem& p) {
  const OptimalSolution s = optimal_solution(p);
  const ResistanceBreakdown r = s.resistance();
  return {s.length, s.root_thickness, s.root_temp_diff, s.compliance, r.r_fin,
          r.r_cond, r.r_conv,         r.biot,           duffin_equivalent_flux(p)};
}

ordered_json totals_json(const FinProblem& p, double theta0, double r_fin) {
  return ordered_json{{"root_temperature", theta0 + p.t_inf},
                      {"total_power", p.total_power()},
                      {"total_compliance", p.total_power() * theta0},
                      {"total_resistance", r_fin / p.width}};
}

/// Collected output files; nothing touches the disk until every table has
/// been produced, so a failing command leaves no partial results.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit() const {
    fs::create_directories(dir_);
    std::vector<std::pair<fs::path, fs::path>> staged;
    for (const auto& [name, content] : files_) {
      const fs::path final_path = dir_ / name;
      fs::path tmp = final_path;
      tmp += ".tmp";
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      os << content;
      os.close();
      if (!os) {
        for (const auto& s : staged) fs::remove(s.first);
        fs::remove(tmp);
        throw std::runtime_error("cannot write " + tmp.string());
      }
      staged.emplace_back(tmp, final_path);
    }
    for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
  }

  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

template <class F>
std::string render(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

std::vector<double> analytic_temperatures(const FinProblem& p, const Mesh& mesh) {
  std::vector<double> theta(mesh.nodes());
  for (std::size_t i = 0; i < mesh.nodes(); ++i) theta[i] = optimal_temperature(p, mesh.node(i), mesh.length());
  return theta;
}

// ---------------------------------------------------------------- analytic

int cmd_analytic(const ProblemFlags& pf, std::size_t n_cells, const OutputFlags& of, std::ostream& out) {
  const FinProblem p = pf.problem();
  p.validate();
  const Summary s = analytic_summary(p);
  const Mesh mesh(n_cells, s.L);

  OutputSet files(of.out_dir);
  if (of.format == "json") {
    ordered_json j;
    s.into(j);
    j["totals"] = totals_json(p, s.theta0, s.r_fin);
    j["config"] = {{"command", "analytic"}, {"problem", problem_json(p)}, {"n_cells", n_cells}};
    files.add("summary.json", j.dump(2) + "\n");
  } else {
    files.add("summary.csv", std::string(Summary::header) + "\n" + s.csv_row() + "\n");
  }
  files.add("profile.csv", render([&](std::ostream& os) { io::write_profile_csv(os, analytic_profile(p, mesh)); }));
  files.add("temperature.csv",
            render([&](std::ostream& os) { io::write_temperature_csv(os, mesh, analytic_temperatures(p, mesh)); }));
  files.commit();

  out << "L = " << io::format_double(s.L) << " m, t0 = " << io::format_double(s.t0)
      << " m, theta0 = " << io::format_double(s.theta0) << " K, compliance = " << io::format_double(s.compliance)
      << " W K/m, Bi = " << io::format_double(s.biot) << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const ProblemFlags& pf, const std::vector<double>& h_values, std::size_t n_cells,
              const OutputFlags& of, std::ostream& out, std::ostream& err) {
  if (h_values.empty()) {
    err << "sweep: the list of convection coefficients is empty\n";
    return kUsageError;
  }
  OutputSet files(of.out_dir);
  std::string summary = std::string("h,") + Summary::header + "\n";
  ordered_json entries = ordered_json::array();
  for (double h : h_values) {
    FinProblem p = pf.problem();
    p.h = h;
    p.validate();
    const Summary s = analytic_summary(p);
    const Mesh mesh(n_cells, s.L);
    const std::string label = io::format_double(h);
    files.add("profile_h" + label + ".csv",
              render([&](std::ostream& os) { io::write_profile_csv(os, analytic_profile(p, mesh)); }));
    files.add("temperature_h" + label + ".csv", render([&](std::ostream& os) {
                io::write_temperature_csv(os, mesh, analytic_temperatures(p, mesh));
              }));
    summary += io::format_double(h) + "," + s.csv_row() + "\n";
    ordered_json e{{"h", h}};
    s.into(e);
    entries.push_back(std::move(e));
    out << "h = " << label << ": L = " << io::format_double(s.L) << " m, t0 = " << io::format_double(s.t0)
        << " m\n";
  }
  files.add("summary.csv", summary);
  if (of.format == "json") {
    FinProblem echo = pf.problem();
    echo.h = 0.0;
    ordered_json j{{"entries", entries},
                   {"config",
                    {{"command", "sweep"}, {"problem", problem_json(echo)}, {"h_values", h_values},
                     {"n_cells", n_cells}}}};
    files.add("summary.json", j.dump(2) + "\n");
  }
  files.commit();
  return kSuccess;
}

// ---------------------------------------------------------------- optimize

struct OptimizeFlags {
  std::size_t n_cells = 1000;
  std::size_t max_inner_iters = 500;
  double oc_damping = 0.5;
  double move_limit = 0.2;
  double lambda_bisect_tol = 1e-10;
  double converge_tol = 1e-8;
  std::optional<double> fixed_length;
  std::optional<double> length_lo;
  std::optional<double> length_hi;
  std::optional<double> length_tol;

  OptimizerOptions options() const {
    OptimizerOptions o;
    o.n_cells = n_cells;
    o.max_inner_iters = max_inner_iters;
    o.oc_damping = oc_damping;
    o.move_limit = move_limit;
    o.lambda_bisect_tol = lambda_bisect_tol;
    o.converge_tol = converge_tol;
    if (length_lo || length_hi) {
      if (!(length_lo && length_hi)) throw DomainError("--length-lo and --length-hi must be given together");
      o.length_bracket = std::pair{*length_lo, *length_hi};
    }
    o.length_tol = length_tol;
    return o;
  }
};

ordered_json optimality_json(const OptimalityCheck& c) {
  return ordered_json{{"grad_temp_cv", c.grad_temp_cv},
                      {"thickness_grad_linfit_residual", c.thickness_grad_linfit_residual},
                      {"tip_temp_ratio", c.tip_temp_ratio},
                      {"selfadjoint_gap", c.selfadjoint_gap},
                      {"temp_grad_mean_ratio", c.temp_grad_mean_ratio},
                      {"thickness_slope_ratio", c.thickness_slope_ratio},
                      {"active_faces", c.active_faces}};
}

ordered_json conditions_json(const std::vector<ConditionResult>& conditions) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : conditions)
    arr.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
  return arr;
}

bool print_conditions(const std::vector<ConditionResult>& conditions, std::ostream& out) {
  bool all = true;
  for (const auto& c : conditions) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << io::format_double(c.value)
        << " (limit " << io::format_double(c.threshold) << ")\n";
    all = all && c.passed;
  }
  return all;
}

// Material beyond the last face above the floor carries no heat, so the
// compliance is nearly flat in L there and the search resolution is set by
// the mesh. Point this out when a sizeable tail sits on the floor.
void warn_floor_tail(const FinProblem& p, const OptimizationReport& report, std::ostream& err) {
  const ThicknessProfile& t = report.profile;
  const std::size_t n = t.mesh().cells();
  const double floor = thickness_floor(p, report.length);
  std::size_t last_active = 0;
  for (std::size_t f = 0; f < n; ++f)
    if (t[f] > floor * (1.0 + 1e-9)) last_active = f;
  const std::size_t tail = n - 1 - last_active;
  if (tail * 100 < n) return;
  err << "note: " << tail << " of " << n << " faces sit on the thickness floor; material ends near x = "
      << io::format_double(t.mesh().node(last_active + 1))
      << " m. Compliance is nearly flat beyond that point; a finer mesh sharpens the length search.\n";
}

int cmd_optimize(const ProblemFlags& pf, const OptimizeFlags& flags, const ThresholdFlags& tf,
                 const OutputFlags& of, std::ostream& out, std::ostream& err) {
  const FinProblem p = pf.problem();
  p.validate();
  const OptimizerOptions opts = flags.options();
  opts.validate();

  const OptimizationReport report =
      flags.fixed_length ? optimize_profile(p, *flags.fixed_length, opts) : optimize_length(p, opts);
  const ResistanceBreakdown r = resistance_breakdown(p, report.compliance, report.length);
  const auto conditions = evaluate_conditions(report.optimality, r.biot, tf.limits);
  const OptimalSolution exact = optimal_solution(p);
  warn_floor_tail(p, report, err);

  ordered_json j;
  const Summary s{report.length, report.profile.root_value(), report.temperature.root_value(),
                  report.compliance, r.r_fin, r.r_cond, r.r_conv, r.biot, duffin_equivalent_flux(p)};
  s.into(j);
  j["lagrange_multiplier"] = report.lagrange_multiplier;
  j["inner_iterations"] = report.inner_iterations;
  j["converged"] = report.converged;
  j["length_evaluations"] = report.length_evaluations;
  j["area"] = report.profile.area();
  j["optimality"] = optimality_json(report.optimality);
  j["conditions"] = conditions_json(conditions);
  j["analytic"] = {{"L", exact.length}, {"compliance", exact.compliance}, {"theta0", exact.root_temp_diff}};
  j["totals"] = totals_json(p, s.theta0, s.r_fin);
  ordered_json cfg{{"command", "optimize"},
                   {"problem", problem_json(p)},
                   {"n_cells", opts.n_cells},
                   {"max_inner_iters", opts.max_inner_iters},
                   {"oc_damping", opts.oc_damping},
                   {"move_limit", opts.move_limit},
                   {"lambda_bisect_tol", opts.lambda_bisect_tol},
                   {"converge_tol", opts.converge_tol},
                   {"thresholds", thresholds_json(tf.limits)}};
  if (flags.fixed_length) cfg["fixed_length"] = *flags.fixed_length;
  if (opts.length_bracket) cfg["length_bracket"] = {opts.length_bracket->first, opts.length_bracket->second};
  if (opts.length_tol) cfg["length_tol"] = *opts.length_tol;
  j["config"] = std::move(cfg);

  OutputSet files(of.out_dir);
  files.add("report.json", j.dump(2) + "\n");
  files.add("history.csv", render([&](std::ostream& os) { io::write_history_csv(os, report.history); }));
  files.add("profile.csv", render([&](std::ostream& os) { io::write_profile_csv(os, report.profile); }));
  files.add("temperature.csv", render([&](std::ostream& os) { io::write_temperature_csv(os, report.temperature); }));
  files.commit();

  out << "L = " << io::format_double(report.length) << " m (analytic " << io::format_double(exact.length)
      << "), compliance = " << io::format_double(report.compliance) << " (analytic "
      << io::format_double(exact.compliance) << "), " << report.inner_iterations << " inner iterations\n";
  return print_conditions(conditions, out) ? kSuccess : kNumericalFailure;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const ProblemFlags& pf, const std::string& profile_path, const ThresholdFlags& tf,
               std::ostream& out, std::ostream& err) {
  std::ifstream in(profile_path);
  if (!in) {
    err << "verify: cannot open " << profile_path << "\n";
    return kUsageError;
  }
  ThicknessProfile profile = [&] {
    try {
      return io::read_profile_csv(in);
    } catch (const ParseError& e) {
      throw ParseError(profile_path + ": " + e.what(), 0);
    }
  }();

  FinProblem p = pf.problem();
  if (!pf.area) p.area = profile.area();
  p.validate();
  const double floor = thickness_floor(p, profile.mesh().length());
  if (profile.min_value() < floor) {
    out << "note: raising faces below the thickness floor " << io::format_double(floor) << " m\n";
    profile = apply_floor(p, std::move(profile));
  }

  const TemperatureField theta = solve_temperature(p, profile);
  const OptimalityCheck check = verify_optimality(p, profile, theta);
  const ResistanceBreakdown r = resistance_breakdown(p, compliance(p, theta), profile.mesh().length());

  out << "L = " << io::format_double(profile.mesh().length()) << " m, area = " << io::format_double(profile.area())
      << " m^2, theta0 = " << io::format_double(theta.root_value())
      << " K, compliance = " << io::format_double(r.compliance) << ", Bi = " << io::format_double(r.biot)
      << ", t0/L = " << io::format_double(profile.root_value() / profile.mesh().length()) << "\n";
  const bool ok = print_conditions(evaluate_conditions(check, r.biot, tf.limits), out);
  return ok ? kSuccess : kNumericalFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal straight-fin design: closed form, discrete verification and shape optimisation",
               "fincli"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  OutputFlags analytic_out, sweep_out, optimize_out;
  ProblemFlags analytic_pf, sweep_pf, optimize_pf, verify_pf;
  std::size_t analytic_cells = 200, sweep_cells = 200;
  OptimizeFlags optimize_flags;
  ThresholdFlags optimize_tf, verify_tf;
  std::vector<double> h_values{20.0, 50.0, 100.0, 200.0};
  std::string profile_path;

  auto* analytic = app.add_subcommand("analytic", "closed-form optimum: summary plus sampled tables");
  add_problem_options(analytic, analytic_pf, true, true);
  analytic->add_option("--n-cells", analytic_cells, "cells used to sample the tables")->capture_default_str();
  add_output_options(analytic, analytic_out);

  auto* sweep = app.add_subcommand("sweep", "closed-form optimum for a list of convection coefficients");
  add_problem_options(sweep, sweep_pf, false, true);
  sweep->add_option("--h-values", h_values, "convection coefficients")->delimiter(',')->capture_default_str();
  sweep->add_option("--n-cells", sweep_cells, "cells used to sample the tables")->capture_default_str();
  add_output_options(sweep, sweep_out);

  auto* optimize = app.add_subcommand("optimize", "numerical shape optimisation");
  add_problem_options(optimize, optimize_pf, true, true);
  optimize->add_option("--n-cells", optimize_flags.n_cells, "mesh cells")->capture_default_str();
  optimize->add_option("--max-inner-iters", optimize_flags.max_inner_iters)->capture_default_str();
  optimize->add_option("--oc-damping", optimize_flags.oc_damping)->capture_default_str();
  optimize->add_option("--move-limit", optimize_flags.move_limit)->capture_default_str();
  optimize->add_option("--lambda-tol", optimize_flags.lambda_bisect_tol)->capture_default_str();
  optimize->add_option("--converge-tol", optimize_flags.converge_tol)->capture_default_str();
  optimize->add_option("--fixed-length", optimize_flags.fixed_length, "skip the length search");
  optimize->add_option("--length-lo", optimize_flags.length_lo, "length search lower bound [m]");
  optimize->add_option("--length-hi", optimize_flags.length_hi, "length search upper bound [m]");
  optimize->add_option("--length-tol", optimize_flags.length_tol, "length search resolution [m]");
  add_threshold_options(optimize, optimize_tf);
  add_output_options(optimize, optimize_out);

  auto* verify = app.add_subcommand("verify", "solve a profile table and check the optimality conditions");
  add_problem_options(verify, verify_pf, true, false);
  verify->add_option("--profile", profile_path, "profile CSV with columns x,t")->required();
  add_threshold_options(verify, verify_tf);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("fincli");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (analytic->parsed()) return cmd_analytic(analytic_pf, analytic_cells, analytic_out, out);
    if (sweep->parsed()) return cmd_sweep(sweep_pf, h_values, sweep_cells, sweep_out, out, err);
    if (optimize->parsed()) return cmd_optimize(optimize_pf, optimize_flags, optimize_tf, optimize_out, out, err);
    if (verify->parsed()) return cmd_verify(verify_pf, profile_path, verify_tf, out, err);
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const OptimizerError& e) {
    err << "optimizer failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kUsageError;
}

}  // namespace fincli

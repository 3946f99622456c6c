// crnosc: analyze bimolecular mass-action networks for oscillatory
// dynamics. Subcommands cover parsing, structural reports, equilibria,
// linear stability, Hopf scans, focal values, simulation, limit-cycle and
// permanence probes.
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "crnosc/dynamics.hpp"
#include "crnosc/hopf.hpp"
#include "crnosc/netdsl.hpp"
#include "crnosc/report_io.hpp"
#include "crnosc/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace crn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysis = 1;
constexpr int kExitUsage = 2;

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string format = "json";
  double tol_abs = 1e-9;
  double tol_rel = 1e-9;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ArtifactWriter {
 public:
  explicit ArtifactWriter(const GlobalOpts& g) : g_(g) {}

  std::string write(const std::string& name, const std::string& content) const {
    fs::create_directories(g_.out_dir);
    fs::path path = fs::path(g_.out_dir) / name;
    write_file(path.string(), content);
    std::cout << "wrote " << path.string() << "\n";
    return path.string();
  }

  std::string write_json(const std::string& name, const json& j) const {
    return write(name, j.dump(2) + "\n");
  }

 private:
  const GlobalOpts& g_;
};

// Model parameters arrive either as dedicated flags (--k6 0.187, --p 8) or
// as a --k list ("3.5,1,1,1,1" or "k1=3.5,k2=1").
struct ParamOpts {
  std::map<std::string, double> named;
  std::string k_list;
  double t = 1.0;
  bool has_t = false;

  void register_options(CLI::App* cmd) {
    static const char* names[] = {"k1", "k2", "k3", "k4", "k5", "k6", "k7", "k8",
                                  "p", "q", "r", "s"};
    for (const char* n : names) {
      cmd->add_option_function<double>(
          std::string("--") + n, [this, n](double v) { named[n] = v; },
          std::string("model parameter ") + n);
    }
    cmd->add_option("--k", k_list, "comma-separated rate list (positional or name=value)");
    cmd->add_option_function<double>(
        "--t",
        [this](double v) {
          t = v;
          has_t = true;
        },
        "equilibrium branch parameter for the homogenised models");
  }

  std::map<std::string, double> resolve(ModelId id) const {
    std::map<std::string, double> params = named;
    if (!k_list.empty()) {
      auto names = model_param_names(id);
      std::stringstream ss(k_list);
      std::string item;
      std::size_t index = 0;
      while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq != std::string::npos) {
          params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } else {
          if (index >= names.size())
            throw UsageError("--k has more entries than model parameters");
          params[names[index++]] = std::stod(item);
        }
      }
    }
    return params;
  }
};

ModelId parse_model(const std::string& name) {
  auto id = model_from_string(name);
  if (!id)
    throw UsageError("unknown model '" + name + "' (use fb, fb-h, wh, wh-h, w, w-h)");
  return *id;
}

ReactionNetwork load_network_file(const std::string& path) {
  NetworkSource src{read_file(path), path};
  auto result = parse_network(src);
  for (auto& d : result.diagnostics) std::cerr << d.format(path) << "\n";
  if (!result.ok()) throw std::runtime_error("parse failed for " + path);
  return *result.network;
}

RateAssignment load_rates_file(const std::string& path) {
  RateAssignment rates;
  std::istringstream is(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'label = value'");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    rates.values[trim(line.substr(0, eq))] = std::stod(line.substr(eq + 1));
  }
  return rates;
}

RateAssignment rates_from_list(const ReactionNetwork& net, const std::string& list) {
  RateAssignment rates;
  std::stringstream ss(list);
  std::string item;
  int index = 0;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq != std::string::npos) {
      rates.values[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } else {
      if (index >= net.num_reactions())
        throw UsageError("--k has more entries than reactions");
      rates.values[net.reactions[index++].rate_label] = std::stod(item);
    }
  }
  return rates;
}

Eigen::VectorXd parse_point(const std::string& text, int dim) {
  std::stringstream ss(text);
  std::string item;
  std::vector<double> vals;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  if (static_cast<int>(vals.size()) != dim)
    throw UsageError("expected " + std::to_string(dim) + " comma-separated values");
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = vals[i];
  return x;
}

ScanAxis parse_axis(const std::string& spec, int res) {
  auto c1 = spec.find(':');
  auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw UsageError("axis spec must be name:lo:hi, got '" + spec + "'");
  ScanAxis axis;
  axis.name = spec.substr(0, c1);
  axis.lo = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  axis.hi = std::stod(spec.substr(c2 + 1));
  axis.count = res;
  if (!(axis.hi > axis.lo) || res < 2) throw UsageError("axis range has zero area");
  return axis;
}

json params_json(const std::map<std::string, double>& params) {
  json j = json::object();
  for (auto& [k, v] : params) j[k] = v;
  return j;
}

json competitivity_json(const MassActionSystem& sys, std::uint64_t seed) {
  if (sys.dim() != 3) return nullptr;
  Rng rng(seed ^ 0xc0115eedull);
  std::vector<Eigen::VectorXd> samples;
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd x(3);
    for (int c = 0; c < 3; ++c) x[c] = rng.log_uniform(0.05, 20.0);
    samples.push_back(x);
  }
  auto pattern = competitive_pattern_search(sys, samples);
  if (!pattern) return {{"competitive", false}};
  return {{"competitive", true}, {"flips", pattern->flips}, {"samples", 200}};
}

struct ModelArgs {
  std::string model;
  std::string file;
  std::string rates_file;
  ParamOpts params;

  void register_options(CLI::App* cmd, bool with_file = true) {
    cmd->add_option("--model", model, "builtin model id (fb, fb-h, wh, wh-h, w, w-h)");
    if (with_file) {
      cmd->add_option("--file", file, "reaction network .crn file");
      cmd->add_option("--rates", rates_file, "rate bindings file (label = value lines)");
    }
    params.register_options(cmd);
  }

  bool is_model() const {
    if (!model.empty() && !file.empty())
      throw UsageError("--model and --file are mutually exclusive");
    if (model.empty() && file.empty())
      throw UsageError("one of --model or --file is required");
    return !model.empty();
  }

  ModelInstance instance() const {
    ModelId id = parse_model(model);
    return builtin_model(id, params.resolve(id));
  }

  MassActionSystem system() const {
    if (is_model()) return instance().system;
    ReactionNetwork net = load_network_file(file);
    if (!rates_file.empty()) return MassActionSystem(net, load_rates_file(rates_file));
    if (!params.k_list.empty())
      return MassActionSystem(net, rates_from_list(net, params.k_list));
    throw UsageError("--file needs --rates or --k to bind rate constants");
  }

  bool has_rates() const {
    return is_model() || !rates_file.empty() || !params.k_list.empty();
  }
};

int cmd_parse(const GlobalOpts& g, const std::string& file, const std::string& out_name) {
  NetworkSource src{read_file(file), file};
  auto result = parse_network(src);
  for (auto& d : result.diagnostics) std::cerr << d.format(file) << "\n";
  if (!result.ok()) return kExitAnalysis;
  std::string canonical = render_network(*result.network);
  if (out_name.empty())
    std::cout << canonical;
  else
    ArtifactWriter(g).write(out_name, canonical);
  return kExitOk;
}

int cmd_analyze(const GlobalOpts& g, const ModelArgs& args, bool gamma_csv) {
  ArtifactWriter w(g);
  ReactionNetwork net = args.is_model() ? builtin_network(parse_model(args.model))
                                        : load_network_file(args.file);
  json out;
  out["schema_version"] = kSchemaVersion;
  out["network"] = net.name;
  out["species"] = net.species;
  out["structure"] = to_json(structural_report(net));

  if (args.has_rates()) {
    MassActionSystem sys = args.system();
    if (args.is_model()) out["params"] = params_json(args.instance().params);
    Eigen::VectorXd eq;
    if (args.is_model()) {
      eq = closed_form_equilibrium(args.instance(), args.params.t);
    } else {
      auto res = find_equilibrium(sys, Eigen::VectorXd::Ones(sys.dim()));
      if (!res.ok()) throw std::runtime_error("newton failed to locate an equilibrium");
      eq = res.point;
    }
    json je = json::array();
    for (int i = 0; i < eq.size(); ++i) je.push_back(eq[i]);
    out["equilibrium"] = je;
    out["stability"] = to_json(classify_equilibrium(sys, eq));
    out["detailed_balance"] = is_reversible(sys.network())
                                  ? to_json(detailed_balance_check(sys))
                                  : json(nullptr);
    out["competitivity"] = competitivity_json(sys, g.seed);
  }
  w.write_json("analysis.json", out);
  if (gamma_csv || g.format == "csv")
    w.write("gamma.csv", to_csv(stoichiometric_matrix(net)));
  return kExitOk;
}

int cmd_equilibria(const GlobalOpts& g, const ModelArgs& args, const std::string& anchor_text) {
  ArtifactWriter w(g);
  ModelInstance inst = args.instance();
  json out;
  out["schema_version"] = kSchemaVersion;
  out["model"] = to_string(inst.id);
  out["params"] = params_json(inst.params);
  out["t"] = args.params.t;
  Eigen::VectorXd eq = closed_form_equilibrium(inst, args.params.t);
  json je = json::array();
  for (int i = 0; i < eq.size(); ++i) je.push_back(eq[i]);
  out["closed_form"] = je;
  out["residual"] = inst.system.relative_residual(eq);

  Eigen::VectorXd anchor = eq;
  if (!anchor_text.empty()) anchor = parse_point(anchor_text, inst.system.dim());
  auto res = find_equilibrium(inst.system, anchor);
  json jn;
  jn["converged"] = res.ok();
  jn["iterations"] = res.iterations;
  jn["residual"] = res.residual;
  json jp = json::array();
  for (int i = 0; i < res.point.size(); ++i) jp.push_back(res.point[i]);
  jn["point"] = jp;
  out["newton"] = jn;
  w.write_json("equilibria.json", out);
  return res.ok() ? kExitOk : kExitAnalysis;
}

int cmd_stability(const GlobalOpts& g, const ModelArgs& args, const std::string& point_text) {
  ArtifactWriter w(g);
  MassActionSystem sys = args.system();
  Eigen::VectorXd x;
  if (!point_text.empty()) {
    x = parse_point(point_text, sys.dim());
  } else if (args.is_model()) {
    x = closed_form_equilibrium(args.instance(), args.params.t);
  } else {
    auto res = find_equilibrium(sys, Eigen::VectorXd::Ones(sys.dim()));
    if (!res.ok()) throw std::runtime_error("newton failed to locate an equilibrium");
    x = res.point;
  }
  w.write_json("stability.json", to_json(classify_equilibrium(sys, x)));
  return kExitOk;
}

int cmd_hopf_scan(const GlobalOpts& g, const std::string& model, const std::string& p1,
                  const std::string& p2, int res, const std::string& fixed_text) {
  ArtifactWriter w(g);
  ModelId id = parse_model(model);
  std::map<std::string, double> fixed;
  if (!fixed_text.empty()) {
    std::stringstream ss(fixed_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--fix expects name=value pairs");
      fixed[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
  }
  HopfScanResult scan = hopf_scan(id, fixed, parse_axis(p1, res), parse_axis(p2, res));
  w.write("scan.csv", scan_csv(scan));
  w.write("boundary.csv", boundary_csv(scan));
  w.write("diagram.svg", hopf_diagram_svg(scan));
  json out;
  out["schema_version"] = kSchemaVersion;
  out["model"] = model;
  out["boundary_points"] = scan.boundary.size();
  json dg = json::array();
  for (auto& [a, b] : scan.degenerate_points) dg.push_back({a, b});
  out["degenerate_points"] = dg;
  w.write_json("scan_summary.json", out);
  return kExitOk;
}

int cmd_focal(const GlobalOpts& g, const ModelArgs& args) {
  ArtifactWriter w(g);
  ModelInstance inst = args.instance();
  Eigen::VectorXd eq = closed_form_equilibrium(inst, args.params.t);
  json out;
  out["schema_version"] = kSchemaVersion;
  out["model"] = to_string(inst.id);
  out["params"] = params_json(inst.params);
  out["t"] = args.params.t;
  FocalValue pipeline = focal_value_at(inst, eq);
  out["pipeline_L1"] = pipeline.L1;
  try {
    auto p = inst.params;
    p["t"] = args.params.t;
    out["closed_form_L1"] = closed_form_L1(inst.id, p);
  } catch (const std::invalid_argument&) {
    out["closed_form_L1"] = nullptr;
  }
  if (auto frame = closed_form_frame(inst, args.params.t)) {
    out["closed_frame_L1"] = focal_value_with_frame(inst.system, eq, *frame).L1;
  } else {
    out["closed_frame_L1"] = nullptr;
  }
  w.write_json("focal.json", out);
  return kExitOk;
}

int cmd_simulate(const GlobalOpts& g, const ModelArgs& args, const std::string& t0,
                 double horizon, int samples, const std::string& phase) {
  ArtifactWriter w(g);
  MassActionSystem sys = args.system();
  Eigen::VectorXd x0;
  if (t0 == "near-eq" || t0.empty()) {
    Eigen::VectorXd eq;
    if (args.is_model()) {
      eq = closed_form_equilibrium(args.instance(), args.params.t);
    } else {
      auto res = find_equilibrium(sys, Eigen::VectorXd::Ones(sys.dim()));
      if (!res.ok()) throw std::runtime_error("newton failed to locate an equilibrium");
      eq = res.point;
    }
    SectionSpec section = default_section(sys, eq);
    x0 = eq + 0.05 * eq.norm() * section.normal;
  } else {
    x0 = parse_point(t0, sys.dim());
  }
  IntegratorOptions opts;
  opts.abs_tol = g.tol_abs;
  opts.rel_tol = g.tol_rel;
  Trajectory traj = integrate_sampled(sys, x0, horizon, samples, opts);
  w.write("trajectory.csv", trajectory_csv(traj, sys.network().species));
  if (!phase.empty()) {
    auto comma = phase.find(',');
    if (comma == std::string::npos) throw UsageError("--phase expects two species names");
    int cx = sys.network().species_index(phase.substr(0, comma));
    int cy = sys.network().species_index(phase.substr(comma + 1));
    if (cx < 0 || cy < 0) throw UsageError("--phase names unknown species");
    w.write("phase.svg", phase_portrait_svg(traj, cx, cy, sys.network().species));
  }
  return kExitOk;
}

int cmd_cycles(const GlobalOpts& g, const ModelArgs& args, double radius) {
  ArtifactWriter w(g);
  ModelInstance inst = args.instance();
  Eigen::VectorXd eq = closed_form_equilibrium(inst, args.params.t);
  StabilityReport stab = classify_equilibrium(inst.system, eq);
  SectionSpec section = default_section(inst.system, eq);

  json out;
  out["schema_version"] = kSchemaVersion;
  out["model"] = to_string(inst.id);
  out["params"] = params_json(inst.params);
  out["t"] = args.params.t;
  out["equilibrium_class"] = to_string(stab.classification);

  const auto& species = inst.system.network().species;
  if (stab.classification == StabilityClass::Stable) {
    BistabilityReport rep = bistability_probe(inst.system, eq);
    out["bistability"] = to_json(rep);
    if (rep.stable_cycle && rep.stable_cycle->outcome == CycleOutcome::Cycle)
      w.write("cycle_stable.csv", cycle_csv(*rep.stable_cycle, species));
    if (rep.unstable_cycle && rep.unstable_cycle->outcome == CycleOutcome::Cycle)
      w.write("cycle_unstable.csv", cycle_csv(*rep.unstable_cycle, species));
    w.write_json("cycles.json", out);
    return kExitOk;
  }
  Eigen::VectorXd seed = eq + radius * (1.0 + eq.norm()) * section.normal;
  LimitCycleReport rep = find_limit_cycle(inst.system, seed, section);
  out["cycle"] = to_json(rep);
  if (rep.outcome == CycleOutcome::Cycle) w.write("cycle_stable.csv", cycle_csv(rep, species));
  w.write_json("cycles.json", out);
  return rep.outcome == CycleOutcome::Inconclusive ? kExitAnalysis : kExitOk;
}

int cmd_permanence(const GlobalOpts& g, const ModelArgs& args, int starts,
                   double t_transient, double t_window) {
  ArtifactWriter w(g);
  ModelInstance inst = args.instance();
  Eigen::VectorXd anchor = closed_form_equilibrium(inst, args.params.t);
  IntegratorOptions opts;
  opts.abs_tol = g.tol_abs;
  opts.rel_tol = g.tol_rel;
  PermanenceReport rep =
      permanence_probe(inst.system, anchor, starts, t_transient, t_window, g.seed, opts);
  json out = to_json(rep);
  out["model"] = to_string(inst.id);
  out["params"] = params_json(inst.params);
  w.write_json("permanence.json", out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oscillation analysis for bimolecular mass-action reaction networks"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "PRNG seed for sampled computations");
  app.add_option("--out-dir", g.out_dir, "directory for generated artifacts");
  app.add_option("--format", g.format, "preferred report format (json|csv)")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol-abs", g.tol_abs, "integrator absolute tolerance");
  app.add_option("--tol-rel", g.tol_rel, "integrator relative tolerance");

  auto* sc_parse =
      app.add_subcommand("parse", "parse a .crn file and print its canonical form");
  std::string parse_file, parse_out;
  sc_parse->add_option("--file", parse_file, ".crn source")->required();
  sc_parse->add_option("--out", parse_out, "write the canonical form to this artifact");

  auto* sc_analyze =
      app.add_subcommand("analyze", "structural report plus stability when rates are bound");
  ModelArgs analyze_args;
  analyze_args.register_options(sc_analyze);
  bool analyze_gamma = false;
  sc_analyze->add_flag("--gamma-csv", analyze_gamma,
                       "also write the stoichiometric matrix as CSV");

  auto* sc_eq = app.add_subcommand("equilibria",
                                   "closed-form equilibrium branch and Newton cross-check");
  ModelArgs eq_args;
  eq_args.register_options(sc_eq, /*with_file=*/false);
  std::string eq_anchor;
  sc_eq->add_option("--anchor", eq_anchor, "Newton start (comma-separated point)");

  auto* sc_stab = app.add_subcommand("stability", "linear stability report at an equilibrium");
  ModelArgs stab_args;
  stab_args.register_options(sc_stab);
  std::string stab_point;
  sc_stab->add_option("--point", stab_point, "equilibrium point (comma-separated)");

  auto* sc_scan = app.add_subcommand("hopf-scan", "two-parameter bifurcation diagram");
  std::string scan_model, scan_p1, scan_p2, scan_fix;
  int scan_res = 100;
  sc_scan->add_option("--model", scan_model)->required();
  sc_scan->add_option("--p1", scan_p1, "first axis, name:lo:hi")->required();
  sc_scan->add_option("--p2", scan_p2, "second axis, name:lo:hi")->required();
  sc_scan->add_option("--res", scan_res, "grid resolution per axis");
  sc_scan->add_option("--fix", scan_fix, "fixed parameters, name=value[,name=value...]");

  auto* sc_focal = app.add_subcommand("focal", "first focal value at a Hopf point");
  ModelArgs focal_args;
  focal_args.register_options(sc_focal, /*with_file=*/false);

  auto* sc_sim = app.add_subcommand("simulate", "integrate and export a trajectory");
  ModelArgs sim_args;
  sim_args.register_options(sc_sim);
  std::string sim_t0 = "near-eq", sim_phase;
  double sim_horizon = 100.0;
  int sim_samples = 2000;
  sc_sim->add_option("--t0", sim_t0, "initial state: 'near-eq' or comma-separated point");
  sc_sim->add_option("--horizon", sim_horizon, "integration horizon");
  sc_sim->add_option("--samples", sim_samples, "number of CSV samples");
  sc_sim->add_option("--phase", sim_phase, "phase-portrait species pair, e.g. X,Y");

  auto* sc_cycles =
      app.add_subcommand("cycles", "limit-cycle detection and bistability probe");
  ModelArgs cycles_args;
  cycles_args.register_options(sc_cycles, /*with_file=*/false);
  double cycles_radius = 0.3;
  sc_cycles->add_option("--radius", cycles_radius,
                        "seed offset (relative) for unstable equilibria");

  auto* sc_perm = app.add_subcommand("permanence",
                                     "post-transient coordinate floor over random starts");
  ModelArgs perm_args;
  perm_args.register_options(sc_perm, /*with_file=*/false);
  int perm_starts = 20;
  double perm_transient = 500.0, perm_window = 500.0;
  sc_perm->add_option("--starts", perm_starts, "number of random starts");
  sc_perm->add_option("--t-transient", perm_transient, "discarded transient time");
  sc_perm->add_option("--t-window", perm_window, "observation window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sc_parse->parsed()) return cmd_parse(g, parse_file, parse_out);
    if (sc_analyze->parsed()) return cmd_analyze(g, analyze_args, analyze_gamma);
    if (sc_eq->parsed()) return cmd_equilibria(g, eq_args, eq_anchor);
    if (sc_stab->parsed()) return cmd_stability(g, stab_args, stab_point);
    if (sc_scan->parsed())
      return cmd_hopf_scan(g, scan_model, scan_p1, scan_p2, scan_res, scan_fix);
    if (sc_focal->parsed()) return cmd_focal(g, focal_args);
    if (sc_sim->parsed())
      return cmd_simulate(g, sim_args, sim_t0, sim_horizon, sim_samples, sim_phase);
    if (sc_cycles->parsed()) return cmd_cycles(g, cycles_args, cycles_radius);
    if (sc_perm->parsed())
      return cmd_permanence(g, perm_args, perm_starts, perm_transient, perm_window);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysis;
  }
  return kExitUsage;
}

#include "trilinear/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>

#include "trilinear/closed_form.hpp"
#include "trilinear/csv.hpp"
#include "trilinear/errors.hpp"
#include "trilinear/fock_oracle.hpp"
#include "trilinear/moments.hpp"
#include "trilinear/parallel.hpp"

namespace trilinear::cli {
namespace {

using nlohmann::ordered_json;

struct HelpRequested {
  std::string text;
};

constexpr std::size_t kDefaultSamples = 2001;
constexpr std::size_t kDefaultEnsembleSamples = 20001;
constexpr double kDefaultTauMax = 2.0;

ordered_json ode_provenance(const moments::ClosureOptions& opts) {
  return {{"integrator", "dormand_prince_5_4"},
          {"rtol", opts.ode.rtol},
          {"atol", opts.ode.atol},
          {"output", "steps land on grid points"},
          {"negative_variance_abort", opts.negative_variance_abort},
          {"negative_variance_floor", opts.negative_variance_floor},
          {"mean_band", opts.mean_band}};
}

ordered_json params_provenance(const closed_form::EllipticParams& p) {
  return {{"n", p.n},
          {"m", p.m},
          {"omega", p.omega},
          {"k_complete", p.k_complete},
          {"period", p.period()},
          {"residual_first", p.residuals.first},
          {"residual_second", p.residuals.second},
          {"residual_normalization", "omega^4"},
          {"newton_iterations", p.newton_iterations},
          {"branch", p.branch}};
}

std::vector<double> seconds_column(const std::vector<double>& tau, double rabi_hz) {
  const double omega = 2.0 * std::numbers::pi * rabi_hz;
  std::vector<double> t(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) t[i] = tau[i] / omega;
  return t;
}

std::vector<double> grid_for(const RunConfig& c, double default_tau_max,
                             std::size_t default_samples) {
  const double tau_max = c.tau_max > 0.0 ? c.tau_max : default_tau_max;
  const std::size_t samples = c.samples > 0 ? c.samples : default_samples;
  return uniform_grid(tau_max, samples);
}

// Writes either the CSV table or the JSON document (table columns inlined
// under "columns").
void emit(const RunConfig& c, std::ostream& out, const csv::Table& table,
          ordered_json doc, bool inline_columns = true) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.output_path.empty()) {
    file.open(c.output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cli", "cannot open output file " + c.output_path);
    sink = &file;
  }
  if (c.format == OutputFormat::csv) {
    csv::write(*sink, table);
  } else {
    if (inline_columns) {
      ordered_json cols = ordered_json::object();
      for (std::size_t i = 0; i < table.header.size(); ++i) {
        cols[table.header[i]] = table.columns[i];
      }
      doc["columns"] = std::move(cols);
    }
    *sink << doc.dump(2) << '\n';
  }
  sink->flush();
  if (!*sink) throw Error("cli", "failed writing output");
}

void maybe_add_seconds(const RunConfig& c, csv::Table& table,
                       const std::vector<double>& tau) {
  if (c.rabi_hz) table.add("t_seconds", seconds_column(tau, *c.rabi_hz));
}

ordered_json system_json(const SystemSpec& s) {
  return {{"n_excited", s.n_excited}, {"n_ground", s.n_ground},
          {"n_photons", s.n_photons}};
}

ordered_json charges_json(const ConservedCharges& q) {
  return {{"s_a", q.s_a}, {"s_e", q.s_e}, {"a_bar", q.a_bar},
          {"b_bar", q.b_bar}, {"c_bar", q.c_bar}};
}

bool is_number_state(const SystemSpec& s) {
  return s.n_ground == 0 && s.n_photons == 0;
}

void run_simulate(const RunConfig& c, std::ostream& out) {
  c.spec.validate();
  const auto tau = grid_for(c, kDefaultTauMax, kDefaultSamples);
  const moments::ClosureOptions opts;
  const double n0 = static_cast<double>(c.spec.n_excited);
  ordered_json prov = {{"method", std::string(to_string(c.method))},
                       {"time_unit", "tau = Omega t"}};

  Trajectory traj;
  switch (c.method) {
    case Method::exact:
      traj = fock::evolve_exact(c.spec, tau);
      prov["eigensolver"] = "implicit-shift QL on the conserved-charge chain";
      prov["chain_dimension"] = fock::build_chain(c.spec).dim();
      break;
    case Method::vanishing_variance:
      traj = moments::vanishing_variance_trajectory(fock::conserved_charges(c.spec),
                                                    n0, tau, opts);
      prov["ode"] = ode_provenance(opts);
      break;
    case Method::vanishing_asymmetry:
      traj = moments::vanishing_asymmetry_trajectory(fock::conserved_charges(c.spec),
                                                     n0, tau, opts);
      prov["ode"] = ode_provenance(opts);
      break;
    case Method::quartic:
      traj = moments::quartic_trajectory(fock::conserved_charges(c.spec), n0, tau,
                                         opts);
      prov["ode"] = ode_provenance(opts);
      break;
    case Method::closed_form: {
      if (!is_number_state(c.spec)) {
        throw UsageError("closed_form needs --n-ground 0 --n-photons 0");
      }
      const auto params =
          closed_form::solve_elliptic_params(static_cast<int>(c.spec.n_excited));
      traj = closed_form::closed_form_trajectory(params, tau);
      prov["elliptic_params"] = params_provenance(params);
      break;
    }
    case Method::ensemble:
      throw UsageError("use the ensemble command for ensemble curves");
  }

  csv::Table table;
  table.add("tau", traj.tau);
  table.add("mean_ne", traj.mean_ne);
  table.add("delta_e", traj.has_variance() ? traj.delta_e()
                                           : std::vector<double>(tau.size(), 0.0));
  maybe_add_seconds(c, table, traj.tau);

  ordered_json doc = {{"command", "simulate"},
                      {"method", std::string(to_string(c.method))},
                      {"system", system_json(c.spec)}};
  if (traj.charges) doc["charges"] = charges_json(*traj.charges);
  doc["provenance"] = std::move(prov);
  emit(c, out, table, std::move(doc));
}

void run_compare(const RunConfig& c, std::ostream& out) {
  if (!is_number_state(c.spec)) {
    throw UsageError("compare takes only --n-excited (number state, no photons)");
  }
  c.spec.validate();
  const auto tau = grid_for(c, kDefaultTauMax, kDefaultSamples);
  const auto n = static_cast<int>(c.spec.n_excited);
  const auto charges = fock::conserved_charges(c.spec);
  const moments::ClosureOptions opts;

  const auto exact = fock::evolve_exact(c.spec, tau);
  const auto vv = moments::vanishing_variance_trajectory(charges, n, tau, opts);
  const auto va = moments::vanishing_asymmetry_trajectory(charges, n, tau, opts);
  const auto params = closed_form::solve_elliptic_params(n);
  const auto cf = closed_form::closed_form_trajectory(params, tau);

  csv::Table table;
  table.add("tau", tau);
  table.add("exact", exact.mean_ne);
  table.add("vanishing_variance", vv.mean_ne);
  table.add("vanishing_asymmetry", va.mean_ne);
  table.add("closed_form", cf.mean_ne);
  table.add("delta_e_exact", exact.delta_e());
  table.add("delta_e_vanishing_asymmetry", va.delta_e());
  table.add("delta_e_closed_form", cf.delta_e());
  maybe_add_seconds(c, table, tau);

  ordered_json doc = {{"command", "compare"},
                      {"system", system_json(c.spec)},
                      {"charges", charges_json(charges)},
                      {"provenance",
                       {{"time_unit", "tau = Omega t"},
                        {"ode", ode_provenance(opts)},
                        {"elliptic_params", params_provenance(params)}}}};
  emit(c, out, table, std::move(doc));
}

std::map<int, double> read_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open weights file " + path);
  const csv::Table t = csv::read(in);
  std::map<int, double> w;
  try {
    const auto& ls = t.column("l");
    const auto& ws = t.column("weight");
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (ls[i] != std::floor(ls[i])) throw UsageError("weights: l must be integer");
      w[static_cast<int>(ls[i])] += ws[i];
    }
  } catch (const std::out_of_range&) {
    throw UsageError("weights file needs columns l,weight");
  }
  if (w.empty()) throw UsageError("weights file is empty");
  return w;
}

void run_ensemble(const RunConfig& c, std::ostream& out, std::ostream& log) {
  ensemble::EnsembleSpec spec;
  if (!c.weights_path.empty()) {
    spec = ensemble::EnsembleSpec::custom(read_weights(c.weights_path), c.per_l);
  } else {
    if (!(c.nbar > 0.0)) throw UsageError("ensemble needs --nbar > 0 or --weights");
    spec = ensemble::EnsembleSpec::poisson(c.nbar, c.per_l);
  }
  spec.truncation_sigmas = c.truncation_sigmas;

  const auto pred = closed_form::predict_times(spec.nbar);
  const auto tau = grid_for(c, 1.2 * pred.t_revival, kDefaultEnsembleSamples);
  const auto traj = ensemble::ensemble_mean(spec, tau);
  const auto weights = ensemble::build_weights(spec);
  const double baseline = c.baseline.value_or(pred.plateau);
  ensemble::RevivalOptions ropts;
  ropts.threshold_fraction = c.revival_threshold;
  ropts.window = c.revival_window;
  const auto revivals = ensemble::detect_revivals(traj, baseline, ropts);

  csv::Table table;
  table.add("tau", tau);
  table.add("mean_ne", traj.mean_ne);
  if (traj.has_variance()) table.add("delta_e", traj.delta_e());
  maybe_add_seconds(c, table, tau);

  csv::Table rtable;
  std::vector<double> centers, proms, heights;
  ordered_json rjson = ordered_json::array();
  for (const auto& r : revivals) {
    centers.push_back(r.tau_center);
    proms.push_back(r.prominence);
    heights.push_back(r.height);
    rjson.push_back({{"tau_center", r.tau_center},
                     {"prominence", r.prominence},
                     {"height", r.height}});
  }
  rtable.add("tau_center", centers);
  rtable.add("prominence", proms);
  rtable.add("height", heights);
  if (!c.revivals_path.empty()) {
    std::ofstream f(c.revivals_path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cli", "cannot open revivals file " + c.revivals_path);
    csv::write(f, rtable);
  }
  for (const auto& r : revivals) {
    log << "revival at tau = " << csv::format_number(r.tau_center)
        << " prominence = " << csv::format_number(r.prominence) << '\n';
  }

  ordered_json fractional = ordered_json::object();
  for (const auto& [r, t] : pred.fractional) fractional[std::to_string(r)] = t;
  ordered_json doc = {
      {"command", "ensemble"},
      {"nbar", spec.nbar},
      {"weights", spec.custom_weights.empty() ? "poisson" : "custom"},
      {"revivals", rjson},
      {"prediction",
       {{"t_period", pred.t_period},
        {"t_revival", pred.t_revival},
        {"fractional", fractional},
        {"plateau", pred.plateau}}},
      {"provenance",
       {{"time_unit", "tau = Omega t"},
        {"per_l_method",
         c.per_l == ensemble::PerLMethod::exact ? "exact" : "closed_form"},
        {"per_l_below_min_atoms", "exact"},
        {"min_atoms_closed_form", closed_form::kMinAtoms},
        {"l_first", weights.first_l},
        {"l_last", weights.first_l + static_cast<int>(weights.weights.size()) - 1},
        {"tail_mass", weights.tail_mass},
        {"truncation_sigmas", spec.truncation_sigmas},
        {"summation", "ascending l, Neumaier compensated"},
        {"baseline", baseline},
        {"revival_threshold_fraction", c.revival_threshold}}}};
  emit(c, out, table, std::move(doc));
}

void run_predict(const RunConfig& c, std::ostream& out) {
  if (!(c.nbar > 0.0)) throw UsageError("predict needs --nbar");
  const auto p = closed_form::predict_times(c.nbar);

  csv::Table table;
  table.add("nbar", {p.nbar});
  table.add("t_period", {p.t_period});
  table.add("t_period_exact", {p.t_period_exact.value_or(std::nan(""))});
  table.add("t_revival", {p.t_revival});
  table.add("plateau", {p.plateau});
  for (const auto& [r, t] : p.fractional) {
    table.add("t_revival_" + std::to_string(r), {t});
  }

  ordered_json fractional = ordered_json::object();
  for (const auto& [r, t] : p.fractional) fractional[std::to_string(r)] = t;
  ordered_json doc = {{"command", "predict"},
                      {"nbar", p.nbar},
                      {"t_period", p.t_period},
                      {"t_period_exact", p.t_period_exact
                                             ? ordered_json(*p.t_period_exact)
                                             : ordered_json(nullptr)},
                      {"t_revival", p.t_revival},
                      {"fractional", fractional},
                      {"plateau", p.plateau}};
  ordered_json prov = {{"time_unit", "tau = Omega t"},
                       {"t_period", "ln(8 n) / sqrt(n + 2)"},
                       {"t_period_exact", "2 K(m) / omega at nearest integer n"},
                       {"t_revival", "2 sqrt(n) ln^2(8 n) / (ln(8 n) - 2)"},
                       {"plateau", "n (1 - 1 / ln(8 n))"}};
  const auto nearest = std::lround(c.nbar);
  if (nearest >= closed_form::kMinAtoms) {
    prov["elliptic_params"] =
        params_provenance(closed_form::solve_elliptic_params(static_cast<int>(nearest)));
  }
  doc["provenance"] = std::move(prov);
  emit(c, out, table, std::move(doc), false);
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Excited-atom dynamics under the trilinear Hamiltonian", "trilinear"};
  app.set_config("--config", "", "key=value configuration file");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RunConfig c;
  std::string command;
  std::string method = "exact";
  std::string per_l = "closed_form";
  std::string format;
  std::int64_t n_excited = 0;
  std::int64_t n_ground = 0;
  std::int64_t n_photons = 0;

  app.add_option("command", command, "simulate | compare | ensemble | predict")
      ->check(CLI::IsMember({"simulate", "compare", "ensemble", "predict"}));
  app.add_option("--n-excited", n_excited, "initially excited atoms")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--n-ground", n_ground, "initial ground-state atoms")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--n-photons", n_photons, "initial cavity photons")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--method", method, "trajectory method for simulate")
      ->check(CLI::IsMember({"exact", "vanishing_variance", "vanishing_asymmetry",
                             "quartic", "closed_form"}));
  app.add_option("--nbar", c.nbar, "mean atom number")->check(CLI::PositiveNumber);
  app.add_option("--per-l", per_l, "per-number-state curves for ensemble")
      ->check(CLI::IsMember({"closed_form", "exact"}));
  app.add_option("--sigmas", c.truncation_sigmas, "Poisson truncation in sigmas")
      ->check(CLI::PositiveNumber);
  app.add_option("--weights", c.weights_path, "CSV with columns l,weight");
  app.add_option("--revival-threshold", c.revival_threshold,
                 "minimum revival prominence as a fraction of nbar")
      ->check(CLI::PositiveNumber);
  app.add_option("--revival-window", c.revival_window,
                 "envelope half-width in tau")
      ->check(CLI::PositiveNumber);
  app.add_option("--baseline", c.baseline, "baseline for revival detection");
  app.add_option("--revivals", c.revivals_path, "write detected revivals as CSV");
  app.add_option("--tau-max", c.tau_max, "end of the tau grid")
      ->check(CLI::PositiveNumber);
  app.add_option("--samples", c.samples, "number of grid points (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100'000'000}));
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output,-o", c.output_path, "output file (default stdout)");
  app.add_option("--rabi-hz", c.rabi_hz, "Rabi frequency in Hz; adds t_seconds")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (command.empty()) throw UsageError("missing command");
  if (command == "simulate") c.command = Command::simulate;
  if (command == "compare") c.command = Command::compare;
  if (command == "ensemble") c.command = Command::ensemble;
  if (command == "predict") c.command = Command::predict;
  c.method = *method_from_string(method);
  c.per_l = per_l == "exact" ? ensemble::PerLMethod::exact
                             : ensemble::PerLMethod::closed_form;
  c.spec = {n_excited, n_ground, n_photons,
            c.rabi_hz ? 2.0 * std::numbers::pi * *c.rabi_hz : 1.0};
  if (format.empty()) {
    c.format = c.command == Command::predict ? OutputFormat::json : OutputFormat::csv;
  } else {
    c.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  }
  if ((c.command == Command::simulate || c.command == Command::compare) &&
      n_excited + n_ground < 1) {
    throw UsageError(command + " needs --n-excited (or --n-ground) >= 1");
  }
  return c;
}

void run(const RunConfig& config, std::ostream& out, std::ostream& log) {
  switch (config.command) {
    case Command::simulate: run_simulate(config, out); break;
    case Command::compare: run_compare(config, out); break;
    case Command::ensemble: run_ensemble(config, out, log); break;
    case Command::predict: run_predict(config, out); break;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(argc, argv);
    configure_threads_from_env();
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  } catch (const Error& e) {
    err << "usage error: [" << e.module() << "] " << e.what() << '\n';
    return 2;
  }

  try {
    run(config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: [" << e.module() << "] " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace trilinear::cli

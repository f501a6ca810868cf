#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "geospot/refsuite.hpp"
#include "geospot/serialize.hpp"

namespace fs = std::filesystem;

namespace geospot::cli {

namespace {

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) {
      out += ' ';
    }
    out += argv[i];
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
      out.push_back(v);
    } catch (const std::exception&) {
      raise(ErrorKind::Validation, flag, "expected a comma-separated integer list");
    }
  }
  if (out.empty()) {
    raise(ErrorKind::Validation, flag, "expected a comma-separated integer list");
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
      out.push_back(v);
    } catch (const std::exception&) {
      raise(ErrorKind::Validation, flag, "expected a comma-separated number list");
    }
  }
  if (out.empty()) {
    raise(ErrorKind::Validation, flag, "expected a comma-separated number list");
  }
  return out;
}

void write_manifest(const fs::path& dir, const serialize::RunManifest& m) {
  serialize::write_text((dir / "manifest.json").string(),
                        serialize::manifest_json(m).dump(2) + "\n");
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    raise(ErrorKind::Validation, out, "cannot create output directory");
  }
  return dir;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? serialize::fmt(*v) : "-";
}

/* Shared one-scenario summary printed by simulate and embedded in sweeps. */
std::vector<std::vector<std::string>> summary_rows(
    const Scenario& sc, const protocol::EpochReport& rep,
    const costing::CostReport& cost, const analytics::ScalingPoint& point) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"metric", "value"});
  rows.push_back({"scenario", rep.scenario_id});
  rows.push_back({"model", rep.model});
  rows.push_back({"peers", std::to_string(rep.n_peers)});
  rows.push_back({"tbs", serialize::fmt(rep.tbs)});
  rows.push_back({"t_calc_s", serialize::fmt(rep.t_calc_s)});
  rows.push_back({"t_wait_s", serialize::fmt(rep.t_wait_s)});
  rows.push_back({"t_comm_s", serialize::fmt(rep.t_comm_s)});
  rows.push_back({"epoch_time_s", serialize::fmt(rep.epoch_time_s)});
  rows.push_back({"sps", serialize::fmt(rep.sps_global)});
  rows.push_back({"speedup", serialize::fmt(point.speedup)});
  rows.push_back({"granularity", opt_cell(point.granularity)});
  rows.push_back({"asymptotic_sps", opt_cell(point.asymptotic_sps)});
  rows.push_back({"mode", catalog::to_string(cost.mode)});
  rows.push_back({"fleet_usd_per_h", serialize::fmt(cost.fleet_total_usd_h)});
  rows.push_back({"usd_per_1m", serialize::fmt(cost.usd_per_million)});
  rows.push_back(
      {"usd_per_1m_vm_only", serialize::fmt(cost.usd_per_million_vm_only)});
  (void)sc;
  return rows;
}

int cmd_simulate(const std::string& scenario_ref, const std::string& out,
                 const std::string& command) {
  std::string path = resolve_scenario_path(scenario_ref);
  Scenario sc = load_scenario(path);
  if (sc.total_vms() < 1) {
    raise(ErrorKind::Validation, "placement",
          "scenario places no VMs; use optimize for search-only scenarios");
  }
  auto rep = protocol::simulate_epoch(sc);
  auto cost = costing::cost_epoch(sc, rep);
  auto point = analytics::analyze(sc, rep);
  std::cout << serialize::render_table(summary_rows(sc, rep, cost, point));
  if (!out.empty()) {
    fs::path dir = prepare_out_dir(out);
    serialize::write_text((dir / "epoch.json").string(),
                          serialize::epoch_json(rep).dump(2) + "\n");
    serialize::write_text((dir / "cost.json").string(),
                          serialize::cost_json(rep.scenario_id, cost).dump(2) + "\n");
    serialize::write_text((dir / "analytics.csv").string(),
                          serialize::analytics_csv({point}));
    serialize::write_text((dir / "costing.csv").string(),
                          serialize::costing_csv({{rep.scenario_id, cost}}));
    serialize::RunManifest m;
    m.command = command;
    m.scenario_paths = {path};
    m.output_dir = out;
    write_manifest(dir, m);
    std::cout << "\nreports written to " << out << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& scenario_ref, const std::string& gpus,
              const std::string& tbs, const std::string& out,
              const std::string& command) {
  std::string path = resolve_scenario_path(scenario_ref);
  Scenario base = load_scenario(path);
  std::vector<int> peer_counts = parse_int_list(gpus, "--gpus");
  std::vector<double> batch_sizes =
      tbs.empty() ? std::vector<double>{base.run.tbs}
                  : parse_double_list(tbs, "--tbs");

  std::vector<analytics::ScalingPoint> points;
  std::vector<std::pair<std::string, costing::CostReport>> costs;
  std::vector<std::vector<std::string>> table;
  table.push_back({"n_gpus", "tbs", "sps", "speedup", "per_gpu", "granularity",
                   "usd_per_1m"});
  for (double t : batch_sizes) {
    for (int n : peer_counts) {
      Scenario sc = base;
      sc.run.tbs = t;
      set_total_vms(sc, n);
      auto rep = protocol::simulate_epoch(sc);
      auto cost = costing::cost_epoch(sc, rep);
      auto point = analytics::analyze(sc, rep);
      points.push_back(point);
      costs.emplace_back(rep.scenario_id, cost);
      table.push_back({std::to_string(n), serialize::fmt(t),
                       serialize::fmt(point.sps),
                       serialize::fmt(point.speedup),
                       serialize::fmt(point.per_gpu),
                       opt_cell(point.granularity),
                       serialize::fmt(cost.usd_per_million)});
    }
  }
  std::cout << serialize::render_table(table);
  if (!out.empty()) {
    fs::path dir = prepare_out_dir(out);
    serialize::write_text((dir / "sweep.csv").string(),
                          serialize::analytics_csv(points));
    serialize::write_text((dir / "costing.csv").string(),
                          serialize::costing_csv(costs));
    serialize::RunManifest m;
    m.command = command;
    m.scenario_paths = {path};
    m.output_dir = out;
    write_manifest(dir, m);
    std::cout << "\nreports written to " << out << "\n";
  }
  return 0;
}

int cmd_calibrate(const std::string& observations, const std::string& out,
                  const std::string& command) {
  auto obs = refsuite::load_observations(observations);
  auto fit = protocol::calibrate(obs);
  std::vector<std::vector<std::string>> table;
  table.push_back({"parameter", "value"});
  table.push_back({"beta_s", serialize::fmt(fit.params.beta_s)});
  table.push_back(
      {"gamma_s_per_peer", serialize::fmt(fit.params.gamma_s_per_peer)});
  table.push_back({"payload_scale", serialize::fmt(fit.params.payload_scale)});
  table.push_back(
      {"payload_scale_pinned", fit.payload_scale_pinned ? "yes" : "no"});
  table.push_back({"linear_beta_s", serialize::fmt(fit.linear_beta_s)});
  table.push_back({"linear_gamma_s_per_peer",
                   serialize::fmt(fit.linear_gamma_s_per_peer)});
  for (size_t i = 0; i < fit.residual_s.size(); ++i) {
    table.push_back({"residual_s[" + std::to_string(i) + "]",
                     serialize::fmt(fit.residual_s[i])});
  }
  std::cout << serialize::render_table(table);
  if (!out.empty()) {
    serialize::write_text(out,
                          serialize::calibration_json(fit).dump(2) + "\n");
    serialize::RunManifest m;
    m.command = command;
    m.scenario_paths = {observations};
    m.output_dir = fs::path(out).parent_path().string();
    serialize::write_text(out + ".manifest.json",
                          serialize::manifest_json(m).dump(2) + "\n");
    std::cout << "\nparameters written to " << out << "\n";
  }
  return 0;
}

int cmd_optimize(const std::string& scenario_ref, const std::string& objective,
                 std::optional<double> budget, int top_k,
                 const std::string& out, bool no_prune,
                 const std::string& command) {
  std::string path = resolve_scenario_path(scenario_ref);
  Scenario sc = load_scenario(path);
  if (!sc.search) {
    raise(ErrorKind::Validation, "search", "scenario has no search spec");
  }
  Objective obj =
      objective.empty() ? sc.search->objective : objective_from_string(objective);
  if (!budget) {
    budget = sc.search->budget_usd_per_h;
  }
  auto result = optimizer::search(sc, obj, budget, top_k, !no_prune);
  if (!result.feasible) {
    std::cerr << "infeasible search: " << result.note << "\n";
    return 3;
  }
  std::vector<std::vector<std::string>> table;
  table.push_back({"rank", "counts", "sps", "usd_per_1m", "usd_per_h"});
  for (size_t i = 0; i < result.ranked.size(); ++i) {
    const auto& cand = result.ranked[i];
    std::string counts;
    for (size_t k = 0; k < cand.counts.size(); ++k) {
      if (k) {
        counts += '+';
      }
      counts += std::to_string(cand.counts[k]);
    }
    table.push_back({std::to_string(i + 1), counts,
                     serialize::fmt(cand.epoch.sps_global),
                     serialize::fmt(cand.cost.usd_per_million),
                     serialize::fmt(cand.cost.fleet_total_usd_h)});
  }
  std::cout << "objective: " << to_string(obj) << "  (evaluated "
            << result.evaluated << " placements)\n";
  std::cout << serialize::render_table(table);
  if (!out.empty()) {
    fs::path dir = prepare_out_dir(out);
    serialize::write_text((dir / "ranked.csv").string(),
                          serialize::ranked_csv(result.ranked, sc.id));
    for (size_t i = 0; i < result.ranked.size(); ++i) {
      serialize::write_text(
          (dir / ("candidate_" + std::to_string(i + 1) + ".json")).string(),
          serialize::candidate_json(result.ranked[i]).dump(2) + "\n");
    }
    serialize::RunManifest m;
    m.command = command;
    m.scenario_paths = {path};
    m.output_dir = out;
    write_manifest(dir, m);
    std::cout << "\nreports written to " << out << "\n";
  }
  return 0;
}

/* Minimal CSV split for re-rendering our own exports (fields never quoted). */
std::vector<std::vector<std::string>> csv_cells(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      row.push_back(cell);
    }
    if (line.back() == ',') {
      row.push_back("");
    }
    rows.push_back(row);
  }
  return rows;
}

int cmd_report(const std::string& dir_arg, const std::string& format) {
  fs::path dir(dir_arg);
  if (!fs::is_directory(dir)) {
    raise(ErrorKind::Validation, dir_arg, "report directory not found");
  }
  std::vector<std::string> csvs;
  for (const char* name :
       {"analytics.csv", "costing.csv", "sweep.csv", "ranked.csv",
        "reproduce.csv"}) {
    fs::path p = dir / name;
    if (fs::exists(p)) {
      csvs.push_back(p.string());
    }
  }
  if (csvs.empty()) {
    raise(ErrorKind::Validation, dir_arg,
          "no report files found in directory");
  }
  bool first = true;
  for (const auto& p : csvs) {
    std::string text = serialize::read_text(p);
    if (!first) {
      std::cout << "\n";
    }
    first = false;
    std::cout << fs::path(p).filename().string() << "\n";
    if (format == "csv") {
      std::cout << text;
    } else {
      std::cout << serialize::render_table(csv_cells(text));
    }
  }
  return 0;
}

int cmd_reproduce(const std::string& out, const std::string& command) {
  auto rows = refsuite::evaluate_reference_suite();
  std::vector<std::vector<std::string>> table;
  table.push_back({"gate", "group", "name", "simulated", "reference",
                   "tolerance", "rel_err", "status"});
  std::string csv =
      "criterion,group,name,simulated,reference,tolerance,rel_err_pct,pass,"
      "detail\n";
  int failures = 0;
  for (const auto& r : rows) {
    char rel[32];
    std::snprintf(rel, sizeof(rel), "%+.2f%%", r.rel_err * 100.0);
    table.push_back({std::to_string(r.criterion), r.group, r.name,
                     serialize::fmt(r.simulated), serialize::fmt(r.reference),
                     r.tolerance, rel, r.pass ? "pass" : "FAIL"});
    csv += std::to_string(r.criterion) + ',' + r.group + ',' + '"' + r.name +
           '"' + ',' + serialize::fmt(r.simulated) + ',' +
           serialize::fmt(r.reference) + ',' + '"' + r.tolerance + '"' + ',' +
           serialize::fmt(r.rel_err * 100.0) + ',' +
           (r.pass ? "true" : "false") + ',' + '"' + r.detail + '"' + '\n';
    if (!r.pass) {
      ++failures;
    }
  }
  std::cout << serialize::render_table(table);
  std::cout << "\n" << (rows.size() - failures) << "/" << rows.size()
            << " reference comparisons passed\n";
  if (failures > 0) {
    std::cout << "failing cells:\n";
    for (const auto& r : rows) {
      if (!r.pass) {
        std::cout << "  [" << r.criterion << "] " << r.name << ": simulated "
                  << serialize::fmt(r.simulated) << ", reference "
                  << serialize::fmt(r.reference) << " (" << r.tolerance
                  << ")\n";
      }
    }
  }
  if (!out.empty()) {
    fs::path dir = prepare_out_dir(out);
    serialize::write_text((dir / "reproduce.csv").string(), csv);
    serialize::RunManifest m;
    m.command = command;
    m.scenario_paths = {default_data_dir()};
    m.output_dir = out;
    write_manifest(dir, m);
    std::cout << "report written to " << out << "\n";
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{
      "simulator, cost model and placement search for collaborative training "
      "on spot instances across zones, regions and clouds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", serialize::kToolVersion);
  std::string command = join_args(argc, argv);

  std::string scenario, out, gpus, tbs, observations, objective, dir, format;
  std::optional<double> budget;
  int top_k = 10;
  bool no_prune = false;

  auto* sim = app.add_subcommand("simulate", "run one scenario end to end");
  sim->add_option("scenario", scenario, "scenario name or file")->required();
  sim->add_option("--out", out, "directory for full reports");

  auto* sweep = app.add_subcommand("sweep", "scale one scenario over peer counts");
  sweep->add_option("scenario", scenario, "scenario name or file")->required();
  sweep->add_option("--gpus", gpus, "comma-separated peer counts")->required();
  sweep->add_option("--tbs", tbs, "comma-separated batch sizes");
  sweep->add_option("--out", out, "directory for full reports");

  auto* cal = app.add_subcommand("calibrate",
                                 "fit protocol overhead to measured timings");
  cal->add_option("observations", observations, "observation file")->required();
  cal->add_option("--out", out, "file for the fitted parameters");

  auto* opt = app.add_subcommand("optimize", "search placements in a scenario");
  opt->add_option("scenario", scenario, "scenario name or file")->required();
  opt->add_option("--objective", objective,
                  "max_sps | min_usd_per_million | max_sps_under_budget");
  opt->add_option("--budget", budget, "hourly budget for the budgeted objective");
  opt->add_option("--top", top_k, "ranked placements to keep")
      ->check(CLI::PositiveNumber);
  opt->add_flag("--no-prune", no_prune,
                "disable the scaling-projection bound in large searches");
  opt->add_option("--out", out, "directory for full reports");

  auto* rep = app.add_subcommand("report", "render a report directory");
  rep->add_option("dir", dir, "output directory of a previous run")->required();
  rep->add_option("--format", format, "csv or table")
      ->default_val("table")
      ->check(CLI::IsMember({"csv", "table"}));

  auto* redo = app.add_subcommand(
      "reproduce", "compare the bundled scenario suite against published values");
  redo->add_option("--out", out, "directory for the comparison report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 64;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(scenario, out, command);
    }
    if (sweep->parsed()) {
      return cmd_sweep(scenario, gpus, tbs, out, command);
    }
    if (cal->parsed()) {
      return cmd_calibrate(observations, out, command);
    }
    if (opt->parsed()) {
      return cmd_optimize(scenario, objective, budget, top_k, out, no_prune,
                          command);
    }
    if (rep->parsed()) {
      return cmd_report(dir, format);
    }
    if (redo->parsed()) {
      return cmd_reproduce(out, command);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace geospot::cli

int main(int argc, char** argv) { return geospot::cli::run(argc, argv); }

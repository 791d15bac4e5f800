#include "commands.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "svg_chart.hpp"
#include "trustsched/config_io.hpp"
#include "trustsched/experiments.hpp"
#include "trustsched/incentive.hpp"
#include "trustsched/simulator.hpp"
#include "trustsched/soap.hpp"

namespace trustsched::tools {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PolicyKind parse_policy(const std::string& name) {
  if (name == "mt") return PolicyKind::MeasuredTrust;
  if (name == "bt") return PolicyKind::BlindTrust;
  if (name == "fcfs") return PolicyKind::Fcfs;
  if (name == "scf") return PolicyKind::Scf;
  throw UsageError("unknown policy '" + name + "' (expected mt, bt, fcfs or scf)");
}

TrustKind parse_trust(const std::string& name) {
  const auto kind = parse_policy(name);
  if (kind == PolicyKind::MeasuredTrust) return TrustKind::MeasuredTrust;
  if (kind == PolicyKind::BlindTrust) return TrustKind::BlindTrust;
  throw UsageError("this command needs a trust policy (mt or bt)");
}

SizeFamily load_family_from(const Options& opts) {
  if (!opts.config.empty() && !opts.preset.empty()) {
    throw UsageError("give either --config or --preset, not both");
  }
  SizeFamily family = !opts.config.empty()   ? load_family(opts.config)
                      : !opts.preset.empty() ? find_preset(opts.preset).family()
                                             : throw UsageError("need --config or --preset");
  if (opts.lambda) {
    family.lambda = *opts.lambda;
    (void)family.at(0.0);
  }
  return family;
}

SystemConfig load_system(const Options& opts) {
  if (opts.error_rate) return load_family_from(opts).at(*opts.error_rate);
  if (!opts.config.empty() && !opts.preset.empty()) {
    throw UsageError("give either --config or --preset, not both");
  }
  if (opts.config.empty() && opts.preset.empty()) throw UsageError("need --config or --preset");
  if (!opts.preset.empty() && !opts.lambda) return find_preset(opts.preset).config();
  if (!opts.preset.empty()) {
    const auto& p = find_preset(opts.preset);
    return validate_config(RawConfig{*opts.lambda, p.sizes, p.matrix});
  }
  SystemConfig config = load_config(opts.config);
  if (opts.lambda) return SystemConfig(*opts.lambda, config.grid(), config.matrix());
  return config;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void print_matrix(std::ostream& out, const char* title, std::size_t n,
                  const std::function<std::optional<double>(std::size_t, std::size_t)>& cell,
                  const char* row_label) {
  out << title << '\n' << std::setw(8) << row_label;
  for (std::size_t k = 0; k < n; ++k) out << std::setw(12) << ("k=" + std::to_string(k + 1));
  out << '\n';
  for (std::size_t r = 0; r < n; ++r) {
    out << std::setw(8) << (std::string(row_label) + "=" + std::to_string(r + 1));
    for (std::size_t k = 0; k < n; ++k) {
      const auto v = cell(r, k);
      out << std::setw(12) << (v ? fixed(*v, 4) : std::string("-"));
    }
    out << '\n';
  }
}

void write_output(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << content;
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

std::string interval_text(const BIntervalSet& set, int digits) {
  if (set.empty()) return "(empty)";
  std::string s;
  for (const auto& iv : set.intervals) {
    if (!s.empty()) s += " U ";
    s += "[" + fixed(iv.lo, digits) + ", " + fixed(iv.hi, digits) + "]";
  }
  return s;
}

// Maps exceptions to exit codes: 2 for an overloaded system, 1 otherwise.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Overloaded ? kOverloaded : kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int cmd_analyze(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemConfig config = load_system(opts);
    const PolicySpec policy = PolicySpec::make(parse_policy(opts.policy), opts.b);
    const std::size_t n = config.n();
    out << "policy " << to_string(policy.kind) << "  lambda " << config.lambda() << "  load "
        << fixed(config.load(), 4) << '\n';

    if (!policy.is_trust()) {
      out << "E[T] = " << fixed(overall_mean_response(config, policy)) << '\n';
      if (policy.kind == PolicyKind::Scf) {
        const auto scf = scf_mean_response(config);
        for (std::size_t i = 0; i < n; ++i) {
          out << "  size " << config.grid()[i] << ": " << fixed(scf.per_size[i], 4) << '\n';
        }
      }
      return kOk;
    }

    const TrustKind kind = policy.trust_kind();
    out << "b = " << policy.punishment << '\n';
    const auto table = response_table(config, kind, policy.punishment);
    print_matrix(out, "E[U_ik] (true size i, declared k)", n,
                 [&](std::size_t i, std::size_t k) { return std::optional(table.u[i][k]); }, "i");
    print_matrix(out, "E[U_ik | punished]", n,
                 [&](std::size_t i, std::size_t k) { return table.u_punished[i][k]; }, "i");
    print_matrix(out, "E[U_ik | not punished]", n,
                 [&](std::size_t i, std::size_t k) { return table.u_unpunished[i][k]; }, "i");
    print_matrix(out, "E[T_jk] (internal estimate j, declared k)", n,
                 [&](std::size_t j, std::size_t k) {
                   return table.defined(j) ? std::optional(table.t[j][k]) : std::nullopt;
                 },
                 "j");
    out << "overall E[T] = " << fixed(table.overall) << '\n';
    out << "FCFS E[T] = " << fixed(fcfs_mean_response(config)) << '\n';

    const auto report = ic_check(table);
    out << "verdict: " << (report.compatible ? "IC" : "not IC") << '\n';
    for (const auto& v : report.violations) {
      out << "  violation j=" << v.estimate + 1 << " k=" << v.declared + 1
          << "  E[T_jk] - E[T_jj] = " << fixed(v.delta, 6) << '\n';
    }
    return kOk;
  });
}

int cmd_ic_region(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemConfig config = load_system(opts);
    const TrustKind kind = parse_trust(opts.policy);
    RegionOptions region_opts;
    region_opts.grid_step = opts.b_step;
    const auto region = ic_region(config, kind, region_opts);
    out << to_string(kind) << " incentive compatible b: " << interval_text(region, 2) << '\n';
    out << "  precise: " << interval_text(region, 6) << "  (grid step " << region.grid_step
        << ", bisection tolerance " << region.tol_b << ")\n";
    for (const auto baseline : {Baseline::Fcfs, Baseline::Scf}) {
      const auto benefit = social_benefit_region(config, kind, baseline, region_opts);
      out << "socially beneficial vs " << (baseline == Baseline::Fcfs ? "FCFS" : "SCF") << " (E[T] "
          << fixed(baseline_mean_response(config, baseline)) << "): " << interval_text(benefit, 3)
          << '\n';
    }
    return kOk;
  });
}

int cmd_sweep(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SizeFamily family = load_family_from(opts);
    const auto rows = sweep_region(family, opts.x_step, opts.b_step);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    if (opts.out.empty()) {
      out << csv.str();
      return kOk;
    }
    write_output(opts.out, csv.str());
    out << "wrote " << rows.size() << " rows to " << opts.out << '\n';
    for (const auto kind : {TrustKind::MeasuredTrust, TrustKind::BlindTrust}) {
      const auto frontier = feasibility_frontier(rows, kind);
      out << to_string(kind) << " largest feasible x: ";
      if (frontier) {
        out << format_number(frontier->x) << " with b in [" << format_number(frontier->b_lo)
            << ", " << format_number(frontier->b_hi) << "]\n";
      } else {
        out << "none\n";
      }
    }
    return kOk;
  });
}

int cmd_curve(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SizeFamily family = load_family_from(opts);
    const auto rows = optimal_b_curve(family, opts.x_step, opts.b_step);
    std::ostringstream csv;
    write_curve_csv(csv, rows);
    if (opts.out.empty()) {
      out << csv.str();
      return kOk;
    }
    write_output(opts.out, csv.str());
    out << "wrote " << rows.size() << " rows to " << opts.out << '\n';
    return kOk;
  });
}

int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemConfig config = load_system(opts);
    const PolicySpec policy = PolicySpec::make(parse_policy(opts.policy), opts.b);
    SimConfig sim;
    sim.job_count = opts.jobs;
    sim.replications = opts.reps;
    sim.seed = opts.seed;
    sim.probe_probability = opts.probe_prob;

    std::ofstream trace_file;
    if (!opts.trace.empty()) {
      trace_file.open(opts.trace);
      if (!trace_file) throw std::runtime_error("cannot write '" + opts.trace + "'");
    }
    const auto result = simulate(config, policy, sim, opts.trace.empty() ? nullptr : &trace_file);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';

    const double analytic = overall_mean_response(config, policy);
    out << "policy " << to_string(policy.kind);
    if (policy.is_trust()) out << "  b " << policy.punishment;
    out << "  " << sim.replications << " x " << sim.job_count << " jobs  seed " << sim.seed << '\n';
    auto show = [&](const SimEstimate& e) {
      return fixed(e.mean, 4) + " +- " + fixed(e.half_width95, 4) + "  (n=" +
             std::to_string(e.count) + ")";
    };
    out << "overall E[T]: " << show(result.overall) << "  analytic " << fixed(analytic, 4)
        << (result.overall.covers(analytic) ? "  [inside CI]" : "  [outside CI]") << '\n';

    std::optional<ResponseTable> table;
    if (policy.is_trust()) table = response_table(config, policy.trust_kind(), policy.punishment);
    for (const auto& [j, e] : result.per_honest_class) {
      out << "honest j=" << j + 1 << ": " << show(e);
      if (table && table->defined(j)) out << "  analytic " << fixed(table->t[j][j], 4);
      out << '\n';
    }
    for (const auto& [cell, e] : result.per_cell) {
      out << "probe i=" << cell.first + 1 << " k=" << cell.second + 1 << ": " << show(e);
      if (table) out << "  analytic " << fixed(table->u[cell.first][cell.second], 4);
      out << '\n';
    }
    out << "time-average number in system: " << show(result.number_in_system) << '\n';
    return kOk;
  });
}

int cmd_plot(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(opts.csv);
    if (!in) throw std::runtime_error("cannot open '" + opts.csv + "'");
    std::string first;
    while (std::getline(in, first) && (first.empty() || first.front() == '#')) {
    }
    if (!first.empty() && first.back() == '\r') first.pop_back();
    in.clear();
    in.seekg(0);

    std::string svg;
    if (first == kSweepHeader) {
      svg = render_sweep_svg(read_sweep_csv(in));
    } else if (first == kCurveHeader) {
      svg = render_curve_svg(read_curve_csv(in));
    } else {
      throw std::runtime_error("unknown CSV schema (header '" + first + "')");
    }
    if (opts.out.empty()) throw UsageError("plot needs --out");
    write_output(opts.out, svg);
    out << "wrote " << opts.out << '\n';
    return kOk;
  });
}

int cmd_preset_list(std::ostream& out) {
  for (const auto& p : presets()) out << p.name << "  " << p.description << '\n';
  return kOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean response and incentive analysis for estimate-based M/G/1 scheduling"};
  app.require_subcommand(1);
  Options opts;

  auto add_source = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config, "JSON system configuration");
    cmd->add_option("--preset", opts.preset, "built-in configuration (see 'preset list')");
    cmd->add_option("--lambda", opts.lambda, "override the arrival rate");
  };
  auto add_policy = [&](CLI::App* cmd, bool trust_only) {
    auto* o = cmd->add_option("--policy", opts.policy, "mt, bt, fcfs or scf");
    o->check(CLI::IsMember(trust_only ? std::vector<std::string>{"mt", "bt"}
                                      : std::vector<std::string>{"mt", "bt", "fcfs", "scf"}));
  };

  auto* analyze = app.add_subcommand("analyze", "response tables and IC verdict at one b");
  add_source(analyze);
  add_policy(analyze, false);
  analyze->add_option("--b", opts.b, "punishment probability")->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--error-rate", opts.error_rate, "use the uniform-error matrix at this rate");

  auto* region = app.add_subcommand("ic-region", "incentive-compatible and beneficial b ranges");
  add_source(region);
  add_policy(region, true);
  region->add_option("--b-step", opts.b_step, "scan step for b");
  region->add_option("--error-rate", opts.error_rate, "use the uniform-error matrix at this rate");

  auto* sweep = app.add_subcommand("sweep", "IC region over (error rate, b)");
  add_source(sweep);
  sweep->add_option("--x-step", opts.x_step, "error-rate step");
  sweep->add_option("--b-step", opts.b_step, "punishment step");
  sweep->add_option("--out", opts.out, "CSV output path (stdout when omitted)");

  auto* curve = app.add_subcommand("curve", "best-b mean response against blind baselines");
  add_source(curve);
  curve->add_option("--x-step", opts.x_step, "error-rate step");
  curve->add_option("--b-step", opts.b_step, "punishment step");
  curve->add_option("--out", opts.out, "CSV output path (stdout when omitted)");

  auto* sim = app.add_subcommand("simulate", "discrete-event simulation with 95% intervals");
  add_source(sim);
  add_policy(sim, false);
  sim->add_option("--b", opts.b, "punishment probability")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--error-rate", opts.error_rate, "use the uniform-error matrix at this rate");
  sim->add_option("--jobs", opts.jobs, "jobs per replication");
  sim->add_option("--reps", opts.reps, "independent replications");
  sim->add_option("--seed", opts.seed, "base random seed");
  sim->add_option("--probe-prob", opts.probe_prob, "probability a job is a probe");
  sim->add_option("--trace", opts.trace, "per-job CSV trace of replication 0");

  auto* plot = app.add_subcommand("plot", "render a sweep or curve CSV as SVG");
  plot->add_option("csv", opts.csv, "input CSV")->required();
  plot->add_option("--out", opts.out, "SVG output path")->required();

  auto* preset = app.add_subcommand("preset", "built-in configurations");
  auto* preset_list = preset->add_subcommand("list", "list presets");
  preset->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(opts, out, err);
    if (region->parsed()) return cmd_ic_region(opts, out, err);
    if (sweep->parsed()) return cmd_sweep(opts, out, err);
    if (curve->parsed()) return cmd_curve(opts, out, err);
    if (sim->parsed()) return cmd_simulate(opts, out, err);
    if (plot->parsed()) return cmd_plot(opts, out, err);
    if (preset_list->parsed()) return cmd_preset_list(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace trustsched::tools

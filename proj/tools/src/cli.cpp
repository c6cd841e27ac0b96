#include "bioinsure_cli/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bioinsure/errors.hpp"
#include "bioinsure/montecarlo.hpp"
#include "bioinsure/optimize.hpp"
#include "bioinsure/resilience.hpp"
#include "bioinsure/serialization.hpp"
#include "bioinsure/valuation.hpp"

namespace bioinsure::cli {

using nlohmann::json;

std::string format_csv_number(double x) {
  if (!std::isfinite(x)) throw NumericalError("non-finite value in CSV output");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

GridSpec parse_grid(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos) throw ValidationError("grid", "must have the form lo:hi:steps");
  const auto parse_double = [](std::string_view s) {
    double x = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(x)) {
      throw ValidationError("grid", "has a malformed number '" + std::string(s) + "'");
    }
    return x;
  };
  GridSpec g;
  g.lo = parse_double(text.substr(0, first));
  g.hi = parse_double(text.substr(first + 1, second - first - 1));
  const auto steps = text.substr(second + 1);
  const auto r = std::from_chars(steps.data(), steps.data() + steps.size(), g.steps);
  if (r.ec != std::errc() || r.ptr != steps.data() + steps.size() || g.steps < 1) {
    throw ValidationError("grid.steps", "must be a positive integer");
  }
  if (!(g.lo < g.hi)) throw ValidationError("grid", "must satisfy lo < hi");
  return g;
}

namespace {

ScenarioDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("scenario", "cannot read file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario_document(text.str());
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void write_csv_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double x : values) {
    if (!first) out << ',';
    out << format_csv_number(x);
    first = false;
  }
  out << '\n';
}

int run_value(const RunManifest& m, const ScenarioDocument& doc, std::ostream& out) {
  const auto& s = doc.scenario;
  const GridSpec g = m.grid.value_or(GridSpec{s.v_bounds.lo, s.v_bounds.hi, 100});
  if (!s.v_bounds.contains(g.lo) || !s.v_bounds.contains(g.hi)) {
    throw ValidationError("grid", "must lie inside v_bounds");
  }
  const auto grid = linear_grid(g.lo, g.hi, g.steps + 1);
  const auto results = evaluate_grid(s, grid);

  if (m.output_format == OutputFormat::json) {
    write_json(out, json{{"valuations", results}});
  } else {
    std::ostringstream body;
    body << "v,mu,sigma,cost,R,CE,V,V_fd\n";
    for (const auto& r : results) {
      write_csv_row(body, {r.v.value(), r.mu, r.sigma, r.cost, r.risk_premium, r.certainty_equivalent,
                           r.insurance_value, r.insurance_value_fd});
    }
    out << body.str();
  }
  return kExitOk;
}

int run_optimize(const RunManifest& m, const ScenarioDocument& doc, std::ostream& out, std::ostream& err) {
  const auto& s = doc.scenario;
  std::vector<double> lambdas = m.lambdas;
  if (lambdas.empty() && s.market) lambdas.push_back(s.market->lambda);

  const auto noins = optimal_biodiversity(s);
  bool converged = noins.converged;
  if (!noins.converged) err << "no-insurance optimum did not converge: foc_residual=" << noins.foc_residual << '\n';

  struct Row {
    double lambda;
    OptimizationResult joint;
  };
  std::vector<Row> rows;
  for (double lambda : lambdas) {
    const auto joint = joint_optimum(s, lambda);
    if (!joint.converged) {
      converged = false;
      err << "joint optimum for lambda=" << lambda << " did not converge: foc_residual=" << joint.foc_residual
          << '\n';
    }
    rows.push_back({lambda, joint});
  }

  if (m.output_format == OutputFormat::json) {
    json pairs = json::array();
    for (const auto& r : rows) {
      pairs.push_back({{"lambda", r.lambda},
                       {"no_insurance", noins},
                       {"joint", r.joint},
                       {"ce_gain", r.joint.ce_star - noins.ce_star}});
    }
    write_json(out, json{{"no_insurance", noins}, {"pairs", pairs}});
  } else {
    std::ostringstream body;
    body << "lambda,v_star_noins,v_star_joint,alpha_star,ce_gain\n";
    for (const auto& r : rows) {
      write_csv_row(body, {r.lambda, noins.v_star.value(), r.joint.v_star.value(), r.joint.alpha_star,
                           r.joint.ce_star - noins.ce_star});
    }
    out << body.str();
  }
  return converged ? kExitOk : kExitNumerical;
}

int run_simulate(const RunManifest& m, const ScenarioDocument& doc, std::ostream& out) {
  if (!doc.buffer_pool) throw ValidationError("buffer_pool", "is required for simulate");
  BufferPoolSpec spec = *doc.buffer_pool;
  if (m.horizon) spec.horizon = *m.horizon;
  validate(spec);
  if (m.trials == 0) throw ValidationError("trials", "must be >= 1");

  const SamplerConfig cfg{.n_samples = m.trials, .seed = m.seed, .stream_id = 0};
  const auto summary = simulate_buffer_pool(spec, m.trials, cfg, Execution{m.workers});

  if (m.trajectory_path) {
    if (m.trajectory_trial >= m.trials) throw ValidationError("trajectory_trial", "must be < trials");
    std::vector<BufferPeriod> trace;
    simulate_buffer_trial(spec, cfg, m.trajectory_trial, &trace);
    std::ofstream file(*m.trajectory_path, std::ios::binary);
    if (!file) throw ValidationError("trajectory", "cannot write file '" + *m.trajectory_path + "'");
    file << "period,issued,buffer,reversal,deficit\n";
    for (const auto& row : trace) {
      file << row.period << ',';
      write_csv_row(file, {row.issued, row.buffer, row.reversal, row.deficit});
    }
  }

  if (m.output_format == OutputFormat::json) {
    write_json(out, json(summary));
  } else {
    std::ostringstream body;
    body << "shortfall_probability,expected_terminal_buffer,expected_net_credits,trials,stderr_shortfall\n";
    body << format_csv_number(summary.shortfall_probability) << ','
         << format_csv_number(summary.expected_terminal_buffer) << ','
         << format_csv_number(summary.expected_net_credits) << ',' << summary.trials << ','
         << format_csv_number(summary.stderr_shortfall) << '\n';
    out << body.str();
  }
  return kExitOk;
}

int run_resilience(const RunManifest& m, const ScenarioDocument& doc, std::ostream& out) {
  if (!doc.resilience) throw ValidationError("resilience", "is required for the resilience command");
  const auto report = resilience_report(*doc.resilience);
  if (m.output_format == OutputFormat::json) {
    write_json(out, json(report));
  } else {
    std::ostringstream body;
    body << "component_a_insurance_value,component_b_avoided_damage,component_c_option_value,"
            "component_c_diversification,component_d_practice_value,regime_delta_ce\n";
    write_csv_row(body, {report.component_a_insurance_value, report.component_b_avoided_damage,
                         report.component_c_option_value, report.component_c_diversification,
                         report.component_d_practice_value, report.regime_delta_ce});
    out << body.str();
  }
  return kExitOk;
}

}  // namespace

int run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  // Render into a buffer first so a failing command emits no partial report.
  std::ostringstream report;
  int status = kExitOk;
  try {
    const auto doc = load_document(m.scenario_path);
    switch (m.command) {
      case Command::value:
        status = run_value(m, doc, report);
        break;
      case Command::optimize:
        status = run_optimize(m, doc, report, err);
        break;
      case Command::simulate:
        status = run_simulate(m, doc, report);
        break;
      case Command::resilience:
        status = run_resilience(m, doc, report);
        break;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const OutOfBoundsError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IndeterminateError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  out << report.str();
  return status;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Biodiversity insurance value engine"};
  app.require_subcommand(1);

  RunManifest m;
  std::string format = "json";
  std::string grid;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", m.scenario_path, "Scenario JSON file")->required();
    sub->add_option("--seed", m.seed, "Master RNG seed");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", m.workers, "Worker threads (0 = hardware concurrency)");
  };

  auto* value = app.add_subcommand("value", "Valuation grid: risk premium, CE and insurance value");
  common(value);
  value->add_option("--grid", grid, "Biodiversity grid lo:hi:steps");

  auto* optimize = app.add_subcommand("optimize", "Optimal biodiversity with and without financial insurance");
  common(optimize);
  optimize->add_option("--lambda", m.lambdas, "Insurance premium loading (repeatable)")->take_all();

  auto* simulate = app.add_subcommand("simulate", "Buffer-pool reversal simulation");
  common(simulate);
  simulate->add_option("--trials", m.trials, "Monte Carlo trials");
  simulate->add_option("--horizon", m.horizon, "Override buffer_pool.horizon");
  simulate->add_option("--trajectory", m.trajectory_path, "Write one trial's trajectory CSV to this path");
  simulate->add_option("--trajectory-trial", m.trajectory_trial, "Trial index for --trajectory");

  auto* resilience = app.add_subcommand("resilience", "Resilience value components report");
  common(resilience);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  if (value->parsed()) m.command = Command::value;
  if (optimize->parsed()) m.command = Command::optimize;
  if (simulate->parsed()) m.command = Command::simulate;
  if (resilience->parsed()) m.command = Command::resilience;
  m.output_format = format == "csv" ? OutputFormat::csv : OutputFormat::json;

  if (!grid.empty()) {
    try {
      m.grid = parse_grid(grid);
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    }
  }
  return run(m, out, err);
}

}  // namespace bioinsure::cli

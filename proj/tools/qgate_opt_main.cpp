#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qgate/orchestrator.hpp"
#include "qgate/propagator.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& scheme,
            const std::string& preset, const std::string& out_dir) {
  qgate::RunConfig config = qgate::load_run_config(qgate::IniFile::parse_file(config_path));
  if (!scheme.empty()) config.scheme = qgate::parse_scheme(scheme);
  qgate::apply_preset(config, preset);
  if (!out_dir.empty()) config.output_dir = out_dir;
  config.validate();

  qgate::RunResult result = qgate::run(config);
  std::cout << "run directory: " << result.run_dir << "\n";
  std::cout << qgate::report_table({result.summary});
  return 0;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& csv_out) {
  std::vector<qgate::RunSummary> rows;
  for (const auto& dir : run_dirs) rows.push_back(qgate::read_summary(dir));
  std::cout << qgate::report_table(rows);
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw qgate::StageError("cannot write " + csv_out);
    out << qgate::report_csv(rows);
    std::cout << "csv written to " << csv_out << "\n";
  }
  return 0;
}

int cmd_analyze(const std::string& pulse_path, const std::string& config_path,
                const std::string& preset, const std::string& out_dir) {
  qgate::RunConfig config = qgate::load_run_config(qgate::IniFile::parse_file(config_path));
  qgate::apply_preset(config, preset);
  config.scheme = qgate::Scheme::propagate;
  config.analytic_pulse.reset();
  config.pulse_file = pulse_path;
  if (!out_dir.empty()) config.output_dir = out_dir;
  config.validate();

  qgate::RunResult result = qgate::run(config);
  std::cout << qgate::metrics_json(result.metrics) << "\n";
  std::cout << "artifacts in " << result.run_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimization of a geometric phase gate on two coupled transmons"};
  app.require_subcommand(1);

  std::string config_path, scheme, preset, out_dir, pulse_path, csv_out;
  std::vector<std::string> run_dirs;

  auto* run_cmd = app.add_subcommand("run", "Execute the scheme configured in a config file");
  run_cmd->add_option("config", config_path, "INI config file")->required();
  run_cmd->add_option("--scheme", scheme,
                      "Override the scheme (propagate | direct-sm | direct-geo | simplex | "
                      "hybrid-sm | hybrid-geo)");
  run_cmd->add_option("--preset", preset, "Truncation preset (reduced | full)");
  run_cmd->add_option("--out", out_dir, "Output directory (default from config)");

  auto* report_cmd = app.add_subcommand("report", "Tabulate summaries from run directories");
  report_cmd->add_option("dirs", run_dirs, "Run directories")->required()->expected(-1);
  report_cmd->add_option("--csv", csv_out, "Also write the table as CSV");

  auto* analyze_cmd = app.add_subcommand("analyze", "Propagate a pulse file and report metrics");
  analyze_cmd->add_option("pulse", pulse_path, "Pulse file")->required();
  analyze_cmd->add_option("config", config_path, "INI config file (system parameters)")
      ->required();
  analyze_cmd->add_option("--preset", preset, "Truncation preset (reduced | full)");
  analyze_cmd->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, scheme, preset, out_dir);
    if (report_cmd->parsed()) return cmd_report(run_dirs, csv_out);
    if (analyze_cmd->parsed()) return cmd_analyze(pulse_path, config_path, preset, out_dir);
  } catch (const qgate::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

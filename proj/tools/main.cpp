// Command-line front end: runs experiments from a JSON config (optionally
// overridden by flags) and the acceptance verification suite.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "linopt/experiments.hpp"
#include "linopt/verify.hpp"

namespace {

// "key=value" with the value parsed as JSON when possible ("M=3",
// "eta={\"start\":0,\"stop\":1,\"step\":0.1}"), else kept as a string
std::pair<std::string, linopt::json> parse_override(const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("--set expects key=value, got: " + kv);
  std::string key = kv.substr(0, eq);
  std::string raw = kv.substr(eq + 1);
  linopt::json value = linopt::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  return {key, value};
}

int run_verify(std::optional<double> tolerance) {
  linopt::VerifyOptions opt;
  opt.tolerance = tolerance;
  bool all_pass = true;
  for (const auto& r : linopt::run_acceptance(opt)) {
    std::cout << linopt::format_criterion(r) << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear-optical cloning simulator"};

  std::string config_path, experiment, output_path, format;
  std::vector<std::string> overrides;
  double tolerance = -1.0;
  bool verify = false;

  app.add_option("--config", config_path, "JSON experiment config (schema 1)");
  app.add_option("--experiment", experiment,
                 "experiment name (overrides the config)");
  app.add_option("--set", overrides, "parameter override, key=value; repeatable");
  app.add_option("--output", output_path, "output file (default stdout)");
  app.add_option("--format", format, "csv or json");
  app.add_option("--tolerance", tolerance,
                 "override the built-in verification tolerances");
  app.add_flag("--verify", verify, "run the acceptance criteria and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (verify) {
      return run_verify(tolerance >= 0.0 ? std::optional<double>(tolerance)
                                         : std::nullopt);
    }

    linopt::json j;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config: " + config_path);
      in >> j;
    } else {
      j = {{"schema", 1}};
    }
    if (!experiment.empty()) j["experiment"] = experiment;
    if (!j.contains("experiment"))
      throw std::invalid_argument("no experiment given (--config or --experiment)");
    for (const auto& kv : overrides) {
      auto [key, value] = parse_override(kv);
      if (key == "seed")
        j["seed"] = value;
      else
        j["parameters"][key] = value;
    }
    if (!output_path.empty()) j["output"]["path"] = output_path;
    if (!format.empty()) j["output"]["format"] = format;

    linopt::ExperimentConfig config = linopt::parse_config(j);
    std::string text = linopt::render(linopt::run_experiment(config), config.format);

    if (config.output_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(config.output_path);
      if (!out) throw std::invalid_argument("cannot open output: " +
                                            config.output_path);
      out << text;
    }
    return 0;
  } catch (const linopt::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

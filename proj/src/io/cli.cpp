#include "smoothsaa/io/cli.hpp"

#include "smoothsaa/bandwidth.hpp"
#include "smoothsaa/errors.hpp"
#include "smoothsaa/experiments.hpp"
#include "smoothsaa/io/config.hpp"
#include "smoothsaa/io/output.hpp"
#include "smoothsaa/kernel.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace smoothsaa::io {

namespace {

struct SharedFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> formats;
  unsigned threads = 1;
  std::optional<int> replications;
  std::optional<std::string> config_path;
};

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(source + " is not an unsigned 64-bit integer: '" + text + "'");
  }
  return value;
}

void apply_overrides(RunConfig& run, const SharedFlags& flags) {
  if (const char* env = std::getenv("SMOOTHSAA_SEED"); env != nullptr && *env != '\0') {
    run.experiment.master_seed = parse_seed(env, "SMOOTHSAA_SEED");
  }
  if (flags.seed) run.experiment.master_seed = *flags.seed;
  if (flags.out_dir) run.outputs.dir = *flags.out_dir;
  if (!flags.formats.empty()) {
    validate_formats(flags.formats);
    run.outputs.formats = flags.formats;
  }
  if (flags.replications) run.experiment.replications = *flags.replications;
  run.experiment.validate();
}

int execute(const RunConfig& run, const SharedFlags& flags, std::ostream& out, std::ostream& err) {
  const ExperimentResult result = run_replications(run.experiment, flags.threads);
  const auto paths = emit_outputs(result, run.outputs, run.pivot_csv);
  out << "True value: " << format4(result.truth) << "\n\n";
  out << "Bias\n" << table_markdown(pivot(result.stats, Metric::Bias)) << "\n";
  out << "Variance\n" << table_markdown(pivot(result.stats, Metric::Variance)) << "\n";
  const OrderingDiagnostics& d = result.ordering;
  out << "Ordering checks: " << d.checked << ", violations: " << d.violations;
  if (d.checked > 0) out << ", max sandwich excess: " << format_full(d.max_sandwich_excess);
  out << "\n";
  for (const auto& p : paths) out << "wrote " << p << "\n";
  if (d.violations > 0 || (d.checked > 0 && d.max_sandwich_excess > 1e-9)) {
    err << "error: smoothed estimates fell outside [theta_SAA, theta_SAA + bound] in " << d.violations
        << " replications\n";
    return kExitNumerical;
  }
  return kExitOk;
}

std::vector<double> read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read data file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  std::string content = text.str();
  for (char& c : content) {
    if (c == ',' || c == ';') c = ' ';
  }
  std::istringstream tokens(content);
  std::vector<double> values;
  std::string token;
  while (tokens >> token) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw ConfigError("data file '" + path + "' holds a non-numeric token '" + token + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("data file '" + path + "' holds no numbers");
  return values;
}

void print_kernels(std::ostream& out) {
  const std::vector<Kernel> kernels = {Kernel::uniform(), Kernel::epanechnikov(), Kernel::gaussian()};
  out << "| moment |";
  for (const auto& k : kernels) out << " " << k.name() << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < kernels.size(); ++i) out << "---:|";
  out << "\n| m2 |";
  for (const auto& k : kernels) out << " " << format4(second_moment(k)) << " |";
  out << "\n";
  for (double a : {0.5, 1.0, 1.5}) {
    out << "| mbar_" << format_full(a) << " |";
    for (const auto& k : kernels) out << " " << format4(fractional_moment(k, a)) << " |";
    out << "\n";
  }
  out << "| K(0) |";
  for (const auto& k : kernels) out << " " << format4(density(k, 0.0)) << " |";
  out << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel-smoothed sample average approximation experiments", "smoothsaa"};
  app.require_subcommand(1);
  app.fallthrough();

  SharedFlags flags;
  std::uint64_t seed = 0;
  std::string out_dir;
  int replications = 0;
  std::string config_path;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config and SMOOTHSAA_SEED)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  app.add_option("--format", flags.formats, "Output format: csv, md or svg (repeatable)")
      ->check(CLI::IsMember({"csv", "md", "svg"}))
      ->take_all()
      ->allow_extra_args(false);
  app.add_option("--threads", flags.threads, "Worker threads; 0 uses every core")->check(CLI::NonNegativeNumber);
  auto* reps_opt = app.add_option("--replications", replications, "Override the number of replications")
                       ->check(CLI::PositiveNumber);
  auto* config_opt = app.add_option("--config", config_path, "Experiment config file");

  auto* experiment = app.add_subcommand("experiment", "Run an experiment described by a JSON config");
  std::string positional_config;
  experiment->add_option("config", positional_config, "Experiment config file");

  auto* table6 = app.add_subcommand("table6", "Run a built-in bias/variance table preset");
  std::string preset_name;
  table6->add_option("preset", preset_name, "Preset name")->required();

  auto* kernels = app.add_subcommand("kernels", "Print kernel moments");

  auto* bandwidth = app.add_subcommand("bandwidth", "Print the bandwidth a rule picks for a data file");
  std::string rule_name;
  std::string data_file;
  double rate_c = 1.0;
  double rate_eps = 0.1;
  double alpha = 0.05;
  double pilot = 0.5;
  std::string kernel_name = "uniform";
  bandwidth->add_option("rule", rule_name, "plugin_106, silverman, rate or bias_matched")->required();
  bandwidth->add_option("data", data_file, "Whitespace or comma separated observations")->required();
  bandwidth->add_option("--C", rate_c, "Rate rule scale");
  bandwidth->add_option("--eps", rate_eps, "Rate rule exponent offset");
  bandwidth->add_option("--alpha", alpha, "AVaR level for bias matching");
  bandwidth->add_option("--pilot", pilot, "Pilot fraction for bias matching");
  bandwidth->add_option("--kernel", kernel_name, "Kernel for bias matching");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (seed_opt->count() > 0) flags.seed = seed;
  if (out_opt->count() > 0) flags.out_dir = out_dir;
  if (reps_opt->count() > 0) flags.replications = replications;
  if (config_opt->count() > 0) flags.config_path = config_path;

  try {
    if (experiment->parsed()) {
      if (positional_config.empty() && !flags.config_path) throw ConfigError("experiment needs a config file");
      RunConfig run = load_config(positional_config.empty() ? *flags.config_path : positional_config);
      apply_overrides(run, flags);
      return execute(run, flags, out, err);
    }
    if (table6->parsed()) {
      RunConfig run = preset(preset_name);
      apply_overrides(run, flags);
      return execute(run, flags, out, err);
    }
    if (kernels->parsed()) {
      print_kernels(out);
      return kExitOk;
    }
    if (bandwidth->parsed()) {
      const Sample sample = Sample::scalar(read_data_file(data_file));
      double h = 0.0;
      if (rule_name == "plugin_106") {
        h = plugin_106(sample);
      } else if (rule_name == "silverman") {
        h = silverman(sample);
      } else if (rule_name == "rate") {
        h = rate_rule(sample.size(), rate_c, rate_eps);
      } else if (rule_name == "bias_matched") {
        const auto problem = make_problem("avar", alpha);
        h = bias_matched(sample, *problem, kernel_from_name(kernel_name), problem->modulus(sample), pilot).h;
      } else {
        throw ConfigError("unknown bandwidth rule '" + rule_name + "'");
      }
      out << format_full(h) << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EvaluationError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("smoothsaa");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace smoothsaa::io

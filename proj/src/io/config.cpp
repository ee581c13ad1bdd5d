#include "smoothsaa/io/config.hpp"

#include "smoothsaa/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace smoothsaa::io {

namespace {

using nlohmann::json;

constexpr std::uint64_t kPresetSeed = 12345;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key '" + key + "' in " + where);
  return *it;
}

template <class T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

double number(const json& value, const std::string& key) {
  if (!value.is_number()) throw ConfigError("key '" + key + "' must be a number");
  return value.get<double>();
}

NormalDistribution parse_distribution(const json& d) {
  if (!d.is_object()) throw ConfigError("key 'distribution' must be an object");
  reject_unknown_keys(d, {"type", "mu", "sigma2"}, "distribution");
  const std::string type = d.contains("type") ? get_as<std::string>(d["type"], "distribution.type") : "normal";
  if (type != "normal") throw ConfigError("unsupported distribution type '" + type + "'");
  return {number(require(d, "mu", "distribution"), "distribution.mu"),
          number(require(d, "sigma2", "distribution"), "distribution.sigma2")};
}

std::string default_label(const EstimatorSpec& e) {
  if (e.is_saa()) return "SAA";
  return std::string(e.kernel->name()) + " " + e.rule.label();
}

EstimatorSpec parse_estimator(const json& e, std::size_t index) {
  const std::string where = "estimators[" + std::to_string(index) + "]";
  if (!e.is_object()) throw ConfigError(where + " must be an object");
  reject_unknown_keys(e, {"label", "kernel", "bandwidth_rule", "h", "C", "eps", "pilot_fraction"}, where);
  EstimatorSpec spec;
  const std::string kernel = get_as<std::string>(require(e, "kernel", where), where + ".kernel");
  if (kernel == "none" || kernel == "saa") {
    spec = EstimatorSpec::saa();
  } else {
    try {
      spec.kernel = kernel_from_name(kernel);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
    const std::string rule = get_as<std::string>(require(e, "bandwidth_rule", where), where + ".bandwidth_rule");
    try {
      if (rule == "fixed") {
        spec.rule = BandwidthRule::fixed(number(require(e, "h", where), where + ".h"));
      } else if (rule == "rate") {
        spec.rule = BandwidthRule::rate(number(require(e, "C", where), where + ".C"),
                                        number(require(e, "eps", where), where + ".eps"));
      } else if (rule == "bias_matched") {
        const double fraction = e.contains("pilot_fraction") ? number(e["pilot_fraction"], where) : 0.5;
        spec.rule = BandwidthRule::bias_matched(fraction);
      } else {
        spec.rule = bandwidth_rule_from_name(rule);
      }
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
  }
  spec.label = e.contains("label") ? get_as<std::string>(e["label"], where + ".label") : default_label(spec);
  return spec;
}

OutputSpec parse_outputs(const json& o) {
  if (!o.is_object()) throw ConfigError("key 'outputs' must be an object");
  reject_unknown_keys(o, {"name", "dir", "formats"}, "outputs");
  OutputSpec out;
  if (o.contains("name")) out.name = get_as<std::string>(o["name"], "outputs.name");
  if (o.contains("dir")) out.dir = get_as<std::string>(o["dir"], "outputs.dir");
  if (o.contains("formats")) out.formats = get_as<std::vector<std::string>>(o["formats"], "outputs.formats");
  if (out.name.empty() || out.name.find('/') != std::string::npos) {
    throw ConfigError("outputs.name must be a plain file stem");
  }
  validate_formats(out.formats);
  return out;
}

RunConfig table_preset(const std::string& name, const Kernel& kernel, double alpha) {
  RunConfig run;
  ExperimentConfig& c = run.experiment;
  c.distribution = {10.0, 3.0};
  c.sample_sizes = {100, 200, 500};
  c.replications = 1000;
  c.alpha = alpha;
  c.problem = "avar";
  c.master_seed = kPresetSeed;
  c.estimators = {
      {"S Rule", kernel, BandwidthRule::silverman()},
      {"S-J Rule", kernel, BandwidthRule::plugin106()},
      {"0.5", kernel, BandwidthRule::fixed(0.5)},
      {"0.35", kernel, BandwidthRule::fixed(0.35)},
      {"0.2", kernel, BandwidthRule::fixed(0.2)},
      {"0.05", kernel, BandwidthRule::fixed(0.05)},
      EstimatorSpec::saa(),
  };
  run.outputs.name = name;
  run.pivot_csv = true;
  return run;
}

}  // namespace

void validate_formats(const std::vector<std::string>& formats) {
  if (formats.empty()) throw ConfigError("at least one output format is required");
  for (const auto& f : formats) {
    if (f != "csv" && f != "md" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
  }
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("invalid JSON: ") + ex.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"distribution", "N_list", "replications", "alpha", "problem", "estimators", "master_seed",
                       "outputs"},
                      "config");
  RunConfig run;
  ExperimentConfig& c = run.experiment;
  c.distribution = parse_distribution(require(doc, "distribution", "config"));

  const json& ns = require(doc, "N_list", "config");
  if (!ns.is_array()) throw ConfigError("key 'N_list' must be an array");
  for (const auto& n : ns) {
    if (!n.is_number_integer()) throw ConfigError("key 'N_list' must hold integers");
    c.sample_sizes.push_back(n.get<Eigen::Index>());
  }
  const json& m = require(doc, "replications", "config");
  if (!m.is_number_integer()) throw ConfigError("key 'replications' must be an integer");
  c.replications = m.get<int>();
  if (doc.contains("alpha")) c.alpha = number(doc["alpha"], "alpha");
  if (doc.contains("problem")) c.problem = get_as<std::string>(doc["problem"], "problem");

  const json& es = require(doc, "estimators", "config");
  if (!es.is_array()) throw ConfigError("key 'estimators' must be an array");
  for (std::size_t i = 0; i < es.size(); ++i) c.estimators.push_back(parse_estimator(es[i], i));

  if (doc.contains("master_seed")) {
    const json& s = doc["master_seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("key 'master_seed' must be a non-negative integer");
    }
    c.master_seed = s.get<std::uint64_t>();
  }
  if (doc.contains("outputs")) run.outputs = parse_outputs(doc["outputs"]);
  c.validate();
  return run;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config_text(text.str());
  } catch (const ConfigError& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
}

std::vector<std::string> preset_names() {
  return {"uniform-alpha05", "epanechnikov-alpha05", "uniform-alpha20", "epanechnikov-alpha20"};
}

RunConfig preset(const std::string& name) {
  if (name == "uniform-alpha05") return table_preset(name, Kernel::uniform(), 0.05);
  if (name == "epanechnikov-alpha05") return table_preset(name, Kernel::epanechnikov(), 0.05);
  if (name == "uniform-alpha20") return table_preset(name, Kernel::uniform(), 0.2);
  if (name == "epanechnikov-alpha20") return table_preset(name, Kernel::epanechnikov(), 0.2);
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace smoothsaa::io

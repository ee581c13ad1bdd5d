#include "smoothsaa/errors.hpp"
#include "smoothsaa/io/cli.hpp"
#include "smoothsaa/io/config.hpp"
#include "smoothsaa/io/output.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <doctest.h>

#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace smoothsaa;
using namespace smoothsaa::io;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("smoothsaa_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  return cells;
}

std::vector<std::string> csv_cells(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

std::vector<std::string> lines(const std::string& text) { return split(text, '\n'); }

const char* kSmallConfig = R"({
  "distribution": {"type": "normal", "mu": 10, "sigma2": 3},
  "N_list": [30, 60],
  "replications": 25,
  "alpha": 0.1,
  "estimators": [
    {"kernel": "uniform", "bandwidth_rule": "fixed", "h": 0.5},
    {"kernel": "epanechnikov", "bandwidth_rule": "silverman"},
    {"kernel": "gaussian", "bandwidth_rule": "rate", "C": 1.0, "eps": 0.1, "label": "gauss rate"},
    {"kernel": "none"}
  ],
  "master_seed": 99,
  "outputs": {"name": "small", "formats": ["csv", "md", "svg"]}
})";

ExperimentResult small_result() { return run_replications(parse_config_text(kSmallConfig).experiment, 1); }

}  // namespace

TEST_CASE("four-decimal formatting") {
  CHECK(format4(0.03125) == "0.0312");
  CHECK(format4(0.09375) == "0.0938");
  CHECK(format4(-0.00004) == "0.0000");
  CHECK(format4(-0.0) == "0.0000");
  CHECK(format4(-0.0878) == "-0.0878");
  CHECK(format4(13.572723) == "13.5727");
  CHECK(format_full(0.1) == "0.1");
  CHECK(std::stod(format_full(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("config parsing") {
  const RunConfig run = parse_config_text(kSmallConfig);
  const ExperimentConfig& c = run.experiment;
  CHECK(c.distribution.mu == 10.0);
  CHECK(c.distribution.sigma2 == 3.0);
  CHECK(c.sample_sizes == std::vector<Eigen::Index>{30, 60});
  CHECK(c.replications == 25);
  CHECK(c.alpha == 0.1);
  CHECK(c.problem == "avar");
  CHECK(c.master_seed == 99);
  REQUIRE(c.estimators.size() == 4);
  CHECK(c.estimators[0].label == "uniform fixed(0.5)");
  CHECK(c.estimators[1].rule == BandwidthRule::silverman());
  CHECK(c.estimators[2].label == "gauss rate");
  CHECK(c.estimators[3].is_saa());
  CHECK(run.outputs.name == "small");
  CHECK(run.outputs.formats.size() == 3);

  const auto message = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("{").find("invalid JSON") != std::string::npos);
  CHECK(message("[]").find("JSON object") != std::string::npos);
  CHECK(message(R"({"N_list": [10], "replications": 5, "estimators": []})").find("distribution") !=
        std::string::npos);
  CHECK(message(R"({"distribution": {"mu": 0, "sigma2": 1}, "N_list": [10], "replications": 5,
                    "estimators": [{"kernel": "none"}], "colour": 1})")
            .find("'colour'") != std::string::npos);
  CHECK(message(R"({"distribution": {"mu": 0, "sigma2": 1}, "N_list": [10], "replications": 5,
                    "estimators": [{"kernel": "box", "bandwidth_rule": "fixed", "h": 1}]})")
            .find("estimators[0]") != std::string::npos);
  CHECK(message(R"({"distribution": {"mu": 0, "sigma2": 1}, "N_list": [10], "replications": 5,
                    "estimators": [{"kernel": "uniform", "bandwidth_rule": "fixed"}]})")
            .find("'h'") != std::string::npos);
  CHECK(message(R"({"distribution": {"mu": 0, "sigma2": 1}, "N_list": [10.5], "replications": 5,
                    "estimators": [{"kernel": "none"}]})")
            .find("N_list") != std::string::npos);
  CHECK(message(R"({"distribution": {"mu": 0, "sigma2": 1}, "N_list": [10], "replications": 5,
                    "estimators": [{"kernel": "none"}], "outputs": {"formats": ["pdf"]}})")
            .find("'pdf'") != std::string::npos);
  CHECK(message(R"({"distribution": {"mu": 0, "sigma2": 1}, "N_list": [10], "replications": 5,
                    "estimators": [{"kernel": "none"}], "outputs": {"name": "../x"}})")
            .find("outputs.name") != std::string::npos);
}

TEST_CASE("presets") {
  CHECK(preset_names().size() == 4);
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const RunConfig run = preset(name);
    CHECK(run.pivot_csv);
    CHECK(run.experiment.estimators.size() == 7);
    CHECK(run.experiment.sample_sizes == std::vector<Eigen::Index>{100, 200, 500});
    CHECK(run.experiment.replications == 1000);
    CHECK_NOTHROW(run.experiment.validate());
  }
  CHECK(preset("uniform-alpha05").experiment.alpha == 0.05);
  CHECK(preset("epanechnikov-alpha20").experiment.alpha == 0.2);
  CHECK_THROWS_AS(preset("gaussian-alpha05"), ConfigError);
}

TEST_CASE("pivot tables") {
  ExperimentConfig c = preset("uniform-alpha05").experiment;
  c.replications = 4;
  const ExperimentResult r = run_replications(c, 1);
  const OutputTable bias = pivot(r.stats, Metric::Bias);
  CHECK(bias.raw.rows() == 3);
  CHECK(bias.raw.cols() == 7);
  CHECK(bias.columns ==
        std::vector<std::string>{"S Rule", "S-J Rule", "0.5", "0.35", "0.2", "0.05", "SAA"});
  CHECK(bias.row_keys == std::vector<Eigen::Index>{100, 200, 500});
  CHECK(bias.formatted().size() == 3);
  CHECK(bias.formatted()[0].size() == 7);
  CHECK(!bias.raw.hasNaN());
  const OutputTable var = pivot(r.stats, Metric::Variance);
  CHECK((var.raw.array() >= 0.0).all());

  const auto csv = lines(table_csv(bias));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == "N,S Rule,S-J Rule,0.5,0.35,0.2,0.05,SAA");
  CHECK(split(csv[3], ',')[0] == "500");
  const auto md = lines(table_markdown(bias));
  CHECK(md.size() == 5);
  CHECK(md[1] == "|---|---:|---:|---:|---:|---:|---:|---:|");
}

TEST_CASE("statistics CSV round trip") {
  const ExperimentResult r = small_result();
  const auto rows = lines(stats_csv(r.stats));
  REQUIRE(rows.size() == r.stats.size() + 1);
  CHECK(rows[0] == "N,estimator,kernel,h_rule,h_value,bias,variance,mse,stderr");
  for (std::size_t i = 0; i < r.stats.size(); ++i) {
    const auto cells = csv_cells(rows[i + 1]);
    REQUIRE(cells.size() == 9);
    const EstimatorStats& s = r.stats[i];
    CHECK(std::stol(cells[0]) == s.n);
    CHECK(cells[1] == s.label);
    CHECK(cells[2] == s.kernel);
    CHECK(cells[3] == s.rule);
    CHECK(std::abs(std::stod(cells[4]) - s.h_mean) <= 1e-12);
    CHECK(std::abs(std::stod(cells[5]) - s.bias) <= 1e-12);
    CHECK(std::abs(std::stod(cells[6]) - s.variance) <= 1e-12);
    CHECK(std::abs(std::stod(cells[7]) - s.mse) <= 1e-12);
    CHECK(std::abs(std::stod(cells[8]) - s.stderr_bias) <= 1e-12);
  }
}

TEST_CASE("CSV fields with separators are quoted") {
  EstimatorStats s;
  s.n = 10;
  s.label = "a,b \"c\"";
  s.kernel = "uniform";
  s.rule = "rate(1,0.1)";
  const auto rows = lines(stats_csv({s}));
  CHECK(rows[1].rfind("10,\"a,b \"\"c\"\"\",uniform,\"rate(1,0.1)\",", 0) == 0);
  const auto cells = csv_cells(rows[1]);
  CHECK(cells[1] == s.label);
  CHECK(cells[3] == s.rule);
}

TEST_CASE("SVG output is well-formed") {
  const ExperimentResult r = small_result();
  std::istringstream in(svg_plot(r, "small <test>"));
  boost::property_tree::ptree tree;
  REQUIRE_NOTHROW(boost::property_tree::read_xml(in, tree));
  const auto& root = tree.get_child("svg");
  CHECK(root.get<std::string>("<xmlattr>.xmlns") == "http://www.w3.org/2000/svg");
  CHECK(root.get<std::string>("title") == "small <test>");

  int polylines = 0;
  std::function<void(const boost::property_tree::ptree&)> walk = [&](const boost::property_tree::ptree& node) {
    for (const auto& [key, child] : node) {
      if (key == "polyline") {
        ++polylines;
        const std::string points = child.get<std::string>("<xmlattr>.points");
        CHECK(!points.empty());
        std::istringstream pts(points);
        std::string pair;
        int count = 0;
        while (pts >> pair) {
          const auto xy = split(pair, ',');
          REQUIRE(xy.size() == 2);
          CHECK(std::isfinite(std::stod(xy[0])));
          CHECK(std::isfinite(std::stod(xy[1])));
          ++count;
        }
        CHECK(count >= 2);
      }
      walk(child);
    }
  };
  walk(root);
  // One line per N in each of the two panels.
  CHECK(polylines == 4);
}

TEST_CASE("outputs land in the requested directory") {
  TempDir tmp;
  const ExperimentResult r = small_result();
  OutputSpec spec;
  spec.name = "run";
  spec.dir = (tmp.path / "nested" / "out").string();
  spec.formats = {"csv", "md", "svg"};
  const auto written = emit_outputs(r, spec, true);
  CHECK(written.size() == 5);
  for (const auto& p : written) CHECK(fs::file_size(p) > 0);
  CHECK(slurp(fs::path(spec.dir) / "run.csv") == stats_csv(r.stats));
  CHECK(fs::exists(fs::path(spec.dir) / "run_bias.csv"));
  CHECK(fs::exists(fs::path(spec.dir) / "run_variance.csv"));
  CHECK(slurp(fs::path(spec.dir) / "run.md").rfind("# run\n", 0) == 0);

  spec.formats = {"csv"};
  CHECK(emit_outputs(r, spec, false).size() == 1);

  write_text(tmp.path / "blocker", "x");
  spec.dir = (tmp.path / "blocker" / "sub").string();
  CHECK_THROWS_AS(emit_outputs(r, spec, false), std::runtime_error);
}

TEST_CASE("cli kernels table") {
  const CliRun run = cli({"kernels"});
  CHECK(run.code == 0);
  CHECK(run.out.find("| uniform | epanechnikov | gaussian |") != std::string::npos);
  CHECK(run.out.find("| m2 | 0.3333 | 0.2000 | 1.0000 |") != std::string::npos);
  CHECK(run.out.find("| K(0) | 0.5000 | 0.7500 | 0.3989 |") != std::string::npos);
}

TEST_CASE("cli errors exit with code 1") {
  TempDir tmp;
  const std::string missing = (tmp.path / "missing.json").string();
  CliRun run = cli({"experiment", missing});
  CHECK(run.code == 1);
  CHECK(run.err.find(missing) != std::string::npos);

  CHECK(cli({}).code == 1);
  CHECK(cli({"experiment"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"--threads", "-2", "kernels"}).code == 1);
  CHECK(cli({"--format", "pdf", "kernels"}).code == 1);

  run = cli({"table6", "no-such-preset"});
  CHECK(run.code == 1);
  CHECK(run.err.find("no-such-preset") != std::string::npos);

  write_text(tmp.path / "bad.json", R"({"distribution": 1})");
  run = cli({"experiment", (tmp.path / "bad.json").string()});
  CHECK(run.code == 1);
  CHECK(run.err.find("bad.json") != std::string::npos);

  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli experiment run and seed precedence") {
  TempDir tmp;
  const fs::path config = tmp.path / "small.json";
  write_text(config, kSmallConfig);
  const auto run_into = [&](const std::string& sub, std::vector<std::string> extra) {
    std::vector<std::string> args = {"--out", (tmp.path / sub).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    args.push_back("experiment");
    args.push_back(config.string());
    const CliRun r = cli(args);
    REQUIRE(r.code == 0);
    return slurp(tmp.path / sub / "small.csv");
  };

  unsetenv("SMOOTHSAA_SEED");
  const std::string base = run_into("base", {});
  CHECK(fs::exists(tmp.path / "base" / "small.md"));
  CHECK(fs::exists(tmp.path / "base" / "small.svg"));
  CHECK(run_into("again", {}) == base);
  CHECK(run_into("seed99", {"--seed", "99"}) == base);
  const std::string other = run_into("seed7", {"--seed", "7"});
  CHECK(other != base);

  setenv("SMOOTHSAA_SEED", "7", 1);
  CHECK(run_into("env7", {}) == other);
  CHECK(run_into("env7flag99", {"--seed", "99"}) == base);
  setenv("SMOOTHSAA_SEED", "seven", 1);
  CHECK(cli({"experiment", config.string()}).code == 1);
  unsetenv("SMOOTHSAA_SEED");

  CHECK(run_into("threads", {"--threads", "3"}) == base);
  const std::string csv_only = run_into("fmt", {"--format", "csv"});
  CHECK(csv_only == base);
  CHECK(!fs::exists(tmp.path / "fmt" / "small.md"));

  const CliRun via_flag = cli({"--out", (tmp.path / "flag").string(), "--config", config.string(), "experiment"});
  CHECK(via_flag.code == 0);
  CHECK(via_flag.out.find("violations: 0") != std::string::npos);
  CHECK(slurp(tmp.path / "flag" / "small.csv") == base);
}

TEST_CASE("cli bandwidth subcommand") {
  TempDir tmp;
  const fs::path data = tmp.path / "data.txt";
  write_text(data, "1.0, 4.0\n2.0 8.0;5.0\n");
  const Sample s = Sample::scalar({1.0, 4.0, 2.0, 8.0, 5.0});

  CliRun run = cli({"bandwidth", "silverman", data.string()});
  CHECK(run.code == 0);
  CHECK(std::stod(run.out) == silverman(s));
  run = cli({"bandwidth", "plugin_106", data.string()});
  CHECK(std::stod(run.out) == plugin_106(s));
  run = cli({"bandwidth", "rate", data.string(), "--C", "2", "--eps", "0.1"});
  CHECK(std::stod(run.out) == rate_rule(5, 2.0, 0.1));
  run = cli({"bandwidth", "bias_matched", data.string(), "--alpha", "0.2"});
  CHECK(run.code == 0);
  CHECK(std::stod(run.out) > 0.0);

  CHECK(cli({"bandwidth", "cross_validation", data.string()}).code == 1);
  CHECK(cli({"bandwidth", "silverman", (tmp.path / "nope.txt").string()}).code == 1);
  write_text(tmp.path / "words.txt", "1 2 three");
  run = cli({"bandwidth", "silverman", (tmp.path / "words.txt").string()});
  CHECK(run.code == 1);
  CHECK(run.err.find("three") != std::string::npos);
}

TEST_CASE("shipped configs match the presets") {
  const fs::path dir = SMOOTHSAA_CONFIG_DIR;
  CHECK_NOTHROW(load_config((dir / "example.json").string()));
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    RunConfig file = load_config((dir / (name + ".json")).string());
    RunConfig built = preset(name);
    CHECK(file.experiment.master_seed == built.experiment.master_seed);
    file.experiment.replications = 5;
    built.experiment.replications = 5;
    CHECK(stats_csv(run_replications(file.experiment, 1).stats) == stats_csv(run_replications(built.experiment, 1).stats));
  }
}

// Command-line front end for the classification, noise-sweep and exploration
// experiments. All outputs go to the --out directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hapex/bench.hpp"

namespace fs = std::filesystem;
using namespace hapex;

namespace {

enum class Format { kCsv, kJson };

struct Common {
  std::string materials = HAPEX_DATA_DIR "/materials.txt";
  std::string out;
  std::uint64_t seed = 0;
  std::string format = "csv";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Common& c, bool with_format = true) {
  cmd->add_option("--materials", c.materials, "Material parameter file")->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory (created if missing)")->required();
  cmd->add_option("--seed", c.seed, "Base random seed")->capture_default_str();
  if (with_format) {
    cmd->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}

Scenario resolve_scenario(const std::optional<std::string>& file, int builtin,
                          const MaterialLibrary& lib) {
  if (file) return load_scenario(*file, lib);
  if (builtin < 1 || builtin > 3) throw UsageError("--builtin must be 1, 2 or 3");
  return generate_builtin_scenarios(lib)[static_cast<std::size_t>(builtin - 1)];
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian touch-attention simulator and experiment harness", "hapex"};
  app.require_subcommand(1);

  Common common;
  int trials = 0;
  int samples = 5;
  double noise_scale = 1.0;
  double explore_noise = 0.0;
  std::vector<double> scales{1.0, 1.5, 2.0};
  std::vector<int> k_list{1, 5};
  std::optional<std::string> scenario_file;
  int builtin = 1;
  int max_iterations = 80;

  auto* classify = app.add_subcommand("classify", "Confusion matrix of MAP categorisation");
  add_common(classify, common);
  classify->add_option("--trials", trials, "Trials per material [400]");
  classify->add_option("--samples", samples, "Samples integrated per trial")->capture_default_str();
  classify->add_option("--noise-scale", noise_scale, "Additive noise scale")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep-noise", "Accuracy over noise scales and sample counts");
  add_common(sweep, common);
  sweep->add_option("--trials", trials, "Trials per material [400]");
  sweep->add_option("--scales", scales, "Noise scales")->delimiter(',')->capture_default_str();
  sweep->add_option("--samples", k_list, "Sample counts k")->delimiter(',')->capture_default_str();

  auto* explore = app.add_subcommand("explore", "Discontinuity-following benchmark");
  add_common(explore, common);
  explore->add_option("--scenario", scenario_file, "Scenario file (overrides --builtin)");
  explore->add_option("--builtin", builtin, "Builtin scenario 1, 2 or 3")->capture_default_str();
  explore->add_option("--trials", trials, "Number of seeded trials [10]");
  explore->add_option("--noise-scale", explore_noise, "Additive noise scale")->capture_default_str();
  explore->add_option("--max-iterations", max_iterations, "Iteration budget per trial")
      ->capture_default_str();

  auto* dump = app.add_subcommand("dump-maps", "Per-iteration attention field rasters of one trial");
  add_common(dump, common, false);
  dump->add_option("--scenario", scenario_file, "Scenario file (overrides --builtin)");
  dump->add_option("--builtin", builtin, "Builtin scenario 1, 2 or 3")->capture_default_str();
  dump->add_option("--noise-scale", explore_noise, "Additive noise scale")->capture_default_str();
  dump->add_option("--max-iterations", max_iterations, "Iteration budget")->capture_default_str();

  auto* gen = app.add_subcommand("gen-scenarios", "Write the three builtin scenario files");
  add_common(gen, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    const auto lib = load_library(common.materials);
    const fs::path out = prepare_out(common.out);
    const Format fmt = common.format == "json" ? Format::kJson : Format::kCsv;

    if (app.got_subcommand(classify)) {
      const int n = trials > 0 ? trials : 400;
      const auto noise = NoiseSpec::uniform(noise_scale);
      const auto cm = run_classification_experiment(lib, n, samples, noise, common.seed);
      if (fmt == Format::kCsv) {
        auto f = open_out(out / "confusion.csv");
        write_confusion_csv(f, cm, lib);
      } else {
        auto f = open_out(out / "confusion.json");
        write_confusion_json(f, cm, lib, noise, common.seed);
      }
    } else if (app.got_subcommand(sweep)) {
      const int n = trials > 0 ? trials : 400;
      const auto result = run_noise_sweep(lib, scales, n, k_list, common.seed);
      if (fmt == Format::kCsv) {
        auto f = open_out(out / "sweep.csv");
        write_sweep_csv(f, result);
      } else {
        auto f = open_out(out / "sweep.json");
        write_sweep_json(f, result, lib, common.seed);
      }
    } else if (app.got_subcommand(explore)) {
      const auto scenario = resolve_scenario(scenario_file, builtin, lib);
      TrialConfig config;
      config.max_iterations = max_iterations;
      config.seed = common.seed;
      config.noise = NoiseSpec::uniform(explore_noise);
      const auto report =
          run_exploration_benchmark(scenario, lib, trials > 0 ? trials : 10, config);
      if (fmt == Format::kCsv) {
        auto f = open_out(out / ("explore-" + scenario.name + ".csv"));
        write_trials_csv(f, report);
      } else {
        auto f = open_out(out / ("explore-" + scenario.name + ".json"));
        write_report_json(f, report);
      }
    } else if (app.got_subcommand(dump)) {
      const auto scenario = resolve_scenario(scenario_file, builtin, lib);
      TrialConfig config;
      config.max_iterations = max_iterations;
      config.seed = common.seed;
      config.noise = NoiseSpec::uniform(explore_noise);
      const auto rec = run_trial(scenario, lib, config,
                                 [&](int k, const VoxelIndex&, const AttentionState& s) {
                                   dump_fields(scenario.grid, s, k, out);
                                 });
      auto f = open_out(out / "path.csv");
      f << "k,ix,iy,iz\n";
      for (std::size_t k = 0; k < rec.visited.size(); ++k) {
        const auto& v = rec.visited[k];
        f << k << ',' << v.ix << ',' << v.iy << ',' << v.iz << '\n';
      }
    } else if (app.got_subcommand(gen)) {
      for (const auto& s : generate_builtin_scenarios(lib)) {
        save_scenario(out / (s.name + ".txt"), s, lib);
      }
    }
  } catch (const UsageError& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const ConfigError& e) {
    print_error("config", e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 1;
  }
  return 0;
}

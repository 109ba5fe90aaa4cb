#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "tdse/config.hpp"
#include "tdse/suites.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

int run(const Options& opt, const std::vector<std::string>& suites) {
  tdse::ExperimentConfig cfg;
  try {
    cfg = tdse::load_config(opt.config);
  } catch (const tdse::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (opt.out) cfg.output = *opt.out;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.workers) {
    if (*opt.workers < 1) {
      std::cerr << "config error: workers: must be at least 1\n";
      return 2;
    }
    cfg.workers = *opt.workers;
  }
  if (!suites.empty()) cfg.suites = suites;

  const auto results = tdse::run_experiment(cfg);
  const auto report = tdse::emit_report(cfg, results);
  std::filesystem::create_directories(cfg.output);
  std::ofstream(cfg.output / "report.json") << report.dump(2) << '\n';
  for (const auto& r : results)
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.message << '\n';
  std::cout << "report: " << (cfg.output / "report.json").string() << '\n';
  return tdse::exit_status(results);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schrodinger propagation and well-posedness checks on periodic grids"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opt.config, "YAML experiment file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", opt.out, "output directory (overrides the config)");
    sub->add_option("-s,--seed", opt.seed, "seed for random probes");
    sub->add_option("-w,--workers", opt.workers, "concurrent suites");
  };
  std::string chosen;
  for (const auto& name : tdse::suite_names()) {
    auto* sub = app.add_subcommand(name, "run only the " + name + " suite");
    add_common(sub);
    sub->callback([&chosen, name] { chosen = name; });
  }
  auto* all = app.add_subcommand("all", "run the suites listed in the config");
  add_common(all);
  all->callback([&chosen] { chosen = "all"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (chosen == "all") return run(opt, {});
    return run(opt, {chosen});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

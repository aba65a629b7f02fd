// Command-line front end: one subcommand per experiment kind, plus verify
// and compare.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tnt/error.hpp"
#include "tnt/harness/compare.hpp"
#include "tnt/harness/config.hpp"
#include "tnt/harness/experiment.hpp"

#ifndef TNT_ACCEPTANCE_PATH
#define TNT_ACCEPTANCE_PATH ""
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAcceptance = 4;

struct RunFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  std::optional<std::size_t> threads;
  bool quiet = false;
};

int run_kind(tnt::harness::ExperimentKind kind, const RunFlags& f) {
  using namespace tnt::harness;
  ExperimentConfig cfg =
      f.config.empty() ? parse_config(json::object(), kind, f.seed) : load_config(f.config, kind, f.seed);
  if (f.trajectories) {
    json raw = f.config.empty() ? json::object() : json::parse(read_file(f.config));
    raw["n_traj"] = *f.trajectories;
    cfg = parse_config(raw, kind, f.seed);
  }
  RunOptions opts;
  opts.threads = f.threads;
  if (!f.out.empty()) opts.output_dir = f.out;
  opts.quiet = f.quiet;
  const auto report = run_experiment(cfg, opts);
  if (!f.quiet) {
    std::cout << "wrote " << report.files.size() << " files to " << report.output_dir.string()
              << " (config " << report.config_hash.substr(0, 12) << ")\n";
    std::cout << report.summary.dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twist-and-turn spin squeezing in multimode condensates"};
  app.require_subcommand(1);

  RunFlags flags;
  std::optional<tnt::harness::ExperimentKind> chosen;
  for (const auto& [kind, name] : tnt::harness::kind_names()) {
    auto* sub = app.add_subcommand(name, "Run a " + name + " experiment");
    sub->add_option("--config", flags.config, "JSON configuration file");
    sub->add_option("--out", flags.out, "Output directory (overrides output_dir)");
    sub->add_option("--seed", flags.seed, "Random seed (overrides the config)");
    sub->add_option("--trajectories", flags.trajectories, "Trajectory count (overrides n_traj)");
    sub->add_option("--threads", flags.threads, "Worker threads (overrides TNT_THREADS)");
    sub->add_flag("--quiet", flags.quiet, "Suppress progress output");
    sub->callback([&chosen, k = kind] { chosen = k; });
  }

  std::string verify_args;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--only", verify_args, "Comma-separated criterion ids, e.g. C1,C3");

  std::string cmp_a, cmp_b, metric = "VarJy";
  double tolerance = 3.0;
  auto* compare = app.add_subcommand("compare", "Compare one observable between two metrology.csv files");
  compare->add_option("a", cmp_a, "First metrology.csv")->required();
  compare->add_option("b", cmp_b, "Second metrology.csv")->required();
  compare->add_option("--metric", metric, "Column to compare");
  compare->add_option("--tolerance", tolerance, "Allowed max deviation in combined standard errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (chosen) return run_kind(*chosen, flags);
    if (verify->parsed()) {
      const std::string path = TNT_ACCEPTANCE_PATH;
      if (path.empty()) {
        std::cerr << "acceptance binary was not built (TNT_BUILD_TESTS=OFF)\n";
        return kExitConfig;
      }
      std::string cmd = "\"" + path + "\"";
      if (!verify_args.empty()) cmd += " --only " + verify_args;
      const int status = std::system(cmd.c_str());
      return status == 0 ? kExitOk : kExitAcceptance;
    }
    if (compare->parsed()) {
      const auto a = tnt::harness::load_series(cmp_a, metric);
      const auto b = tnt::harness::load_series(cmp_b, metric);
      const auto r = tnt::harness::compare_runs(a, b);
      std::cout << metric << ": max deviation " << r.max_deviation << " se, rms " << r.rms_deviation
                << " se, max |diff| " << r.max_abs_difference << " over " << r.points << " points\n";
      return r.max_deviation <= tolerance ? kExitOk : kExitAcceptance;
    }
  } catch (const tnt::InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tnt::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

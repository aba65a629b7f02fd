#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "tnt/harness/compare.hpp"
#include "tnt/harness/config.hpp"
#include "tnt/harness/experiment.hpp"

using namespace tnt;
using namespace tnt::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tnt_harness_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunReport run_json(const json& j, const fs::path& out, std::optional<std::size_t> threads = 1) {
  RunOptions o;
  o.output_dir = out.string();
  o.quiet = true;
  o.threads = threads;
  return run_experiment(parse_config(j), o);
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TNT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json small_tw(double chi, const fs::path& out) {
  return {{"kind", "single_mode_tw"}, {"n_atoms", 1e4},     {"n_traj", 400},
          {"seed", 5},                {"chi", chi},          {"output_dir", out.string()},
          {"t_grid", {{"stop", 0.06}, {"count", 13}}}};
}

}  // namespace

TEST(Config, MinimalExactDefaults) {
  const auto c = parse_config_text(R"({"kind": "single_mode_exact", "case": "I"})");
  EXPECT_EQ(c.kind, ExperimentKind::kSingleModeExact);
  EXPECT_EQ(c.n_atoms, 100.0);
  EXPECT_FALSE(c.chi.has_value());
  EXPECT_EQ(c.resolved["n_atoms"], 100.0);
  EXPECT_EQ(c.resolved["case"]["a_ab"], 97.0);

  // The run falls back to the mode-overlap estimate for chi.
  const auto out = scratch("defaults");
  const auto report = run_json({{"kind", "single_mode_exact"}, {"t_grid", {{"values", {0.0, 0.1}}, {"scaled", true}}}}, out);
  EXPECT_EQ(report.summary["chi"], report.summary["chi_estimate"]);
  const PhysicalParams p;
  const auto cs = ScatteringCase::case_i();
  const double u = interaction_strength(cs.a_aa, p) / p.transverse_area;
  const SpatialGrid g = default_grid(100, u, p);
  const auto mode = unit_mode(ground_state(g, 100, u, p, 1e-10), g);
  const double chi = derive_couplings<double>(p, cs, mode, mode, g, 0.0).chi;
  EXPECT_NEAR(report.summary["chi"].get<double>() / chi, 1.0, 1e-6);
  // Nearly Gaussian at this size: chi ~ (U_aa + U_bb - 2 U_ab) / (2 hbar A) / (sqrt(2 pi) a_ho).
  const double du = interaction_strength(6.0 * constants::bohr_radius, p) / p.transverse_area;
  const double gaussian = du / (2 * p.hbar) / (std::sqrt(2 * constants::pi) * p.oscillator_length());
  EXPECT_NEAR(chi / gaussian, 1.0, 0.2);
}

TEST(Config, RejectsUnknownKey) {
  try {
    parse_config_text(R"({"kind": "multimode_tw", "seed": 1, "omega_z": 3})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("omega_z"), std::string::npos);
  }
  try {
    parse_config_text(R"({"kind": "multimode_tw", "seed": 1, "omega": {"policy": "tnt", "rate": 3}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("omega.rate"), std::string::npos);
  }
}

TEST(Config, SeedRequiredForStochasticKinds) {
  for (const char* kind : {"multimode_tw", "single_mode_tw", "calibrate_chi", "scan_omega"}) {
    try {
      parse_config(json{{"kind", kind}});
      FAIL() << kind;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("seed required"), std::string::npos);
    }
  }
  EXPECT_NO_THROW(parse_config(json{{"kind", "multimode_tw"}}, std::nullopt, 9));
  EXPECT_NO_THROW(parse_config(json{{"kind", "gpe"}}));
}

TEST(Config, ParseErrorCarriesLine) {
  try {
    parse_config_text("{\n  \"kind\": \"gpe\",\n  \"n_atoms\": ,\n}\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, ValidationNamesTheField) {
  auto message = [](const json& j) {
    try {
      parse_config(j);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message({{"kind", "gpe"}, {"grid", {{"n_points", 300}}}}).find("grid.n_points"), std::string::npos);
  EXPECT_NE(message({{"kind", "gpe"}, {"n_atoms", -5}}).find("n_atoms"), std::string::npos);
  EXPECT_NE(message({{"kind", "q_function"}, {"n_atoms", 5000}}).find("n_atoms"), std::string::npos);
  EXPECT_NE(message({{"kind", "gpe"}, {"case", "III"}, {"split", {{"policy", "breathe_together"}}}}).find("split"),
            std::string::npos);
  EXPECT_NE(message({{"kind", "gpe"}, {"t_grid", {{"values", {0.2, 0.1}}}}}).find("t_grid"), std::string::npos);
  EXPECT_NE(message({{"kind", "gpe"}, {"noise", "wigner"}}).find("noise"), std::string::npos);
  EXPECT_NE(message({{"kind", "warp"}}).find("warp"), std::string::npos);
  EXPECT_THROW(parse_config(json{{"kind", "gpe"}}, ExperimentKind::kQFunction), ConfigError);
}

TEST(Config, HashIgnoresThreadsAndOutputDirectory) {
  const auto a = parse_config(json{{"kind", "gpe"}, {"threads", 2}, {"output_dir", "x"}});
  const auto b = parse_config(json{{"kind", "gpe"}});
  const auto c = parse_config(json{{"kind", "gpe"}, {"n_atoms", 5e4}});
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(RunExperiment, QFunctionGridsForTwistingAndTurning) {
  const auto oat = scratch("q_oat");
  auto r = run_json({{"kind", "q_function"}, {"q_grid", {{"n_theta", 31}, {"n_phi", 61}}}}, oat);
  for (int k = 0; k < 4; ++k) {
    const auto t = read_csv(oat / ("q_" + std::to_string(k) + ".csv"));
    EXPECT_EQ(t.rows.size(), 31u * 61u);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"theta", "phi", "Q"}));
  }
  EXPECT_EQ(r.files.size(), 5u);

  const auto tnt_dir = scratch("q_tnt");
  r = run_json({{"kind", "q_function"},
                {"omega", {{"policy", "tnt"}}},
                {"q_grid", {{"n_theta", 31}, {"n_phi", 61}}},
                {"t_grid", {{"values", {0.0, 0.02, 0.04, 0.06}}, {"scaled", true}}}},
               tnt_dir);
  EXPECT_EQ(r.files.size(), 5u);
  const auto first = read_csv(tnt_dir / "q_0.csv");
  const auto last = read_csv(tnt_dir / "q_3.csv");
  EXPECT_NE(first.values("Q"), last.values("Q"));
  const auto chi_t = read_csv(tnt_dir / "metrology.csv").values("chi_t");
  EXPECT_NEAR(chi_t[2], 0.04, 1e-12);
}

TEST(RunExperiment, IdenticalConfigGivesIdenticalBytes) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_json(small_tw(0.02, a), a, 1);
  run_json(small_tw(0.02, b), b, 3);
  for (const char* f : {"metrology.csv", "accumulators.bin"}) EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
}

TEST(RunExperiment, ManifestListsChecksums) {
  const auto out = scratch("manifest");
  const auto r = run_json(small_tw(0.02, out), out);
  const json m = json::parse(read_file(out / "manifest.json"));
  EXPECT_EQ(m["status"], "complete");
  EXPECT_EQ(m["config_sha256"], r.config_hash);
  EXPECT_EQ(m["kind"], "single_mode_tw");
  EXPECT_EQ(m["config"]["n_traj"], 400);
  ASSERT_EQ(m["files"].size(), 2u);
  for (const auto& f : m["files"]) {
    EXPECT_EQ(f["sha256"], sha256_file_hex(out / f["name"].get<std::string>()));
  }
  const auto table = read_csv(out / "metrology.csv");
  EXPECT_NE(std::find(table.meta.begin(), table.meta.end(), "# config_sha256: " + r.config_hash), table.meta.end());
  const auto dump = deserialize_dump(read_file(out / "accumulators.bin"));
  EXPECT_EQ(to_hex(dump.config_digest), r.config_hash);
  EXPECT_EQ(dump.sums.n_traj, 400u);
}

TEST(RunExperiment, FailedRunIsFlagged) {
  const auto out = scratch("failed");
  const json j = {{"kind", "calibrate_chi"}, {"seed", 3},     {"n_traj", 4},
                  {"grid", {{"n_points", 128}}}, {"t_grid", {{"values", {1e-6, 2e-6, 3e-6}}}}};
  EXPECT_THROW(run_json(j, out), FitFailure);
  const json m = json::parse(read_file(out / "manifest.json"));
  EXPECT_EQ(m["status"], "failed");
  EXPECT_FALSE(m["error"].get<std::string>().empty());
  EXPECT_EQ(m["files"].size(), 2u);  // partial outputs stay listed
}

TEST(RunExperiment, GroundStateAndGpeOutputs) {
  const auto out = scratch("gpe");
  const auto r = run_json({{"kind", "gpe"}, {"t_grid", {{"values", {0.001, 0.002}}}}}, out);
  const auto series = read_csv(out / "gpe_series.csv");
  ASSERT_EQ(series.rows.size(), 2u);
  for (double eta : series.values("density_overlap")) EXPECT_GT(eta, 0.999);
  EXPECT_LT(r.summary["max_relative_energy_drift"].get<double>(), 1e-7);
  EXPECT_LE(r.summary["dt"].get<double>(), 1e-6);
  const auto gs = scratch("ground");
  run_json({{"kind", "ground_state"}}, gs);
  EXPECT_EQ(read_csv(gs / "ground_state.csv").rows.size(), 512u);
}

TEST(Compare, SelfMisSetAndDisjoint) {
  const auto a = scratch("cmp_a"), b = scratch("cmp_b");
  run_json(small_tw(0.02, a), a);
  run_json(small_tw(0.04, b), b);
  const auto sa = load_series(a / "metrology.csv", "VarJy");
  const auto self = compare_runs(sa, sa);
  EXPECT_EQ(self.max_deviation, 0.0);
  EXPECT_EQ(self.points, 13u);
  const auto sb = load_series(b / "metrology.csv", "VarJy");
  EXPECT_GT(compare_runs(sa, sb).max_deviation, 10.0);

  Series late{{1.0, 2.0}, {0.0, 0.0}, {1.0, 1.0}};
  EXPECT_THROW(compare_runs(sa, late), InvalidArgument);
  EXPECT_THROW(load_series(a / "metrology.csv", "VarJw"), InvalidArgument);
}

TEST(Compare, InterpolatesOntoCommonTimes) {
  const Series a{{0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, {0.1, 0.1, 0.1}};
  const Series b{{0.5, 1.5, 2.5}, {0.5, 1.5, 2.5}, {0.1, 0.1, 0.1}};
  const auto r = compare_runs(a, b);
  EXPECT_EQ(r.points, 2u);  // t = 1 and 2
  EXPECT_NEAR(r.max_abs_difference, 0.0, 1e-12);
}

TEST(AccumulatorDump, RoundTripAndCorruption) {
  AccumulatorDump d;
  d.config_digest = sha256("config");
  d.times = {0.0, 0.5};
  d.sums.per_time.resize(2);
  d.sums.n_traj = 3;
  d.sums.n_modes = 8;
  d.sums.failed_trajectories = {7};
  SymbolSample s;
  for (int i = 0; i < 3; ++i) {
    s.jx = i;
    s.jy = 2.0 * i;
    s.jz = -i;
    s.n_a = 10 + i;
    for (auto& acc : d.sums.per_time) acc.add(s);
  }
  const std::string bytes = serialize_dump(d);
  const auto back = deserialize_dump(bytes);
  EXPECT_EQ(back.config_digest, d.config_digest);
  EXPECT_EQ(back.times, d.times);
  EXPECT_EQ(back.sums.failed_trajectories, d.sums.failed_trajectories);
  EXPECT_EQ(back.sums.n_modes, 8u);
  EXPECT_EQ(back.sums.per_time[1].sums(), d.sums.per_time[1].sums());
  EXPECT_EQ(back.sums.per_time[1].aux(), d.sums.per_time[1].aux());
  EXPECT_EQ(serialize_dump(back), bytes);

  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_dump(bad), InvalidArgument);
  bad = bytes;
  bad[16] = 9;  // version
  EXPECT_THROW(deserialize_dump(bad), InvalidArgument);
  EXPECT_THROW(deserialize_dump(bytes.substr(0, bytes.size() - 3)), InvalidArgument);
  EXPECT_THROW(deserialize_dump(bytes + "x"), InvalidArgument);
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(to_hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Csv, FormatRoundTrip) {
  const auto dir = scratch("csv");
  CsvWriter w({"a", "b"});
  w.meta("units", "none");
  w.row({0.1, 1.0 / 3.0});
  w.write(dir / "x.csv");
  const auto t = read_csv(dir / "x.csv");
  EXPECT_EQ(t.meta, (std::vector<std::string>{"# units: none"}));
  EXPECT_EQ(t.values("b")[0], 1.0 / 3.0);
  EXPECT_THROW(w.row({1.0}), InvalidArgument);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  write_text(dir / "unknown.json", R"({"kind": "gpe", "omega_z": 1})");
  EXPECT_EQ(cli("gpe --config " + (dir / "unknown.json").string()), 2);
  EXPECT_EQ(cli("multimode_tw --quiet --out " + dir.string()), 2);  // seed required
  EXPECT_EQ(cli("--bogus"), 2);
  EXPECT_EQ(cli("gpe --help"), 0);

  write_text(dir / "fail.json",
             R"({"kind": "calibrate_chi", "seed": 3, "n_traj": 4, "grid": {"n_points": 128},
                 "t_grid": {"values": [1e-6, 2e-6, 3e-6]}})");
  EXPECT_EQ(cli("calibrate_chi --quiet --config " + (dir / "fail.json").string() + " --out " + (dir / "f").string()), 3);

  for (double chi : {0.02, 0.04}) {
    write_text(dir / "tw.json", small_tw(chi, dir / std::to_string(chi)).dump());
    EXPECT_EQ(cli("single_mode_tw --quiet --config " + (dir / "tw.json").string()), 0);
  }
  const auto a = (dir / std::to_string(0.02) / "metrology.csv").string();
  const auto b = (dir / std::to_string(0.04) / "metrology.csv").string();
  EXPECT_EQ(cli("compare " + a + " " + a), 0);
  EXPECT_EQ(cli("compare " + a + " " + b + " --metric VarJy"), 4);
}

TEST(Cli, FlagsOverrideConfig) {
  const auto dir = scratch("cli_flags");
  write_text(dir / "tw.json", small_tw(0.02, dir / "from_file").dump());
  EXPECT_EQ(cli("single_mode_tw --quiet --config " + (dir / "tw.json").string() +
                " --seed 11 --trajectories 50 --threads 2 --out " + (dir / "flags").string()),
            0);
  const json m = json::parse(read_file(dir / "flags" / "manifest.json"));
  EXPECT_EQ(m["config"]["seed"], 11);
  EXPECT_EQ(m["config"]["n_traj"], 50);
  EXPECT_EQ(m["summary"]["threads"], 2);
  EXPECT_FALSE(fs::exists(dir / "from_file"));
}

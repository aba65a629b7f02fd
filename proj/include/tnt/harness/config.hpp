#pragma once

// Experiment configuration: JSON text in, validated ExperimentConfig out.
// Unknown keys are rejected, defaults are filled in and echoed back through
// ExperimentConfig::resolved.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tnt/dicke.hpp"
#include "tnt/error.hpp"
#include "tnt/gpe.hpp"
#include "tnt/multimode.hpp"
#include "tnt/params.hpp"

namespace tnt::harness {

using nlohmann::json;

/// Configuration problem; maps to exit code 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class ExperimentKind {
  kGroundState,
  kSingleModeExact,
  kSingleModeTw,
  kGpe,
  kMultimodeTw,
  kCalibrateChi,
  kScanOmega,
  kQFunction,
};

inline const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names = {
      {ExperimentKind::kGroundState, "ground_state"},
      {ExperimentKind::kSingleModeExact, "single_mode_exact"},
      {ExperimentKind::kSingleModeTw, "single_mode_tw"},
      {ExperimentKind::kGpe, "gpe"},
      {ExperimentKind::kMultimodeTw, "multimode_tw"},
      {ExperimentKind::kCalibrateChi, "calibrate_chi"},
      {ExperimentKind::kScanOmega, "scan_omega"},
      {ExperimentKind::kQFunction, "q_function"},
  };
  return names;
}

inline std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kind_names()) {
    if (kind == k) return name;
  }
  return "unknown";
}

inline ExperimentKind parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kind_names()) {
    if (name == s) return kind;
  }
  throw ConfigError("kind: unknown experiment kind \"" + s + "\"");
}

inline bool is_stochastic(ExperimentKind k) {
  return k == ExperimentKind::kSingleModeTw || k == ExperimentKind::kMultimodeTw ||
         k == ExperimentKind::kCalibrateChi || k == ExperimentKind::kScanOmega;
}

/// Output times; with `scaled` the values are chi t and are converted with
/// the run's chi.
struct TimeGridSpec {
  std::vector<double> values;
  bool scaled = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSingleModeExact;
  PhysicalParams params;
  ScatteringCase scattering = ScatteringCase::case_i();
  double n_atoms = 100.0;
  std::size_t n_traj = 1000;
  std::size_t n_points = 512;
  std::optional<double> extent;
  OmegaSpec omega;
  std::optional<double> chi;  // rad/s; default: ground-state mode estimate
  SplitSpec split;
  OmegaRPolicy omega_r_policy = OmegaRPolicy::kOff;
  double omega_r = 0.0;
  TimeGridSpec t_grid;
  std::optional<std::uint64_t> seed;
  NoiseSubtraction noise = NoiseSubtraction::kFull;
  std::string output_dir = "out";
  std::size_t q_theta = 91;
  std::size_t q_phi = 181;
  std::vector<double> fractions{0.7, 0.85, 1.0};
  std::optional<std::size_t> threads;
  double ground_tol = 1e-10;
  std::optional<double> dt;
  double max_nonlinear_phase = 0.1;
  double max_kinetic_phase = 3.0;

  json resolved;  // canonical echo of every setting, defaults included
};

namespace detail {

/// Reads keys from one JSON object and remembers which were used so that
/// leftovers can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(name("") + ": expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    if (!has(key)) return std::nullopt;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name(key) + ": has the wrong type");
    }
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    return optional<T>(key).value_or(fallback);
  }

  double positive(const std::string& key, double fallback) {
    const double v = get_or<double>(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name(key) + ": must be positive");
    return v;
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("unknown key \"" + name(it.key()) + "\"");
    }
  }

  std::string name(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

inline std::vector<double> uniform_grid(double stop, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) {
    v[k] = count == 1 ? stop : stop * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return v;
}

inline TimeGridSpec default_time_grid(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kQFunction: return {{0.0, 0.05, 0.1, 0.3}, true};
    case ExperimentKind::kSingleModeExact: return {uniform_grid(0.3, 61), true};
    case ExperimentKind::kSingleModeTw: return {uniform_grid(0.01, 101), true};
    case ExperimentKind::kGpe: return {uniform_grid(0.1, 51), false};
    case ExperimentKind::kMultimodeTw: return {uniform_grid(0.05, 11), false};
    case ExperimentKind::kCalibrateChi: return {uniform_grid(0.0025, 26), true};
    case ExperimentKind::kScanOmega: return {uniform_grid(3e-4, 31), true};
    case ExperimentKind::kGroundState: return {{0.0}, false};
  }
  return {{0.0}, false};
}

}  // namespace detail

/// Validates and fills defaults; `kind_override` comes from the CLI
/// subcommand and must agree with any kind stated in the file.
inline ExperimentConfig parse_config(const json& j, std::optional<ExperimentKind> kind_override = std::nullopt,
                                     std::optional<std::uint64_t> seed_override = std::nullopt) {
  using detail::ObjectReader;
  ObjectReader r(j, "");
  ExperimentConfig c;
  const auto kind_text = r.optional<std::string>("kind");
  if (kind_text) {
    c.kind = parse_kind(*kind_text);
    if (kind_override && *kind_override != c.kind) {
      throw ConfigError("kind: file says \"" + *kind_text + "\" but the command asks for \"" +
                        to_string(*kind_override) + "\"");
    }
  } else if (kind_override) {
    c.kind = *kind_override;
  } else {
    throw ConfigError("kind: required");
  }

  if (r.has("params")) {
    ObjectReader p(r.at("params"), "params");
    c.params.mass = p.positive("mass", c.params.mass);
    c.params.transverse_area = p.positive("transverse_area", c.params.transverse_area);
    c.params.trap_omega_x = p.positive("trap_omega_x", c.params.trap_omega_x);
    c.params.bohr_radius = p.positive("bohr_radius", c.params.bohr_radius);
    c.params.hbar = p.positive("hbar", c.params.hbar);
    p.reject_unknown();
  }

  if (r.has("case")) {
    const json& cj = r.at("case");
    if (cj.is_string()) {
      const auto s = cj.get<std::string>();
      if (s == "I") c.scattering = ScatteringCase::case_i(c.params.bohr_radius);
      else if (s == "II") c.scattering = ScatteringCase::case_ii(c.params.bohr_radius);
      else if (s == "III") c.scattering = ScatteringCase::case_iii(c.params.bohr_radius);
      else throw ConfigError("case: expected \"I\", \"II\", \"III\" or an object of lengths");
    } else {
      ObjectReader cr(cj, "case");
      const double aa = cr.positive("a_aa", 100.0);
      const double bb = cr.positive("a_bb", 100.0);
      const double ab = cr.positive("a_ab", 97.0);
      cr.reject_unknown();
      c.scattering = ScatteringCase::from_bohr(aa, bb, ab, CaseLabel::Custom, c.params.bohr_radius);
    }
  } else {
    c.scattering = ScatteringCase::case_i(c.params.bohr_radius);
  }

  const bool small = c.kind == ExperimentKind::kSingleModeExact || c.kind == ExperimentKind::kQFunction;
  c.n_atoms = r.positive("n_atoms", small ? 100.0 : 1e5);
  if (small && (c.n_atoms != std::floor(c.n_atoms) || c.n_atoms > static_cast<double>(kMaxExactAtoms))) {
    throw ConfigError("n_atoms: exact kinds need an integer atom number <= " + std::to_string(kMaxExactAtoms));
  }
  c.n_traj = r.get_or<std::size_t>("n_traj", c.kind == ExperimentKind::kSingleModeTw ? 10000 : 1000);
  if (c.n_traj < 2) throw ConfigError("n_traj: must be at least 2");

  if (r.has("grid")) {
    ObjectReader g(r.at("grid"), "grid");
    c.n_points = g.get_or<std::size_t>("n_points", c.n_points);
    if (c.n_points == 0 || (c.n_points & (c.n_points - 1)) != 0) {
      throw ConfigError("grid.n_points: must be a power of two");
    }
    if (g.has("extent")) c.extent = g.positive("extent", 1.0);
    g.reject_unknown();
  }

  if (r.has("omega")) {
    ObjectReader o(r.at("omega"), "omega");
    const auto policy = o.get_or<std::string>("policy", "zero");
    if (policy == "zero") c.omega = {OmegaPolicy::kZero, 0.0};
    else if (policy == "tnt") c.omega = {OmegaPolicy::kTnt, 0.0};
    else if (policy == "fraction") c.omega = {OmegaPolicy::kFraction, o.positive("value", 1.0)};
    else if (policy == "explicit") c.omega = {OmegaPolicy::kExplicit, o.get_or<double>("value", 0.0)};
    else throw ConfigError("omega.policy: expected zero, tnt, fraction or explicit");
    if (c.omega.policy == OmegaPolicy::kZero || c.omega.policy == OmegaPolicy::kTnt) o.has("value");
    o.reject_unknown();
  }
  if (r.has("chi")) c.chi = r.positive("chi", 1.0);

  if (r.has("split")) {
    ObjectReader s(r.at("split"), "split");
    const auto policy = s.get_or<std::string>("policy", "symmetric");
    if (policy == "symmetric") c.split = {SplitPolicy::kSymmetric, constants::pi / 2};
    else if (policy == "breathe_together") c.split = {SplitPolicy::kBreatheTogether, 0.0};
    else if (policy == "explicit") c.split = {SplitPolicy::kExplicit, s.get_or<double>("angle", constants::pi / 2)};
    else throw ConfigError("split.policy: expected symmetric, breathe_together or explicit");
    s.reject_unknown();
  }
  if (c.split.policy == SplitPolicy::kBreatheTogether && !breathe_together_ratio(c.scattering)) {
    throw ConfigError("split: no breathe-together split exists for this scattering case");
  }

  if (r.has("omega_r")) {
    ObjectReader o(r.at("omega_r"), "omega_r");
    const auto policy = o.get_or<std::string>("policy", "off");
    if (policy == "off") c.omega_r_policy = OmegaRPolicy::kOff;
    else if (policy == "auto") c.omega_r_policy = OmegaRPolicy::kAuto;
    else if (policy == "explicit") {
      c.omega_r_policy = OmegaRPolicy::kExplicit;
      c.omega_r = o.get_or<double>("value", 0.0);
    } else {
      throw ConfigError("omega_r.policy: expected off, auto or explicit");
    }
    o.reject_unknown();
  }

  c.t_grid = detail::default_time_grid(c.kind);
  if (r.has("t_grid")) {
    ObjectReader t(r.at("t_grid"), "t_grid");
    c.t_grid.scaled = t.get_or<bool>("scaled", false);
    if (t.has("values")) {
      c.t_grid.values = t.optional<std::vector<double>>("values").value();
    } else {
      const double stop = t.positive("stop", 1.0);
      const auto count = t.get_or<std::size_t>("count", 11);
      if (count == 0) throw ConfigError("t_grid.count: must be positive");
      c.t_grid.values = detail::uniform_grid(stop, count);
    }
    t.reject_unknown();
    try {
      tnt::detail::require_increasing(c.t_grid.values, 0.0);
    } catch (const InvalidArgument&) {
      throw ConfigError("t_grid: times must be non-negative and strictly increasing");
    }
  }

  c.seed = r.optional<std::uint64_t>("seed");
  if (seed_override) c.seed = seed_override;
  if (is_stochastic(c.kind) && !c.seed) throw ConfigError("seed required");

  const auto noise = r.get_or<std::string>("noise", "full");
  if (noise == "full") c.noise = NoiseSubtraction::kFull;
  else if (noise == "weyl") c.noise = NoiseSubtraction::kWeyl;
  else if (noise == "none") c.noise = NoiseSubtraction::kNone;
  else throw ConfigError("noise: expected full, weyl or none");

  c.output_dir = r.get_or<std::string>("output_dir", c.output_dir);
  if (r.has("q_grid")) {
    ObjectReader q(r.at("q_grid"), "q_grid");
    c.q_theta = q.get_or<std::size_t>("n_theta", c.q_theta);
    c.q_phi = q.get_or<std::size_t>("n_phi", c.q_phi);
    if (c.q_theta < 2 || c.q_phi < 2) throw ConfigError("q_grid: need at least two points per axis");
    q.reject_unknown();
  }
  if (r.has("fractions")) {
    c.fractions = r.optional<std::vector<double>>("fractions").value();
    if (c.fractions.empty()) throw ConfigError("fractions: must not be empty");
    for (double f : c.fractions) {
      if (!(f > 0.0)) throw ConfigError("fractions: entries must be positive");
    }
  }
  c.threads = r.optional<std::size_t>("threads");
  c.ground_tol = r.positive("ground_tol", c.ground_tol);
  if (r.has("dt")) c.dt = r.positive("dt", 1e-6);
  c.max_nonlinear_phase = r.positive("max_nonlinear_phase", c.max_nonlinear_phase);
  c.max_kinetic_phase = r.positive("max_kinetic_phase", c.max_kinetic_phase);
  r.reject_unknown();

  // Canonical echo (threads and output_dir do not affect results and are
  // kept out of the hash).
  json e;
  e["kind"] = to_string(c.kind);
  e["params"] = {{"mass", c.params.mass},
                 {"transverse_area", c.params.transverse_area},
                 {"trap_omega_x", c.params.trap_omega_x},
                 {"bohr_radius", c.params.bohr_radius},
                 {"hbar", c.params.hbar}};
  e["case"] = {{"label", to_string(c.scattering.label)},
               {"a_aa", c.scattering.a_aa / c.params.bohr_radius},
               {"a_bb", c.scattering.a_bb / c.params.bohr_radius},
               {"a_ab", c.scattering.a_ab / c.params.bohr_radius}};
  e["n_atoms"] = c.n_atoms;
  e["n_traj"] = c.n_traj;
  e["grid"] = {{"n_points", c.n_points}};
  if (c.extent) e["grid"]["extent"] = *c.extent;
  static const char* omega_names[] = {"zero", "tnt", "fraction", "explicit"};
  e["omega"] = {{"policy", omega_names[static_cast<int>(c.omega.policy)]}, {"value", c.omega.value}};
  if (c.chi) e["chi"] = *c.chi;
  static const char* split_names[] = {"symmetric", "breathe_together", "explicit"};
  e["split"] = {{"policy", split_names[static_cast<int>(c.split.policy)]}, {"angle", c.split.angle}};
  static const char* omega_r_names[] = {"off", "auto", "explicit"};
  e["omega_r"] = {{"policy", omega_r_names[static_cast<int>(c.omega_r_policy)]}, {"value", c.omega_r}};
  e["t_grid"] = {{"values", c.t_grid.values}, {"scaled", c.t_grid.scaled}};
  if (c.seed) e["seed"] = *c.seed;
  e["noise"] = noise;
  e["q_grid"] = {{"n_theta", c.q_theta}, {"n_phi", c.q_phi}};
  e["fractions"] = c.fractions;
  e["ground_tol"] = c.ground_tol;
  if (c.dt) e["dt"] = *c.dt;
  e["max_nonlinear_phase"] = c.max_nonlinear_phase;
  e["max_kinetic_phase"] = c.max_kinetic_phase;
  c.resolved = e;
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text,
                                          std::optional<ExperimentKind> kind_override = std::nullopt,
                                          std::optional<std::uint64_t> seed_override = std::nullopt) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error at " + detail::line_context(text, e.byte) + ": " + e.what());
  }
  return parse_config(j, kind_override, seed_override);
}

inline ExperimentConfig load_config(const std::string& path,
                                    std::optional<ExperimentKind> kind_override = std::nullopt,
                                    std::optional<std::uint64_t> seed_override = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), kind_override, seed_override);
}

}  // namespace tnt::harness

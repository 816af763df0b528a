#pragma once

// Preparation pipeline (seed, N bifurcations, envelope damping, metrics),
// Table 1 row definitions and the JSON / CSV file formats.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gkp/breeding.hpp"
#include "gkp/errors.hpp"
#include "gkp/fock.hpp"
#include "gkp/targets.hpp"

namespace gkp {

inline constexpr int kSchemaVersion = 1;

enum class TargetKind { codeword, qubit };
enum class DampingMode { off, optimize };
enum class FitMode { delta_kappa, delta_only };

struct TargetSpec {
  TargetKind kind = TargetKind::codeword;
  int k = 0;  // codeword label
  cplx alpha = 1.0;
  cplx beta = 0.0;
  double phi = 0.0;

  void validate() const {
    if (kind == TargetKind::codeword) {
      require(k == 0 || k == 1, "target.k must be 0 or 1");
    } else {
      require(std::abs(std::norm(alpha) + std::norm(beta) - 1.0) < 1e-9, "target: |alpha|^2 + |beta|^2 must be 1");
    }
  }
  bool operator==(const TargetSpec&) const = default;
};

struct PipelineConfig {
  TargetSpec target;
  int n = 6;
  int N = 2;
  std::optional<double> delta2;  // default depends on the target kind
  double g = 1.0;
  double w = kSqrtPi;
  DampingMode damping = DampingMode::optimize;
  FitMode fit = FitMode::delta_kappa;
  std::optional<int> seed_n;  // defaults to n
  TruncationPolicy truncation;
  std::optional<WignerSpec> wigner;

  double effective_delta2() const {
    if (delta2) return *delta2;
    return target.kind == TargetKind::codeword ? std::exp(-1.0) : std::exp(-1.16);
  }

  void validate() const {
    target.validate();
    require(n >= 1, "n must be >= 1");
    require(N >= 0, "N must be >= 0");
    require(!delta2 || (*delta2 > 0.0 && std::isfinite(*delta2)), "delta2 must be positive");
    require(std::isfinite(g) && g != 0.0, "g must be finite and non-zero");
    require(std::isfinite(w) && w > 0.0, "w must be positive");
    require(!seed_n || *seed_n >= 1, "seed_n must be >= 1");
    truncation.validate();
    require(n < truncation.dim, "n must be below truncation.dim");
    if (wigner) wigner->validate();
  }
  bool operator==(const PipelineConfig&) const = default;
};

struct PipelineResult {
  PipelineConfig config;
  StepParams step;
  std::optional<StepParams> seed_step;
  std::optional<SeedParams> seed_params;
  double seed_probability = 1.0;
  double seed_fidelity = 0.0;
  std::vector<StepRecord> per_step;
  double total_probability = 1.0;
  double fidelity = 0.0;
  double family_fidelity = 0.0;
  double squeezing_db = 0.0;
  double delta = 0.0;
  double kappa = 0.0;
  double damping_t = 0.0;
  Warnings warnings;

  // not serialized
  std::optional<FockState> state;
  std::optional<WignerGrid> wigner;
};

inline bool operator==(const SeedParams& a, const SeedParams& b) { return a.a == b.a && a.b == b.b && a.c == b.c && a.delta == b.delta; }
inline bool operator==(const StepRecord& a, const StepRecord& b) {
  return a.label == b.label && a.probability == b.probability && a.tail_mass == b.tail_mass;
}

/// Equality of every serialized field.
inline bool same_record(const PipelineResult& a, const PipelineResult& b) {
  return a.config == b.config && a.step == b.step && a.seed_step == b.seed_step && a.seed_params == b.seed_params &&
         a.seed_probability == b.seed_probability && a.seed_fidelity == b.seed_fidelity && a.per_step == b.per_step &&
         a.total_probability == b.total_probability && a.fidelity == b.fidelity && a.family_fidelity == b.family_fidelity &&
         a.squeezing_db == b.squeezing_db && a.delta == b.delta && a.kappa == b.kappa && a.damping_t == b.damping_t && a.warnings == b.warnings;
}

/// Runs seed (qubit targets) or |S_Delta1> (codewords), N identical
/// bifurcations, optional envelope damping and the fit against
/// logical_flip(target, N). A codeword with k = 1 starts from one extra
/// bifurcation of |S_Delta1>, which puts the peaks on odd multiples.
inline PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  PipelineResult out;
  out.config = config;
  const TruncationPolicy& policy = config.truncation;
  const double delta2 = config.effective_delta2();
  Warnings& warnings = out.warnings;
  out.step = solve_step_params(config.n, config.w, delta2, config.g, &warnings);

  auto push = [&](const std::string& label, double prob, const FockState& s) {
    out.per_step.push_back({label, prob, s.tail_mass()});
    check_tail(s, policy, label, &warnings);
  };

  FockState state = squeezed_vacuum(out.step.delta1, policy).normalized();
  cplx c0 = 1.0;
  cplx c1 = 0.0;
  if (config.target.kind == TargetKind::qubit) {
    c0 = config.target.alpha;
    c1 = config.target.beta * std::exp(cplx(0.0, config.target.phi));
    if (std::abs(c1) == 0.0) {
      // nothing to seed: the plain squeezed state already carries |0>
    } else {
      const int seed_n = config.seed_n.value_or(config.n);
      SeedResult seed = build_seed(SeedSpec{c0, c1, kSqrtPi}, out.step.delta1, seed_n, delta2, config.g, policy, &warnings);
      for (const auto& r : seed.steps) out.per_step.push_back(r);
      out.seed_step = seed.step;
      out.seed_params = seed.params;
      out.seed_probability = seed.probability;
      out.seed_fidelity = seed.target_fidelity;
      state = seed.state;
    }
  } else if (config.target.k == 1) {
    c0 = 0.0;
    c1 = 1.0;
    auto r = bifurcate(state, out.step, policy);
    state = r.state;
    push("bifurcation 0 (odd offset)", r.probability, state);
  }

  for (int i = 1; i <= config.N; ++i) {
    auto r = bifurcate(state, out.step, policy);
    state = r.state;
    push("bifurcation " + std::to_string(i), r.probability, state);
  }

  const GkpTarget family = logical_flip(GkpTarget{c0, c1, 1.0, 1.0, 8}, config.N);
  FitOptions options;
  options.fit_kappa = config.fit == FitMode::delta_kappa;
  if (config.damping == DampingMode::optimize) {
    auto env = optimize_envelope_damping(state, family.c0, family.c1, delta2, policy, options);
    out.damping_t = env.t;
    if (env.t > 0.0) {
      state = env.state;
      push("envelope damping", env.probability, state);
    }
    out.fidelity = env.fit.fidelity;
    out.family_fidelity = env.fit.family_fidelity;
    out.delta = env.fit.delta;
    out.kappa = env.fit.kappa;
    if (env.fit.at_edge) warn(&warnings, "fit: optimum at the edge of the squeezing search range");
  } else {
    const auto fit = fit_effective_squeezing(state, family.c0, family.c1, policy, options);
    out.fidelity = fit.fidelity;
    out.family_fidelity = fit.family_fidelity;
    out.delta = fit.delta;
    out.kappa = fit.kappa;
    if (fit.at_edge) warn(&warnings, "fit: optimum at the edge of the squeezing search range");
  }
  out.squeezing_db = squeezing_db(out.delta);
  out.total_probability = 1.0;
  for (const auto& r : out.per_step) out.total_probability *= r.probability;
  out.state = state;
  if (config.wigner) out.wigner = wigner(state, *config.wigner);
  return out;
}

// ---------------------------------------------------------------------------
// Table 1

struct Tolerance {
  double probability_factor = 1.5;
  std::optional<double> db_abs = 0.3;
  std::optional<double> db_min;
  std::optional<double> fidelity_abs = 0.005;
  std::optional<double> fidelity_min;
};

struct Table1Row {
  int id = 0;
  std::string label;
  PipelineConfig config;
  double probability = 0.0;
  double db = 0.0;
  double fidelity = 0.0;
  Tolerance tolerance;
  bool long_row = false;
};

inline std::vector<Table1Row> table1_rows() {
  auto codeword = [](int n, int count) {
    PipelineConfig c;
    c.n = n;
    c.N = count;
    return c;
  };
  auto qubit = [](cplx alpha, cplx beta, int count) {
    PipelineConfig c;
    c.target = TargetSpec{TargetKind::qubit, 0, alpha, beta, 0.0};
    c.n = 16;
    c.N = count;
    return c;
  };
  const double pi = std::numbers::pi;
  const cplx h0 = std::cos(pi / 8.0);
  const cplx h1 = std::sin(pi / 8.0);
  const cplx s0 = 1.0 / std::sqrt(2.0);
  const cplx s1 = std::polar(1.0 / std::sqrt(2.0), -pi / 4.0);
  const double theta = 0.5 * std::acos(1.0 / std::sqrt(3.0));
  const cplx t0 = std::cos(theta);
  const cplx t1 = std::polar(std::sin(theta), -pi / 4.0);

  const Tolerance standard{};
  const Tolerance threshold{2.0, std::nullopt, 10.0, std::nullopt, 0.99};
  const Tolerance magic{10.0, std::nullopt, 10.0, std::nullopt, 0.99};
  return {
      {1, "codeword n=6 N=2", codeword(6, 2), 1.06e-3, 6.4, 0.999, standard, false},
      {2, "codeword n=6 N=3", codeword(6, 3), 5.75e-5, 6.9, 0.996, standard, false},
      {3, "codeword n=10 N=3", codeword(10, 3), 1.65e-5, 8.6, 0.998, standard, false},
      {4, "codeword n=10 N=4", codeword(10, 4), 6.12e-7, 8.8, 0.998, standard, false},
      {5, "codeword n=16 N=3", codeword(16, 3), 5.05e-6, 10.3, 0.998, threshold, true},
      {6, "codeword n=16 N=4", codeword(16, 4), 1.18e-7, 10.6, 0.998, threshold, true},
      {7, "H n=16 N=3", qubit(h0, h1, 3), 2.22e-10, 10.2, 0.997, magic, true},
      {8, "H n=16 N=4", qubit(h0, h1, 4), 4.97e-12, 10.6, 0.998, magic, true},
      {9, "pi/8 n=16 N=3", qubit(s0, s1, 3), 3.53e-10, 10.3, 0.995, magic, true},
      {10, "pi/8 n=16 N=4", qubit(s0, s1, 4), 8.06e-12, 10.5, 0.997, magic, true},
      {11, "T n=16 N=3", qubit(t0, t1, 3), 2.37e-10, 10.3, 0.996, magic, true},
      {12, "T n=16 N=4", qubit(t0, t1, 4), 5.32e-12, 10.4, 0.997, magic, true},
  };
}

struct Table1Outcome {
  Table1Row row;
  PipelineResult result;
  double probability_ratio = 0.0;  // computed / reference
  double db_difference = 0.0;
  double fidelity_difference = 0.0;
  bool probability_pass = false;
  bool db_pass = false;
  bool fidelity_pass = false;
  bool pass() const { return probability_pass && db_pass && fidelity_pass; }
};

inline Table1Outcome judge(const Table1Row& row, PipelineResult result) {
  Table1Outcome o{row, std::move(result)};
  const Tolerance& tol = row.tolerance;
  o.probability_ratio = o.result.total_probability / row.probability;
  o.db_difference = o.result.squeezing_db - row.db;
  o.fidelity_difference = o.result.fidelity - row.fidelity;
  o.probability_pass = o.probability_ratio <= tol.probability_factor && o.probability_ratio >= 1.0 / tol.probability_factor;
  o.db_pass = (!tol.db_abs || std::abs(o.db_difference) <= *tol.db_abs) && (!tol.db_min || o.result.squeezing_db >= *tol.db_min);
  o.fidelity_pass = (!tol.fidelity_abs || std::abs(o.fidelity_difference) <= *tol.fidelity_abs) &&
                    (!tol.fidelity_min || o.result.fidelity >= *tol.fidelity_min);
  return o;
}

/// Runs the selected rows (ids from table1_rows) in order. A dim override
/// replaces the truncation of every row.
inline std::vector<Table1Outcome> reproduce_table1(const std::vector<int>& ids, std::optional<int> dim = std::nullopt) {
  const auto rows = table1_rows();
  std::vector<Table1Outcome> out;
  for (int id : ids) {
    require(id >= 1 && id <= static_cast<int>(rows.size()), "table1: unknown row " + std::to_string(id));
    Table1Row row = rows[static_cast<std::size_t>(id - 1)];
    if (dim) row.config.truncation.dim = *dim;
    out.push_back(judge(row, run_pipeline(row.config)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace io {

using nlohmann::json;

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError(field + ": expected a number or [re, im]");
}

/// Rejects keys outside `allowed`, naming the first offender.
inline void check_fields(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ValidationError(where + ": unknown field '" + item.key() + "'");
  }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + "." + key + ": wrong type");
  }
}

template <typename T>
std::optional<T> get_optional(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + "." + key + ": wrong type");
  }
}

inline json to_json(const WignerSpec& s) {
  return {{"x_min", s.x_min}, {"x_max", s.x_max}, {"n_x", s.n_x}, {"p_min", s.p_min}, {"p_max", s.p_max}, {"n_p", s.n_p}};
}

inline WignerSpec wigner_spec_from_json(const json& j) {
  check_fields(j, {"x_min", "x_max", "n_x", "p_min", "p_max", "n_p"}, "wigner");
  WignerSpec s;
  s.x_min = get(j, "x_min", "wigner", s.x_min);
  s.x_max = get(j, "x_max", "wigner", s.x_max);
  s.n_x = get(j, "n_x", "wigner", s.n_x);
  s.p_min = get(j, "p_min", "wigner", s.p_min);
  s.p_max = get(j, "p_max", "wigner", s.p_max);
  s.n_p = get(j, "n_p", "wigner", s.n_p);
  return s;
}

inline json to_json(const PipelineConfig& c) {
  json target;
  if (c.target.kind == TargetKind::codeword) {
    target = {{"kind", "codeword"}, {"k", c.target.k}};
  } else {
    target = {{"kind", "qubit"}, {"alpha", complex_to_json(c.target.alpha)}, {"beta", complex_to_json(c.target.beta)}, {"phi", c.target.phi}};
  }
  json j = {
      {"schema_version", kSchemaVersion},
      {"target", target},
      {"n", c.n},
      {"N", c.N},
      {"delta2", c.delta2 ? json(*c.delta2) : json(nullptr)},
      {"g", c.g},
      {"w", c.w},
      {"damping", c.damping == DampingMode::optimize ? "optimize" : "off"},
      {"fit", c.fit == FitMode::delta_kappa ? "delta_kappa" : "delta_only"},
      {"seed_n", c.seed_n ? json(*c.seed_n) : json(nullptr)},
      {"truncation",
       {{"dim", c.truncation.dim}, {"pad_factor", c.truncation.pad_factor}, {"tail_tol", c.truncation.tail_tol}, {"hard_cap", c.truncation.hard_cap}}},
      {"wigner", c.wigner ? to_json(*c.wigner) : json(nullptr)},
  };
  return j;
}

inline void check_schema(const json& j, const std::string& where) {
  if (!j.contains("schema_version")) throw ValidationError(where + ": missing field 'schema_version'");
  if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ValidationError(where + ".schema_version: unsupported value (expected " + std::to_string(kSchemaVersion) + ")");
  }
}

inline PipelineConfig config_from_json(const json& j) {
  check_fields(j, {"schema_version", "target", "n", "N", "delta2", "g", "w", "damping", "fit", "seed_n", "truncation", "wigner"}, "config");
  check_schema(j, "config");
  PipelineConfig c;
  if (!j.contains("target")) throw ValidationError("config: missing field 'target'");
  const json& t = j.at("target");
  check_fields(t, {"kind", "k", "alpha", "beta", "phi"}, "target");
  const std::string kind = get<std::string>(t, "kind", "target", "codeword");
  if (kind == "codeword") {
    for (const char* key : {"alpha", "beta", "phi"}) {
      if (t.contains(key)) throw ValidationError(std::string("target: field '") + key + "' not allowed for a codeword");
    }
    c.target.kind = TargetKind::codeword;
    c.target.k = get(t, "k", "target", 0);
  } else if (kind == "qubit") {
    if (t.contains("k")) throw ValidationError("target: field 'k' not allowed for a qubit");
    c.target.kind = TargetKind::qubit;
    if (!t.contains("alpha") || !t.contains("beta")) throw ValidationError("target: qubit needs fields 'alpha' and 'beta'");
    c.target.alpha = complex_from_json(t.at("alpha"), "target.alpha");
    c.target.beta = complex_from_json(t.at("beta"), "target.beta");
    c.target.phi = get(t, "phi", "target", 0.0);
  } else {
    throw ValidationError("target.kind: expected 'codeword' or 'qubit', got '" + kind + "'");
  }
  if (!j.contains("n")) throw ValidationError("config: missing field 'n'");
  if (!j.contains("N")) throw ValidationError("config: missing field 'N'");
  c.n = get(j, "n", "config", c.n);
  c.N = get(j, "N", "config", c.N);
  c.delta2 = get_optional<double>(j, "delta2", "config");
  c.g = get(j, "g", "config", c.g);
  c.w = get(j, "w", "config", c.w);
  const std::string damping = get<std::string>(j, "damping", "config", "optimize");
  if (damping != "optimize" && damping != "off") throw ValidationError("config.damping: expected 'off' or 'optimize'");
  c.damping = damping == "off" ? DampingMode::off : DampingMode::optimize;
  const std::string fit = get<std::string>(j, "fit", "config", "delta_kappa");
  if (fit != "delta_kappa" && fit != "delta_only") throw ValidationError("config.fit: expected 'delta_kappa' or 'delta_only'");
  c.fit = fit == "delta_only" ? FitMode::delta_only : FitMode::delta_kappa;
  c.seed_n = get_optional<int>(j, "seed_n", "config");
  if (j.contains("truncation") && !j.at("truncation").is_null()) {
    const json& tr = j.at("truncation");
    check_fields(tr, {"dim", "pad_factor", "tail_tol", "hard_cap"}, "truncation");
    c.truncation.dim = get(tr, "dim", "truncation", c.truncation.dim);
    c.truncation.pad_factor = get(tr, "pad_factor", "truncation", c.truncation.pad_factor);
    c.truncation.tail_tol = get(tr, "tail_tol", "truncation", c.truncation.tail_tol);
    c.truncation.hard_cap = get(tr, "hard_cap", "truncation", c.truncation.hard_cap);
  }
  if (j.contains("wigner") && !j.at("wigner").is_null()) c.wigner = wigner_spec_from_json(j.at("wigner"));
  c.validate();
  return c;
}

inline json to_json(const StepParams& s) {
  return {{"n", s.n}, {"delta1", s.delta1}, {"delta2", s.delta2}, {"delta3", s.delta3}, {"g", s.g}, {"w", s.w}};
}

inline StepParams step_from_json(const json& j, const std::string& where) {
  check_fields(j, {"n", "delta1", "delta2", "delta3", "g", "w"}, where);
  StepParams s;
  s.n = get(j, "n", where, 0);
  s.delta1 = get(j, "delta1", where, 0.0);
  s.delta2 = get(j, "delta2", where, 0.0);
  s.delta3 = get(j, "delta3", where, 0.0);
  s.g = get(j, "g", where, 0.0);
  s.w = get(j, "w", where, 0.0);
  return s;
}

inline json to_json(const PipelineResult& r) {
  json steps = json::array();
  for (const auto& s : r.per_step) steps.push_back({{"label", s.label}, {"probability", s.probability}, {"tail_mass", s.tail_mass}});
  json seed = nullptr;
  if (r.seed_step) {
    seed = {{"step_params", to_json(*r.seed_step)},
            {"probability", r.seed_probability},
            {"target_fidelity", r.seed_fidelity},
            {"a", r.seed_params->a},
            {"b", r.seed_params->b},
            {"c", r.seed_params->c},
            {"delta", r.seed_params->delta}};
  }
  return {
      {"schema_version", kSchemaVersion},
      {"config", to_json(r.config)},
      {"step_params", to_json(r.step)},
      {"seed", seed},
      {"per_step", steps},
      {"total_probability", r.total_probability},
      {"fidelity", r.fidelity},
      {"family_fidelity", r.family_fidelity},
      {"squeezing_db", r.squeezing_db},
      {"delta", r.delta},
      {"kappa", r.kappa},
      {"damping_t", r.damping_t},
      {"warnings", r.warnings},
  };
}

inline PipelineResult result_from_json(const json& j) {
  check_fields(j, {"schema_version", "config", "step_params", "seed", "per_step", "total_probability", "fidelity", "family_fidelity", "squeezing_db",
                   "delta", "kappa", "damping_t", "warnings"},
               "results");
  check_schema(j, "results");
  PipelineResult r;
  if (!j.contains("config")) throw ValidationError("results: missing field 'config'");
  r.config = config_from_json(j.at("config"));
  if (!j.contains("step_params")) throw ValidationError("results: missing field 'step_params'");
  r.step = step_from_json(j.at("step_params"), "step_params");
  if (j.contains("seed") && !j.at("seed").is_null()) {
    const json& s = j.at("seed");
    check_fields(s, {"step_params", "probability", "target_fidelity", "a", "b", "c", "delta"}, "seed");
    r.seed_step = step_from_json(s.at("step_params"), "seed.step_params");
    r.seed_probability = get(s, "probability", "seed", 1.0);
    r.seed_fidelity = get(s, "target_fidelity", "seed", 0.0);
    r.seed_params = SeedParams{get(s, "a", "seed", 0.0), get(s, "b", "seed", 0.0), get(s, "c", "seed", 0.0), get(s, "delta", "seed", 1.0)};
  }
  if (j.contains("per_step")) {
    for (const auto& s : j.at("per_step")) {
      check_fields(s, {"label", "probability", "tail_mass"}, "per_step");
      r.per_step.push_back({get<std::string>(s, "label", "per_step", ""), get(s, "probability", "per_step", 1.0), get(s, "tail_mass", "per_step", 0.0)});
    }
  }
  r.total_probability = get(j, "total_probability", "results", 1.0);
  r.fidelity = get(j, "fidelity", "results", 0.0);
  r.family_fidelity = get(j, "family_fidelity", "results", 0.0);
  r.squeezing_db = get(j, "squeezing_db", "results", 0.0);
  r.delta = get(j, "delta", "results", 0.0);
  r.kappa = get(j, "kappa", "results", 0.0);
  r.damping_t = get(j, "damping_t", "results", 0.0);
  r.warnings = get<std::vector<std::string>>(j, "warnings", "results", {});
  return r;
}

/// Writes next to the destination and renames, so readers never see a
/// partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
    os << text;
    os.flush();
    if (!os) {
      os.close();
      std::filesystem::remove(tmp);
      throw ValidationError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ValidationError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open '" + path.string() + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace io

inline PipelineConfig load_config(const std::filesystem::path& path) { return io::config_from_json(io::read_json(path)); }
inline void write_config(const PipelineConfig& config, const std::filesystem::path& path) { io::atomic_write(path, io::to_json(config).dump(2) + "\n"); }
inline PipelineResult load_results(const std::filesystem::path& path) { return io::result_from_json(io::read_json(path)); }
inline void write_results(const PipelineResult& result, const std::filesystem::path& path) { io::atomic_write(path, io::to_json(result).dump(2) + "\n"); }

inline std::string wigner_csv(const WignerGrid& grid) {
  const WignerSpec& s = grid.spec;
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "# x: %.17g,%.17g,%d\n", s.x_min, s.x_max, s.n_x);
  out += line;
  std::snprintf(line, sizeof line, "# p: %.17g,%.17g,%d\n", s.p_min, s.p_max, s.n_p);
  out += line;
  out += "x,p,W\n";
  out.reserve(out.size() + static_cast<std::size_t>(s.n_x) * s.n_p * 48);
  for (int j = 0; j < s.n_p; ++j) {
    for (int i = 0; i < s.n_x; ++i) {
      std::snprintf(line, sizeof line, "%.10g,%.10g,%.12e\n", s.x(i), s.p(j), grid.values(j, i));
      out += line;
    }
  }
  return out;
}

/// Long-form CSV: two header comments, a column header, then one row per
/// grid point with p as the outer index.
inline void write_wigner_csv(const WignerGrid& grid, const std::filesystem::path& path) { io::atomic_write(path, wigner_csv(grid)); }

}  // namespace gkp

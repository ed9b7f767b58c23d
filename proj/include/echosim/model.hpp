#pragma once

// Four-level scheme and material constants. Two ground and two excited
// hyperfine levels with the four addressed optical transitions between them;
// every other module consumes the validated Model. Energies and carriers are
// plain Hz; the hyperfine splittings are config inputs with illustrative
// defaults (physics results downstream must not depend on them).

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"
#include "errors.hpp"
#include "toml.hpp"

namespace echosim {

enum class Level : int { g1 = 0, g3 = 1, e3 = 2, e5 = 3 };
enum class TransitionId : int { f15 = 0, f35 = 1, f13 = 2, f33 = 3 };

inline const char* to_string(Level l) {
  switch (l) {
    case Level::g1: return "g1";
    case Level::g3: return "g3";
    case Level::e3: return "e3";
    case Level::e5: return "e5";
  }
  return "?";
}

inline const char* to_string(TransitionId t) {
  switch (t) {
    case TransitionId::f15: return "f15";
    case TransitionId::f35: return "f35";
    case TransitionId::f13: return "f13";
    case TransitionId::f33: return "f33";
  }
  return "?";
}

struct LevelInfo {
  bool excited = false;
  double energy_hz = 0.0;  // offset from the g1 origin
};

struct Transition {
  Level lower = Level::g1;
  Level upper = Level::e5;
  double frequency_hz = 0.0;
  double dipole = 1.0;  // relative strength
};

struct LevelScheme {
  std::array<LevelInfo, 4> levels{};       // indexed by Level
  std::array<Transition, 4> transitions{};  // indexed by TransitionId

  const LevelInfo& level(Level l) const { return levels[static_cast<int>(l)]; }
  const Transition& transition(TransitionId t) const { return transitions[static_cast<int>(t)]; }

  // |k| of the transition carrier in rad/m.
  double wavenumber(TransitionId t) const { return kTwoPi * transition(t).frequency_hz / kSpeedOfLight; }

  // Builds the closure-consistent scheme from two splittings and the optical
  // carrier; the default splittings are illustrative placeholders.
  static LevelScheme from_splittings(double ground_splitting_hz = 34.5e6,
                                     double excited_splitting_hz = 102.0e6,
                                     double optical_frequency_hz = kSpeedOfLight / 580e-9) {
    LevelScheme s;
    s.levels[static_cast<int>(Level::g1)] = {false, 0.0};
    s.levels[static_cast<int>(Level::g3)] = {false, ground_splitting_hz};
    s.levels[static_cast<int>(Level::e3)] = {true, optical_frequency_hz};
    s.levels[static_cast<int>(Level::e5)] = {true, optical_frequency_hz + excited_splitting_hz};
    auto freq = [&](Level lo, Level up) { return s.level(up).energy_hz - s.level(lo).energy_hz; };
    s.transitions[static_cast<int>(TransitionId::f15)] = {Level::g1, Level::e5, freq(Level::g1, Level::e5), 1.0};
    s.transitions[static_cast<int>(TransitionId::f35)] = {Level::g3, Level::e5, freq(Level::g3, Level::e5), 1.0};
    s.transitions[static_cast<int>(TransitionId::f13)] = {Level::g1, Level::e3, freq(Level::g1, Level::e3), 1.0};
    s.transitions[static_cast<int>(TransitionId::f33)] = {Level::g3, Level::e3, freq(Level::g3, Level::e3), 1.0};
    return s;
  }
};

struct MaterialParams {
  double d = 0.6;                           // memory absorption depth after preparation
  double d_fc = 6.6;                        // filter effective absorption depth
  double gamma13_hz = 5.6e3;                // ground-spin inhomogeneous FWHM
  double gamma35bar_hz = 18.6e3;            // excited-spin inhomogeneous FWHM
  double gamma_opt_hz = 12.0e3;             // effective optical decoherence rate (1/s)
  double t1_excited_s = 1.9e-3;             // excited-state lifetime
  double opt_inhomogeneous_fwhm_hz = 0.7e9; // optical inhomogeneous FWHM
  double branching_e3_to_g3 = 0.5;          // decay branching fraction

  static MaterialParams paper_defaults() { return MaterialParams{}; }
};

enum class ModelErrorCode {
  NegativeRate,
  FrequencyClosureViolated,
  BranchingOutOfRange,
  LevelStructureInvalid,
  DegenerateTransitions,
};

inline const char* to_string(ModelErrorCode c) {
  switch (c) {
    case ModelErrorCode::NegativeRate: return "NegativeRate";
    case ModelErrorCode::FrequencyClosureViolated: return "FrequencyClosureViolated";
    case ModelErrorCode::BranchingOutOfRange: return "BranchingOutOfRange";
    case ModelErrorCode::LevelStructureInvalid: return "LevelStructureInvalid";
    case ModelErrorCode::DegenerateTransitions: return "DegenerateTransitions";
  }
  return "?";
}

struct ModelError {
  ModelErrorCode code;
  std::string message;
};

struct ModelValidation {
  std::vector<ModelError> errors;
  bool ok() const { return errors.empty(); }
};

inline constexpr double kFrequencyClosureToleranceHz = 1.0;

// Exhaustive invariant check; side-effect free and idempotent.
inline ModelValidation validate_model(const LevelScheme& scheme, const MaterialParams& params) {
  ModelValidation v;
  auto fail = [&](ModelErrorCode code, const std::string& msg) { v.errors.push_back({code, msg}); };

  int ground = 0, excited = 0;
  for (const auto& info : scheme.levels) (info.excited ? excited : ground)++;
  if (ground != 2 || excited != 2) {
    fail(ModelErrorCode::LevelStructureInvalid,
         "expected 2 ground and 2 excited levels, got " + std::to_string(ground) + "/" + std::to_string(excited));
  }

  const auto& tr = scheme.transitions;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (std::size_t j = i + 1; j < tr.size(); ++j) {
      if (tr[i].frequency_hz == tr[j].frequency_hz) {
        fail(ModelErrorCode::DegenerateTransitions,
             std::string("carrier frequencies of ") + to_string(static_cast<TransitionId>(i)) + " and " +
                 to_string(static_cast<TransitionId>(j)) + " coincide");
      }
    }
  }

  // Closure: f15 + f33 = f13 + f35, i.e. the splittings are consistent.
  const double f15 = scheme.transition(TransitionId::f15).frequency_hz;
  const double f35 = scheme.transition(TransitionId::f35).frequency_hz;
  const double f13 = scheme.transition(TransitionId::f13).frequency_hz;
  const double f33 = scheme.transition(TransitionId::f33).frequency_hz;
  const double closure = (f15 + f33) - (f13 + f35);
  if (std::abs(closure) > kFrequencyClosureToleranceHz) {
    fail(ModelErrorCode::FrequencyClosureViolated,
         "f15+f33 differs from f13+f35 by " + std::to_string(closure) + " Hz");
  }

  auto nonneg = [&](double value, const char* name) {
    if (!(value >= 0.0)) fail(ModelErrorCode::NegativeRate, std::string(name) + " must be nonnegative");
  };
  nonneg(params.d, "d");
  nonneg(params.d_fc, "d_fc");
  nonneg(params.gamma13_hz, "gamma13_hz");
  nonneg(params.gamma35bar_hz, "gamma35bar_hz");
  nonneg(params.gamma_opt_hz, "gamma_opt_hz");
  nonneg(params.t1_excited_s, "t1_excited_s");
  nonneg(params.opt_inhomogeneous_fwhm_hz, "opt_inhomogeneous_fwhm_hz");
  if (!(params.branching_e3_to_g3 >= 0.0 && params.branching_e3_to_g3 <= 1.0)) {
    fail(ModelErrorCode::BranchingOutOfRange, "branching_e3_to_g3 must lie in [0,1]");
  }
  return v;
}

// Immutable after validation; share freely across threads.
struct Model {
  LevelScheme scheme;
  MaterialParams params;

  static Model validated(const LevelScheme& scheme, const MaterialParams& params) {
    const auto v = validate_model(scheme, params);
    if (!v.ok()) {
      std::string msg = "invalid model:";
      for (const auto& e : v.errors) msg += std::string(" [") + to_string(e.code) + "] " + e.message;
      throw ConfigInvalid(msg);
    }
    return Model{scheme, params};
  }

  static Model paper_defaults() {
    return Model{LevelScheme::from_splittings(), MaterialParams::paper_defaults()};
  }
};

// Per-ion level shifts for a microscopic detuning triple. delta_opt is the
// ion's f15 detuning, delta_g the g1<->g3 spin detuning, delta_e the e3<->e5
// spin detuning; level order (g1, g3, e3, e5).
inline std::array<double, 4> ion_level_shifts(double delta_opt, double delta_g, double delta_e) {
  return {0.0, delta_g, delta_opt - delta_e, delta_opt};
}

// --- config loading ---------------------------------------------------------

inline MaterialParams material_params_from_toml(const toml::Value& table) {
  MaterialParams p;
  auto get = [&](const char* key, double& out) {
    if (const auto* v = table.find(key)) out = v->as_double();
  };
  get("d", p.d);
  get("d_fc", p.d_fc);
  get("gamma13_hz", p.gamma13_hz);
  get("gamma35bar_hz", p.gamma35bar_hz);
  get("gamma_opt_hz", p.gamma_opt_hz);
  get("t1_excited_s", p.t1_excited_s);
  get("opt_inhomogeneous_fwhm_hz", p.opt_inhomogeneous_fwhm_hz);
  get("branching_e3_to_g3", p.branching_e3_to_g3);
  return p;
}

inline LevelScheme level_scheme_from_toml(const toml::Value& table) {
  double ground = 34.5e6, excited = 102.0e6, optical = kSpeedOfLight / 580e-9;
  if (const auto* v = table.find("ground_splitting_hz")) ground = v->as_double();
  if (const auto* v = table.find("excited_splitting_hz")) excited = v->as_double();
  if (const auto* v = table.find("optical_frequency_hz")) optical = v->as_double();
  return LevelScheme::from_splittings(ground, excited, optical);
}

}  // namespace echosim

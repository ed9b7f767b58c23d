#pragma once

// Protocol sequences (NLPE, ROSE, four-level echo, two-pulse echo), echo
// time/wavevector prediction with the phase-matching rule, the analytic
// storage efficiency with its dephasing/decoherence factors, the square-tooth
// AFC baseline, and the timing optimizer.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"
#include "errors.hpp"
#include "fitting.hpp"
#include "model.hpp"
#include "pulse.hpp"

namespace echosim {

// --- geometry & sequence -------------------------------------------------------

struct BeamGeometry {
  double sample_length_m = 8e-3;
  double beam_waist_m = 50e-6;
  double control_angle_rad = 30e-3;  // in-plane angle between signal and control beams

  Vec2 signal_dir() const { return {1.0, 0.0}; }
  Vec2 control_dir() const { return unit_at_angle(control_angle_rad); }
};

struct DetectionWindow {
  double t_begin_s = 0.0;
  double t_end_s = 0.0;
  std::string label;
  TransitionId transition = TransitionId::f15;
  Vec2 direction{1.0, 0.0};  // unit detection direction; |k| comes from the transition carrier
};

enum class ProtocolTag { NLPE, ROSE, FLE4, PE2, custom };

inline const char* to_string(ProtocolTag t) {
  switch (t) {
    case ProtocolTag::NLPE: return "NLPE";
    case ProtocolTag::ROSE: return "ROSE";
    case ProtocolTag::FLE4: return "FLE4";
    case ProtocolTag::PE2: return "PE2";
    case ProtocolTag::custom: return "custom";
  }
  return "?";
}

struct Sequence {
  std::vector<PulseSpec> pulses;  // strictly ordered by center_time
  std::vector<DetectionWindow> windows;
  BeamGeometry geometry;
  ProtocolTag tag = ProtocolTag::custom;
};

// Pulse supports may brush against each other (the experimental timings
// leave no room for full truncated tails); evolution hands each pulse the
// part of its support up to the midpoint towards its neighbors' centers.
struct SupportInterval {
  double begin = 0.0;
  double end = 0.0;
};

inline SupportInterval clipped_support(const Sequence& seq, std::size_t i) {
  const PulseSpec& p = seq.pulses[i];
  const double half = p.support_halfwidth_s();
  SupportInterval s{p.center_time_s - half, p.center_time_s + half};
  if (i > 0) s.begin = std::max(s.begin, 0.5 * (seq.pulses[i - 1].center_time_s + p.center_time_s));
  if (i + 1 < seq.pulses.size()) {
    s.end = std::min(s.end, 0.5 * (p.center_time_s + seq.pulses[i + 1].center_time_s));
  }
  if (s.end < s.begin) s.end = s.begin;
  return s;
}

// Strict time ordering of pulses and windows disjoint from pulse supports.
inline void validate_sequence(const Sequence& seq) {
  for (std::size_t i = 0; i + 1 < seq.pulses.size(); ++i) {
    if (!(seq.pulses[i].center_time_s < seq.pulses[i + 1].center_time_s)) {
      throw NonMonotoneTimings("pulse centers must be strictly increasing");
    }
  }
  for (const auto& w : seq.windows) {
    if (!(w.t_end_s > w.t_begin_s)) throw EmptyWindow("window '" + w.label + "' is empty");
    for (std::size_t i = 0; i < seq.pulses.size(); ++i) {
      const auto s = clipped_support(seq, i);
      if (s.end > s.begin && w.t_begin_s < s.end && s.begin < w.t_end_s) {
        throw OverlappingPulses("window '" + w.label + "' intersects the support of pulse " + std::to_string(i));
      }
    }
  }
}

// --- NLPE construction -----------------------------------------------------------

struct NlpeTimings {
  double t0 = 0.0;
  double t1 = 4.1e-6;
  double t2 = 6.6e-6;
  double t3 = 15.0e-6;
  double t4 = 17.4e-6;

  double t5() const { return t4 + t3 - t2 - t1 + t0; }
  double spin_storage() const { return t4 - t1; }     // tau2
  double optical_storage() const { return t3 - t2; }  // tau3 / 2

  static NlpeTimings paper_echo() { return {}; }
  // Qubit runs space the two pi_13 pulses by 13 us to clear the first echo.
  static NlpeTimings paper_qubit() { return {0.0, 4.1e-6, 6.6e-6, 19.6e-6, 22.0e-6}; }
};

struct ControlPulseParams {
  double duration_s = 0.0;
  double peak_rabi_hz = 0.0;
  double chirp_mu = 0.0;
};

struct NlpeBuildOptions {
  double signal_fwhm_s = 2.62e-6;
  double signal_area_rad = 0.05 * kPi;
  // Control-pulse parameters; Rabi/chirp defaults are the frozen outputs of
  // optimize_sech_pulse over the 700 kHz prepared peak (duration pinned).
  ControlPulseParams pi35{3.75e-6, 1.35e6, 0.85};
  ControlPulseParams pi13{1.50e-6, 2.90e6, 0.55};
  double window_width_s = 4.0e-6;
  bool ideal_controls = false;
  bool intermediate_window = false;  // also watch the silenced four-level echo slot
};

namespace detail {
inline PulseSpec control_pulse(TransitionId tr, double center, const ControlPulseParams& cp, bool ideal,
                               Vec2 dir) {
  if (ideal) return make_ideal_pulse(tr, center, kPi, dir);
  return make_sech_pulse(tr, center, cp.duration_s, cp.peak_rabi_hz, cp.chirp_mu, dir);
}

// Direction of a pathway sum; falls back to +x for a null vector.
inline Vec2 pathway_direction(const Vec2& k) {
  const double n = k.norm();
  return n > 0.0 ? Vec2{k.x / n, k.y / n} : Vec2{1.0, 0.0};
}
}  // namespace detail

// Sequence [signal@f15, pi35, pi13, pi13, pi35] with the detection window
// centered on t5 = t4 + t3 - t2 - t1 + t0.
inline Sequence build_nlpe(const NlpeTimings& t, const BeamGeometry& geom = {},
                           const NlpeBuildOptions& opt = {}) {
  if (!(t.t0 < t.t1 && t.t1 < t.t2 && t.t2 < t.t3 && t.t3 < t.t4)) {
    throw NonMonotoneTimings("NLPE needs t0 < t1 < t2 < t3 < t4");
  }
  const double t5 = t.t5();
  const double last_half = opt.ideal_controls ? 0.0 : 0.5 * opt.pi35.duration_s;
  if (!(t5 - 0.5 * opt.window_width_s > t.t4 + last_half)) {
    throw EchoOverlapsPulse("echo at " + std::to_string(t5) + " s overlaps the final control pulse");
  }
  Sequence seq;
  seq.tag = ProtocolTag::NLPE;
  seq.geometry = geom;
  const Vec2 sd = geom.signal_dir();
  const Vec2 cd = geom.control_dir();
  seq.pulses.push_back(make_gaussian_pulse(TransitionId::f15, t.t0, opt.signal_fwhm_s, opt.signal_area_rad, sd));
  seq.pulses.push_back(detail::control_pulse(TransitionId::f35, t.t1, opt.pi35, opt.ideal_controls, cd));
  seq.pulses.push_back(detail::control_pulse(TransitionId::f13, t.t2, opt.pi13, opt.ideal_controls, cd));
  seq.pulses.push_back(detail::control_pulse(TransitionId::f13, t.t3, opt.pi13, opt.ideal_controls, cd));
  seq.pulses.push_back(detail::control_pulse(TransitionId::f35, t.t4, opt.pi35, opt.ideal_controls, cd));
  seq.windows.push_back({t5 - 0.5 * opt.window_width_s, t5 + 0.5 * opt.window_width_s, "echo",
                         TransitionId::f15, sd});
  if (opt.intermediate_window) {
    // Four-level-echo slot; callers studying silencing re-aim the window
    // direction along the predicted pathway (see predict_echoes).
    const double ti = t.t2 + t.t1 - t.t0;
    seq.windows.push_back({ti - 0.5 * opt.window_width_s, ti + 0.5 * opt.window_width_s, "intermediate",
                           TransitionId::f33, sd});
  }
  validate_sequence(seq);
  return seq;
}

struct VariantTimings {
  double t0 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;  // unused for PE2
};

struct VariantBuildOptions {
  double signal_fwhm_s = 2.62e-6;
  double signal_area_rad = 0.05 * kPi;
  ControlPulseParams pi{3.75e-6, 1.35e6, 0.85};
  double window_width_s = 4.0e-6;
  bool ideal_controls = true;
};

// PE2: [signal, pi same transition], echo at 2 t1 - t0.
// FLE4: [signal@f15, pi35, pi13], echo at t2 + t1 - t0 on the g3<->e3 line.
// ROSE: [signal, pi, pi on f15], first echo at 2 t1 - t0 (inverted medium),
// revival at 2 t2 - 2 t1 + t0.
inline Sequence build_variant(ProtocolTag kind, const VariantTimings& t, const BeamGeometry& geom = {},
                              const VariantBuildOptions& opt = {}) {
  const bool needs_t2 = kind != ProtocolTag::PE2;
  if (!(t.t0 < t.t1) || (needs_t2 && !(t.t1 < t.t2))) {
    throw NonMonotoneTimings("variant timings must be strictly increasing");
  }
  Sequence seq;
  seq.tag = kind;
  seq.geometry = geom;
  const Vec2 sd = geom.signal_dir();
  const Vec2 cd = geom.control_dir();
  seq.pulses.push_back(make_gaussian_pulse(TransitionId::f15, t.t0, opt.signal_fwhm_s, opt.signal_area_rad, sd));
  const double w = 0.5 * opt.window_width_s;
  switch (kind) {
    case ProtocolTag::PE2: {
      seq.pulses.push_back(detail::control_pulse(TransitionId::f15, t.t1, opt.pi, opt.ideal_controls, cd));
      const double te = 2.0 * t.t1 - t.t0;
      seq.windows.push_back({te - w, te + w, "echo", TransitionId::f15, sd});
      break;
    }
    case ProtocolTag::FLE4: {
      seq.pulses.push_back(detail::control_pulse(TransitionId::f35, t.t1, opt.pi, opt.ideal_controls, cd));
      seq.pulses.push_back(detail::control_pulse(TransitionId::f13, t.t2, opt.pi, opt.ideal_controls, cd));
      const double te = t.t2 + t.t1 - t.t0;
      seq.windows.push_back({te - w, te + w, "echo", TransitionId::f33, sd});
      break;
    }
    case ProtocolTag::ROSE: {
      seq.pulses.push_back(detail::control_pulse(TransitionId::f15, t.t1, opt.pi, opt.ideal_controls, cd));
      seq.pulses.push_back(detail::control_pulse(TransitionId::f15, t.t2, opt.pi, opt.ideal_controls, cd));
      const double tfirst = 2.0 * t.t1 - t.t0;
      const double trevive = 2.0 * t.t2 - 2.0 * t.t1 + t.t0;
      if (tfirst + w < t.t2 - opt.pi.duration_s) {
        seq.windows.push_back({tfirst - w, tfirst + w, "silenced", TransitionId::f15, sd});
      }
      seq.windows.push_back({trevive - w, trevive + w, "echo", TransitionId::f15, sd});
      break;
    }
    default:
      throw NonMonotoneTimings("build_variant handles PE2, FLE4 and ROSE only");
  }
  validate_sequence(seq);
  return seq;
}

// --- phase matching ---------------------------------------------------------------

inline constexpr double kSilencingThreshold = kTwoPi;  // mismatch * L beyond the first node

struct EchoPrediction {
  double time_s = 0.0;
  Vec2 wavevector{};            // pathway sum, rad/m
  TransitionId transition = TransitionId::f15;
  bool silenced = false;
  double mismatch_norm = 0.0;   // | |k_pathway| - k_carrier |, rad/m
  bool inverted_medium = false;
};

// Enumerates the rephasing pathways of a sequence. The pathway wavevector is
// the signed sum of the pulse wavevectors along the coherence-transfer chain;
// an echo is silenced when the longitudinal mismatch against the emitting
// carrier exceeds the first suppression node over the sample length.
inline std::vector<EchoPrediction> predict_echoes(const Sequence& seq, const LevelScheme& scheme) {
  std::vector<EchoPrediction> out;
  auto k_of = [&](const PulseSpec& p) { return scheme.wavenumber(p.transition) * p.direction; };
  auto finish = [&](EchoPrediction e) {
    const double k_nominal = scheme.wavenumber(e.transition);
    e.mismatch_norm = std::abs(e.wavevector.norm() - k_nominal);
    e.silenced = e.mismatch_norm * seq.geometry.sample_length_m > kSilencingThreshold;
    out.push_back(e);
  };

  const auto& p = seq.pulses;
  switch (seq.tag) {
    case ProtocolTag::NLPE: {
      if (p.size() != 5) return out;
      const double t0 = p[0].center_time_s, t1 = p[1].center_time_s, t2 = p[2].center_time_s,
                   t3 = p[3].center_time_s, t4 = p[4].center_time_s;
      EchoPrediction mid;
      mid.time_s = t2 + t1 - t0;
      mid.wavevector = k_of(p[1]) + k_of(p[2]) - k_of(p[0]);
      mid.transition = TransitionId::f33;
      mid.inverted_medium = true;
      finish(mid);
      EchoPrediction fin;
      fin.time_s = t4 + t3 - t2 - t1 + t0;
      fin.wavevector = k_of(p[0]) - k_of(p[1]) - k_of(p[2]) + k_of(p[3]) + k_of(p[4]);
      fin.transition = TransitionId::f15;
      finish(fin);
      break;
    }
    case ProtocolTag::PE2: {
      if (p.size() != 2) return out;
      EchoPrediction e;
      e.time_s = 2.0 * p[1].center_time_s - p[0].center_time_s;
      e.wavevector = 2.0 * k_of(p[1]) - k_of(p[0]);
      e.transition = TransitionId::f15;
      e.inverted_medium = true;
      finish(e);
      break;
    }
    case ProtocolTag::FLE4: {
      if (p.size() != 3) return out;
      EchoPrediction e;
      e.time_s = p[2].center_time_s + p[1].center_time_s - p[0].center_time_s;
      e.wavevector = k_of(p[1]) + k_of(p[2]) - k_of(p[0]);
      e.transition = TransitionId::f33;
      e.inverted_medium = true;
      finish(e);
      break;
    }
    case ProtocolTag::ROSE: {
      if (p.size() != 3) return out;
      EchoPrediction first;
      first.time_s = 2.0 * p[1].center_time_s - p[0].center_time_s;
      first.wavevector = 2.0 * k_of(p[1]) - k_of(p[0]);
      first.transition = TransitionId::f15;
      first.inverted_medium = true;
      finish(first);
      EchoPrediction revived;
      revived.time_s = 2.0 * p[2].center_time_s - 2.0 * p[1].center_time_s + p[0].center_time_s;
      revived.wavevector = k_of(p[0]) + 2.0 * k_of(p[2]) - 2.0 * k_of(p[1]);
      revived.transition = TransitionId::f15;
      finish(revived);
      break;
    }
    case ProtocolTag::custom:
      break;
  }
  return out;
}

// --- analytic efficiency -----------------------------------------------------------

// Intensity-domain Gaussian dephasing factor exp(-Gamma^2 tau^2 pi^2 / (2 ln 2)).
inline double spin_dephasing_factor(double gamma_fwhm_hz, double tau_s) {
  return std::exp(-sq(gamma_fwhm_hz * tau_s) * kPi * kPi / (2.0 * std::log(2.0)));
}

// Total storage efficiency: d^2 e^-d forward-retrieval echo factor, four
// control transfers, spin-wave dephasing over t4-t1, and excited-spin
// dephasing plus optical decoherence over t3-t2.
inline double nlpe_efficiency(const MaterialParams& params, const NlpeTimings& t, double eta_control) {
  if (!(t.t0 <= t.t1 && t.t1 <= t.t2 && t.t2 <= t.t3 && t.t3 <= t.t4)) {
    throw NonMonotoneTimings("nlpe_efficiency needs monotone timings");
  }
  const double echo_factor = sq(params.d) * std::exp(-params.d);
  const double controls = sq(sq(eta_control));
  const double spin = spin_dephasing_factor(params.gamma13_hz, t.spin_storage());
  const double optical = spin_dephasing_factor(params.gamma35bar_hz, t.optical_storage()) *
                         std::exp(-2.0 * params.gamma_opt_hz * t.optical_storage());
  return echo_factor * controls * spin * optical;
}

enum class DecayVariable { tau2, tau3 };  // tau2 = t4 - t1, tau3 = 2 (t3 - t2)

struct DecayPoint {
  double delay_s = 0.0;
  double efficiency = 0.0;
};

// Efficiency along a delay grid with the other storage interval pinned at the
// base timings. For tau2 the pulse gaps around the varied interval stretch
// symmetrically; only the two storage intervals enter the formula.
inline std::vector<DecayPoint> decay_curve(const MaterialParams& params, DecayVariable vary,
                                           const std::vector<double>& grid,
                                           const NlpeTimings& base = NlpeTimings::paper_echo(),
                                           double eta_control = 1.0) {
  std::vector<DecayPoint> out;
  out.reserve(grid.size());
  for (double delay : grid) {
    if (!(delay > 0.0)) throw NonMonotoneTimings("decay grid must be positive");
    NlpeTimings t = base;
    if (vary == DecayVariable::tau2) {
      // keep t1..t3 fixed, move t4
      t.t4 = t.t1 + delay;
      if (t.t4 < t.t3) t.t4 = t.t3 + (delay - (t.t3 - t.t1));  // guard; grid should exceed t3-t1
    } else {
      const double half = 0.5 * delay;
      t.t3 = t.t2 + half;
      t.t4 = t.t3 + (base.t4 - base.t3);
    }
    out.push_back({delay, nlpe_efficiency(params, t, eta_control)});
  }
  return out;
}

struct DecayRecovery {
  double gamma_fwhm_hz = 0.0;
  double rate_hz = 0.0;  // exponential part (tau3 fits only)
};

inline DecayRecovery recover_from_tau2_curve(const std::vector<DecayPoint>& curve) {
  std::vector<double> tau, eta;
  for (const auto& p : curve) tau.push_back(p.delay_s), eta.push_back(p.efficiency);
  const auto fit = fit_gaussian_decay(tau, eta, false);
  return {fit.gamma_fwhm_hz, 0.0};
}

inline DecayRecovery recover_from_tau3_curve(const std::vector<DecayPoint>& curve) {
  std::vector<double> tau, eta;
  for (const auto& p : curve) tau.push_back(p.delay_s), eta.push_back(p.efficiency);
  const auto fit = fit_gaussian_decay(tau, eta, true);
  // The Gaussian term lives on t3 - t2 = tau3 / 2; the exponential term is
  // exp(-gamma tau3) directly.
  return {2.0 * fit.gamma_fwhm_hz, fit.rate_hz};
}

// --- AFC baseline ---------------------------------------------------------------------

// Square-tooth forward-recall AFC efficiency at finesse F.
inline double afc_efficiency(double d, double finesse) {
  const double deff = d / finesse;
  return sq(deff) * std::exp(-deff) * sq(sinc(kPi / finesse));
}

struct AfcOptimum {
  double finesse = 0.0;
  double efficiency = 0.0;
};

// 1-D scan over F in (1, 20] plus golden-section refinement.
inline AfcOptimum afc_optimal_efficiency(double d) {
  if (!(d > 0.0)) throw InfeasibleConstraints("AFC optimum needs d > 0");
  constexpr int kScan = 400;
  double best_f = 1.05, best = -1.0;
  for (int i = 0; i <= kScan; ++i) {
    const double f = 1.0 + 19.0 * (i + 0.5) / (kScan + 1);
    const double e = afc_efficiency(d, f);
    if (e > best) best = e, best_f = f;
  }
  const double lo = std::max(1.0 + 1e-9, best_f - 19.0 / kScan);
  const double hi = std::min(20.0, best_f + 19.0 / kScan);
  const double f_star = golden_minimize([&](double f) { return -afc_efficiency(d, f); }, lo, hi, 1e-12);
  return {f_star, afc_efficiency(d, f_star)};
}

// --- timing optimization -----------------------------------------------------------------

struct TimingConstraints {
  double min_gap01_s = 1.0e-6;   // t1 - t0
  double min_gap12_s = 1.0e-6;   // t2 - t1
  double min_gap23_s = 1.0e-6;   // t3 - t2
  double min_gap34_s = 1.0e-6;   // t4 - t3
  double min_echo_gap_s = 0.0;   // t5 - t4
  double max_gap_s = 200e-6;     // search range per gap
};

// Maximizes nlpe_efficiency over the four inter-pulse gaps subject to the
// constraints. The objective is monotone non-increasing in every gap, so the
// optimum collapses onto the feasibility boundary; the coordinate descent
// with golden-section line searches converges there without assuming it.
inline NlpeTimings optimize_timings(const MaterialParams& params, const TimingConstraints& c,
                                    double eta_control = 1.0, int rounds = 4) {
  if (c.min_gap01_s < 0 || c.min_gap12_s < 0 || c.min_gap23_s < 0 || c.min_gap34_s < 0 ||
      c.min_echo_gap_s < 0 || c.max_gap_s <= 0) {
    throw InfeasibleConstraints("timing constraints must be nonnegative with a positive range");
  }
  std::array<double, 4> lb{c.min_gap01_s, c.min_gap12_s, c.min_gap23_s, c.min_gap34_s};
  std::array<double, 4> gap{lb};
  auto feasible = [&](std::array<double, 4> g) {
    // echo separation: t5 - t4 = (t3 - t2) - (t1 - t0)
    g[2] = std::max(g[2], c.min_echo_gap_s + g[0]);
    return g;
  };
  auto objective = [&](const std::array<double, 4>& g_in) {
    const auto g = feasible(g_in);
    NlpeTimings t;
    t.t0 = 0.0;
    t.t1 = g[0];
    t.t2 = t.t1 + g[1];
    t.t3 = t.t2 + g[2];
    t.t4 = t.t3 + g[3];
    return nlpe_efficiency(params, t, eta_control);
  };
  for (int r = 0; r < rounds; ++r) {
    for (int k = 0; k < 4; ++k) {
      auto trial = gap;
      const double best = golden_minimize(
          [&](double x) {
            trial[k] = x;
            return -objective(trial);
          },
          lb[k], lb[k] + c.max_gap_s, 1e-12);
      gap[k] = best;
    }
  }
  gap = feasible(gap);
  NlpeTimings t;
  t.t0 = 0.0;
  t.t1 = gap[0];
  t.t2 = t.t1 + gap[1];
  t.t3 = t.t2 + gap[2];
  t.t4 = t.t3 + gap[3];
  return t;
}

}  // namespace echosim

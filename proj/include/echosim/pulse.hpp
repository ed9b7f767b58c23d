#pragma once

// Pulse waveforms and the two-level transfer map a pulse induces on an ion
// at a given detuning. Shapes: Gaussian (signal), complex hyperbolic secant
// with tanh frequency sweep (control), linear chirp and square (utility).
// Everything is rotating-wave; the complex envelope is a Rabi frequency in
// Hz with the instantaneous chirp folded into its phase.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include "common.hpp"
#include "errors.hpp"
#include "fitting.hpp"
#include "model.hpp"

namespace echosim {

// Amplitude-FWHM convention throughout: a shape's fwhm refers to the Rabi
// amplitude, not the intensity. Envelopes are truncated to exactly zero
// outside +-5 amplitude-FWHM (sech tails beyond that carry < 1e-4 of the
// pulse area).
inline constexpr double kSupportFwhmMultiple = 5.0;

// sech(x) = 1/2 at x = ln(2 + sqrt(3)).
inline constexpr double kSechHalfWidth = 1.3169578969248166;

struct GaussianShape {
  double fwhm_s = 0.0;
};

struct SechShape {
  double peak_rabi_hz = 0.0;
  double beta_hz = 0.0;    // angular rate / 2pi; amplitude is sech(2*pi*beta_hz*(t-tc))
  double chirp_mu = 0.0;   // instantaneous detuning mu*beta*tanh(...) in Hz
};

struct ChirpShape {
  double sweep_hz = 0.0;   // full sweep width, -sweep/2 .. +sweep/2
  double duration_s = 0.0;
};

struct SquareShape {
  double duration_s = 0.0;
};

using PulseShape = std::variant<GaussianShape, SechShape, ChirpShape, SquareShape>;

enum class PulseRole { signal, control, pump };

struct PulseSpec {
  TransitionId transition = TransitionId::f15;
  double center_time_s = 0.0;
  PulseShape shape = GaussianShape{};
  double nominal_area_rad = kPi;
  double phase_rad = 0.0;
  Vec2 direction{1.0, 0.0};
  PulseRole role = PulseRole::control;
  // Ideal pulses apply the exact nominal-area rotation with zero temporal
  // support, independent of detuning.
  bool ideal = false;

  double support_halfwidth_s() const {
    if (ideal) return 0.0;
    if (const auto* g = std::get_if<GaussianShape>(&shape)) return kSupportFwhmMultiple * g->fwhm_s;
    if (const auto* s = std::get_if<SechShape>(&shape)) {
      const double fwhm = 2.0 * kSechHalfWidth / (kTwoPi * s->beta_hz);
      return kSupportFwhmMultiple * fwhm;
    }
    if (const auto* c = std::get_if<ChirpShape>(&shape)) return 0.5 * c->duration_s;
    return 0.5 * std::get<SquareShape>(shape).duration_s;
  }
};

// Sech amplitude FWHM for a given beta (Hz).
inline double sech_fwhm(double beta_hz) { return 2.0 * kSechHalfWidth / (kTwoPi * beta_hz); }

// --- constructors -----------------------------------------------------------

inline PulseSpec make_gaussian_pulse(TransitionId tr, double center_s, double fwhm_s, double area_rad,
                                     Vec2 direction = {1.0, 0.0}, PulseRole role = PulseRole::signal,
                                     double phase_rad = 0.0) {
  PulseSpec p;
  p.transition = tr;
  p.center_time_s = center_s;
  p.shape = GaussianShape{fwhm_s};
  p.nominal_area_rad = area_rad;
  p.phase_rad = phase_rad;
  p.direction = direction.normalized();
  p.role = role;
  return p;
}

inline PulseSpec make_square_pulse(TransitionId tr, double center_s, double duration_s, double area_rad,
                                   Vec2 direction = {1.0, 0.0}, double phase_rad = 0.0) {
  PulseSpec p;
  p.transition = tr;
  p.center_time_s = center_s;
  p.shape = SquareShape{duration_s};
  p.nominal_area_rad = area_rad;
  p.phase_rad = phase_rad;
  p.direction = direction.normalized();
  p.role = PulseRole::control;
  return p;
}

// Sech control pulse with the stated total (truncated) duration; beta follows
// from duration = 10 amplitude-FWHM, peak Rabi and chirp depth are free.
inline PulseSpec make_sech_pulse(TransitionId tr, double center_s, double duration_s, double peak_rabi_hz,
                                 double chirp_mu, Vec2 direction = {1.0, 0.0}, double phase_rad = 0.0) {
  PulseSpec p;
  p.transition = tr;
  p.center_time_s = center_s;
  const double fwhm = duration_s / (2.0 * kSupportFwhmMultiple);
  const double beta_hz = 2.0 * kSechHalfWidth / (kTwoPi * fwhm);
  p.shape = SechShape{peak_rabi_hz, beta_hz, chirp_mu};
  p.nominal_area_rad = kTwoPi * peak_rabi_hz * kPi / (kTwoPi * beta_hz);
  p.phase_rad = phase_rad;
  p.direction = direction.normalized();
  p.role = PulseRole::control;
  return p;
}

inline PulseSpec make_ideal_pulse(TransitionId tr, double center_s, double area_rad,
                                  Vec2 direction = {1.0, 0.0}, double phase_rad = 0.0) {
  PulseSpec p;
  p.transition = tr;
  p.center_time_s = center_s;
  p.shape = SquareShape{0.0};
  p.nominal_area_rad = area_rad;
  p.phase_rad = phase_rad;
  p.direction = direction.normalized();
  p.role = PulseRole::control;
  p.ideal = true;
  return p;
}

// --- envelope ---------------------------------------------------------------

// Complex Rabi amplitude in Hz at time t; exactly zero outside the truncated
// support. Total function of t.
inline cplx envelope(const PulseSpec& spec, double t) {
  const double tau = t - spec.center_time_s;
  const double half = spec.support_halfwidth_s();
  if (spec.ideal || std::abs(tau) > half) return {0.0, 0.0};

  if (const auto* g = std::get_if<GaussianShape>(&spec.shape)) {
    // area = 2*pi * Omega0 * fwhm * sqrt(pi / (4 ln 2))
    const double omega0 = spec.nominal_area_rad / (kTwoPi * g->fwhm_s * std::sqrt(kPi / (4.0 * std::log(2.0))));
    const double amp = omega0 * std::exp(-4.0 * std::log(2.0) * tau * tau / (g->fwhm_s * g->fwhm_s));
    return std::polar(amp, spec.phase_rad);
  }
  if (const auto* s = std::get_if<SechShape>(&spec.shape)) {
    const double beta_rad = kTwoPi * s->beta_hz;
    const double x = beta_rad * tau;
    const double amp = s->peak_rabi_hz / std::cosh(x);
    // instantaneous detuning mu*beta_hz*tanh(x) integrates to the log-cosh phase
    const double chirp_phase = s->chirp_mu * std::log(std::cosh(x));
    return std::polar(amp, spec.phase_rad + chirp_phase);
  }
  if (const auto* c = std::get_if<ChirpShape>(&spec.shape)) {
    const double omega0 = spec.nominal_area_rad / (kTwoPi * c->duration_s);
    const double chirp_phase = kPi * c->sweep_hz * tau * tau / c->duration_s;
    return std::polar(omega0, spec.phase_rad + chirp_phase);
  }
  const auto& sq_shape = std::get<SquareShape>(spec.shape);
  const double omega0 = spec.nominal_area_rad / (kTwoPi * sq_shape.duration_s);
  return std::polar(omega0, spec.phase_rad);
}

// Peak Rabi amplitude in Hz (for step-size control).
inline double peak_rabi(const PulseSpec& spec) {
  if (spec.ideal) return 0.0;
  if (const auto* g = std::get_if<GaussianShape>(&spec.shape)) {
    return spec.nominal_area_rad / (kTwoPi * g->fwhm_s * std::sqrt(kPi / (4.0 * std::log(2.0))));
  }
  if (const auto* s = std::get_if<SechShape>(&spec.shape)) return s->peak_rabi_hz;
  if (const auto* c = std::get_if<ChirpShape>(&spec.shape)) return spec.nominal_area_rad / (kTwoPi * c->duration_s);
  const auto& sq_shape = std::get<SquareShape>(spec.shape);
  return sq_shape.duration_s > 0.0 ? spec.nominal_area_rad / (kTwoPi * sq_shape.duration_s) : 0.0;
}

// --- two-level propagation ----------------------------------------------------

using TransferMap = Eigen::Matrix2cd;

// Exact rotation by `area` about the (phase-defined) transverse axis.
inline TransferMap ideal_rotation(double area_rad, double phase_rad) {
  const double c = std::cos(0.5 * area_rad);
  const double s = std::sin(0.5 * area_rad);
  TransferMap u;
  const cplx i_unit(0.0, 1.0);
  u(0, 0) = c;
  u(0, 1) = -i_unit * s * std::exp(cplx(0.0, -phase_rad));
  u(1, 0) = -i_unit * s * std::exp(cplx(0.0, +phase_rad));
  u(1, 1) = c;
  return u;
}

struct IntegrationOptions {
  double phase_per_step = 0.02;     // target accumulated phase per RK4 step (rad)
  std::size_t min_steps = 200;
  std::size_t max_steps = 40'000'000;
  // Optional clipped bounds (used by the sequence executor when neighboring
  // supports touch); NaN means the full truncated support.
  double t_begin = std::numeric_limits<double>::quiet_NaN();
  double t_end = std::numeric_limits<double>::quiet_NaN();
};

// Time-ordered solution of the two-level Schrödinger equation in the frame
// rotating at the pulse carrier, over the truncated support. State vector is
// (lower, upper); detuning_hz is the ion's pair transition frequency minus
// the pulse carrier. RK4 on the propagator with a rate-scaled fixed step
// (relative accuracy ~1e-8..1e-9 for the pulses used here; doubling the
// resolution moves entries by far less than 1e-6).
inline TransferMap propagate_two_level(const PulseSpec& spec, double detuning_hz,
                                       const IntegrationOptions& opts = {}) {
  if (spec.ideal) return ideal_rotation(spec.nominal_area_rad, spec.phase_rad);

  const double half = spec.support_halfwidth_s();
  double t0 = std::isnan(opts.t_begin) ? spec.center_time_s - half : opts.t_begin;
  double t1 = std::isnan(opts.t_end) ? spec.center_time_s + half : opts.t_end;
  t0 = std::max(t0, spec.center_time_s - half);
  t1 = std::min(t1, spec.center_time_s + half);
  if (!(t1 > t0)) return TransferMap::Identity();

  double sweep_extent_hz = 0.0;
  if (const auto* s = std::get_if<SechShape>(&spec.shape)) sweep_extent_hz = std::abs(s->chirp_mu * s->beta_hz);
  if (const auto* c = std::get_if<ChirpShape>(&spec.shape)) sweep_extent_hz = 0.5 * std::abs(c->sweep_hz);

  // Fastest angular rate in play: Rabi, detuning, chirp extent, and the
  // envelope's own bandwidth.
  double bandwidth_hz = 0.0;
  if (const auto* g = std::get_if<GaussianShape>(&spec.shape)) bandwidth_hz = 1.0 / g->fwhm_s;
  if (const auto* s = std::get_if<SechShape>(&spec.shape)) bandwidth_hz = s->beta_hz;
  const double rate =
      kTwoPi * (peak_rabi(spec) + std::abs(detuning_hz) + sweep_extent_hz + bandwidth_hz) + 1.0 / (t1 - t0);

  const double steps_needed = (t1 - t0) * rate / opts.phase_per_step;
  if (steps_needed > static_cast<double>(opts.max_steps)) {
    throw IntegrationFailure("step count " + std::to_string(steps_needed) + " exceeds cap");
  }
  const std::size_t n = std::max<std::size_t>(opts.min_steps, static_cast<std::size_t>(steps_needed) + 1);
  const double h = (t1 - t0) / static_cast<double>(n);

  // dU/dt = -i * 2*pi * [[0, conj(Omega)/2], [Omega/2, Delta]] * U
  const cplx minus_i(0.0, -1.0);
  auto rhs = [&](double t, const TransferMap& u) -> TransferMap {
    const cplx om = envelope(spec, t);
    Eigen::Matrix2cd m;
    m(0, 0) = 0.0;
    m(0, 1) = 0.5 * std::conj(om);
    m(1, 0) = 0.5 * om;
    m(1, 1) = detuning_hz;
    return minus_i * kTwoPi * (m * u);
  };

  TransferMap u = TransferMap::Identity();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const TransferMap k1 = rhs(t, u);
    const TransferMap k2 = rhs(t + 0.5 * h, u + 0.5 * h * k1);
    const TransferMap k3 = rhs(t + 0.5 * h, u + 0.5 * h * k2);
    const TransferMap k4 = rhs(t + h, u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

inline double unitarity_defect(const TransferMap& u) {
  return (u.adjoint() * u - TransferMap::Identity()).cwiseAbs().maxCoeff();
}

// Ground -> excited population transfer probability at a given detuning.
inline double transfer_probability(const PulseSpec& spec, double detuning_hz,
                                   const IntegrationOptions& opts = {}) {
  const TransferMap u = propagate_two_level(spec, detuning_hz, opts);
  return std::norm(u(1, 0));
}

// --- spectral profiles --------------------------------------------------------

// Density over detuning on an explicit grid; quadrature weights are
// trapezoidal. normalized() must hold before use as a sampling profile.
struct SpectralProfile {
  std::vector<double> detuning_hz;
  std::vector<double> density;  // per Hz

  double integral() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < detuning_hz.size(); ++i) {
      acc += 0.5 * (density[i] + density[i + 1]) * (detuning_hz[i + 1] - detuning_hz[i]);
    }
    return acc;
  }

  bool normalized(double tol = 1e-6) const { return std::abs(integral() - 1.0) <= tol; }

  void require_normalized() const {
    if (detuning_hz.size() < 2 || !normalized()) {
      throw UnnormalizedProfile("spectral profile must integrate to 1");
    }
  }

  static SpectralProfile gaussian(double fwhm_hz, std::size_t n = 301, double span_sigmas = 5.0) {
    SpectralProfile p;
    const double sigma = fwhm_to_sigma(fwhm_hz);
    p.detuning_hz.resize(n);
    p.density.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -span_sigmas * sigma + 2.0 * span_sigmas * sigma * static_cast<double>(i) / (n - 1);
      p.detuning_hz[i] = x;
      p.density[i] = std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(kTwoPi));
    }
    const double norm = p.integral();
    for (auto& d : p.density) d /= norm;
    return p;
  }

  // Delta-like profile: a narrow triangle at `center` (for tests).
  static SpectralProfile delta(double center_hz = 0.0, double width_hz = 1.0) {
    SpectralProfile p;
    p.detuning_hz = {center_hz - width_hz, center_hz, center_hz + width_hz};
    p.density = {0.0, 1.0 / width_hz, 0.0};
    return p;
  }
};

// Mean inversion of a single control pulse over a normalized detuning
// profile, by quadrature on the profile grid.
inline double transfer_efficiency(const PulseSpec& spec, const SpectralProfile& profile) {
  profile.require_normalized();
  std::vector<double> p(profile.detuning_hz.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = transfer_probability(spec, profile.detuning_hz[i]);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    acc += 0.5 * (p[i] * profile.density[i] + p[i + 1] * profile.density[i + 1]) *
           (profile.detuning_hz[i + 1] - profile.detuning_hz[i]);
  }
  return std::min(std::max(acc, 0.0), 1.0);
}

// --- control-pulse optimization ------------------------------------------------

struct SechOptimum {
  PulseSpec pulse;
  double efficiency = 0.0;
};

// Tunes (peak Rabi, chirp depth) of a sech control pulse of pinned duration
// to maximize the mean inversion over `profile`, with the peak Rabi capped
// (the cap models the available control power and is what pins the realized
// efficiency plateau). Deterministic coordinate descent with golden-section
// line searches.
inline SechOptimum optimize_sech_pulse(TransitionId tr, double center_s, double duration_s,
                                       const SpectralProfile& profile, double rabi_cap_hz,
                                       double mu_max = 2.5, int rounds = 3) {
  profile.require_normalized();
  double rabi = 0.75 * rabi_cap_hz;
  double mu = 1.0;
  auto eff = [&](double r, double m) {
    return transfer_efficiency(make_sech_pulse(tr, center_s, duration_s, r, m), profile);
  };
  for (int round = 0; round < rounds; ++round) {
    mu = golden_minimize([&](double m) { return -eff(rabi, m); }, 0.05, mu_max, 1e-4);
    rabi = golden_minimize([&](double r) { return -eff(r, mu); }, 0.05 * rabi_cap_hz, rabi_cap_hz, 1e-4);
  }
  SechOptimum out;
  out.pulse = make_sech_pulse(tr, center_s, duration_s, rabi, mu);
  out.efficiency = eff(rabi, mu);
  return out;
}

}  // namespace echosim

#pragma once

// Shared constants, small math helpers, and the 2D geometry vector used
// throughout the simulator. Frequencies are plain Hz (cycles/s), times are
// seconds, angular quantities carry _rad suffixes where it matters.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

namespace echosim {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// FWHM of a Gaussian <-> standard deviation.
inline double fwhm_to_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }
inline double sigma_to_fwhm(double sigma) { return sigma * 2.0 * std::sqrt(2.0 * std::log(2.0)); }

inline double sq(double x) { return x * x; }

inline bool near_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool near_rel(double a, double b, double tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= tol * std::max(scale, 1e-300);
}

// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// In-plane propagation vector. The phase-matching physics of the protocols
// only involves the plane spanned by the signal and control beams, so the
// geometry is 2D throughout.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline Vec2 unit_at_angle(double theta_rad) { return {std::cos(theta_rad), std::sin(theta_rad)}; }

}  // namespace echosim

#pragma once

// Small fitting/optimization toolbox: golden-section line search, linear
// least squares on a handful of basis functions, the sinusoid fit used for
// interference visibility, and the log-domain decay fit that recovers spin
// linewidths from efficiency curves.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "common.hpp"
#include "errors.hpp"

namespace echosim {

// Golden-section minimization of a unimodal function on [a, b].
inline double golden_minimize(const std::function<double(double)>& f, double a, double b,
                              double tol = 1e-10, int max_iter = 200) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Least squares for y ~ sum_k c_k * basis_k(x), solved by normal equations
// with partial pivoting. Fine for the <=4 coefficient fits used here.
inline std::vector<double> linear_least_squares(const std::vector<double>& x, const std::vector<double>& y,
                                                const std::vector<std::function<double(double)>>& basis) {
  const std::size_t m = basis.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t p = 0; p < x.size(); ++p) {
    std::vector<double> phi(m);
    for (std::size_t k = 0; k < m; ++k) phi[k] = basis[k](x[p]);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) a[i][j] += phi[i] * phi[j];
      a[i][m] += phi[i] * y[p];
    }
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[piv], a[col]);
    if (std::abs(a[col][col]) < 1e-300) throw InfeasibleConstraints("singular least-squares system");
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<double> coef(m);
  for (std::size_t i = 0; i < m; ++i) coef[i] = a[i][m] / a[i][i];
  return coef;
}

// y(theta) = offset + amp * cos(theta - theta0), amp >= 0.
struct SinusoidFit {
  double offset = 0.0;
  double amplitude = 0.0;
  double theta0 = 0.0;
  double visibility() const { return amplitude / offset; }
};

inline SinusoidFit fit_sinusoid(const std::vector<double>& theta, const std::vector<double>& y) {
  const auto coef = linear_least_squares(
      theta, y,
      {[](double) { return 1.0; }, [](double t) { return std::cos(t); }, [](double t) { return std::sin(t); }});
  SinusoidFit fit;
  fit.offset = coef[0];
  fit.amplitude = std::hypot(coef[1], coef[2]);
  fit.theta0 = std::atan2(coef[2], coef[1]);
  return fit;
}

// Fit of ln(eta) = c - a*tau^2 - b*tau on a decay curve. With the intensity
// convention used throughout (Gaussian exponent Gamma^2 tau^2 pi^2 / (2 ln 2)
// plus an optional exponential term), the spin linewidth and decoherence
// rate follow directly from (a, b).
struct DecayFit {
  double gamma_fwhm_hz = 0.0;   // Gaussian linewidth recovered from the tau^2 term
  double rate_hz = 0.0;         // exponential rate recovered from the tau term
  double log_amplitude = 0.0;
};

inline DecayFit fit_gaussian_decay(const std::vector<double>& tau, const std::vector<double>& eta,
                                   bool with_exponential_term) {
  std::vector<double> log_eta(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i] <= 0.0) throw InfeasibleConstraints("decay fit requires positive efficiencies");
    log_eta[i] = std::log(eta[i]);
  }
  std::vector<std::function<double(double)>> basis = {[](double) { return 1.0; },
                                                      [](double t) { return -t * t; }};
  if (with_exponential_term) basis.push_back([](double t) { return -t; });
  const auto coef = linear_least_squares(tau, log_eta, basis);
  DecayFit fit;
  fit.log_amplitude = coef[0];
  const double a = std::max(coef[1], 0.0);
  fit.gamma_fwhm_hz = std::sqrt(a * 2.0 * std::log(2.0) / (kPi * kPi));
  if (with_exponential_term) fit.rate_hz = coef[2];
  return fit;
}

}  // namespace echosim

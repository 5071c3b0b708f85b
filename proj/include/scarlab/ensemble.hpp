#pragma once

// Thermal reference ensembles over a sector spectrum, and the inverse
// temperature matching a target energy density via bisection on the
// monotone map beta -> <H>_beta.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "scarlab/spectral.hpp"

namespace scarlab {

enum class EnsembleKind { kCanonical, kMicrocanonical };

struct Ensemble {
  const Spectrum* spectrum = nullptr;
  EnsembleKind kind = EnsembleKind::kCanonical;
  double beta = 0.0;
  double z = 0.0;            // normalization of the weight vector below
  double window_center = 0.0;
  double window_width = 0.0;
  Eigen::VectorXd weights;   // w_i >= 0 with sum(w) == z

  double weight(Eigen::Index i) const { return weights[i] / z; }
};

// Boltzmann weights are computed against a spectrum-edge reference energy so
// large |beta| cannot overflow; the shift cancels in every w_i / Z ratio.
inline Ensemble make_canonical(const Spectrum& spec, double beta) {
  Ensemble ens;
  ens.spectrum = &spec;
  ens.kind = EnsembleKind::kCanonical;
  ens.beta = beta;
  const double e_ref =
      beta >= 0.0 ? spec.energies[0] : spec.energies[spec.dim() - 1];
  ens.weights = (-beta * (spec.energies.array() - e_ref)).exp();
  ens.z = ens.weights.sum();
  return ens;
}

inline Ensemble make_microcanonical(const Spectrum& spec, double center,
                                    double width) {
  if (width <= 0.0) throw std::invalid_argument("window width must be positive");
  Ensemble ens;
  ens.spectrum = &spec;
  ens.kind = EnsembleKind::kMicrocanonical;
  ens.window_center = center;
  ens.window_width = width;
  ens.weights = Eigen::VectorXd::Zero(spec.dim());
  for (Eigen::Index i = 0; i < spec.dim(); ++i)
    if (std::abs(spec.energies[i] - center) <= width / 2.0) ens.weights[i] = 1.0;
  ens.z = ens.weights.sum();
  if (ens.z == 0.0)
    throw std::invalid_argument("microcanonical window contains no states");
  return ens;
}

inline double energy_density_at_beta(const Spectrum& spec, double beta,
                                     int n_sites) {
  const Ensemble ens = make_canonical(spec, beta);
  const double e = (ens.weights.array() * spec.energies.array()).sum() / ens.z;
  return e / n_sites;
}

// Inverse temperature with <H>_beta / N equal to the target density, to
// 1e-10 in density. The map is strictly decreasing (variance is positive),
// so an expanding bracket plus bisection always lands.
inline double solve_beta(const Spectrum& spec, double target_density,
                         int n_sites) {
  const double lo_density = spec.energies[0] / n_sites;
  const double hi_density = spec.energies[spec.dim() - 1] / n_sites;
  if (target_density <= lo_density || target_density >= hi_density)
    throw std::invalid_argument("unreachable energy density");

  const double tol = 1e-10;
  double beta_lo = -1.0, beta_hi = 1.0;  // f(beta_lo) > target > f(beta_hi)
  while (energy_density_at_beta(spec, beta_hi, n_sites) > target_density) {
    beta_hi *= 2.0;
    if (beta_hi > 1e12) throw std::runtime_error("beta bracket expansion failed");
  }
  while (energy_density_at_beta(spec, beta_lo, n_sites) < target_density) {
    beta_lo *= 2.0;
    if (beta_lo < -1e12) throw std::runtime_error("beta bracket expansion failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = (beta_lo + beta_hi) / 2.0;
    const double density = energy_density_at_beta(spec, mid, n_sites);
    if (std::abs(density - target_density) <= tol) return mid;
    (density > target_density ? beta_lo : beta_hi) = mid;
  }
  const double mid = (beta_lo + beta_hi) / 2.0;
  if (std::abs(energy_density_at_beta(spec, mid, n_sites) - target_density) > tol)
    throw std::runtime_error("beta bisection did not converge");
  return mid;
}

struct ScarPair {
  int a = 0;
  int b = 0;
  double e_a = 0.0;
  double e_b = 0.0;
  double beta = 0.0;  // solves <H>_beta / N == (E_a + E_b) / (2N)
};

inline ScarPair make_scar_pair(const Spectrum& spec, int a, int b,
                               int n_sites) {
  if (a < 0 || b < 0 || a >= spec.dim() || b >= spec.dim())
    throw std::out_of_range("eigenstate index out of range");
  ScarPair pair;
  pair.a = a;
  pair.b = b;
  pair.e_a = spec.energies[a];
  pair.e_b = spec.energies[b];
  pair.beta =
      solve_beta(spec, (pair.e_a + pair.e_b) / (2.0 * n_sites), n_sites);
  return pair;
}

}  // namespace scarlab

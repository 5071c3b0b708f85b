#pragma once

// Scar diagnostics: half-chain entanglement entropy, overlap with the
// symmetrized Neel state, and selection of athermal eigenstates inside an
// energy window around the spectrum center.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scarlab/basis.hpp"
#include "scarlab/io.hpp"
#include "scarlab/spectral.hpp"
#include "scarlab/symmetry.hpp"

namespace scarlab {

namespace detail {

// Open-chain constrained configurations of `n` sites (no cyclic wrap term).
inline std::vector<config_t> open_chain_configs(int n) {
  std::vector<config_t> out;
  const config_t top = config_t{1} << n;
  for (config_t c = 0; c < top; ++c)
    if ((c & (c >> 1)) == 0) out.push_back(c);
  return out;
}

}  // namespace detail

// Von Neumann entropy (nats) of the reduced state on the first `cut_sites`
// sites, for a normalized state given in the full constrained basis. Blocked
// cross-boundary configurations are simply absent from the basis, so the
// amplitude matrix over open-chain left/right factors captures everything.
inline double entanglement_entropy(const Eigen::VectorXd& full,
                                   const ConstrainedBasis& basis,
                                   int cut_sites) {
  const int n = basis.n_sites();
  if (cut_sites < 1 || cut_sites >= n)
    throw std::invalid_argument("cut must leave sites on both sides");
  if (full.size() != static_cast<Eigen::Index>(basis.size()))
    throw std::invalid_argument("state vector has wrong dimension");

  const auto left = detail::open_chain_configs(cut_sites);
  const auto right = detail::open_chain_configs(n - cut_sites);
  auto pos = [](const std::vector<config_t>& v, config_t c) {
    return static_cast<Eigen::Index>(
        std::lower_bound(v.begin(), v.end(), c) - v.begin());
  };

  Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(left.size()),
      static_cast<Eigen::Index>(right.size()));
  const config_t left_mask = (config_t{1} << cut_sites) - 1;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const config_t c = basis.config(i);
    amp(pos(left, c & left_mask), pos(right, c >> cut_sites)) +=
        full[static_cast<Eigen::Index>(i)];
  }

  const Eigen::VectorXd sv =
      Eigen::JacobiSVD<Eigen::MatrixXd>(amp).singularValues();
  double entropy = 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    const double lambda = sv[k] * sv[k];
    if (lambda < 1e-14) continue;  // numerical zeros of the reduced state
    entropy -= lambda * std::log(lambda);
  }
  return entropy;
}

inline config_t neel_config(int n_sites) {
  if (n_sites % 2 != 0) throw std::invalid_argument("no Neel state");
  config_t c = 0;
  for (int j = 0; j < n_sites; j += 2) c |= config_t{1} << j;
  return c;
}

// Squared overlap of each eigenstate with the symmetrized Neel state, which
// coincides with one sector basis state (the Neel orbit has exactly two
// members). The result is one squared eigenvector row and sums to 1.
inline Eigen::VectorXd neel_overlap(const Spectrum& spec,
                                    const SectorBasis& sector) {
  const config_t rep = orbit_representative(neel_config(sector.n_sites()),
                                            sector.n_sites());
  const auto row = static_cast<Eigen::Index>(sector.index_of_rep(rep));
  return spec.vectors.row(row).transpose().cwiseAbs2();
}

enum class ScarMethod { kNeelOverlap, kEntropyOutlier };

struct ScarOptions {
  ScarMethod method = ScarMethod::kNeelOverlap;
  int count = 6;
  double band_fraction = 0.6;  // central share of the spectral span
};

struct ScarSet {
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<int> scar_indices;     // ascending eigenstate indices
  std::vector<int> thermal_indices;  // window states not selected as scars
  Eigen::VectorXd neel_overlaps;     // per eigenstate; empty for odd chains
  Eigen::VectorXd entropies;         // half-chain entropy per eigenstate
};

// Half-chain entropies of every eigenstate, via lifting to the full basis.
inline Eigen::VectorXd all_entropies(const Spectrum& spec,
                                     const SectorBasis& sector,
                                     const ConstrainedBasis& basis) {
  Eigen::VectorXd ent(spec.dim());
  for (Eigen::Index m = 0; m < spec.dim(); ++m)
    ent[m] = entanglement_entropy(lift(spec.vectors.col(m), sector, basis),
                                  basis, basis.n_sites() / 2);
  return ent;
}

// Picks `count` scar candidates inside the central energy window. The Neel
// method splits the window into `count` equal energy bins and takes the
// highest-overlap state per bin (empty bins are backfilled by overlap rank);
// the entropy method takes the `count` lowest-entropy window states. Ties
// break toward the lower eigenstate index.
inline ScarSet select_scars(const Spectrum& spec, const SectorBasis& sector,
                            const ConstrainedBasis& basis,
                            const ScarOptions& opt = {}) {
  if (opt.count < 1) throw std::invalid_argument("scar count must be positive");
  if (opt.band_fraction <= 0.0 || opt.band_fraction > 1.0)
    throw std::invalid_argument("band fraction must lie in (0, 1]");

  const auto dim = spec.dim();
  const double e_min = spec.energies[0];
  const double e_max = spec.energies[dim - 1];
  const double margin = (1.0 - opt.band_fraction) * (e_max - e_min) / 2.0;

  ScarSet set;
  set.window_lo = e_min + margin;
  set.window_hi = e_max - margin;
  set.entropies = all_entropies(spec, sector, basis);
  if (sector.n_sites() % 2 == 0) set.neel_overlaps = neel_overlap(spec, sector);

  std::vector<int> window;
  for (Eigen::Index m = 0; m < dim; ++m)
    if (spec.energies[m] >= set.window_lo && spec.energies[m] <= set.window_hi)
      window.push_back(static_cast<int>(m));
  if (static_cast<int>(window.size()) < opt.count)
    throw std::invalid_argument("scar count exceeds states in energy window");

  std::vector<int> chosen;
  if (opt.method == ScarMethod::kEntropyOutlier) {
    chosen = window;
    std::stable_sort(chosen.begin(), chosen.end(), [&](int a, int b) {
      return set.entropies[a] < set.entropies[b];
    });
    chosen.resize(static_cast<std::size_t>(opt.count));
  } else {
    if (sector.n_sites() % 2 != 0)
      throw std::invalid_argument("no Neel state");
    const double width = (set.window_hi - set.window_lo) / opt.count;
    std::vector<char> taken(static_cast<std::size_t>(dim), 0);
    for (int b = 0; b < opt.count; ++b) {
      const double lo = set.window_lo + b * width;
      const double hi = (b + 1 == opt.count) ? set.window_hi : lo + width;
      int best = -1;
      for (int m : window) {
        if (taken[static_cast<std::size_t>(m)]) continue;
        if (spec.energies[m] < lo || spec.energies[m] >= hi) continue;
        if (best < 0 || set.neel_overlaps[m] > set.neel_overlaps[best]) best = m;
      }
      if (best >= 0) {
        taken[static_cast<std::size_t>(best)] = 1;
        chosen.push_back(best);
      }
    }
    // Backfill bins that held no state with the best remaining window states.
    std::vector<int> rest;
    for (int m : window)
      if (!taken[static_cast<std::size_t>(m)]) rest.push_back(m);
    std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
      return set.neel_overlaps[a] > set.neel_overlaps[b];
    });
    while (static_cast<int>(chosen.size()) < opt.count && !rest.empty()) {
      chosen.push_back(rest.front());
      rest.erase(rest.begin());
    }
  }

  std::sort(chosen.begin(), chosen.end());
  set.scar_indices = std::move(chosen);
  for (int m : window)
    if (!std::binary_search(set.scar_indices.begin(), set.scar_indices.end(), m))
      set.thermal_indices.push_back(m);
  return set;
}

// One row per eigenstate: index, energy, Neel overlap, entropy (nats),
// scar and window membership flags.
inline void write_scars_csv(std::ostream& os, const Spectrum& spec,
                            const ScarSet& set) {
  os << "index,energy,neel_overlap,entropy_nats,is_scar,in_window\n";
  for (Eigen::Index m = 0; m < spec.dim(); ++m) {
    const bool scar = std::binary_search(set.scar_indices.begin(),
                                         set.scar_indices.end(),
                                         static_cast<int>(m));
    const bool in_win = spec.energies[m] >= set.window_lo &&
                        spec.energies[m] <= set.window_hi;
    const double ov =
        set.neel_overlaps.size() > 0 ? set.neel_overlaps[m] : 0.0;
    os << m << ',';
    put_csv(os, spec.energies[m]) << ',';
    put_csv(os, ov) << ',';
    put_csv(os, set.entropies[m]) << ',' << (scar ? 1 : 0) << ','
       << (in_win ? 1 : 0) << '\n';
  }
}

}  // namespace scarlab

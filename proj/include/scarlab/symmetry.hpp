#pragma once

// Momentum-zero, reflection-even symmetry sector of the constrained ring.
// The group is the N translations combined with one reflection; every
// character is +1 in this sector, so each geometric orbit contributes exactly
// one normalized basis state |r~> = (1/sqrt(m)) * sum of the m orbit members.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scarlab/basis.hpp"

namespace scarlab {

// Cyclic shift by one site: site j goes to site j+1 mod N.
inline config_t translate(config_t c, int n_sites) {
  const config_t mask = (config_t{1} << n_sites) - 1;
  return ((c << 1) | (c >> (n_sites - 1))) & mask;
}

// Spatial reflection: site j goes to site N-1-j (bit reversal within N bits).
inline config_t reflect(config_t c, int n_sites) {
  config_t out = 0;
  for (int j = 0; j < n_sites; ++j)
    if (c & (config_t{1} << j)) out |= config_t{1} << (n_sites - 1 - j);
  return out;
}

// Distinct images of c under all translations and reflected translations,
// sorted ascending. The first entry is the orbit representative.
inline std::vector<config_t> orbit_of(config_t c, int n_sites) {
  std::vector<config_t> images;
  images.reserve(2 * static_cast<std::size_t>(n_sites));
  config_t t = c;
  config_t r = reflect(c, n_sites);
  for (int s = 0; s < n_sites; ++s) {
    images.push_back(t);
    images.push_back(r);
    t = translate(t, n_sites);
    r = translate(r, n_sites);
  }
  std::sort(images.begin(), images.end());
  images.erase(std::unique(images.begin(), images.end()), images.end());
  return images;
}

inline config_t orbit_representative(config_t c, int n_sites) {
  config_t best = c;
  config_t t = c;
  config_t r = reflect(c, n_sites);
  for (int s = 0; s < n_sites; ++s) {
    best = std::min(best, std::min(t, r));
    t = translate(t, n_sites);
    r = translate(r, n_sites);
  }
  return best;
}

class SectorBasis {
 public:
  SectorBasis(int n_sites, std::vector<config_t> reps,
              std::vector<int> orbit_sizes)
      : n_sites_(n_sites),
        reps_(std::move(reps)),
        orbit_sizes_(std::move(orbit_sizes)) {}

  int n_sites() const { return n_sites_; }
  std::size_t size() const { return reps_.size(); }
  config_t rep(std::size_t s) const { return reps_.at(s); }
  int orbit_size(std::size_t s) const { return orbit_sizes_.at(s); }
  const std::vector<config_t>& reps() const { return reps_; }

  std::size_t index_of_rep(config_t rep) const {
    auto it = std::lower_bound(reps_.begin(), reps_.end(), rep);
    if (it == reps_.end() || *it != rep)
      throw std::out_of_range("representative not in sector basis");
    return static_cast<std::size_t>(it - reps_.begin());
  }

  // Sector index of the orbit containing an arbitrary basis configuration.
  std::size_t index_of_config(config_t c) const {
    return index_of_rep(orbit_representative(c, n_sites_));
  }

  static const char* id() { return "k0e"; }

 private:
  int n_sites_;
  std::vector<config_t> reps_;
  std::vector<int> orbit_sizes_;
};

inline SectorBasis build_sector(const ConstrainedBasis& basis) {
  const int n = basis.n_sites();
  std::vector<config_t> reps;
  std::vector<int> sizes;
  for (config_t c : basis.configs()) {
    if (orbit_representative(c, n) != c) continue;  // only keep orbit minima
    reps.push_back(c);
    sizes.push_back(static_cast<int>(orbit_of(c, n).size()));
  }
  return SectorBasis(n, std::move(reps), std::move(sizes));
}

// Expand a sector vector into the full constrained basis: each orbit member
// receives amplitude v_s / sqrt(m_s).
inline Eigen::VectorXd lift(const Eigen::VectorXd& v, const SectorBasis& sector,
                            const ConstrainedBasis& basis) {
  if (v.size() != static_cast<Eigen::Index>(sector.size()))
    throw std::invalid_argument("sector vector has wrong dimension");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t s = 0; s < sector.size(); ++s) {
    const auto orbit = orbit_of(sector.rep(s), sector.n_sites());
    const double amp = v[static_cast<Eigen::Index>(s)] /
                       std::sqrt(static_cast<double>(orbit.size()));
    for (config_t c : orbit)
      full[static_cast<Eigen::Index>(basis.index_of(c))] += amp;
  }
  return full;
}

// Orthogonal projection of a full-basis vector back onto the sector basis.
// project(lift(v)) == v for any sector vector v.
inline Eigen::VectorXd project(const Eigen::VectorXd& full,
                               const SectorBasis& sector,
                               const ConstrainedBasis& basis) {
  if (full.size() != static_cast<Eigen::Index>(basis.size()))
    throw std::invalid_argument("full vector has wrong dimension");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sector.size()));
  for (std::size_t s = 0; s < sector.size(); ++s) {
    const auto orbit = orbit_of(sector.rep(s), sector.n_sites());
    double acc = 0.0;
    for (config_t c : orbit)
      acc += full[static_cast<Eigen::Index>(basis.index_of(c))];
    v[static_cast<Eigen::Index>(s)] = acc / std::sqrt(static_cast<double>(orbit.size()));
  }
  return v;
}

}  // namespace scarlab

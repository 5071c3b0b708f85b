#pragma once

// Hard-constrained spin-1/2 chain basis on a ring of N sites: configurations
// with two adjacent up-spins are projected out (Rydberg blockade). Site j is
// bit j of a 64-bit mask; configurations are kept sorted ascending.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scarlab {

using config_t = std::uint64_t;

inline constexpr int kMinSites = 3;   // below this the ring blockade degenerates
inline constexpr int kMaxSites = 24;  // dense-diagonalization budget

class ConstrainedBasis {
 public:
  ConstrainedBasis(int n_sites, std::vector<config_t> configs)
      : n_sites_(n_sites), configs_(std::move(configs)) {}

  int n_sites() const { return n_sites_; }
  std::size_t size() const { return configs_.size(); }
  config_t config(std::size_t i) const { return configs_.at(i); }
  const std::vector<config_t>& configs() const { return configs_; }

  bool contains(config_t c) const {
    return std::binary_search(configs_.begin(), configs_.end(), c);
  }

  // Position of a configuration in the sorted list; throws if absent.
  std::size_t index_of(config_t c) const {
    auto it = std::lower_bound(configs_.begin(), configs_.end(), c);
    if (it == configs_.end() || *it != c)
      throw std::out_of_range("configuration not in constrained basis: " +
                              std::to_string(c));
    return static_cast<std::size_t>(it - configs_.begin());
  }

 private:
  int n_sites_;
  std::vector<config_t> configs_;
};

// All N-site ring configurations with no two adjacent up-spins, ascending.
inline ConstrainedBasis enumerate_basis(int n_sites) {
  if (n_sites < kMinSites)
    throw std::invalid_argument("chain too short for periodic blockade");
  if (n_sites > kMaxSites)
    throw std::invalid_argument("n_sites exceeds dense-diagonalization cap of " +
                                std::to_string(kMaxSites));
  const config_t top = config_t{1} << n_sites;
  const config_t mask = top - 1;
  std::vector<config_t> keep;
  for (config_t c = 0; c < top; ++c) {
    const config_t rot = ((c << 1) | (c >> (n_sites - 1))) & mask;
    if ((c & rot) == 0) keep.push_back(c);
  }
  return ConstrainedBasis(n_sites, std::move(keep));
}

// True when both ring neighbors of `site` are down in `config`, i.e. a spin
// flip at `site` stays inside the constrained space.
inline bool neighbors_down(const ConstrainedBasis& basis, config_t config,
                           int site) {
  const int n = basis.n_sites();
  if (site < 0 || site >= n)
    throw std::out_of_range("site index out of range: " + std::to_string(site));
  if (!basis.contains(config))
    throw std::invalid_argument("configuration not in constrained basis");
  const int left = (site + n - 1) % n;
  const int right = (site + 1) % n;
  const config_t pair =
      (config_t{1} << left) | (config_t{1} << right);
  return (config & pair) == 0;
}

}  // namespace scarlab

#pragma once

// Convenience bundle: basis -> sector -> spectrum -> observable, with
// optional disk caching of the expensive diagonalization step.

#include <filesystem>
#include <functional>
#include <string>

#include "scarlab/basis.hpp"
#include "scarlab/cache.hpp"
#include "scarlab/spectral.hpp"
#include "scarlab/symmetry.hpp"

namespace scarlab {

struct SpectralData {
  ConstrainedBasis basis;
  SectorBasis sector;
  Spectrum spectrum;
  EigenObservable observable;
  bool cache_hit = false;
};

inline SpectralData build_spectral_data(int n_sites) {
  ConstrainedBasis basis = enumerate_basis(n_sites);
  SectorBasis sector = build_sector(basis);
  Spectrum spec = diagonalize(build_hamiltonian(sector, basis), n_sites);
  EigenObservable obs = observable_in_eigenbasis(spec, sector);
  return SpectralData{std::move(basis), std::move(sector), std::move(spec),
                      std::move(obs), false};
}

// Loads the spectrum from `cache_path` when valid; otherwise recomputes and
// rewrites the file. A cache failure is reported through `warn` (stale and
// corrupted files must never be used silently).
inline SpectralData load_or_build_spectral_data(
    int n_sites, const std::string& cache_path,
    const std::function<void(const std::string&)>& warn = {}) {
  ConstrainedBasis basis = enumerate_basis(n_sites);
  SectorBasis sector = build_sector(basis);
  bool hit = false;
  Spectrum spec;
  const bool existed = std::filesystem::exists(cache_path);
  try {
    spec = load_spectrum(cache_path, n_sites);
    if (spec.dim() != static_cast<Eigen::Index>(sector.size()))
      throw CacheError("cache dimension does not match the sector");
    hit = true;
  } catch (const CacheError& err) {
    if (existed && warn) warn(err.what());  // a missing file is not corruption
    spec = diagonalize(build_hamiltonian(sector, basis), n_sites);
    save_spectrum(cache_path, spec);
  }
  EigenObservable obs = observable_in_eigenbasis(spec, sector);
  return SpectralData{std::move(basis), std::move(sector), std::move(spec),
                      std::move(obs), hit};
}

}  // namespace scarlab

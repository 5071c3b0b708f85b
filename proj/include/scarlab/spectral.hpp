#pragma once

// Sector Hamiltonian of the constrained ring H = sum_j P_{j-1} sx_j P_{j+1},
// its dense spectrum, and the site-averaged magnetization observable
// O = (1/2N) sum_j sz_j rotated into the eigenbasis.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "scarlab/basis.hpp"
#include "scarlab/symmetry.hpp"

namespace scarlab {

inline constexpr const char* kObservableId = "sz_over_2N";

// H restricted to the k=0 reflection-even sector. A flip at an unblocked site
// of the representative lands in some orbit t; each such flip contributes
// sqrt(m_s / m_t). Flips change the up-spin count, so the diagonal is exactly
// zero and so is the trace.
inline Eigen::MatrixXd build_hamiltonian(const SectorBasis& sector,
                                         const ConstrainedBasis& basis) {
  if (sector.n_sites() != basis.n_sites())
    throw std::invalid_argument("sector and basis site counts differ");
  const int n = basis.n_sites();
  const auto dim = static_cast<Eigen::Index>(sector.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t s = 0; s < sector.size(); ++s) {
    const config_t rep = sector.rep(s);
    const double ms = sector.orbit_size(s);
    for (int j = 0; j < n; ++j) {
      if (!neighbors_down(basis, rep, j)) continue;
      const config_t flipped = rep ^ (config_t{1} << j);
      const std::size_t t = sector.index_of_config(flipped);
      const double mt = sector.orbit_size(t);
      h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) +=
          std::sqrt(ms / mt);
    }
  }
  return h;
}

struct Spectrum {
  int n_sites = 0;
  std::string sector_id;
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // column m is the eigenvector of energies[m]

  Eigen::Index dim() const { return energies.size(); }
};

// Dense symmetric diagonalization. Sign convention: in each eigenvector the
// largest-|entry| component (lowest index on ties) is made positive, so
// repeated runs and different BLAS builds agree outside degenerate subspaces.
inline Spectrum diagonalize(const Eigen::MatrixXd& h, int n_sites) {
  if (h.rows() != h.cols()) throw std::invalid_argument("H is not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  Spectrum spec;
  spec.n_sites = n_sites;
  spec.sector_id = SectorBasis::id();
  spec.energies = solver.eigenvalues();
  spec.vectors = solver.eigenvectors();
  for (Eigen::Index m = 0; m < spec.vectors.cols(); ++m) {
    Eigen::Index lead = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < spec.vectors.rows(); ++i) {
      const double a = std::abs(spec.vectors(i, m));
      if (a > best) {
        best = a;
        lead = i;
      }
    }
    if (spec.vectors(lead, m) < 0.0) spec.vectors.col(m) *= -1.0;
  }
  return spec;
}

// Diagonal values of O = (1/2N) sum_j sz_j per sector representative; the
// observable is orbit-constant so it stays diagonal in the sector basis.
inline Eigen::VectorXd observable_diagonal(const SectorBasis& sector) {
  const int n = sector.n_sites();
  Eigen::VectorXd diag(static_cast<Eigen::Index>(sector.size()));
  for (std::size_t s = 0; s < sector.size(); ++s) {
    const int ups = std::popcount(sector.rep(s));
    diag[static_cast<Eigen::Index>(s)] =
        static_cast<double>(2 * ups - n) / (2.0 * n);
  }
  return diag;
}

struct EigenObservable {
  std::string id;
  Eigen::MatrixXd mat;  // O in the energy eigenbasis, real symmetric
};

inline EigenObservable observable_in_eigenbasis(const Spectrum& spec,
                                                const SectorBasis& sector) {
  if (spec.dim() != static_cast<Eigen::Index>(sector.size()))
    throw std::invalid_argument("spectrum and sector dimensions differ");
  const Eigen::VectorXd diag = observable_diagonal(sector);
  EigenObservable obs;
  obs.id = kObservableId;
  obs.mat = spec.vectors.transpose() * diag.asDiagonal() * spec.vectors;
  return obs;
}

}  // namespace scarlab

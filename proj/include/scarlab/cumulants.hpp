#pragma once

// Heisenberg-picture correlators and free cumulants in the energy eigenbasis.
// O(t)_mn = O_mn exp(i (E_m - E_n) t); thermal objects carry ensemble weights,
// scar-anchored objects are pinned at eigenstates a, b with intermediate sums
// over an explicit thermal index set. Distinct-index sums are evaluated by
// inclusion-exclusion over coincidence patterns, never by nested loops.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

#include "scarlab/ensemble.hpp"
#include "scarlab/spectral.hpp"

namespace scarlab {

using cplx = std::complex<double>;

namespace detail {

constexpr cplx kI{0.0, 1.0};

inline Eigen::VectorXcd phase_vector(const Eigen::VectorXd& energies,
                                     double t) {
  return (kI * t * energies.array()).exp().matrix();
}

// Row x of O(t): u_i = O_xi exp(i (E_x - E_i) t).
inline Eigen::VectorXcd evolved_row(const Eigen::MatrixXd& o,
                                    const Eigen::VectorXd& energies, int x,
                                    double t) {
  const Eigen::Index dim = energies.size();
  Eigen::VectorXcd u(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    u[i] = o(x, i) * std::exp(kI * ((energies[x] - energies[i]) * t));
  return u;
}

// Column y of O(t): v_i = O_iy exp(i (E_i - E_y) t).
inline Eigen::VectorXcd evolved_col(const Eigen::MatrixXd& o,
                                    const Eigen::VectorXd& energies, int y,
                                    double t) {
  const Eigen::Index dim = energies.size();
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    v[i] = o(i, y) * std::exp(kI * ((energies[i] - energies[y]) * t));
  return v;
}

inline Eigen::MatrixXcd evolved_matrix(const Eigen::MatrixXd& o,
                                       const Eigen::VectorXd& energies,
                                       double t) {
  const Eigen::VectorXcd p = phase_vector(energies, t);
  return p.asDiagonal() * o.cast<cplx>() * p.conjugate().asDiagonal();
}

// y = O(t) x without forming O(t): y_m = p_m * [O (conj(p) .* x)]_m.
inline Eigen::VectorXcd apply_evolved(const Eigen::MatrixXd& o,
                                      const Eigen::VectorXd& energies,
                                      double t, const Eigen::VectorXcd& x) {
  const Eigen::VectorXcd p = phase_vector(energies, t);
  Eigen::VectorXcd y = o.cast<cplx>() * p.conjugate().cwiseProduct(x);
  return p.cwiseProduct(y);
}

inline Eigen::VectorXcd masked(const Eigen::VectorXcd& v,
                               const std::vector<int>& idx) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (int i : idx) out[i] = v[i];
  return out;
}

// sum_{i in set} u_i * v_i.
inline cplx masked_dot(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v,
                       const std::vector<int>& idx) {
  cplx acc = 0.0;
  for (int i : idx) acc += u[i] * v[i];
  return acc;
}

// One intermediate index: sum_{i in T} u_i v_i with u, v evolved row/column.
inline cplx ksc2_kernel(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v,
                        const std::vector<int>& tset) {
  return masked_dot(u, v, tset);
}

// Two distinct intermediates: sum_{i != j in T} u_i A(t)_ij v_j, evaluated as
// the unrestricted masked double sum minus the i == j diagonal.
inline cplx ksc3_kernel(const Eigen::MatrixXd& o,
                        const Eigen::VectorXd& energies, double t_mid,
                        const Eigen::VectorXcd& u, const Eigen::VectorXcd& v,
                        const std::vector<int>& tset) {
  const Eigen::VectorXcd vm = masked(v, tset);
  const Eigen::VectorXcd av = apply_evolved(o, energies, t_mid, vm);
  cplx all = 0.0, diag = 0.0;
  for (int i : tset) {
    all += u[i] * av[i];
    diag += u[i] * o(i, i) * v[i];  // A_ii carries no phase
  }
  return all - diag;
}

// Three pairwise-distinct intermediates: sum over i,j,k in T of
// u_i A_ij B_jk v_k with i != j, j != k, i != k, by inclusion-exclusion:
// unrestricted - (i==j) - (j==k) - (i==k) + 2 * (i==j==k).
inline cplx ksc4_kernel(const Eigen::MatrixXd& o,
                        const Eigen::VectorXd& energies, double t_a,
                        double t_b, const Eigen::VectorXcd& u,
                        const Eigen::VectorXcd& v,
                        const std::vector<int>& tset) {
  const Eigen::VectorXcd um = masked(u, tset);
  const Eigen::VectorXcd vm = masked(v, tset);
  const Eigen::VectorXcd bv = apply_evolved(o, energies, t_b, vm);   // B vm
  const Eigen::VectorXcd au = apply_evolved(o, energies, -t_a, um);  // A^T um

  cplx all = 0.0;
  {
    const Eigen::VectorXcd abv =
        apply_evolved(o, energies, t_a, masked(bv, tset));
    for (int i : tset) all += u[i] * abv[i];
  }
  cplx s_ij = 0.0;  // i == j: u_i A_ii [B vm]_i
  cplx s_jk = 0.0;  // j == k: [A^T um]_j B_jj v_j
  cplx s_ik = 0.0;  // i == k: u_i v_i sum_{j in T} A_ij B_ji
  cplx s_all3 = 0.0;
  const Eigen::VectorXcd pa = phase_vector(energies, t_a);
  const Eigen::VectorXcd pb = phase_vector(energies, t_b);
  for (int i : tset) {
    s_ij += u[i] * o(i, i) * bv[i];
    s_jk += au[i] * o(i, i) * v[i];
    cplx loop = 0.0;
    for (int j : tset) {
      const cplx aij = o(i, j) * pa[i] * std::conj(pa[j]);
      const cplx bji = o(j, i) * pb[j] * std::conj(pb[i]);
      loop += aij * bji;
    }
    s_ik += u[i] * v[i] * loop;
    s_all3 += u[i] * o(i, i) * o(i, i) * v[i];
  }
  return all - s_ij - s_jk - s_ik + 2.0 * s_all3;
}

}  // namespace detail

// <O(t_1) ... O(t_{q-1}) O(0)>_ens for q in {1,2,3}; times has length q-1.
inline cplx thermal_correlator(const Ensemble& ens, const EigenObservable& obs,
                               const std::vector<double>& times, int q) {
  if (q < 1 || q > 3) throw std::invalid_argument("thermal correlator order must be 1..3");
  if (static_cast<int>(times.size()) != q - 1)
    throw std::invalid_argument("need q-1 time arguments");
  const Spectrum& spec = *ens.spectrum;
  const Eigen::VectorXd w = ens.weights / ens.z;
  if (q == 1) return (w.array() * obs.mat.diagonal().array()).sum();
  if (q == 2) {
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < spec.dim(); ++i) {
      const Eigen::VectorXcd row = detail::evolved_row(
          obs.mat, spec.energies, static_cast<int>(i), times[0]);
      cplx inner = 0.0;
      for (Eigen::Index j = 0; j < spec.dim(); ++j)
        inner += row[j] * obs.mat(j, i);
      acc += w[i] * inner;
    }
    return acc;
  }
  const Eigen::MatrixXcd o1 =
      detail::evolved_matrix(obs.mat, spec.energies, times[0]);
  const Eigen::MatrixXcd o2 =
      detail::evolved_matrix(obs.mat, spec.energies, times[1]);
  const Eigen::MatrixXcd prod = o1 * o2 * obs.mat.cast<cplx>();
  return (w.cast<cplx>().array() * prod.diagonal().array()).sum();
}

// Thermal free cumulant restricted to an index set; the normalization is the
// ensemble weight restricted to the same set. q = 1 is the weighted diagonal
// average (time-independent); q = 2 is the distinct-pair loop.
inline cplx thermal_free_cumulant(const Ensemble& ens,
                                  const EigenObservable& obs,
                                  const std::vector<int>& index_set,
                                  const std::vector<double>& times, int q) {
  if (q < 1 || q > 2) throw std::invalid_argument("thermal cumulant order must be 1 or 2");
  if (static_cast<int>(times.size()) != q)
    throw std::invalid_argument("need q time arguments");
  if (index_set.empty()) throw std::invalid_argument("empty thermal index set");
  const Spectrum& spec = *ens.spectrum;
  double z = 0.0;
  for (int i : index_set) z += ens.weights[i];
  if (z <= 0.0) throw std::invalid_argument("thermal set carries no weight");
  if (q == 1) {
    double acc = 0.0;
    for (int i : index_set) acc += ens.weights[i] * obs.mat(i, i);
    return acc / z;
  }
  const double dt = times[0] - times[1];
  cplx all = 0.0, diag = 0.0;
  for (int i : index_set) {
    const Eigen::VectorXcd row =
        detail::evolved_row(obs.mat, spec.energies, i, dt);
    cplx inner = 0.0;
    for (int j : index_set) inner += row[j] * obs.mat(j, i);
    all += ens.weights[i] * inner;
    diag += ens.weights[i] * obs.mat(i, i) * obs.mat(i, i);
  }
  return (all - diag) / z;
}

// Full matrix element <a| O(t_1) ... O(t_q) |b>, all intermediate states
// unrestricted; times has length q.
inline cplx scar_correlator(const Spectrum& spec, const EigenObservable& obs,
                            int a, int b, const std::vector<double>& times,
                            int q) {
  if (q < 2 || q > 4) throw std::invalid_argument("scar correlator order must be 2..4");
  if (static_cast<int>(times.size()) != q)
    throw std::invalid_argument("need q time arguments");
  if (a < 0 || b < 0 || a >= spec.dim() || b >= spec.dim())
    throw std::out_of_range("eigenstate index out of range");
  Eigen::VectorXcd u =
      detail::evolved_col(obs.mat, spec.energies, b, times.back());
  for (int k = q - 2; k >= 1; --k)
    u = detail::apply_evolved(obs.mat, spec.energies, times[static_cast<std::size_t>(k)], u);
  const Eigen::VectorXcd row0 =
      detail::evolved_row(obs.mat, spec.energies, a, times[0]);
  return row0.cwiseProduct(u).sum();
}

// Scar-anchored free cumulant k_sc^(q)_ab with q-1 pairwise-distinct thermal
// intermediates drawn from thermal_set; times has length q.
inline cplx scar_free_cumulant(const Spectrum& spec,
                               const EigenObservable& obs,
                               const std::vector<int>& thermal_set, int a,
                               int b, const std::vector<double>& times, int q) {
  if (q < 1 || q > 3) throw std::invalid_argument("scar cumulant order must be 1..3");
  if (static_cast<int>(times.size()) != q)
    throw std::invalid_argument("need q time arguments");
  if (a < 0 || b < 0 || a >= spec.dim() || b >= spec.dim())
    throw std::out_of_range("eigenstate index out of range");
  for (int i : thermal_set)
    if (i == a || i == b)
      throw std::invalid_argument("a or b not scar indices");
  if (q == 1)
    return obs.mat(a, b) *
           std::exp(detail::kI * ((spec.energies[a] - spec.energies[b]) * times[0]));
  const Eigen::VectorXcd u =
      detail::evolved_row(obs.mat, spec.energies, a, times[0]);
  const Eigen::VectorXcd v =
      detail::evolved_col(obs.mat, spec.energies, b, times.back());
  if (q == 2) return detail::ksc2_kernel(u, v, thermal_set);
  return detail::ksc3_kernel(obs.mat, spec.energies, times[1], u, v,
                             thermal_set);
}

// Leading crossing contribution sum_{i != j in T} O_ai O_ij^3 O_jb at equal
// times; real because O is real symmetric in this basis.
inline double crossing_term(const Spectrum& spec, const EigenObservable& obs,
                            const std::vector<int>& thermal_set, int a,
                            int b) {
  if (a < 0 || b < 0 || a >= spec.dim() || b >= spec.dim())
    throw std::out_of_range("eigenstate index out of range");
  for (int i : thermal_set)
    if (i == a || i == b)
      throw std::invalid_argument("a or b not scar indices");
  double all = 0.0, diag = 0.0;
  for (int i : thermal_set) {
    double inner = 0.0;
    for (int j : thermal_set) {
      const double oij = obs.mat(i, j);
      inner += oij * oij * oij * obs.mat(j, b);
    }
    all += obs.mat(a, i) * inner;
    const double oii = obs.mat(i, i);
    diag += obs.mat(a, i) * oii * oii * oii * obs.mat(i, b);
  }
  return all - diag;
}

}  // namespace scarlab

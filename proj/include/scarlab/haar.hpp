#pragma once

// Haar-random unitaries and Monte-Carlo checks of the exact first and second
// moment formulas (Weingarten calculus), plus the induced typicality
// predictions for observable matrix elements. The RNG is a hand-rolled
// splitmix64 + Box-Muller pipeline so identical seeds give identical samples
// on every platform; <random> distributions are implementation-defined.

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace scarlab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1]; never zero, so it is safe inside the log below.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  std::complex<double> complex_normal() {  // unit-variance complex Gaussian
    return {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)};
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Ginibre + QR with the R-diagonal phase fix, which makes the distribution
// exactly Haar rather than merely unitary.
inline Eigen::MatrixXcd sample_haar(int d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("unitary dimension must be >= 2");
  Eigen::MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::VectorXcd r_diag = qr.matrixQR().diagonal();
  for (int j = 0; j < d; ++j) {
    const double mag = std::abs(r_diag[j]);
    q.col(j) *= mag > 0.0 ? r_diag[j] / mag : 1.0;
  }
  return q;
}

struct MomentEntry {
  std::string label;
  std::complex<double> estimate;
  std::complex<double> prediction;
  double std_error = 0.0;  // Monte-Carlo standard error of the estimate
  double sigmas = 0.0;     // |estimate - prediction| / std_error
};

struct MomentReport {
  std::string check;
  int d = 0;
  int n_samples = 0;
  std::uint64_t seed = 0;
  bool qc_identity_exact = true;  // only meaningful for the second moment
  std::vector<MomentEntry> entries;

  double max_sigmas() const {
    double m = 0.0;
    for (const MomentEntry& e : entries) m = std::max(m, e.sigmas);
    return m;
  }
};

namespace detail {

// Accumulates a complex Monte-Carlo mean and its standard error.
class MeanAccumulator {
 public:
  void add(std::complex<double> v) {
    ++n_;
    sum_ += v;
    sum2_re_ += v.real() * v.real();
    sum2_im_ += v.imag() * v.imag();
  }
  std::complex<double> mean() const { return sum_ / static_cast<double>(n_); }
  double std_error() const {
    const double n = static_cast<double>(n_);
    const auto m = mean();
    const double var_re = sum2_re_ / n - m.real() * m.real();
    const double var_im = sum2_im_ / n - m.imag() * m.imag();
    return std::sqrt(std::max(var_re + var_im, 0.0) / n);
  }

 private:
  long n_ = 0;
  std::complex<double> sum_{0.0};
  double sum2_re_ = 0.0;
  double sum2_im_ = 0.0;
};

inline MomentEntry finish_entry(const std::string& label,
                                const MeanAccumulator& acc,
                                std::complex<double> prediction) {
  MomentEntry e;
  e.label = label;
  e.estimate = acc.mean();
  e.prediction = prediction;
  e.std_error = acc.std_error();
  e.sigmas = e.std_error > 0.0 ? std::abs(e.estimate - e.prediction) / e.std_error
                               : (std::abs(e.estimate - e.prediction) > 0.0
                                      ? std::numeric_limits<double>::infinity()
                                      : 0.0);
  return e;
}

}  // namespace detail

// Exact E[ U_{i1 j1} U_{i2 j2} conj(U_{k1 l1}) conj(U_{k2 l2}) ]: a sum over
// the two permutations matching rows and columns, weighted by the 2x2
// Weingarten coefficients 1/(d^2-1) (equal) and -1/(d(d^2-1)) (transposed).
inline std::complex<double> second_moment_prediction(int i1, int i2, int j1,
                                                     int j2, int k1, int k2,
                                                     int l1, int l2, int d) {
  const double wg_same = 1.0 / (static_cast<double>(d) * d - 1.0);
  const double wg_swap = -wg_same / d;
  double value = 0.0;
  const bool row_id = (i1 == k1 && i2 == k2);
  const bool row_sw = (i1 == k2 && i2 == k1);
  const bool col_id = (j1 == l1 && j2 == l2);
  const bool col_sw = (j1 == l2 && j2 == l1);
  if (row_id && col_id) value += wg_same;
  if (row_sw && col_sw) value += wg_same;
  if (row_id && col_sw) value += wg_swap;
  if (row_sw && col_id) value += wg_swap;
  return value;
}

// Q_ab = d^{1+delta_ab} is the Gram matrix of the two permutation operators;
// its inverse is the Weingarten matrix. Q * (d(d^2-1) C) = d(d^2-1) * I holds
// in exact integer arithmetic.
inline bool qc_identity_exact(int d) {
  const std::int64_t dd = d;
  const std::int64_t q[2][2] = {{dd * dd, dd}, {dd, dd * dd}};
  const std::int64_t c_num[2][2] = {{dd, -1}, {-1, dd}};  // scaled by d(d^2-1)
  const std::int64_t scale = dd * (dd * dd - 1);
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) {
      std::int64_t acc = 0;
      for (int m = 0; m < 2; ++m) acc += q[r][m] * c_num[m][s];
      if (acc != (r == s ? scale : 0)) return false;
    }
  return true;
}

// First moment: E[U X U+] must equal (Tr X / d) * I for a fixed test matrix.
inline MomentReport check_first_moment(int d, int n_samples,
                                       std::uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
  Rng rng(seed);
  Eigen::MatrixXcd x(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.complex_normal();
  const std::complex<double> trace_over_d = x.trace() / static_cast<double>(d);

  const std::vector<std::pair<int, int>> tracked = {
      {0, 0}, {1, 1}, {d - 1, d - 1}, {0, 1}, {1, 0}};
  std::vector<detail::MeanAccumulator> acc(tracked.size());
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::MatrixXcd u = sample_haar(d, rng);
    const Eigen::MatrixXcd m = u * x * u.adjoint();
    for (std::size_t e = 0; e < tracked.size(); ++e)
      acc[e].add(m(tracked[e].first, tracked[e].second));
  }

  MomentReport rep;
  rep.check = "first_moment";
  rep.d = d;
  rep.n_samples = n_samples;
  rep.seed = seed;
  for (std::size_t e = 0; e < tracked.size(); ++e) {
    const auto [i, j] = tracked[e];
    const std::complex<double> pred =
        i == j ? trace_over_d : std::complex<double>{0.0};
    rep.entries.push_back(detail::finish_entry(
        "EUXUdag[" + std::to_string(i) + "," + std::to_string(j) + "]",
        acc[e], pred));
  }
  return rep;
}

// Second moment: selected degree-four monomials against the Weingarten
// predictions, plus the exact Q*C = I identity.
inline MomentReport check_second_moment(int d, int n_samples,
                                        std::uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
  struct Monomial {
    std::string label;
    int i1, i2, j1, j2, k1, k2, l1, l2;
  };
  const std::vector<Monomial> monomials = {
      {"|U00|^4", 0, 0, 0, 0, 0, 0, 0, 0},
      {"|U00 U11|^2", 0, 1, 0, 1, 0, 1, 0, 1},
      {"U00 U11 conj(U01 U10)", 0, 1, 0, 1, 0, 1, 1, 0},
      {"|U01 U10|^2", 0, 1, 1, 0, 0, 1, 1, 0},
  };
  Rng rng(seed);
  std::vector<detail::MeanAccumulator> acc(monomials.size());
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::MatrixXcd u = sample_haar(d, rng);
    for (std::size_t m = 0; m < monomials.size(); ++m) {
      const Monomial& mm = monomials[m];
      acc[m].add(u(mm.i1, mm.j1) * u(mm.i2, mm.j2) *
                 std::conj(u(mm.k1, mm.l1)) * std::conj(u(mm.k2, mm.l2)));
    }
  }

  MomentReport rep;
  rep.check = "second_moment";
  rep.d = d;
  rep.n_samples = n_samples;
  rep.seed = seed;
  rep.qc_identity_exact = qc_identity_exact(d);
  for (std::size_t m = 0; m < monomials.size(); ++m) {
    const Monomial& mm = monomials[m];
    rep.entries.push_back(detail::finish_entry(
        mm.label,
        acc[m],
        second_moment_prediction(mm.i1, mm.i2, mm.j1, mm.j2, mm.k1, mm.k2,
                                 mm.l1, mm.l2, d)));
  }
  return rep;
}

// Typicality of eigenstate matrix elements under a Haar change of basis:
//   q = 1: E[<a|O U e0><e0|U+ O|b>]            = <a|O^2|b> / d
//   q = 2: E[<a|O U e0><e0|U+ O U e1><e1|U+ O|b>]
//        = (<a|O^3|b> - <a|O^2|b> Tr O / d) / (d^2 - 1)
// for a fixed real symmetric O and fixed unit vectors a, b.
inline MomentReport check_typicality(int q, int d, int n_samples,
                                     std::uint64_t seed) {
  if (q != 1 && q != 2)
    throw std::invalid_argument("typicality order must be 1 or 2");
  if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
  Rng rng(seed);
  Eigen::MatrixXd o(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = rng.normal();
      o(i, j) = v;
      o(j, i) = v;
    }
  Eigen::VectorXd a(d), b(d);
  for (int i = 0; i < d; ++i) a[i] = rng.normal();
  for (int i = 0; i < d; ++i) b[i] = rng.normal();
  a.normalize();
  b.normalize();

  const Eigen::VectorXd oa = o * a;
  const Eigen::VectorXd ob = o * b;
  std::complex<double> pred;
  if (q == 1) {
    pred = oa.dot(ob) / static_cast<double>(d);
  } else {
    const double o3 = oa.dot(o * ob);
    const double o2 = oa.dot(ob);
    pred = (o3 - o2 * o.trace() / d) /
           (static_cast<double>(d) * d - 1.0);
  }

  detail::MeanAccumulator acc;
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::MatrixXcd u = sample_haar(d, rng);
    const Eigen::VectorXcd u0 = u.col(0);
    if (q == 1) {
      acc.add(oa.cast<std::complex<double>>().dot(u0) *
              u0.dot(ob.cast<std::complex<double>>()));
    } else {
      const Eigen::VectorXcd u1 = u.col(1);
      const std::complex<double> left =
          oa.cast<std::complex<double>>().dot(u0);
      const std::complex<double> mid =
          u0.dot(o.cast<std::complex<double>>() * u1);
      const std::complex<double> right =
          u1.dot(ob.cast<std::complex<double>>());
      acc.add(left * mid * right);
    }
  }

  MomentReport rep;
  rep.check = "typicality_q" + std::to_string(q);
  rep.d = d;
  rep.n_samples = n_samples;
  rep.seed = seed;
  rep.entries.push_back(detail::finish_entry("d=" + std::to_string(d), acc, pred));
  return rep;
}

// One report per dimension, shared seed offsets so runs are reproducible.
inline std::vector<MomentReport> check_typicality_scaling(
    int q, const std::vector<int>& dims, int n_samples, std::uint64_t seed) {
  std::vector<MomentReport> reps;
  std::uint64_t offset = 0;
  for (int d : dims) reps.push_back(check_typicality(q, d, n_samples, seed + ++offset));
  return reps;
}

}  // namespace scarlab

#pragma once

// Decomposition of scar-anchored correlators <a| O(t_1) ... O(t_q) |b> into
// diagram classes indexed by non-crossing partitions of the operator slots.
// Outer blocks chain scar-to-scar free cumulants; nested blocks are thermal
// loops. Factorized mode replaces each loop by a standalone canonical average
// at the pair temperature beta_ab; unfactorized mode keeps loops anchored on
// the thermal spine state with all per-arc indices pairwise distinct, which
// resums to the exact correlator for q <= 4.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scarlab/cumulants.hpp"
#include "scarlab/ensemble.hpp"
#include "scarlab/io.hpp"
#include "scarlab/partitions.hpp"
#include "scarlab/scars.hpp"
#include "scarlab/spectral.hpp"

namespace scarlab {

enum class DecompositionMode { kFactorized, kUnfactorized };

struct DiagramLoop {
  std::vector<int> ops;  // operator slots of the nested block, ascending
  int host_run = 0;      // gap of the outer block the loop hangs in
};

struct DiagramArc {
  std::vector<int> ops;  // operator slots of the outer block, ascending
  std::vector<DiagramLoop> loops;
};

struct DiagramShape {
  SetPartition partition;
  std::vector<DiagramArc> arcs;  // ordered by first operator
  std::string label;
};

namespace detail {

inline std::string ops_tag(const std::vector<int>& ops) {
  std::string s = "[";
  for (int p : ops) s += std::to_string(p + 1);
  return s + "]";
}

inline std::string shape_label(const std::vector<DiagramArc>& arcs) {
  std::string label;
  for (const DiagramArc& arc : arcs) {
    if (!label.empty()) label += '*';
    label += "ksc" + std::to_string(arc.ops.size()) + ops_tag(arc.ops);
    for (const DiagramLoop& loop : arc.loops)
      label += "*kth" + std::to_string(loop.ops.size()) + ops_tag(loop.ops);
  }
  return label;
}

}  // namespace detail

// Classifies every non-crossing partition of q operator slots into its arc
// and loop structure. Only nesting depth one can occur for q <= 4.
inline std::vector<DiagramShape> diagram_shapes(int q) {
  std::vector<DiagramShape> shapes;
  for (SetPartition part : noncrossing_partitions(q)) {
    const int nb = static_cast<int>(part.size());
    std::vector<int> depth(static_cast<std::size_t>(nb), 0);
    for (int b = 0; b < nb; ++b)
      for (int c = 0; c < nb; ++c)
        if (c != b && part[c].front() < part[b].front() &&
            part[b].back() < part[c].back())
          ++depth[static_cast<std::size_t>(b)];

    DiagramShape shape;
    shape.partition = part;
    for (int b = 0; b < nb; ++b) {
      if (depth[static_cast<std::size_t>(b)] != 0) continue;
      DiagramArc arc;
      arc.ops = part[static_cast<std::size_t>(b)];
      for (int l = 0; l < nb; ++l) {
        if (depth[static_cast<std::size_t>(l)] == 0) continue;
        if (depth[static_cast<std::size_t>(l)] > 1)
          throw std::logic_error("nested loops deeper than one unsupported");
        const auto& lops = part[static_cast<std::size_t>(l)];
        if (lops.front() < arc.ops.front() || lops.back() > arc.ops.back())
          continue;  // belongs to another arc
        DiagramLoop loop;
        loop.ops = lops;
        loop.host_run = -1;
        for (std::size_t r = 0; r + 1 < arc.ops.size(); ++r)
          if (arc.ops[r] < lops.front() && lops.back() < arc.ops[r + 1])
            loop.host_run = static_cast<int>(r);
        if (loop.host_run < 0)
          throw std::logic_error("loop does not sit in a gap of its arc");
        arc.loops.push_back(std::move(loop));
      }
      shape.arcs.push_back(std::move(arc));
    }
    std::sort(shape.arcs.begin(), shape.arcs.end(),
              [](const DiagramArc& x, const DiagramArc& y) {
                return x.ops.front() < y.ops.front();
              });
    shape.label = detail::shape_label(shape.arcs);
    shapes.push_back(std::move(shape));
  }
  return shapes;
}

namespace detail {

// Shared inputs for diagram evaluation at one scar pair.
struct DiagramContext {
  const Spectrum* spec = nullptr;
  const EigenObservable* obs = nullptr;
  std::vector<int> scars;    // scar chain states
  std::vector<int> thermal;  // everything that is not a scar
  std::vector<int> all;      // 0 .. dim-1
  Ensemble ens;              // canonical at beta_ab
  int a = 0;
  int b = 0;
};

// k_sc^(m) between anchors x, y for m in 1..4 (m-1 distinct intermediates).
inline cplx ksc_any(const DiagramContext& ctx, int x, int y,
                    const std::vector<double>& times) {
  const int m = static_cast<int>(times.size());
  if (m <= 3)
    return scar_free_cumulant(*ctx.spec, *ctx.obs, ctx.thermal, x, y, times, m);
  const Eigen::VectorXcd u =
      evolved_row(ctx.obs->mat, ctx.spec->energies, x, times[0]);
  const Eigen::VectorXcd v =
      evolved_col(ctx.obs->mat, ctx.spec->energies, y, times[3]);
  return ksc4_kernel(ctx.obs->mat, ctx.spec->energies, times[1], times[2], u,
                     v, ctx.thermal);
}

// Exact (unfactorized) arc value with loops anchored on the spine state and
// all per-arc indices pairwise distinct. Covers every shape arising at
// q <= 4; anything else is rejected.
inline cplx arc_exact(const DiagramContext& ctx, const DiagramArc& arc, int x,
                      int y, const std::vector<double>& tv) {
  const Eigen::MatrixXd& o = ctx.obs->mat;
  const Eigen::VectorXd& en = ctx.spec->energies;
  std::vector<double> arc_times;
  for (int p : arc.ops) arc_times.push_back(tv[static_cast<std::size_t>(p)]);
  if (arc.loops.empty()) return ksc_any(ctx, x, y, arc_times);

  const std::size_t m = arc.ops.size();
  const Eigen::VectorXcd u = evolved_row(o, en, x, arc_times.front());
  const Eigen::VectorXcd v = evolved_col(o, en, y, arc_times.back());

  if (m == 2 && arc.loops.size() == 1 && arc.loops[0].ops.size() == 1) {
    // sum_{i in T} O(ta)_xi O_ii O(tb)_iy; the diagonal loop phase cancels.
    cplx acc = 0.0;
    for (int i : ctx.thermal) acc += u[i] * o(i, i) * v[i];
    return acc;
  }
  if (m == 2 && arc.loops.size() == 1 && arc.loops[0].ops.size() == 2) {
    // Two-node loop at the spine state: sum_{i in T} u_i v_i
    // sum_{j in T, j != i} O(l1)_ij O(l2)_ji.
    const double l1 = tv[static_cast<std::size_t>(arc.loops[0].ops[0])];
    const double l2 = tv[static_cast<std::size_t>(arc.loops[0].ops[1])];
    const Eigen::VectorXcd p1 = phase_vector(en, l1);
    const Eigen::VectorXcd p2 = phase_vector(en, l2);
    cplx acc = 0.0;
    for (int i : ctx.thermal) {
      cplx loop = 0.0;
      for (int j : ctx.thermal)
        if (j != i)
          loop += o(i, j) * p1[i] * std::conj(p1[j]) * o(j, i) * p2[j] *
                  std::conj(p2[i]);
      acc += u[i] * v[i] * loop;
    }
    return acc;
  }
  if (m == 2 && arc.loops.size() == 2) {
    // Two single-node loops on the same spine state; both phases cancel.
    cplx acc = 0.0;
    for (int i : ctx.thermal) acc += u[i] * o(i, i) * o(i, i) * v[i];
    return acc;
  }
  if (m == 3 && arc.loops.size() == 1 && arc.loops[0].ops.size() == 1) {
    // sum_{i != k in T} of u_i O_ii A_ik v_k (loop on the first gap) or
    // u_i A_ik O_kk v_k (loop on the second gap), A = O(middle op time).
    const double t_mid = arc_times[1];
    cplx all = 0.0, diag = 0.0;
    if (arc.loops[0].host_run == 0) {
      Eigen::VectorXcd d = Eigen::VectorXcd::Zero(u.size());
      for (int i : ctx.thermal) d[i] = u[i] * o(i, i);
      const Eigen::VectorXcd av = apply_evolved(o, en, t_mid, masked(v, ctx.thermal));
      for (int i : ctx.thermal) {
        all += d[i] * av[i];
        diag += d[i] * o(i, i) * v[i];
      }
    } else {
      Eigen::VectorXcd d = Eigen::VectorXcd::Zero(v.size());
      for (int k : ctx.thermal) d[k] = o(k, k) * v[k];
      const Eigen::VectorXcd au = apply_evolved(o, en, -t_mid, masked(u, ctx.thermal));
      for (int k : ctx.thermal) {
        all += au[k] * d[k];
        diag += u[k] * o(k, k) * d[k];
      }
    }
    return all - diag;
  }
  throw std::logic_error("unsupported arc shape in exact evaluation");
}

inline cplx arc_value(const DiagramContext& ctx, const DiagramArc& arc, int x,
                      int y, const std::vector<double>& tv,
                      DecompositionMode mode) {
  if (mode == DecompositionMode::kUnfactorized)
    return arc_exact(ctx, arc, x, y, tv);
  std::vector<double> arc_times;
  for (int p : arc.ops) arc_times.push_back(tv[static_cast<std::size_t>(p)]);
  return ksc_any(ctx, x, y, arc_times);
}

// One diagram class at one time vector: dynamic programming over the scar
// chain a -> c_1 -> ... -> b, times the thermal loop factors in factorized
// mode (loops are already inside the arc kernels in unfactorized mode).
inline cplx eval_diagram(const DiagramContext& ctx, const DiagramShape& shape,
                         const std::vector<double>& tv,
                         DecompositionMode mode) {
  cplx loop_factor = 1.0;
  if (mode == DecompositionMode::kFactorized) {
    for (const DiagramArc& arc : shape.arcs)
      for (const DiagramLoop& loop : arc.loops) {
        std::vector<double> lt;
        for (int p : loop.ops) lt.push_back(tv[static_cast<std::size_t>(p)]);
        loop_factor *= thermal_free_cumulant(ctx.ens, *ctx.obs, ctx.all, lt,
                                             static_cast<int>(lt.size()));
      }
  }

  const std::size_t n_arcs = shape.arcs.size();
  if (n_arcs == 1)
    return loop_factor * arc_value(ctx, shape.arcs[0], ctx.a, ctx.b, tv, mode);

  // amp[s] = value of the chain prefix ending at scar state scars[s]
  std::vector<cplx> amp(ctx.scars.size());
  for (std::size_t s = 0; s < ctx.scars.size(); ++s)
    amp[s] = arc_value(ctx, shape.arcs[0], ctx.a, ctx.scars[s], tv, mode);
  for (std::size_t r = 1; r + 1 < n_arcs; ++r) {
    std::vector<cplx> next(ctx.scars.size(), cplx{0.0});
    for (std::size_t s2 = 0; s2 < ctx.scars.size(); ++s2)
      for (std::size_t s1 = 0; s1 < ctx.scars.size(); ++s1)
        next[s2] += amp[s1] * arc_value(ctx, shape.arcs[r], ctx.scars[s1],
                                        ctx.scars[s2], tv, mode);
    amp = std::move(next);
  }
  cplx total = 0.0;
  for (std::size_t s = 0; s < ctx.scars.size(); ++s)
    total += amp[s] *
             arc_value(ctx, shape.arcs.back(), ctx.scars[s], ctx.b, tv, mode);
  return loop_factor * total;
}

inline DiagramContext make_context(const Spectrum& spec,
                                   const EigenObservable& obs,
                                   const ScarSet& set, int a, int b) {
  DiagramContext ctx;
  ctx.spec = &spec;
  ctx.obs = &obs;
  ctx.scars = set.scar_indices;
  for (int i = 0; i < spec.dim(); ++i) {
    ctx.all.push_back(i);
    if (!std::binary_search(set.scar_indices.begin(), set.scar_indices.end(), i))
      ctx.thermal.push_back(i);
  }
  if (!std::binary_search(set.scar_indices.begin(), set.scar_indices.end(), a) ||
      !std::binary_search(set.scar_indices.begin(), set.scar_indices.end(), b))
    throw std::invalid_argument("a or b not scar indices");
  ctx.a = a;
  ctx.b = b;
  const ScarPair pair = make_scar_pair(spec, a, b, spec.n_sites);
  ctx.ens = make_canonical(spec, pair.beta);
  return ctx;
}

}  // namespace detail

struct DiagramTerm {
  SetPartition partition;
  std::string label;
  std::vector<cplx> values;  // one entry per grid point
};

struct DecompositionReport {
  int q = 0;
  int a = 0;
  int b = 0;
  double beta_ab = 0.0;
  DecompositionMode mode = DecompositionMode::kFactorized;
  std::vector<double> times;    // sweep grid
  std::vector<double> pattern;  // slot k evaluated at pattern[k] * t
  std::vector<DiagramTerm> terms;
  std::vector<cplx> sum;
  std::vector<cplx> exact;  // scar_correlator on the same grid
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;  // max_t |sum - exact| / max_t |exact|
};

// Sweeps t over `grid`, evaluating every diagram class at the time vector
// t_k = pattern[k] * t. The insertion set is the full complement of the
// selected scars; anything smaller breaks the unfactorized resummation.
inline DecompositionReport decompose_scar_correlator(
    const Spectrum& spec, const EigenObservable& obs, const ScarSet& set,
    int a, int b, const std::vector<double>& grid,
    const std::vector<double>& pattern, int q, DecompositionMode mode) {
  if (q < 2 || q > 4)
    throw std::invalid_argument("decomposition order must be 2..4");
  if (static_cast<int>(pattern.size()) != q)
    throw std::invalid_argument("pattern needs one coefficient per slot");
  if (grid.empty()) throw std::invalid_argument("empty time grid");

  detail::DiagramContext ctx = detail::make_context(spec, obs, set, a, b);
  const std::vector<DiagramShape> shapes = diagram_shapes(q);

  DecompositionReport rep;
  rep.q = q;
  rep.a = a;
  rep.b = b;
  rep.beta_ab = ctx.ens.beta;
  rep.mode = mode;
  rep.times = grid;
  rep.pattern = pattern;
  for (const DiagramShape& shape : shapes)
    rep.terms.push_back(DiagramTerm{shape.partition, shape.label, {}});
  rep.sum.assign(grid.size(), cplx{0.0});
  rep.exact.resize(grid.size());

  std::vector<double> tv(static_cast<std::size_t>(q));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (int k = 0; k < q; ++k)
      tv[static_cast<std::size_t>(k)] =
          pattern[static_cast<std::size_t>(k)] * grid[g];
    for (std::size_t d = 0; d < shapes.size(); ++d) {
      const cplx val = detail::eval_diagram(ctx, shapes[d], tv, mode);
      rep.terms[d].values.push_back(val);
      rep.sum[g] += val;
    }
    rep.exact[g] = scar_correlator(spec, obs, a, b, tv, q);
  }

  double max_exact = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    rep.max_abs_error =
        std::max(rep.max_abs_error, std::abs(rep.sum[g] - rep.exact[g]));
    max_exact = std::max(max_exact, std::abs(rep.exact[g]));
  }
  rep.max_rel_error =
      max_exact > 0.0 ? rep.max_abs_error / max_exact
                      : (rep.max_abs_error > 0.0
                             ? std::numeric_limits<double>::infinity()
                             : 0.0);
  return rep;
}

struct FactorizationEntry {
  int a = 0;
  int b = 0;
  double e_a = 0.0;
  double e_b = 0.0;
  double beta = 0.0;
  double lhs = 0.0;  // sum_{i in T} O_ai O_ii O_ib
  double rhs = 0.0;  // (sum_{i in T} O_ai O_ib) * <O>_(beta_ab or window)
  double rel_error = 0.0;
};

struct FactorizationReport {
  EnsembleKind kind = EnsembleKind::kCanonical;
  std::vector<FactorizationEntry> entries;  // all scar pairs, row-major
  double frobenius_rel_error = 0.0;
};

// Static factorization check over every scar pair: does the one-node thermal
// insertion factorize into (pair overlap) x (thermal average of O)? The
// thermal set is the window-restricted ScarSet set; the canonical average is
// unrestricted while the microcanonical one uses a window of
// micro_window_fraction x spectral span around the pair mean energy.
inline FactorizationReport factorization_test(const Spectrum& spec,
                                              const EigenObservable& obs,
                                              const ScarSet& set,
                                              EnsembleKind kind,
                                              double micro_window_fraction =
                                                  0.1) {
  if (set.scar_indices.empty())
    throw std::invalid_argument("scar set is empty");
  if (set.thermal_indices.empty())
    throw std::invalid_argument("thermal set is empty");

  FactorizationReport rep;
  rep.kind = kind;
  const double span = spec.energies[spec.dim() - 1] - spec.energies[0];
  double num2 = 0.0, den2 = 0.0;
  for (int a : set.scar_indices)
    for (int b : set.scar_indices) {
      FactorizationEntry ent;
      ent.a = a;
      ent.b = b;
      ent.e_a = spec.energies[a];
      ent.e_b = spec.energies[b];
      double lhs = 0.0, overlap = 0.0;
      for (int i : set.thermal_indices) {
        lhs += obs.mat(a, i) * obs.mat(i, i) * obs.mat(i, b);
        overlap += obs.mat(a, i) * obs.mat(i, b);
      }
      double avg = 0.0;
      if (kind == EnsembleKind::kCanonical) {
        const ScarPair pair = make_scar_pair(spec, a, b, spec.n_sites);
        ent.beta = pair.beta;
        const Ensemble ens = make_canonical(spec, pair.beta);
        avg = thermal_correlator(ens, obs, {}, 1).real();
      } else {
        const double center = (ent.e_a + ent.e_b) / 2.0;
        const Ensemble ens =
            make_microcanonical(spec, center, micro_window_fraction * span);
        avg = (ens.weights.array() * obs.mat.diagonal().array()).sum() / ens.z;
      }
      ent.lhs = lhs;
      ent.rhs = overlap * avg;
      ent.rel_error = std::abs(ent.lhs - ent.rhs) /
                      (std::abs(ent.lhs) > 0.0 ? std::abs(ent.lhs) : 1.0);
      num2 += (ent.lhs - ent.rhs) * (ent.lhs - ent.rhs);
      den2 += ent.lhs * ent.lhs;
      rep.entries.push_back(ent);
    }
  rep.frobenius_rel_error = den2 > 0.0 ? std::sqrt(num2 / den2) : 0.0;
  return rep;
}

inline void write_factorization_csv(std::ostream& os,
                                    const FactorizationReport& rep) {
  os << "a,b,e_a,e_b,beta_ab,lhs,rhs,rel_error\n";
  for (const FactorizationEntry& e : rep.entries) {
    os << e.a << ',' << e.b << ',';
    put_csv(os, e.e_a) << ',';
    put_csv(os, e.e_b) << ',';
    put_csv(os, e.beta) << ',';
    put_csv(os, e.lhs) << ',';
    put_csv(os, e.rhs) << ',';
    put_csv(os, e.rel_error) << '\n';
  }
  os << "# frobenius_rel_error,";
  put_csv(os, rep.frobenius_rel_error) << '\n';
}

// Grid CSV: per-term real/imaginary columns, the term sum, the exact
// correlator and the pointwise error; `variant` appends a second column set
// (used for the unfactorized identity companion of a factorized report).
inline void write_decomposition_csv(std::ostream& os,
                                    const DecompositionReport& rep,
                                    const DecompositionReport* variant =
                                        nullptr) {
  os << 't';
  for (const DiagramTerm& term : rep.terms)
    os << ",re_" << term.label << ",im_" << term.label;
  os << ",re_sum,im_sum,re_exact,im_exact,abs_error";
  if (variant) {
    for (const DiagramTerm& term : variant->terms)
      os << ",re_u_" << term.label << ",im_u_" << term.label;
    os << ",re_sum_unfact,im_sum_unfact,abs_error_unfact";
  }
  os << '\n';
  for (std::size_t g = 0; g < rep.times.size(); ++g) {
    put_csv(os, rep.times[g]);
    for (const DiagramTerm& term : rep.terms) {
      os << ',';
      put_csv(os, term.values[g].real()) << ',';
      put_csv(os, term.values[g].imag());
    }
    os << ',';
    put_csv(os, rep.sum[g].real()) << ',';
    put_csv(os, rep.sum[g].imag()) << ',';
    put_csv(os, rep.exact[g].real()) << ',';
    put_csv(os, rep.exact[g].imag()) << ',';
    put_csv(os, std::abs(rep.sum[g] - rep.exact[g]));
    if (variant) {
      for (const DiagramTerm& term : variant->terms) {
        os << ',';
        put_csv(os, term.values[g].real()) << ',';
        put_csv(os, term.values[g].imag());
      }
      os << ',';
      put_csv(os, variant->sum[g].real()) << ',';
      put_csv(os, variant->sum[g].imag()) << ',';
      put_csv(os, std::abs(variant->sum[g] - variant->exact[g]));
    }
    os << '\n';
  }
}

}  // namespace scarlab

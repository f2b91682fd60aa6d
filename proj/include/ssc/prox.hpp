#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ssc/types.hpp"

namespace ssc {

/// Scalar shrinkage: sign(v) * max(|v| - gamma, 0).
inline double soft_threshold(double v, double gamma) {
  const double shrunk = std::abs(v) - gamma;
  if (shrunk <= 0.0) return 0.0;
  return v < 0.0 ? -shrunk : shrunk;
}

namespace detail {
inline void check_gamma(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("prox: gamma must be >= 0");
}
inline void check_budget(Index k, Index m) {
  if (k < 1 || k > m) throw std::invalid_argument("prox: need 1 <= k <= m");
}
}  // namespace detail

/// Elementwise shrinkage; minimizer of 0.5||c - d||^2 + gamma ||c||_1.
inline Vector prox_l1(const Vector& d, double gamma) {
  detail::check_gamma(gamma);
  Vector c(d.size());
  for (Index i = 0; i < d.size(); ++i) c[i] = soft_threshold(d[i], gamma);
  return c;
}

/// Euclidean projection onto the hyperplane {c : c^T 1 = 1}.
inline Vector project_hyperplane(const Vector& d) {
  const Index m = d.size();
  if (m < 1) throw std::invalid_argument("project_hyperplane: empty input");
  const double shift = (d.sum() - 1.0) / static_cast<double>(m);
  return d.array() - shift;
}

/// Minimizer of 0.5||c - d||^2 + gamma ||c||_1 subject to c^T 1 = 1.
///
/// The KKT system reduces to the scalar root-finding problem
/// f(beta) = 1^T shrink_gamma(d - beta 1) - 1 = 0, with f piecewise linear
/// and monotone non-increasing. Sort the 2m breakpoints d_i +- gamma
/// (descending), bisect over breakpoint indices to bracket the root, read the
/// support off the interval midpoint, and solve for beta in closed form on
/// that support.
inline Vector prox_l1_affine(const Vector& d, double gamma) {
  const Index m = d.size();
  if (m < 1) throw std::invalid_argument("prox_l1_affine: empty input");
  if (!d.allFinite()) throw std::invalid_argument("prox_l1_affine: non-finite input");
  detail::check_gamma(gamma);
  // gamma = 0: the breakpoints collapse pairwise and the problem reduces to
  // the plain hyperplane projection.
  if (gamma == 0.0) return project_hyperplane(d);

  std::vector<double> brk(2 * static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    brk[2 * i] = d[i] - gamma;
    brk[2 * i + 1] = d[i] + gamma;
  }
  std::sort(brk.begin(), brk.end(), std::greater<double>());

  const auto shrunk_sum = [&](double beta) {
    double s = 0.0;
    for (Index i = 0; i < m; ++i) s += soft_threshold(d[i] - beta, gamma);
    return s;
  };

  // Conceptual indices 1..2m map to brk[j-1]; index 0 is the +inf sentinel,
  // 2m+1 the -inf sentinel. Invariant: shrunk_sum(b[lo]) <= 1 < shrunk_sum(b[hi]).
  Index lo = 0;
  Index hi = 2 * m + 1;
  while (hi - lo > 1) {
    const Index j = (lo + hi) / 2;
    if (shrunk_sum(brk[j - 1]) > 1.0) {
      hi = j;
    } else {
      lo = j;
    }
  }

  // The root lies in [b[hi], b[lo]] in value space; probe the midpoint to
  // identify the support (an endpoint may be a sentinel).
  const double hi_val = (lo == 0) ? brk.front() + 1.0 : brk[lo - 1];
  const double lo_val = (hi == 2 * m + 1) ? brk.back() - 1.0 : brk[hi - 1];
  const double beta_probe = 0.5 * (lo_val + hi_val);

  // |d_i - beta| = gamma shrinks to exactly zero and is excluded.
  Index support_size = 0;
  double support_sum = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double ci = soft_threshold(d[i] - beta_probe, gamma);
    if (ci != 0.0) {
      ++support_size;
      support_sum += d[i] - gamma * (ci > 0.0 ? 1.0 : -1.0);
    }
  }
  // The bracket invariant guarantees a nonempty support.
  const double beta_star = (support_sum - 1.0) / static_cast<double>(support_size);

  Vector c(m);
  for (Index i = 0; i < m; ++i) c[i] = soft_threshold(d[i] - beta_star, gamma);
  return c;
}

/// Euclidean projection onto {c : ||c||_0 <= k}: keep the k entries of
/// largest magnitude, zero the rest. Ties at the k-th magnitude keep the
/// lowest index.
inline Vector project_top_k(const Vector& d, Index k) {
  const Index m = d.size();
  detail::check_budget(k, m);
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                   [&](Index a, Index b) {
                     const double fa = std::abs(d[a]);
                     const double fb = std::abs(d[b]);
                     if (fa != fb) return fa > fb;
                     return a < b;
                   });
  Vector c = Vector::Zero(m);
  for (Index t = 0; t < k; ++t) c[order[t]] = d[order[t]];
  return c;
}

/// Greedy selector and hyperplane projector: exact solution of
///   argmin 0.5||c - d||^2  s.t.  ||c||_0 <= k,  c^T 1 = 1.
///
/// Seeds the support with the (signed) largest entry, grows it greedily
/// against the running hyperplane shift, and finishes with the hyperplane
/// projection restricted to the chosen support. All argmax ties keep the
/// lowest index.
inline Vector gshp(const Vector& d, Index k) {
  const Index m = d.size();
  detail::check_budget(k, m);

  std::vector<char> picked(static_cast<std::size_t>(m), 0);
  Index seed = 0;
  for (Index i = 1; i < m; ++i) {
    if (d[i] > d[seed]) seed = i;
  }
  picked[seed] = 1;
  double support_sum = d[seed];

  std::vector<Index> support;
  support.reserve(static_cast<std::size_t>(k));
  support.push_back(seed);

  // When adding the l-th element the score is |d_i - (sum over the current
  // l-1 picks - 1)/(l-1)|: the distance to where the hyperplane projection
  // would currently place an off-support entry.
  for (Index l = 2; l <= k; ++l) {
    const double shift = (support_sum - 1.0) / static_cast<double>(l - 1);
    Index best = 0;
    while (picked[best]) ++best;  // k <= m guarantees an unpicked index
    double best_score = std::abs(d[best] - shift);
    for (Index i = best + 1; i < m; ++i) {
      if (picked[i]) continue;
      const double score = std::abs(d[i] - shift);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    picked[best] = 1;
    support_sum += d[best];
    support.push_back(best);
  }

  const double shift = (support_sum - 1.0) / static_cast<double>(k);
  Vector c = Vector::Zero(m);
  for (Index i : support) c[i] = d[i] - shift;
  return c;
}

/// Prox of one coefficient column with the self-representation entry pinned
/// to zero: removes entry j, applies the model's operator on the remaining
/// m = n-1 entries, and reinserts an exact 0 at position j.
inline Vector prox_column(const Vector& d_full, Index j, double gamma, Index k,
                          ModelKind kind) {
  const Index n = d_full.size();
  if (j < 0 || j >= n) throw std::invalid_argument("prox_column: index out of range");
  Vector d(n - 1);
  d.head(j) = d_full.head(j);
  d.tail(n - 1 - j) = d_full.tail(n - 1 - j);

  Vector c;
  switch (kind) {
    case ModelKind::L1Linear: c = prox_l1(d, gamma); break;
    case ModelKind::L1Affine: c = prox_l1_affine(d, gamma); break;
    case ModelKind::L0Linear: c = project_top_k(d, k); break;
    case ModelKind::L0Affine: c = gshp(d, k); break;
  }

  Vector out(n);
  out.head(j) = c.head(j);
  out[j] = 0.0;
  out.tail(n - 1 - j) = c.tail(n - 1 - j);
  return out;
}

}  // namespace ssc

#pragma once

// Independent reference implementations used to check the library. These are
// deliberately written in the most literal way possible (double loops, full
// materialization, no shared code with the implementations under test).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// ---------------------------------------------------------------------------
// Pseudo-F by the book: centroids via explicit loops over a points-as-vectors
// representation.
struct PseudoFParts {
  double ss_between = 0.0;
  double ss_within = 0.0;
  double f = 0.0;
};

inline PseudoFParts pseudo_f_bruteforce(
    const std::vector<std::vector<double>>& points,
    const std::vector<int>& labels) {
  const std::size_t n = points.size();
  const std::size_t dim = points[0].size();
  int a = 0;
  for (int l : labels) a = std::max(a, l + 1);

  std::vector<std::vector<double>> group_mean(
      static_cast<std::size_t>(a), std::vector<double>(dim, 0.0));
  std::vector<double> group_n(static_cast<std::size_t>(a), 0.0);
  std::vector<double> grand(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(labels[i]);
    group_n[g] += 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      group_mean[g][d] += points[i][d];
      grand[d] += points[i][d];
    }
  }
  for (std::size_t g = 0; g < static_cast<std::size_t>(a); ++g)
    for (std::size_t d = 0; d < dim; ++d) group_mean[g][d] /= group_n[g];
  for (std::size_t d = 0; d < dim; ++d) grand[d] /= static_cast<double>(n);

  PseudoFParts r;
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(labels[i]);
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = points[i][d] - group_mean[g][d];
      r.ss_within += diff * diff;
    }
  }
  for (std::size_t g = 0; g < static_cast<std::size_t>(a); ++g)
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = group_mean[g][d] - grand[d];
      r.ss_between += group_n[g] * diff * diff;
    }
  const double df_b = a - 1.0;
  const double df_w = static_cast<double>(n) - a;
  r.f = (r.ss_between / df_b) / (r.ss_within / df_w);
  return r;
}

// Full enumeration permutation p-value: every distinct label sequence,
// counting F_perm >= F_obs (the observed sequence counts itself).
inline double permanova_exact_p_bruteforce(
    const std::vector<std::vector<double>>& points,
    const std::vector<int>& labels) {
  const double f_obs = pseudo_f_bruteforce(points, labels).f;
  std::vector<int> perm = labels;
  std::sort(perm.begin(), perm.end());
  std::size_t total = 0;
  std::size_t count = 0;
  do {
    ++total;
    if (pseudo_f_bruteforce(points, perm).f >= f_obs) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(count) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Two-way (rows x columns) ANOVA decomposition with explicit loops; the basis
// for both the ICC mean squares and the repeated-measures table.
struct TwoWayParts {
  double ss_rows = 0.0;
  double ss_cols = 0.0;
  double ss_error = 0.0;
  double ms_rows = 0.0;
  double ms_cols = 0.0;
  double ms_error = 0.0;
};

inline TwoWayParts two_way_decomposition(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  const auto k = m.cols();
  double grand = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) grand += m(i, j);
  grand /= static_cast<double>(n * k);

  std::vector<double> row_mean(static_cast<std::size_t>(n), 0.0);
  std::vector<double> col_mean(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      row_mean[static_cast<std::size_t>(i)] += m(i, j) / static_cast<double>(k);
      col_mean[static_cast<std::size_t>(j)] += m(i, j) / static_cast<double>(n);
    }

  TwoWayParts r;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = row_mean[static_cast<std::size_t>(i)] - grand;
    r.ss_rows += static_cast<double>(k) * d * d;
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    const double d = col_mean[static_cast<std::size_t>(j)] - grand;
    r.ss_cols += static_cast<double>(n) * d * d;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double resid = m(i, j) - row_mean[static_cast<std::size_t>(i)] -
                           col_mean[static_cast<std::size_t>(j)] + grand;
      r.ss_error += resid * resid;
    }
  r.ms_rows = r.ss_rows / static_cast<double>(n - 1);
  r.ms_cols = r.ss_cols / static_cast<double>(k - 1);
  r.ms_error = r.ss_error / static_cast<double>((n - 1) * (k - 1));
  return r;
}

// ---------------------------------------------------------------------------
// Greenhouse-Geisser epsilon via an independently constructed orthonormal
// contrast basis (Gram-Schmidt over shifted delta contrasts rather than
// Helmert rows); epsilon and Mauchly W are invariant to the basis choice.
inline Eigen::MatrixXd gram_schmidt_contrasts(int k) {
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(k - 1, k);
  for (int i = 0; i < k - 1; ++i) {
    raw(i, i) = 1.0;
    raw(i, i + 1) = -1.0; // successive-difference contrasts
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k - 1, k);
  for (int i = 0; i < k - 1; ++i) {
    Eigen::VectorXd v = raw.row(i).transpose();
    for (int j = 0; j < i; ++j)
      v -= q.row(j).dot(raw.row(i)) * q.row(j).transpose();
    q.row(i) = v.transpose() / v.norm();
  }
  return q;
}

struct SphericityParts {
  double w = 1.0;
  double epsilon = 1.0;
};

inline SphericityParts sphericity_bruteforce(const Eigen::MatrixXd& data) {
  const auto n = data.rows();
  const int k = static_cast<int>(data.cols());
  // covariance via explicit loops
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i) mean += data.row(i).transpose();
  mean /= static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd d = data.row(i).transpose() - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n - 1);

  const Eigen::MatrixXd c = gram_schmidt_contrasts(k);
  const Eigen::MatrixXd sc = c * cov * c.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sc);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);

  SphericityParts r;
  double det = 1.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) det *= lam(i);
  const double tr = lam.sum();
  const double p = static_cast<double>(k - 1);
  r.w = det / std::pow(tr / p, p);
  r.epsilon = tr * tr / (p * lam.squaredNorm());
  return r;
}

// ---------------------------------------------------------------------------
// Quadratic-form linear attention: materializes the full Tq x Tk kernel
// weight matrix.
inline Eigen::MatrixXd linear_attention_quadratic(const Eigen::MatrixXd& q,
                                                  const Eigen::MatrixXd& k,
                                                  const Eigen::MatrixXd& v,
                                                  double denom_epsilon) {
  auto phi = [](double x) {
    return x > 0.0 ? x + 1.0 : std::exp(x); // elu(x) + 1
  };
  const auto tq = q.rows();
  const auto tk = k.rows();
  const auto d = q.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(tq, v.cols());
  for (Eigen::Index i = 0; i < tq; ++i) {
    double denom = denom_epsilon;
    Eigen::RowVectorXd num = Eigen::RowVectorXd::Zero(v.cols());
    for (Eigen::Index j = 0; j < tk; ++j) {
      double w = 0.0;
      for (Eigen::Index a = 0; a < d; ++a) w += phi(q(i, a)) * phi(k(j, a));
      denom += w;
      num += w * v.row(j);
    }
    out.row(i) = num / denom;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Straight-line reference for one cross-modal transformer layer. Uses the
// quadratic attention form above and explicit per-row loops; shares only the
// weight container with the implementation.
template <typename LayerWeights>
Eigen::MatrixXd cross_modal_layer_reference(const Eigen::MatrixXd& x,
                                            const Eigen::MatrixXd& src,
                                            const LayerWeights& w, int heads,
                                            double denom_epsilon,
                                            double ln_epsilon) {
  const auto tq = x.rows();
  const auto d = x.cols();
  const auto dh = d / heads;

  Eigen::MatrixXd q = x * w.attn.wq;
  Eigen::MatrixXd k = src * w.attn.wk;
  Eigen::MatrixXd v = src * w.attn.wv;
  for (Eigen::Index i = 0; i < q.rows(); ++i) q.row(i) += w.attn.bq.transpose();
  for (Eigen::Index i = 0; i < k.rows(); ++i) k.row(i) += w.attn.bk.transpose();
  for (Eigen::Index i = 0; i < v.rows(); ++i) v.row(i) += w.attn.bv.transpose();

  Eigen::MatrixXd heads_out(tq, d);
  for (int head = 0; head < heads; ++head) {
    const auto off = head * dh;
    heads_out.middleCols(off, dh) = linear_attention_quadratic(
        q.middleCols(off, dh), k.middleCols(off, dh), v.middleCols(off, dh),
        denom_epsilon);
  }
  Eigen::MatrixXd attn = heads_out * w.attn.wo;
  for (Eigen::Index i = 0; i < tq; ++i) attn.row(i) += w.attn.bo.transpose();

  Eigen::MatrixXd r = x + attn;
  Eigen::MatrixXd h(tq, d);
  for (Eigen::Index i = 0; i < tq; ++i) {
    double mu = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) mu += r(i, j);
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) var += (r(i, j) - mu) * (r(i, j) - mu);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + ln_epsilon);
    for (Eigen::Index j = 0; j < d; ++j)
      h(i, j) = w.norm.gamma(j) * ((r(i, j) - mu) * inv) + w.norm.beta(j);
  }

  auto gelu = [](double t) {
    return 0.5 * t * (1.0 + std::erf(t / std::sqrt(2.0)));
  };
  Eigen::MatrixXd f1 = h * w.ffn.w1;
  for (Eigen::Index i = 0; i < tq; ++i) f1.row(i) += w.ffn.b1.transpose();
  Eigen::MatrixXd a1 = f1.unaryExpr(gelu);
  Eigen::MatrixXd f2 = a1 * w.ffn.w2;
  for (Eigen::Index i = 0; i < tq; ++i) f2.row(i) += w.ffn.b2.transpose();
  return h + f2;
}

// ---------------------------------------------------------------------------
// Exhaustive variance-minimizing stump: tries every (feature, midpoint)
// split, lowest SSE wins, ties broken by lowest feature then threshold.
struct StumpSplit {
  int feature = -1;
  double threshold = 0.0;
  double left_value = 0.0;
  double right_value = 0.0;
  bool found = false;
};

inline StumpSplit best_stump_bruteforce(const Eigen::MatrixXd& x,
                                        const Eigen::VectorXd& y) {
  const auto n = x.rows();
  StumpSplit best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = x(i, f);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t u = 0; u + 1 < vals.size(); ++u) {
      const double thr = 0.5 * (vals[u] + vals[u + 1]);
      double sl = 0.0, sr = 0.0;
      double nl = 0.0, nr = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (x(i, f) <= thr) {
          sl += y(i);
          nl += 1.0;
        } else {
          sr += y(i);
          nr += 1.0;
        }
      }
      const double ml = sl / nl, mr = sr / nr;
      double sse = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = x(i, f) <= thr ? ml : mr;
        sse += (y(i) - m) * (y(i) - m);
      }
      if (sse < best_sse) { // strict: first hit wins ties in scan order
        best_sse = sse;
        best = {static_cast<int>(f), thr, ml, mr, true};
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Holm step-down by the direct textbook procedure.
inline std::vector<double> holm_bruteforce(std::vector<double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&p](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> adj(m);
  double prev = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    double v = static_cast<double>(m - r) * p[idx[r]];
    if (v > 1.0) v = 1.0;
    if (v < prev) v = prev;
    prev = v;
    adj[idx[r]] = v;
  }
  return adj;
}

} // namespace oracle

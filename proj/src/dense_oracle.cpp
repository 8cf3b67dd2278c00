// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "dense_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fsi {

DMat DMat::block(const NodeList& r, const NodeList& c) const {
  DMat out(static_cast<int>(r.size()), static_cast<int>(c.size()));
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) out(static_cast<int>(i), static_cast<int>(j)) = (*this)(r[i], c[j]);
  return out;
}

DMat to_dmat(const SparseOperator& op) {
  DMat m(op.size(), op.size());
  for (int i = 0; i < op.size(); ++i)
    for (const auto& [j, v] : op.row(i)) m(i, j) = v;
  return m;
}

DMat dmat_multiply(const DMat& x, const DMat& y) {
  require(x.cols == y.rows, "dmat_multiply: shape mismatch");
  DMat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const cplx v = x(i, k);
      if (v == cplx(0.0)) continue;
      for (int j = 0; j < y.cols; ++j) out(i, j) += v * y(k, j);
    }
  return out;
}

DMat dmat_adjoint(const DMat& x) {
  DMat out(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out(j, i) = std::conj(x(i, j));
  return out;
}

DMat dense_inverse(const DMat& A) {
  require(A.rows == A.cols, "dense_inverse expects a square matrix");
  const int n = A.rows;
  DMat a = A;
  DMat inv(n, n);
  for (int i = 0; i < n; ++i) inv(i, i) = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (std::abs(a(p, k)) == 0.0) fail(ErrorCode::singular_pivot, "dense oracle: singular matrix at column " + std::to_string(k));
    if (p != k)
      for (int j = 0; j < n; ++j) {
        std::swap(a(p, j), a(k, j));
        std::swap(inv(p, j), inv(k, j));
      }
    const cplx piv = a(k, k);
    for (int j = 0; j < n; ++j) {
      a(k, j) /= piv;
      inv(k, j) /= piv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const cplx f = a(i, k);
      if (f == cplx(0.0)) continue;
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

namespace {

struct DenseLU {
  DMat lu;
  std::vector<int> perm;
};

DenseLU dense_lu(const DMat& A) {
  const int n = A.rows;
  DenseLU f{A, std::vector<int>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(f.lu(i, k)) > std::abs(f.lu(p, k))) p = i;
    if (std::abs(f.lu(p, k)) == 0.0) fail(ErrorCode::singular_pivot, "dense oracle: singular matrix at column " + std::to_string(k));
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(f.lu(p, j), f.lu(k, j));
      std::swap(f.perm[p], f.perm[k]);
    }
    for (int i = k + 1; i < n; ++i) {
      f.lu(i, k) /= f.lu(k, k);
      const cplx l = f.lu(i, k);
      if (l == cplx(0.0)) continue;
      for (int j = k + 1; j < n; ++j) f.lu(i, j) -= l * f.lu(k, j);
    }
  }
  return f;
}

std::vector<cplx> lu_solve(const DenseLU& f, const std::vector<cplx>& b) {
  const int n = f.lu.rows;
  std::vector<cplx> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

// Solve A X = Bm column by column.
DMat lu_solve_matrix(const DenseLU& f, const DMat& Bm) {
  DMat X(Bm.rows, Bm.cols);
  std::vector<cplx> col(Bm.rows);
  for (int j = 0; j < Bm.cols; ++j) {
    for (int i = 0; i < Bm.rows; ++i) col[i] = Bm(i, j);
    const auto x = lu_solve(f, col);
    for (int i = 0; i < Bm.rows; ++i) X(i, j) = x[i];
  }
  return X;
}

}  // namespace

double max_relative_error(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  require(got.size() == want.size(), "max_relative_error: size mismatch");
  double e = 0.0;
  for (size_t i = 0; i < got.size(); ++i) {
    const double d = std::abs(got[i] - want[i]);
    const double w = std::abs(want[i]);
    e = std::max(e, w > 0.0 ? d / w : d);
  }
  return e;
}

std::vector<cplx> dense_gr_diag(const SparseOperator& A) {
  const DMat g = dense_inverse(to_dmat(A));
  std::vector<cplx> d(A.size());
  for (int i = 0; i < A.size(); ++i) d[i] = g(i, i);
  return d;
}

std::vector<cplx> dense_gr_diag_by_solves(const SparseOperator& A) {
  const DenseLU f = dense_lu(to_dmat(A));
  const int n = A.size();
  std::vector<cplx> d(n), e(n);
  for (int i = 0; i < n; ++i) {
    std::fill(e.begin(), e.end(), cplx(0.0));
    e[i] = 1.0;
    d[i] = lu_solve(f, e)[i];
  }
  return d;
}

std::vector<cplx> dense_gless_diag(const SparseOperator& A, const SparseOperator& Sigma) {
  require(A.size() == Sigma.size(), "A and Sigma dimensions differ");
  const DMat g = dense_inverse(to_dmat(A));
  const DMat gs = dmat_multiply(g, to_dmat(Sigma));
  const int n = A.size();
  std::vector<cplx> d(n, cplx(0.0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) d[i] += gs(i, k) * std::conj(g(i, k));
  return d;
}

std::vector<cplx> dense_gless_diag_by_solves(const SparseOperator& A, const SparseOperator& Sigma) {
  require(A.size() == Sigma.size(), "A and Sigma dimensions differ");
  const DenseLU f = dense_lu(to_dmat(A));
  const DMat Z = lu_solve_matrix(f, to_dmat(Sigma));
  const DMat X = lu_solve_matrix(f, dmat_adjoint(Z));
  std::vector<cplx> d(A.size());
  for (int i = 0; i < A.size(); ++i) d[i] = std::conj(X(i, i));
  return d;
}

std::vector<OrderingStep> consistent_ordering(const ClusterTree& tree, int leaf_index, OrderingVariant variant) {
  require(tree.has_complements(), "consistent_ordering needs complement sets");
  require(leaf_index >= 0 && leaf_index < static_cast<int>(tree.clusters.size()) &&
              tree.clusters[leaf_index].is_leaf(),
          "target must be a leaf cluster");
  std::vector<int> path;
  for (int k = leaf_index; k >= 0; k = tree.clusters[k].parent) path.push_back(k);
  std::reverse(path.begin(), path.end());
  auto on_path = [&](int k) { return std::find(path.begin(), path.end(), k) != path.end(); };

  std::vector<int> basic;
  for (int k : tree.post_order())
    if (!on_path(k)) basic.push_back(k);
  if (variant != OrderingVariant::post_order) {
    const bool reversed = variant == OrderingVariant::level_reversed;
    std::stable_sort(basic.begin(), basic.end(), [&](int a, int b) {
      const Cluster &ca = tree.clusters[a], &cb = tree.clusters[b];
      if (ca.level != cb.level) return ca.level > cb.level;
      return reversed ? ca.id > cb.id : ca.id < cb.id;
    });
  }

  std::vector<OrderingStep> steps;
  for (int k : basic) {
    const Cluster& c = tree.clusters[k];
    steps.push_back({c.id, c.private_inner, c.boundary});
  }
  for (size_t i = 1; i < path.size(); ++i) {
    const ComplementSets& cs = tree.complements[path[i]];
    steps.push_back({cs.id, cs.private_inner, cs.boundary});
  }
  const Cluster& r = tree.clusters[leaf_index];
  steps.push_back({0, tree.complements[leaf_index].boundary, r.nodes});
  return steps;
}

Trace partial_elimination_trace(const SparseOperator& A, const SparseOperator& Sigma,
                                const std::vector<OrderingStep>& ordering, bool keep_snapshots) {
  require(A.size() == Sigma.size(), "A and Sigma dimensions differ");
  const int n = A.size();
  DMat a = to_dmat(A), sg = to_dmat(Sigma);
  std::vector<char> gone(n, 0);
  Trace trace;
  for (const auto& st : ordering) {
    for (int v : st.S) {
      require(v >= 0 && v < n, "ordering node out of range");
      if (gone[v]) fail(ErrorCode::invalid_argument, "node " + std::to_string(v) + " eliminated twice");
    }
    TraceStep ts;
    ts.id = st.id;
    ts.S = st.S;
    ts.B = st.B;
    if (keep_snapshots) {
      ts.A_before = a;
      ts.Sigma_before = sg;
    }
    NodeList T;
    for (int v = 0; v < n; ++v)
      if (!gone[v] && !std::binary_search(st.S.begin(), st.S.end(), v)) T.push_back(v);
    if (!st.S.empty()) {
      const DMat inv = dense_inverse(a.block(st.S, st.S));
      const DMat E = dmat_multiply(a.block(T, st.S), inv);
      const int s = static_cast<int>(st.S.size());
      // A <- L^{-1} A on rows T.
      for (size_t ti = 0; ti < T.size(); ++ti)
        for (int k = 0; k < s; ++k) {
          const cplx e = E(static_cast<int>(ti), k);
          if (e == cplx(0.0)) continue;
          for (int j = 0; j < n; ++j) a(T[ti], j) -= e * a(st.S[k], j);
        }
      // Sigma <- L^{-1} Sigma L^{-H}.
      for (size_t ti = 0; ti < T.size(); ++ti)
        for (int k = 0; k < s; ++k) {
          const cplx e = E(static_cast<int>(ti), k);
          if (e == cplx(0.0)) continue;
          for (int j = 0; j < n; ++j) sg(T[ti], j) -= e * sg(st.S[k], j);
        }
      for (int i = 0; i < n; ++i)
        for (size_t tj = 0; tj < T.size(); ++tj)
          for (int k = 0; k < s; ++k) {
            const cplx e = E(static_cast<int>(tj), k);
            if (e == cplx(0.0)) continue;
            sg(i, T[tj]) -= sg(i, st.S[k]) * std::conj(e);
          }
    }
    for (int v : st.S) gone[v] = 1;
    if (keep_snapshots) {
      ts.A_after = a;
      ts.Sigma_after = sg;
    }
    ts.U = a.block(st.B, st.B);
    ts.R = sg.block(st.B, st.B);
    trace.steps.push_back(std::move(ts));
  }
  for (int v = 0; v < n; ++v)
    if (!gone[v]) trace.remaining.push_back(v);
  trace.A_final = a.block(trace.remaining, trace.remaining);
  trace.Sigma_final = sg.block(trace.remaining, trace.remaining);
  return trace;
}

}  // namespace fsi

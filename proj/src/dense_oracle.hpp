// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mesh_partition.hpp"
#include "operators.hpp"

namespace fsi {

// Plain row-major complex matrix; the oracle does not use the kernels' dense
// backend so that both sides of each comparison are computed independently.
struct DMat {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> a;

  DMat() = default;
  DMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, cplx(0.0)) {}
  cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  DMat block(const NodeList& r, const NodeList& c) const;
};

DMat to_dmat(const SparseOperator& op);
DMat dmat_multiply(const DMat& x, const DMat& y);
DMat dmat_adjoint(const DMat& x);
// Gauss-Jordan with partial pivoting.
DMat dense_inverse(const DMat& A);

// max_i |got_i - want_i| / |want_i|.
double max_relative_error(const std::vector<cplx>& got, const std::vector<cplx>& want);

std::vector<cplx> dense_gr_diag(const SparseOperator& A);
// Same diagonal from one LU factorization and n column solves.
std::vector<cplx> dense_gr_diag_by_solves(const SparseOperator& A);
std::vector<cplx> dense_gless_diag(const SparseOperator& A, const SparseOperator& Sigma);
// Same diagonal from solves: G^< = (A^{-1} (A^{-1} Sigma)^H)^H.
std::vector<cplx> dense_gless_diag_by_solves(const SparseOperator& A, const SparseOperator& Sigma);

struct OrderingStep {
  std::int64_t id = 0;  // cluster label; 0 for the final boundary step
  NodeList S;           // nodes eliminated at this step
  NodeList B;           // boundary block recorded after the step
};

enum class OrderingVariant { post_order, level_by_level, level_reversed };

// Consistent ordering for a leaf target: off-path basic clusters, then the
// complements along the path top-down, then B_{-r}; C_r remains.
std::vector<OrderingStep> consistent_ordering(const ClusterTree& tree, int leaf_index, OrderingVariant variant);

struct TraceStep {
  std::int64_t id = 0;
  NodeList S, B;
  DMat A_before, Sigma_before;  // A_g, Sigma_g (full)
  DMat A_after, Sigma_after;    // A_{g+}, Sigma_{g+} (full)
  DMat U, R;                    // A_{g+}(B,B), Sigma_{g+}(B,B)
};

struct Trace {
  std::vector<TraceStep> steps;
  NodeList remaining;
  DMat A_final, Sigma_final;
};

Trace partial_elimination_trace(const SparseOperator& A, const SparseOperator& Sigma,
                                const std::vector<OrderingStep>& ordering, bool keep_snapshots = true);

}  // namespace fsi

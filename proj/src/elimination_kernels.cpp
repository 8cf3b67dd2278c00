// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "elimination_kernels.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

namespace fsi {

namespace {

using i64 = std::int64_t;
using SpMat = Eigen::SparseMatrix<cplx>;

struct PivotFailure {
  Index position;
  ErrorCode code;
};

bool pivot_ok(double piv, double row_max) { return std::isfinite(piv) && piv > 0.0 && piv >= kPivotTol * row_max; }

Eigen::PartialPivLU<Mat> checked_lu(const Mat& M, Index offset) {
  Eigen::PartialPivLU<Mat> lu(M);
  const Mat& f = lu.matrixLU();
  const Eigen::VectorXd row_max2 = lu.permutationP() * Eigen::VectorXd(M.cwiseAbs2().rowwise().maxCoeff());
  for (Index i = 0; i < M.rows(); ++i) {
    if (!pivot_ok(std::abs(f(i, i)), std::sqrt(row_max2(i)))) throw PivotFailure{offset + i, ErrorCode::singular_pivot};
  }
  return lu;
}

// First failing pivot of an unblocked Cholesky, for diagnostics only.
Index locate_cholesky_failure(const Mat& A) {
  const Index n = A.rows();
  Mat G = Mat::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    cplx d = A(j, j);
    for (Index k = 0; k < j; ++k) d -= G(j, k) * std::conj(G(j, k));
    if (!(d.real() > 0.0) || !std::isfinite(d.real())) return j;
    G(j, j) = std::sqrt(d.real());
    for (Index i = j + 1; i < n; ++i) {
      cplx v = A(i, j);
      for (Index k = 0; k < j; ++k) v -= G(i, k) * std::conj(G(j, k));
      G(i, j) = v / G(j, j);
    }
  }
  return 0;
}

Eigen::LLT<Mat> checked_llt(const Mat& A, Index offset) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success || !llt.matrixLLT().allFinite())
    throw PivotFailure{offset + locate_cholesky_failure(A), ErrorCode::not_positive_definite};
  return llt;
}

double max_abs2(const Mat& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs2().maxCoeff(); }

bool near(const Mat& X, const Mat& Y, double rtol) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) return false;
  if (X.size() == 0) return true;
  const double scale2 = std::max({1e-300, max_abs2(X), max_abs2(Y)});
  return max_abs2(X - Y) <= rtol * rtol * scale2;
}

constexpr double kSymTol = 1e-10;

void check_shapes(const EliminationInput& in) {
  const Index s = in.Ass.rows(), b = in.Abb.rows();
  require(in.Ass.cols() == s && in.Abb.cols() == b, "Ass and Abb must be square");
  require(in.Asb.rows() == s && in.Asb.cols() == b, "Asb must be |S| x |B|");
  require(in.Abs.rows() == b && in.Abs.cols() == s, "Abs must be |B| x |S|");
  const Partition& p = in.part;
  require(p.mL >= 0 && p.mR >= 0 && p.nL >= 0 && p.nR >= 0 && p.s() == s && p.b() == b,
          "partition sizes do not match the blocks");
}

void check_hermitian_input(const EliminationInput& in) {
  require(near(in.Ass, in.Ass.adjoint(), kSymTol), "Ass is not Hermitian");
  require(near(in.Abs, in.Asb.adjoint(), kSymTol), "Abs is not the adjoint of Asb");
}

void check_symmetric_input(const EliminationInput& in) {
  require(near(in.Ass, in.Ass.transpose(), kSymTol), "Ass is not symmetric");
  require(near(in.Abs, in.Asb.transpose(), kSymTol), "Abs is not the transpose of Asb");
}

// Columns of an |S| x c matrix split into a part supported on S_L and a part
// supported on S_R. Columns of B_L always own a left part and columns of B_R a
// right part; a column touching the other side gets both.
struct ColumnGroups {
  Mat left;   // mL x cL
  Mat right;  // mR x cR
  std::vector<Index> left_of, right_of;
};

ColumnGroups split_columns(const Mat& M, Index mL, Index nL) {
  const Index mR = M.rows() - mL, c = M.cols();
  ColumnGroups g;
  g.left_of.assign(c, -1);
  g.right_of.assign(c, -1);
  Index cL = 0, cR = 0;
  for (Index j = 0; j < c; ++j) {
    const bool top = j < nL || (M.col(j).head(mL).array() != cplx(0.0)).any();
    const bool bot = j >= nL || (M.col(j).tail(mR).array() != cplx(0.0)).any();
    if (top) g.left_of[j] = cL++;
    if (bot) g.right_of[j] = cR++;
  }
  g.left.resize(mL, cL);
  g.right.resize(mR, cR);
  for (Index j = 0; j < c; ++j) {
    if (g.left_of[j] >= 0) g.left.col(g.left_of[j]) = M.col(j).head(mL);
    if (g.right_of[j] >= 0) g.right.col(g.right_of[j]) = M.col(j).tail(mR);
  }
  return g;
}

// out(:, j) = X(:, left_of[j]) + Y(:, right_of[j]).
Mat gather_columns(const ColumnGroups& g, const Mat& X, const Mat& Y) {
  const Index rows = X.cols() > 0 ? X.rows() : Y.rows();
  const Index c = static_cast<Index>(g.left_of.size());
  Mat out = Mat::Zero(rows, c);
  for (Index j = 0; j < c; ++j) {
    if (g.left_of[j] >= 0) out.col(j) += X.col(g.left_of[j]);
    if (g.right_of[j] >= 0) out.col(j) += Y.col(g.right_of[j]);
  }
  return out;
}

struct Blocks {
  Index mL = 0, mR = 0;
  Mat A, D;
  SpMat B, C;
  std::vector<Index> B_cols, C_cols;  // columns of B and C holding nonzeros
};

std::vector<Index> nonzero_columns(const SpMat& M) {
  std::vector<Index> out;
  for (Index j = 0; j < M.outerSize(); ++j)
    for (SpMat::InnerIterator it(M, j); it; ++it)
      if (it.value() != cplx(0.0)) {
        out.push_back(j);
        break;
      }
  return out;
}

Blocks split_blocks(const Mat& M, Index mL) {
  Blocks k;
  k.mL = mL;
  k.mR = M.rows() - mL;
  k.A = M.topLeftCorner(mL, mL);
  k.D = M.bottomRightCorner(k.mR, k.mR);
  k.B = M.topRightCorner(mL, k.mR).sparseView();
  k.C = M.bottomLeftCorner(k.mR, mL).sparseView();
  k.B_cols = nonzero_columns(k.B);
  k.C_cols = nonzero_columns(k.C);
  return k;
}

Mat dense_columns(const SpMat& M, const std::vector<Index>& cols) {
  Mat out = Mat::Zero(M.rows(), static_cast<Index>(cols.size()));
  for (Index j = 0; j < out.cols(); ++j)
    for (SpMat::InnerIterator it(M, cols[j]); it; ++it) out(it.row(), j) = it.value();
  return out;
}

// X -= P Q where Q is supported on the columns listed in cols.
void subtract_on_columns(Mat& X, const SpMat& P, const Mat& Q, const std::vector<Index>& cols) {
  const Mat PQ = P * Q;
  for (Index j = 0; j < PQ.cols(); ++j) X.col(cols[j]) -= PQ.col(j);
}

struct Solved {
  Mat KW;  // M^{-1} [W; 0]
  Mat KZ;  // M^{-1} [0; Z]
};

Solved solve_parallel(const Blocks& k, const Mat& W, const Mat& Z) {
  const auto luD = checked_lu(k.D, k.mL);
  const auto luA = checked_lu(k.A, 0);
  const Mat DiC = luD.solve(dense_columns(k.C, k.C_cols));
  const Mat AiB = luA.solve(dense_columns(k.B, k.B_cols));
  Mat At = k.A;
  subtract_on_columns(At, k.B, DiC, k.C_cols);
  Mat Dt = k.D;
  subtract_on_columns(Dt, k.C, AiB, k.B_cols);
  const Mat T1 = checked_lu(At, 0).solve(W);
  const Mat T2 = checked_lu(Dt, k.mL).solve(Z);
  Solved r;
  r.KW.resize(k.mL + k.mR, W.cols());
  r.KW.topRows(k.mL) = T1;
  r.KW.bottomRows(k.mR).noalias() = -DiC * T1(k.C_cols, Eigen::all);
  r.KZ.resize(k.mL + k.mR, Z.cols());
  r.KZ.topRows(k.mL).noalias() = -AiB * T2(k.B_cols, Eigen::all);
  r.KZ.bottomRows(k.mR) = T2;
  return r;
}

// Block LU forward and back substitution; also the sequential inverse kernel.
Solved solve_block_lu(const Blocks& k, const Mat& W, const Mat& Z) {
  const auto luA = checked_lu(k.A, 0);
  const Mat AiB = luA.solve(dense_columns(k.B, k.B_cols));
  Mat Dt = k.D;
  subtract_on_columns(Dt, k.C, AiB, k.B_cols);
  const auto luDt = checked_lu(Dt, k.mL);
  const Mat T2 = luDt.solve(Z);
  const Mat Y1 = luA.solve(W);
  // C Y1 is supported on the nonzero rows of C.
  const SpMat Ct = k.C.transpose();
  const std::vector<Index> C_rows = nonzero_columns(Ct);
  Mat E = Mat::Zero(k.mR, static_cast<Index>(C_rows.size()));
  for (Index j = 0; j < E.cols(); ++j) E(C_rows[j], j) = 1.0;
  const Mat DtiE = luDt.solve(E);
  const Mat CY1 = Ct.transpose() * Y1;
  const Mat T3 = DtiE * CY1(C_rows, Eigen::all);
  Solved r;
  r.KZ.resize(k.mL + k.mR, Z.cols());
  r.KZ.topRows(k.mL).noalias() = -AiB * T2(k.B_cols, Eigen::all);
  r.KZ.bottomRows(k.mR) = T2;
  r.KW.resize(k.mL + k.mR, W.cols());
  r.KW.topRows(k.mL) = Y1;
  r.KW.topRows(k.mL).noalias() += AiB * T3(k.B_cols, Eigen::all);
  r.KW.bottomRows(k.mR) = -T3;
  return r;
}

Solved solve_naive_lu(const Mat& M, Index mL, const Mat& W, const Mat& Z) {
  const Index s = M.rows(), mR = s - mL;
  const auto lu = checked_lu(M, 0);
  Mat rw = Mat::Zero(s, W.cols());
  rw.topRows(mL) = W;
  Mat rz = Mat::Zero(s, Z.cols());
  rz.bottomRows(mR) = Z;
  return Solved{lu.solve(rw), lu.solve(rz)};
}

// U = Abb - L Asb using the column structure of Asb.
Mat update_from_L(const Mat& Abb, const Mat& L, const ColumnGroups& gc, Index mL) {
  const Index mR = L.cols() - mL;
  const Mat PL = L.leftCols(mL) * gc.left;
  const Mat PR = L.rightCols(mR) * gc.right;
  return Abb - gather_columns(gc, PL, PR);
}

SchurResult structured_update(const EliminationInput& in, Kernel method, bool want_L) {
  const Partition& p = in.part;
  const ColumnGroups gc = split_columns(in.Asb, p.mL, p.nL);
  const ColumnGroups gr = split_columns(in.Abs.transpose(), p.mL, p.nL);
  SchurResult res;

  if (method == Kernel::block_lu && !want_L && p.mL > 0 && p.mR > 0) {
    // X = Ass^{-1} Asb by block forward and back substitution, U = Abb - Abs X.
    const Blocks k = split_blocks(in.Ass, p.mL);
    const Solved sv = solve_block_lu(k, gc.left, gc.right);
    const Mat X = gather_columns(gc, sv.KW, sv.KZ);
    res.U = update_from_L(in.Abb.transpose(), X.transpose(), gr, p.mL).transpose();
    return res;
  }

  // L = Abs Ass^{-1} from the transposed right solve.
  const Mat Mt = in.Ass.transpose();
  Solved sv;
  if (method == Kernel::naive_lu || p.mL == 0 || p.mR == 0) {
    sv = solve_naive_lu(Mt, p.mL, gr.left, gr.right);
  } else {
    const Blocks k = split_blocks(Mt, p.mL);
    sv = method == Kernel::parallel_inverse ? solve_parallel(k, gr.left, gr.right) : solve_block_lu(k, gr.left, gr.right);
  }
  res.L = gather_columns(gr, sv.KW, sv.KZ).transpose();
  res.has_L = true;
  res.U = update_from_L(in.Abb, res.L, gc, p.mL);
  if (!want_L) {
    res.L.resize(0, 0);
    res.has_L = false;
  }
  return res;
}

Mat hermitian_from_lower(const Mat& U) {
  Mat out = U.triangularView<Eigen::Lower>();
  out.triangularView<Eigen::StrictlyUpper>() = U.adjoint().triangularView<Eigen::StrictlyUpper>();
  for (Index i = 0; i < out.rows(); ++i) out(i, i) = cplx(out(i, i).real(), 0.0);
  return out;
}

template <class F>
SchurResult with_pivot_names(const EliminationInput& in, F&& body) {
  try {
    return body();
  } catch (const PivotFailure& pf) {
    std::string where = "position " + std::to_string(pf.position) + " of S";
    if (pf.position >= 0 && pf.position < static_cast<Index>(in.s_labels.size()))
      where = "node " + std::to_string(in.s_labels[pf.position]);
    if (pf.code == ErrorCode::not_positive_definite) fail(pf.code, "non-positive pivot at " + where);
    fail(pf.code, "singular pivot at " + where);
  }
}

// Ledger polynomials in sixths.
i64 final_product(const Partition& p) { return 6 * (p.nL + p.nR) * (p.nL * p.mL + p.nR * p.mR); }

struct Charge {
  std::string key;
  i64 sixths;
};

std::vector<Charge> kernel_charges(Kernel k, const Partition& p, bool want_L) {
  const i64 mL = p.mL, mR = p.mR, nL = p.nL, nR = p.nR, s = mL + mR, b = nL + nR;
  const std::string name = kernel_name(k);
  switch (k) {
    case Kernel::naive_dense:
      return {{name, 2 * s * s * s + 6 * s * s * b + 6 * s * b * b}};
    case Kernel::parallel_inverse:
      return {{name, 6 * mR * mR * mR + 6 * mL * mL * mL + (2 * mL * mL * mL + 6 * mL * mL * nL) +
                         (2 * mR * mR * mR + 6 * mR * mR * nR) + 6 * mR * mL * nL + 6 * mL * mR * nR +
                         final_product(p)}};
    case Kernel::sequential_inverse:
      return {{name, 6 * mL * mL * mL + (2 * mR * mR * mR + 6 * mR * mR * nR) + 6 * mL * mR * nR +
                         6 * mL * mL * nL + 6 * mR * mR * nL + 6 * mL * mR * nL + final_product(p)}};
    case Kernel::block_lu: {
      const i64 head = 6 * mL * mL * mL + 2 * mR * mR * mR + 6 * nL * mL * mL + 6 * nL * mR * mR + 6 * nR * mR * mR;
      if (!want_L)
        return {{name, head + 6 * mL * mL * nL +
                           6 * (nL * mL * nL + nL * mR * nL + nL * mR * nR + nR * mR * nL + nR * mR * nR)}};
      return {{name, head + 6 * nL * mR * mL + 6 * nR * mR * mL + final_product(p)}};
    }
    case Kernel::naive_lu:
      return {{name, 2 * s * s * s + 3 * s * s * nL + 3 * mR * mR * nR + 3 * s * s * b + final_product(p)}};
    case Kernel::cholesky:
    case Kernel::ldlt: {
      std::vector<Charge> c{{name, s * s * s + 3 * s * s * b + 3 * s * b * b}};
      if (want_L) c.push_back({name + ".form_L", 3 * s * s * b});
      return c;
    }
    case Kernel::symmetric_sparse: {
      std::vector<Charge> c{
          {name, 2 * mL * mL * mL + mL * mR * mR + mR * mR * mR + 6 * mL * mL * nL + 3 * mR * mR * nL +
                     3 * mR * mR * nR + 3 * nL * nL * mL + 3 * nL * nL * mR + 6 * nL * mR * nR + 3 * nR * nR * mR}};
      if (want_L) c.push_back({name + ".form_L", 3 * (mR * mR + 2 * mL * mL) * b});
      return c;
    }
  }
  fail(ErrorCode::invalid_argument, "unknown kernel");
}

}  // namespace

const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::naive_dense: return "naive";
    case Kernel::parallel_inverse: return "parallel";
    case Kernel::sequential_inverse: return "sequential";
    case Kernel::block_lu: return "block_lu";
    case Kernel::naive_lu: return "naive_lu";
    case Kernel::cholesky: return "cholesky";
    case Kernel::ldlt: return "ldlt";
    case Kernel::symmetric_sparse: return "symmetric_sparse";
  }
  return "unknown";
}

Kernel kernel_from_name(const std::string& name) {
  if (name == "naive" || name == "naive_dense") return Kernel::naive_dense;
  if (name == "parallel" || name == "parallel_inverse") return Kernel::parallel_inverse;
  if (name == "sequential" || name == "sequential_inverse") return Kernel::sequential_inverse;
  if (name == "block_lu") return Kernel::block_lu;
  if (name == "naive_lu") return Kernel::naive_lu;
  if (name == "cholesky") return Kernel::cholesky;
  if (name == "ldlt") return Kernel::ldlt;
  if (name == "symmetric_sparse") return Kernel::symmetric_sparse;
  fail(ErrorCode::invalid_argument, "unknown kernel '" + name + "'");
}

bool kernel_is_structured(Kernel k) {
  return k == Kernel::parallel_inverse || k == Kernel::sequential_inverse || k == Kernel::block_lu ||
         k == Kernel::naive_lu || k == Kernel::symmetric_sparse;
}

bool kernel_needs_hermitian(Kernel k) { return k == Kernel::cholesky || k == Kernel::symmetric_sparse; }

bool kernel_needs_complex_symmetric(Kernel k) { return k == Kernel::ldlt; }

const char* sigma_kernel_name(SigmaKernel k) {
  switch (k) {
    case SigmaKernel::naive: return "sigma_naive";
    case SigmaKernel::sparse: return "sigma_sparse";
    case SigmaKernel::sparse_alt: return "sigma_sparse_alt";
    case SigmaKernel::symmetric: return "sigma_symmetric";
  }
  return "unknown";
}

SigmaKernel sigma_kernel_from_name(const std::string& name) {
  if (name == "naive" || name == "sigma_naive") return SigmaKernel::naive;
  if (name == "sparse" || name == "sigma_sparse") return SigmaKernel::sparse;
  if (name == "sparse_alt" || name == "sigma_sparse_alt") return SigmaKernel::sparse_alt;
  if (name == "symmetric" || name == "sigma_symmetric") return SigmaKernel::symmetric;
  fail(ErrorCode::invalid_argument, "unknown sigma kernel '" + name + "'");
}

void charge_kernel(Kernel k, const Partition& p, bool want_L, FlopLedger& ledger) {
  for (const auto& c : kernel_charges(k, p, want_L)) ledger.add(c.key, c.sixths);
}

std::int64_t kernel_cost_sixths(Kernel k, const Partition& p, bool want_L) {
  i64 total = 0;
  for (const auto& c : kernel_charges(k, p, want_L)) total += c.sixths;
  return total;
}

std::int64_t sigma_cost_sixths(SigmaKernel k, const Partition& p) {
  const i64 mL = p.mL, mR = p.mR, nL = p.nL, nR = p.nR, s = mL + mR, b = nL + nR;
  switch (k) {
    case SigmaKernel::naive: return 6 * (s * s * b + 3 * s * b * b);
    case SigmaKernel::sparse: return 6 * (2 * b * (mL * nL + mR * nR) + b * (mL * mL + mR * mR) + b * s * b);
    case SigmaKernel::sparse_alt: return 6 * (2 * b * (mL * nL + mR * nR) + s * s * b) + 3 * s * b * b;
    case SigmaKernel::symmetric: return s * s * s + 6 * s * s * b + 9 * s * b * b;
  }
  fail(ErrorCode::invalid_argument, "unknown sigma kernel");
}

void charge_sigma(SigmaKernel k, const Partition& p, FlopLedger& ledger) {
  ledger.add(sigma_kernel_name(k), sigma_cost_sixths(k, p));
}

double flop_model(Kernel k, double m, double n) {
  switch (k) {
    case Kernel::naive_dense:
    case Kernel::cholesky:
    case Kernel::ldlt:
      return flop_model_sb(k, 2 * m, 2 * n);
    case Kernel::parallel_inverse: return 8.0 / 3 * m * m * m + 4 * m * m * n + 4 * m * n * n;
    case Kernel::sequential_inverse: return 4.0 / 3 * m * m * m + 5 * m * m * n + 4 * m * n * n;
    case Kernel::block_lu: return 4.0 / 3 * m * m * m + 4 * m * m * n + 5 * m * n * n;
    case Kernel::naive_lu: return 8.0 / 3 * m * m * m + 6.5 * m * m * n + 4 * m * n * n;
    case Kernel::symmetric_sparse: return 2.0 / 3 * m * m * m + 2 * m * m * n + 2.5 * m * n * n;
  }
  fail(ErrorCode::invalid_argument, "unknown kernel");
}

double flop_model_sb(Kernel k, double s, double b) {
  switch (k) {
    case Kernel::naive_dense: return s * s * s / 3 + s * s * b + s * b * b;
    case Kernel::cholesky:
    case Kernel::ldlt: return s * s * s / 6 + s * s * b / 2 + s * b * b / 2;
    default: return flop_model(k, s / 2, b / 2);
  }
}

double sigma_flop_model(SigmaKernel k, double s, double b) {
  switch (k) {
    case SigmaKernel::naive: return s * s * b + 3 * s * b * b;
    case SigmaKernel::sparse: return 0.5 * s * s * b + 2 * s * b * b;
    case SigmaKernel::sparse_alt: return s * s * b + 1.5 * s * b * b;
    case SigmaKernel::symmetric: return s * s * s / 6 + s * s * b + 1.5 * s * b * b;
  }
  fail(ErrorCode::invalid_argument, "unknown sigma kernel");
}

SchurResult schur_update(const EliminationInput& in, FlopLedger& ledger, bool want_L) {
  check_shapes(in);
  return with_pivot_names(in, [&] {
    SchurResult res;
    const Index s = in.Ass.rows();
    if (s == 0) {
      res.U = in.Abb;
      res.L = Mat::Zero(in.Abb.rows(), 0);
      res.has_L = true;
    } else {
      const auto lu = checked_lu(in.Ass.transpose(), 0);
      res.L = lu.solve(in.Abs.transpose()).transpose();
      res.has_L = true;
      res.U = in.Abb;
      res.U.noalias() -= res.L * in.Asb;
    }
    charge_kernel(Kernel::naive_dense, Partition::flat(in.part.s(), in.part.b()), want_L, ledger);
    if (!want_L) {
      res.L.resize(0, 0);
      res.has_L = false;
    }
    return res;
  });
}

SchurResult block_kernel_update(const EliminationInput& in, Kernel method, bool want_L, FlopLedger& ledger) {
  require(method == Kernel::parallel_inverse || method == Kernel::sequential_inverse || method == Kernel::block_lu ||
              method == Kernel::naive_lu,
          "block_kernel_update expects a structured inverse kernel");
  check_shapes(in);
  return with_pivot_names(in, [&] {
    SchurResult res;
    if (in.part.s() == 0) {
      res.U = in.Abb;
      if (want_L) res.L = Mat::Zero(in.Abb.rows(), 0), res.has_L = true;
    } else {
      res = structured_update(in, method, want_L);
    }
    charge_kernel(method, in.part, want_L, ledger);
    return res;
  });
}

SchurResult cholesky_schur_update(const EliminationInput& in, bool want_L, FlopLedger& ledger) {
  check_shapes(in);
  check_hermitian_input(in);
  return with_pivot_names(in, [&] {
    SchurResult res;
    const Index s = in.Ass.rows(), b = in.Abb.rows();
    if (s == 0) {
      res.U = in.Abb;
      res.factor_solve = Mat(0, b);
      if (want_L) res.L = Mat::Zero(b, 0), res.has_L = true;
    } else {
      const auto llt = checked_llt(in.Ass, 0);
      res.factor_solve = llt.matrixL().solve(in.Asb);
      Mat U = in.Abb;
      U.selfadjointView<Eigen::Lower>().rankUpdate(res.factor_solve.adjoint(), -1.0);
      res.U = hermitian_from_lower(U);
      if (want_L) {
        res.L = llt.matrixU().solve(res.factor_solve).adjoint();
        res.has_L = true;
      }
    }
    charge_kernel(Kernel::cholesky, Partition::flat(s, b), want_L, ledger);
    return res;
  });
}

std::pair<Mat, Vec> ldlt_factor(const Mat& A) {
  const Index n = A.rows();
  require(A.cols() == n, "ldlt_factor expects a square matrix");
  Mat L = Mat::Identity(n, n);
  Vec d(n);
  Vec v(n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < j; ++k) v(k) = L(j, k) * d(k);
    cplx dj = A(j, j);
    for (Index k = 0; k < j; ++k) dj -= L(j, k) * v(k);
    const double rm = A.row(j).cwiseAbs().maxCoeff();
    if (!pivot_ok(std::abs(dj), rm)) throw PivotFailure{j, ErrorCode::singular_pivot};
    d(j) = dj;
    const Index rest = n - j - 1;
    if (rest > 0) {
      Vec col = A.col(j).tail(rest);
      if (j > 0) col.noalias() -= L.bottomLeftCorner(rest, j) * v.head(j);
      L.col(j).tail(rest) = col / dj;
    }
  }
  return {L, d};
}

SchurResult ldlt_schur_update(const EliminationInput& in, bool want_L, FlopLedger& ledger) {
  check_shapes(in);
  check_symmetric_input(in);
  return with_pivot_names(in, [&] {
    SchurResult res;
    const Index s = in.Ass.rows(), b = in.Abb.rows();
    if (s == 0) {
      res.U = in.Abb;
      if (want_L) res.L = Mat::Zero(b, 0), res.has_L = true;
    } else {
      const auto [Lf, d] = ldlt_factor(in.Ass);
      const Mat M = Lf.triangularView<Eigen::UnitLower>().solve(in.Asb);
      const Mat N = d.cwiseInverse().asDiagonal() * M;
      res.U = in.Abb;
      res.U.noalias() -= M.transpose() * N;
      if (want_L) {
        res.L = Lf.transpose().triangularView<Eigen::UnitUpper>().solve(N).transpose();
        res.has_L = true;
      }
    }
    charge_kernel(Kernel::ldlt, Partition::flat(s, b), want_L, ledger);
    return res;
  });
}

SchurResult symmetric_sparse_update(const EliminationInput& in, bool want_L, FlopLedger& ledger) {
  check_shapes(in);
  check_hermitian_input(in);
  const Partition& p = in.part;
  if (p.mL == 0 || p.mR == 0) {
    FlopLedger scratch;
    SchurResult res = cholesky_schur_update(in, want_L, scratch);
    charge_kernel(Kernel::symmetric_sparse, p, want_L, ledger);
    return res;
  }
  return with_pivot_names(in, [&] {
    SchurResult res;
    const Index mL = p.mL, mR = p.mR, b = p.b();
    const Mat A = in.Ass.topLeftCorner(mL, mL);
    const SpMat B = in.Ass.topRightCorner(mL, mR).sparseView();
    const SpMat Bh = SpMat(B.adjoint());
    const Mat D = in.Ass.bottomRightCorner(mR, mR);

    const auto llt1 = checked_llt(A, 0);
    const Mat G1inv = llt1.matrixL().solve(Mat::Identity(mL, mL));
    const Mat H = G1inv * B;
    Mat At22 = D;
    At22.selfadjointView<Eigen::Lower>().rankUpdate(H.adjoint(), -1.0);
    const auto llt2 = checked_llt(hermitian_from_lower(At22), mL);

    const ColumnGroups gc = split_columns(in.Asb, mL, p.nL);
    const Mat M1 = G1inv.triangularView<Eigen::Lower>() * gc.left;
    const Mat T = G1inv.adjoint().triangularView<Eigen::Upper>() * M1;
    const Mat M21 = -llt2.matrixL().solve(Bh * T);
    const Mat M22 = llt2.matrixL().solve(gc.right);

    Mat Mtop = gather_columns(gc, M1, Mat::Zero(mL, gc.right.cols()));
    Mat Mbot = gather_columns(gc, M21, M22);
    res.factor_solve.resize(mL + mR, b);
    res.factor_solve.topRows(mL) = Mtop;
    res.factor_solve.bottomRows(mR) = Mbot;

    const bool plain = gc.left.cols() == p.nL && gc.right.cols() == p.nR;
    Mat U = in.Abb;
    if (plain) {
      auto U11 = U.topLeftCorner(p.nL, p.nL);
      U11.selfadjointView<Eigen::Lower>().rankUpdate(M1.adjoint(), -1.0);
      U11.selfadjointView<Eigen::Lower>().rankUpdate(M21.adjoint(), -1.0);
      U.bottomLeftCorner(p.nR, p.nL).noalias() -= M22.adjoint() * M21;
      auto U22 = U.bottomRightCorner(p.nR, p.nR);
      U22.selfadjointView<Eigen::Lower>().rankUpdate(M22.adjoint(), -1.0);
    } else {
      U.selfadjointView<Eigen::Lower>().rankUpdate(res.factor_solve.adjoint(), -1.0);
    }
    res.U = hermitian_from_lower(U);

    if (want_L) {
      // L = M^H G_S^{-1} = (G_S^{-H} M)^H with G_S^H = [G1^H, (G1^{-1}B); 0, G2^H].
      const Mat Y2 = llt2.matrixU().solve(Mbot);
      const Mat R1 = Mtop - H * Y2;
      const Mat Y1 = G1inv.adjoint().triangularView<Eigen::Upper>() * R1;
      Mat Y(mL + mR, b);
      Y.topRows(mL) = Y1;
      Y.bottomRows(mR) = Y2;
      res.L = Y.adjoint();
      res.has_L = true;
    }
    charge_kernel(Kernel::symmetric_sparse, p, want_L, ledger);
    return res;
  });
}

SchurResult eliminate(Kernel k, const EliminationInput& in, bool want_L, FlopLedger& ledger) {
  switch (k) {
    case Kernel::naive_dense: return schur_update(in, ledger, want_L);
    case Kernel::parallel_inverse:
    case Kernel::sequential_inverse:
    case Kernel::block_lu:
    case Kernel::naive_lu: return block_kernel_update(in, k, want_L, ledger);
    case Kernel::cholesky: return cholesky_schur_update(in, want_L, ledger);
    case Kernel::ldlt: return ldlt_schur_update(in, want_L, ledger);
    case Kernel::symmetric_sparse: return symmetric_sparse_update(in, want_L, ledger);
  }
  fail(ErrorCode::invalid_argument, "unknown kernel");
}

Mat sigma_update(const Mat& Sss, const Mat& Ssb, const Mat& Sbs, const Mat& Sbb, const Mat& L, FlopLedger& ledger) {
  const Index s = Sss.rows(), b = Sbb.rows();
  require(Sss.cols() == s && Sbb.cols() == b && Ssb.rows() == s && Ssb.cols() == b && Sbs.rows() == b &&
              Sbs.cols() == s && L.rows() == b && L.cols() == s,
          "sigma_update: shape mismatch");
  Mat R = Sbb;
  if (s > 0) {
    const Mat Lh = L.adjoint();
    R.noalias() -= L * Ssb;
    R.noalias() -= Sbs * Lh;
    const Mat LS = L * Sss;
    R.noalias() += LS * Lh;
  }
  charge_sigma(SigmaKernel::naive, Partition::flat(s, b), ledger);
  return R;
}

Mat checked_inverse(const Mat& M, const std::string& where) {
  if (M.rows() == 0) return Mat(0, 0);
  try {
    return checked_lu(M, 0).inverse();
  } catch (const PivotFailure& f) {
    fail(ErrorCode::singular_pivot, where + ": singular pivot at position " + std::to_string(f.position));
  }
}

Mat sigma_update_optimized(const SigmaInput& in, const Mat& L, SigmaKernel mode, FlopLedger& ledger,
                           SigmaInfo* info) {
  const Partition& p = in.part;
  const Index s = p.s(), b = p.b(), mL = p.mL, mR = p.mR, nL = p.nL, nR = p.nR;
  require(in.Sss.rows() == s && in.Sss.cols() == s && in.Sbb.rows() == b && in.Sbb.cols() == b &&
              in.Ssb.rows() == s && in.Ssb.cols() == b && in.Sbs.rows() == b && in.Sbs.cols() == s &&
              L.rows() == b && L.cols() == s,
          "sigma_update_optimized: shape mismatch");
  if (info) *info = SigmaInfo{};
  if (mode == SigmaKernel::naive) return sigma_update(in.Sss, in.Ssb, in.Sbs, in.Sbb, L, ledger);

  if (mode != SigmaKernel::sparse) {
    const bool hermitian = near(in.Sss, in.Sss.adjoint(), kSymTol) && near(in.Sbb, in.Sbb.adjoint(), kSymTol) &&
                           near(in.Sbs, in.Ssb.adjoint(), kSymTol);
    require(hermitian, std::string(sigma_kernel_name(mode)) + " requires a Hermitian sigma");
  }

  Mat R;
  if (s == 0) {
    R = in.Sbb;
  } else if (mode == SigmaKernel::symmetric) {
    Eigen::LLT<Mat> llt(in.Sss);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::not_positive_definite, "sigma_symmetric requires Sigma(S,S) positive definite");
    const Mat K = llt.matrixL();
    const Mat W = L * K;
    const Mat T = L * in.Ssb;
    Mat Rl = in.Sbb - T - T.adjoint();
    Rl.selfadjointView<Eigen::Lower>().rankUpdate(W, 1.0);
    R = hermitian_from_lower(Rl);
  } else {
    // Sigma(S,B) and Sigma(B,S) are block diagonal up to sparse exceptions;
    // Sigma(S_L,S_R) and Sigma(S_R,S_L) are sparse.
    const auto L1 = L.leftCols(mL);
    const auto L2 = L.rightCols(mR);
    const SpMat S12 = in.Sss.topRightCorner(mL, mR).sparseView();
    const SpMat S21 = in.Sss.bottomLeftCorner(mR, mL).sparseView();
    const SpMat SX = in.Ssb.topRightCorner(mL, nR).sparseView();
    const SpMat SY = in.Ssb.bottomLeftCorner(mR, nL).sparseView();
    const SpMat SQ = in.Sbs.topRightCorner(nL, mR).sparseView();
    const SpMat SR = in.Sbs.bottomLeftCorner(nR, mL).sparseView();
    if (info) info->block_diagonal_fast_path = S12.nonZeros() == 0 && S21.nonZeros() == 0;

    Mat T(b, b);
    T.leftCols(nL).noalias() = L1 * in.Ssb.topLeftCorner(mL, nL);
    T.rightCols(nR).noalias() = L2 * in.Ssb.bottomRightCorner(mR, nR);
    if (SY.nonZeros()) T.leftCols(nL) += L2 * SY;
    if (SX.nonZeros()) T.rightCols(nR) += L1 * SX;

    Mat T2(b, b);
    T2.topRows(nL).noalias() = in.Sbs.topLeftCorner(nL, mL) * L1.adjoint();
    T2.bottomRows(nR).noalias() = in.Sbs.bottomRightCorner(nR, mR) * L2.adjoint();
    if (SQ.nonZeros()) T2.topRows(nL) += SQ * L2.adjoint();
    if (SR.nonZeros()) T2.bottomRows(nR) += SR * L1.adjoint();

    if (mode == SigmaKernel::sparse) {
      Mat V(b, s);
      V.leftCols(mL).noalias() = L1 * in.Sss.topLeftCorner(mL, mL);
      V.rightCols(mR).noalias() = L2 * in.Sss.bottomRightCorner(mR, mR);
      if (S21.nonZeros()) V.leftCols(mL) += L2 * S21;
      if (S12.nonZeros()) V.rightCols(mR) += L1 * S12;
      R = in.Sbb - T - T2;
      R.noalias() += V * L.adjoint();
    } else {
      const Mat V = in.Sss * L.adjoint();
      Mat Rl = in.Sbb - T - T2;
      Rl.triangularView<Eigen::Lower>() += L * V;
      R = hermitian_from_lower(Rl);
    }
  }
  charge_sigma(mode, p, ledger);
  return R;
}

}  // namespace fsi

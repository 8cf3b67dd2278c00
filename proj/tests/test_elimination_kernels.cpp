// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "elimination_kernels.hpp"
#include "fixtures.hpp"

using namespace fsi;

namespace {

enum class Sym { general, hermitian, complex_symmetric };

Mat random_mat(Index r, Index c, Rng& rng) {
  Mat M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = rng.complex_unit_box();
  return M;
}

double rel_diff(const Mat& a, const Mat& b) {
  const double scale = std::max(1.0, b.norm());
  return (a - b).norm() / scale;
}

// Blocks with the coupling pattern of a merge: S_L touches only B_L, S_R only B_R.
EliminationInput structured_input(const Partition& p, Sym sym, Rng& rng, bool block_coupling = true) {
  const Index s = p.s(), b = p.b();
  EliminationInput in;
  in.part = p;
  Mat X = random_mat(s, s, rng);
  if (sym == Sym::hermitian)
    in.Ass = X * X.adjoint();
  else if (sym == Sym::complex_symmetric)
    in.Ass = X * X.transpose();
  else
    in.Ass = X;
  in.Ass += static_cast<double>(2 * s + 1) * Mat::Identity(s, s);
  in.Asb = random_mat(s, b, rng);
  if (block_coupling) {
    in.Asb.topRightCorner(p.mL, p.nR).setZero();
    in.Asb.bottomLeftCorner(p.mR, p.nL).setZero();
  }
  Mat Y = random_mat(b, b, rng);
  if (sym == Sym::hermitian) {
    in.Abs = in.Asb.adjoint();
    in.Abb = Y + Y.adjoint();
  } else if (sym == Sym::complex_symmetric) {
    in.Abs = in.Asb.transpose();
    in.Abb = Y + Y.transpose();
  } else {
    in.Abs = random_mat(b, s, rng);
    if (block_coupling) {
      in.Abs.topRightCorner(p.nL, p.mR).setZero();
      in.Abs.bottomLeftCorner(p.nR, p.mL).setZero();
    }
    in.Abb = Y;
  }
  return in;
}

SigmaInput hermitian_sigma(const Partition& p, Rng& rng, bool block_diagonal) {
  const Index s = p.s(), b = p.b();
  Mat X = random_mat(s + b, s + b, rng);
  Mat S = X * X.adjoint() + static_cast<double>(s + b) * Mat::Identity(s + b, s + b);
  if (block_diagonal) {
    S.block(0, p.mL, p.mL, p.mR).setZero();
    S.block(p.mL, 0, p.mR, p.mL).setZero();
  }
  S.block(0, s + p.nL, p.mL, p.nR).setZero();
  S.block(s + p.nL, 0, p.nR, p.mL).setZero();
  S.block(p.mL, s, p.mR, p.nL).setZero();
  S.block(s, p.mL, p.nL, p.mR).setZero();
  SigmaInput in;
  in.part = p;
  in.Sss = S.topLeftCorner(s, s);
  in.Ssb = S.topRightCorner(s, b);
  in.Sbs = S.bottomLeftCorner(b, s);
  in.Sbb = S.bottomRightCorner(b, b);
  return in;
}

Mat oracle_U(const EliminationInput& in) { return in.Abb - in.Abs * in.Ass.lu().solve(in.Asb); }
Mat oracle_L(const EliminationInput& in) {
  return in.Ass.transpose().lu().solve(in.Abs.transpose()).transpose();
}

const std::vector<Kernel> kAllKernels = {Kernel::naive_dense, Kernel::parallel_inverse, Kernel::sequential_inverse,
                                         Kernel::block_lu,    Kernel::naive_lu,         Kernel::cholesky,
                                         Kernel::ldlt,        Kernel::symmetric_sparse};

Sym needs(Kernel k) {
  if (kernel_needs_hermitian(k)) return Sym::hermitian;
  if (kernel_needs_complex_symmetric(k)) return Sym::complex_symmetric;
  return Sym::general;
}

}  // namespace

TEST_CASE("kernel name round trip") {
  for (Kernel k : kAllKernels) CHECK(kernel_from_name(kernel_name(k)) == k);
  CHECK(kernel_from_name("naive") == Kernel::naive_dense);
  CHECK_THROWS_AS(kernel_from_name("bogus"), Error);
  for (SigmaKernel k : {SigmaKernel::naive, SigmaKernel::sparse, SigmaKernel::sparse_alt, SigmaKernel::symmetric})
    CHECK(sigma_kernel_from_name(sigma_kernel_name(k)) == k);
  CHECK(sigma_kernel_from_name("sparse_alt") == SigmaKernel::sparse_alt);
  CHECK(kernel_needs_hermitian(Kernel::cholesky));
  CHECK(kernel_needs_hermitian(Kernel::symmetric_sparse));
  CHECK(kernel_needs_complex_symmetric(Kernel::ldlt));
  CHECK_FALSE(kernel_needs_hermitian(Kernel::block_lu));
}

TEST_CASE("scalar Schur complement") {
  EliminationInput in;
  in.Ass = Mat::Constant(1, 1, 2.0);
  in.Asb = Mat::Constant(1, 1, 1.0);
  in.Abs = Mat::Constant(1, 1, 1.0);
  in.Abb = Mat::Constant(1, 1, 3.0);
  in.part = Partition::flat(1, 1);
  FlopLedger ledger;
  const SchurResult r = schur_update(in, ledger);
  CHECK(std::abs(r.U(0, 0) - cplx(2.5)) < 1e-15);
  REQUIRE(r.has_L);
  CHECK(std::abs(r.L(0, 0) - cplx(0.5)) < 1e-15);
  CHECK(ledger.sixths("naive") == 2 + 6 + 6);
}

TEST_CASE("identity Ass returns Abb - Abs Asb and L = Abs") {
  Rng rng(11);
  EliminationInput in;
  in.part = Partition::flat(3, 2);
  in.Ass = Mat::Identity(3, 3);
  in.Asb = random_mat(3, 2, rng);
  in.Abs = random_mat(2, 3, rng);
  in.Abb = random_mat(2, 2, rng);
  FlopLedger ledger;
  const SchurResult r = schur_update(in, ledger);
  CHECK(rel_diff(r.U, in.Abb - in.Abs * in.Asb) < 1e-14);
  CHECK(rel_diff(r.L, in.Abs) < 1e-14);
}

TEST_CASE("schur_update matches a dense partial factorization") {
  Rng rng(12);
  const Index n = 6, s = 4, b = 2;
  Mat M = random_mat(n, n, rng) + 6.0 * Mat::Identity(n, n);
  EliminationInput in;
  in.part = Partition::flat(s, b);
  in.Ass = M.topLeftCorner(s, s);
  in.Asb = M.topRightCorner(s, b);
  in.Abs = M.bottomLeftCorner(b, s);
  in.Abb = M.bottomRightCorner(b, b);
  FlopLedger ledger;
  const SchurResult r = schur_update(in, ledger);
  // Gaussian elimination of the first s columns without pivoting.
  Mat W = M;
  for (Index k = 0; k < s; ++k)
    for (Index i = k + 1; i < n; ++i) {
      const cplx f = W(i, k) / W(k, k);
      W.row(i) -= f * W.row(k);
    }
  CHECK(rel_diff(r.U, W.bottomRightCorner(b, b)) < 1e-13);
  // The inverse of the trailing block of M^{-1} is U.
  const Mat Minv = M.inverse();
  CHECK(rel_diff(r.U.inverse(), Minv.bottomRightCorner(b, b)) < 1e-12);
}

TEST_CASE("empty S keeps Abb") {
  EliminationInput in;
  in.part = Partition::flat(0, 2);
  in.Ass = Mat(0, 0);
  in.Asb = Mat(0, 2);
  in.Abs = Mat(2, 0);
  in.Abb = Mat::Identity(2, 2);
  for (Kernel k : kAllKernels) {
    FlopLedger ledger;
    const SchurResult r = eliminate(k, in, true, ledger);
    CHECK(rel_diff(r.U, in.Abb) == 0.0);
    CHECK(ledger.sixths() == 0);
  }
}

TEST_CASE("sigma_update against its definition") {
  Rng rng(13);
  SUBCASE("L = 0 returns Sbb") {
    const Mat Sss = random_mat(3, 3, rng), Ssb = random_mat(3, 2, rng), Sbs = random_mat(2, 3, rng);
    const Mat Sbb = random_mat(2, 2, rng);
    FlopLedger ledger;
    CHECK(rel_diff(sigma_update(Sss, Ssb, Sbs, Sbb, Mat::Zero(2, 3), ledger), Sbb) == 0.0);
  }
  SUBCASE("scalar with identity sigma gives 1 + |l|^2") {
    const cplx l(0.3, -0.4);
    FlopLedger ledger;
    const Mat R = sigma_update(Mat::Identity(1, 1), Mat::Zero(1, 1), Mat::Zero(1, 1), Mat::Identity(1, 1),
                               Mat::Constant(1, 1, l), ledger);
    CHECK(std::abs(R(0, 0) - cplx(1.0 + std::norm(l))) < 1e-15);
    CHECK(ledger.sixths("sigma_naive") == 6 * (1 + 3));
  }
  SUBCASE("matches the trailing block of the congruence by the eliminator") {
    const Index s = 4, b = 3;
    const Mat L = random_mat(b, s, rng);
    const Mat Sg = random_mat(s + b, s + b, rng);
    Mat E = Mat::Identity(s + b, s + b);
    E.bottomLeftCorner(b, s) = -L;
    const Mat full = E * Sg * E.adjoint();
    FlopLedger ledger;
    const Mat R = sigma_update(Sg.topLeftCorner(s, s), Sg.topRightCorner(s, b), Sg.bottomLeftCorner(b, s),
                               Sg.bottomRightCorner(b, b), L, ledger);
    CHECK(rel_diff(R, full.bottomRightCorner(b, b)) < 1e-13);
  }
}

TEST_CASE("all kernels agree with the dense Schur complement") {
  Rng rng(14);
  const std::vector<Partition> parts = {{2, 2, 3, 3}, {3, 1, 2, 4}, {1, 4, 5, 1}, {4, 4, 2, 2}, {2, 3, 0, 3}};
  for (Kernel k : kAllKernels) {
    for (const Partition& p : parts) {
      for (bool want_L : {true, false}) {
        CAPTURE(kernel_name(k));
        CAPTURE(p.mL);
        CAPTURE(p.mR);
        CAPTURE(p.nL);
        CAPTURE(p.nR);
        const EliminationInput in = structured_input(p, needs(k), rng);
        FlopLedger ledger;
        const SchurResult r = eliminate(k, in, want_L, ledger);
        CHECK(rel_diff(r.U, oracle_U(in)) < 1e-12);
        if (want_L) {
          REQUIRE(r.has_L);
          CHECK(rel_diff(r.L, oracle_L(in)) < 1e-12);
        }
        CHECK(ledger.sixths() == kernel_cost_sixths(k, p, want_L));
      }
    }
  }
}

TEST_CASE("unstructured kernels handle dense coupling") {
  Rng rng(15);
  const Partition p{3, 2, 2, 3};
  for (Kernel k : {Kernel::naive_dense, Kernel::parallel_inverse, Kernel::sequential_inverse, Kernel::block_lu,
                   Kernel::naive_lu}) {
    CAPTURE(kernel_name(k));
    const EliminationInput in = structured_input(p, Sym::general, rng, false);
    FlopLedger ledger;
    const SchurResult r = eliminate(k, in, true, ledger);
    CHECK(rel_diff(r.U, oracle_U(in)) < 1e-12);
    CHECK(rel_diff(r.L, oracle_L(in)) < 1e-12);
  }
}

TEST_CASE("symmetric kernels reject inputs without the required symmetry") {
  Rng rng(16);
  const Partition p{2, 2, 2, 2};
  const EliminationInput gen = structured_input(p, Sym::general, rng);
  FlopLedger ledger;
  CHECK_THROWS_AS(eliminate(Kernel::cholesky, gen, true, ledger), Error);
  CHECK_THROWS_AS(eliminate(Kernel::symmetric_sparse, gen, true, ledger), Error);
  CHECK_THROWS_AS(eliminate(Kernel::ldlt, gen, true, ledger), Error);
}

TEST_CASE("pivot failures carry error codes and node labels") {
  EliminationInput in;
  in.part = Partition::flat(2, 1);
  in.Ass = Mat::Zero(2, 2);
  in.Asb = Mat::Ones(2, 1);
  in.Abs = Mat::Ones(1, 2);
  in.Abb = Mat::Ones(1, 1);
  in.s_labels = {7, 9};
  FlopLedger ledger;
  try {
    schur_update(in, ledger);
    FAIL("expected a pivot failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_pivot);
    CHECK(std::string(e.what()).find("node 7") != std::string::npos);
  }
  for (Kernel k : {Kernel::parallel_inverse, Kernel::sequential_inverse, Kernel::block_lu, Kernel::naive_lu}) {
    try {
      eliminate(k, in, true, ledger);
      FAIL("expected a pivot failure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::singular_pivot);
    }
  }

  EliminationInput neg = in;
  neg.Ass = -Mat::Identity(2, 2);
  neg.Abs = neg.Asb.adjoint();
  try {
    eliminate(Kernel::cholesky, neg, true, ledger);
    FAIL("expected a definiteness failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_positive_definite);
  }

  EliminationInput swap = in;
  swap.Ass << 0.0, 1.0, 1.0, 0.0;
  swap.Abs = swap.Asb.transpose();
  try {
    eliminate(Kernel::ldlt, swap, true, ledger);
    FAIL("expected a pivot failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_pivot);
  }
  CHECK_THROWS_AS(checked_inverse(Mat::Zero(3, 3), "test"), Error);
}

TEST_CASE("ldlt_factor reconstructs a complex-symmetric matrix") {
  Rng rng(17);
  const Mat X = random_mat(5, 5, rng);
  const Mat A = X * X.transpose() + 10.0 * Mat::Identity(5, 5);
  const auto [L, d] = ldlt_factor(A);
  const Mat Lu = L.triangularView<Eigen::UnitLower>();
  CHECK(rel_diff(Lu * d.asDiagonal() * Lu.transpose(), A) < 1e-13);
}

TEST_CASE("symmetric_sparse factor solve has a zero (1,2) block") {
  Rng rng(18);
  const Partition p{3, 2, 2, 4};
  const EliminationInput in = structured_input(p, Sym::hermitian, rng);
  FlopLedger ledger;
  const SchurResult r = symmetric_sparse_update(in, false, ledger);
  REQUIRE(r.factor_solve.rows() == p.s());
  CHECK(r.factor_solve.topRightCorner(p.mL, p.nR).norm() == 0.0);
  const Mat gram = r.factor_solve.adjoint() * r.factor_solve;
  CHECK(rel_diff(gram, in.Abs * in.Ass.lu().solve(in.Asb)) < 1e-12);
  // U stays Hermitian and the kernel's U matches cholesky.
  CHECK(rel_diff(r.U, r.U.adjoint()) < 1e-14);
  const SchurResult c = cholesky_schur_update(in, false, ledger);
  CHECK(rel_diff(r.U, c.U) < 1e-12);
}

TEST_CASE("optimized sigma kernels match the naive update") {
  Rng rng(19);
  const std::vector<Partition> parts = {{2, 2, 3, 3}, {3, 1, 2, 4}, {4, 4, 2, 2}};
  for (const Partition& p : parts) {
    for (bool block_diag : {true, false}) {
      const SigmaInput in = hermitian_sigma(p, rng, block_diag);
      const Mat L = random_mat(p.b(), p.s(), rng);
      FlopLedger ref_ledger;
      const Mat ref = sigma_update(in.Sss, in.Ssb, in.Sbs, in.Sbb, L, ref_ledger);
      for (SigmaKernel k : {SigmaKernel::naive, SigmaKernel::sparse, SigmaKernel::sparse_alt, SigmaKernel::symmetric}) {
        CAPTURE(sigma_kernel_name(k));
        FlopLedger ledger;
        SigmaInfo info;
        const Mat R = sigma_update_optimized(in, L, k, ledger, &info);
        CHECK(rel_diff(R, ref) < 1e-12);
        CHECK(ledger.sixths() == sigma_cost_sixths(k, p));
        if (k == SigmaKernel::sparse || k == SigmaKernel::sparse_alt)
          CHECK(info.block_diagonal_fast_path == block_diag);
      }
    }
  }
}

TEST_CASE("structured sigma kernels require a Hermitian sigma") {
  Rng rng(20);
  const Partition p{2, 2, 2, 2};
  SigmaInput in = hermitian_sigma(p, rng, true);
  in.Sbb(0, 1) += cplx(0.5, 0.0);
  const Mat L = random_mat(4, 4, rng);
  FlopLedger ledger;
  CHECK_THROWS_AS(sigma_update_optimized(in, L, SigmaKernel::symmetric, ledger), Error);
  CHECK_THROWS_AS(sigma_update_optimized(in, L, SigmaKernel::sparse_alt, ledger), Error);
  CHECK_NOTHROW(sigma_update_optimized(in, L, SigmaKernel::sparse, ledger));
}

TEST_CASE("ledger polynomials") {
  SUBCASE("naive and symmetric sigma in sixths") {
    for (Index s : {1, 3, 8})
      for (Index b : {0, 2, 5}) {
        const Partition p = Partition::flat(s, b);
        CHECK(kernel_cost_sixths(Kernel::naive_dense, p, true) == 2 * s * s * s + 6 * s * s * b + 6 * s * b * b);
        CHECK(sigma_cost_sixths(SigmaKernel::symmetric, p) == s * s * s + 6 * s * s * b + 9 * s * b * b);
        CHECK(sigma_cost_sixths(SigmaKernel::naive, p) == 6 * (s * s * b + 3 * s * b * b));
      }
  }
  SUBCASE("symmetric partitions reproduce the closed forms exactly") {
    for (Index m : {1, 4, 16, 64})
      for (Index n : {1, 3, 32, 192}) {
        const Partition p{m, m, n, n};
        const double M = static_cast<double>(m), N = static_cast<double>(n);
        for (Kernel k : {Kernel::naive_dense, Kernel::parallel_inverse, Kernel::sequential_inverse,
                         Kernel::naive_lu, Kernel::cholesky, Kernel::ldlt, Kernel::symmetric_sparse}) {
          CAPTURE(kernel_name(k));
          const bool want_L = !(k == Kernel::cholesky || k == Kernel::ldlt || k == Kernel::symmetric_sparse);
          CHECK(static_cast<double>(kernel_cost_sixths(k, p, want_L)) == doctest::Approx(6 * flop_model(k, M, N)).epsilon(1e-15));
        }
        CHECK(static_cast<double>(kernel_cost_sixths(Kernel::block_lu, p, false)) ==
              doctest::Approx(6 * flop_model(Kernel::block_lu, M, N)).epsilon(1e-15));
        // Without the final product 4 m n^2 the parallel kernel costs 8/3 m^3 + 4 m^2 n.
        const std::int64_t par = kernel_cost_sixths(Kernel::parallel_inverse, p, true);
        CHECK(par - 6 * 4 * m * n * n == 16 * m * m * m + 24 * m * m * n);
        // Cholesky costs exactly half of the naive kernel.
        CHECK(2 * kernel_cost_sixths(Kernel::cholesky, p, false) == kernel_cost_sixths(Kernel::naive_dense, p, false));
      }
  }
  SUBCASE("form_L extras are charged under their own keys") {
    const Partition p{2, 3, 4, 1};
    FlopLedger ledger;
    charge_kernel(Kernel::cholesky, p, true, ledger);
    CHECK(ledger.sixths("cholesky.form_L") == 3 * 25 * 5);
    CHECK(ledger.sixths("cholesky") == kernel_cost_sixths(Kernel::cholesky, p, false));
  }
  SUBCASE("flop_model reference values") {
    const double a = 7.0;
    CHECK(flop_model(Kernel::parallel_inverse, a, 3 * a) == doctest::Approx(152.0 / 3 * a * a * a));
    CHECK(flop_model(Kernel::naive_dense, 1, 1) == doctest::Approx(8.0 / 3 + 8 + 8));
    CHECK(flop_model_sb(Kernel::cholesky, 6, 2) == doctest::Approx(0.5 * flop_model_sb(Kernel::naive_dense, 6, 2)));
    // Combined symmetry ratio at m = (sqrt 3 / 2) n.
    const double n = 1000, m = 0.8660254037844386 * n;
    const double ratio = flop_model(Kernel::symmetric_sparse, m, n) / flop_model(Kernel::naive_dense, m, n);
    CHECK(ratio == doctest::Approx(0.2795).epsilon(1e-3));
    CHECK(sigma_flop_model(SigmaKernel::naive, 2, 3) == doctest::Approx(12 + 54));
  }
}

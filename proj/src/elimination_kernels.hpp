// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "common.hpp"
#include "flops.hpp"

namespace fsi {

enum class Kernel {
  naive_dense,
  parallel_inverse,
  sequential_inverse,
  block_lu,
  naive_lu,
  cholesky,
  ldlt,
  symmetric_sparse,
};

const char* kernel_name(Kernel k);
Kernel kernel_from_name(const std::string& name);
bool kernel_is_structured(Kernel k);
bool kernel_needs_hermitian(Kernel k);
bool kernel_needs_complex_symmetric(Kernel k);

enum class SigmaKernel { naive, sparse, sparse_alt, symmetric };

const char* sigma_kernel_name(SigmaKernel k);
SigmaKernel sigma_kernel_from_name(const std::string& name);

// S = S_L ++ S_R and B = B_L ++ B_R.
struct Partition {
  Index mL = 0, mR = 0, nL = 0, nR = 0;
  Index s() const { return mL + mR; }
  Index b() const { return nL + nR; }
  static Partition flat(Index s, Index b) { return Partition{s, 0, b, 0}; }
};

struct EliminationInput {
  Mat Ass, Asb, Abs, Abb;
  Partition part;
  NodeList s_labels;  // optional; names the failing node in pivot errors
};

struct SchurResult {
  Mat U;            // Abb - Abs Ass^{-1} Asb
  Mat L;            // Abs Ass^{-1}, when requested
  bool has_L = false;
  Mat factor_solve;  // G^{-1} Asb for the Cholesky-based kernels
};

struct SigmaInput {
  Mat Sss, Ssb, Sbs, Sbb;
  Partition part;
};

struct SigmaInfo {
  bool block_diagonal_fast_path = false;
};

// Pivot test: |pivot| < kPivotTol * max |row|.
inline constexpr double kPivotTol = 1e-12;

SchurResult schur_update(const EliminationInput& in, FlopLedger& ledger, bool want_L = true);
Mat sigma_update(const Mat& Sss, const Mat& Ssb, const Mat& Sbs, const Mat& Sbb, const Mat& L, FlopLedger& ledger);

// parallel_inverse, sequential_inverse, block_lu or naive_lu.
SchurResult block_kernel_update(const EliminationInput& in, Kernel method, bool want_L, FlopLedger& ledger);
SchurResult cholesky_schur_update(const EliminationInput& in, bool want_L, FlopLedger& ledger);
SchurResult ldlt_schur_update(const EliminationInput& in, bool want_L, FlopLedger& ledger);
SchurResult symmetric_sparse_update(const EliminationInput& in, bool want_L, FlopLedger& ledger);
SchurResult eliminate(Kernel k, const EliminationInput& in, bool want_L, FlopLedger& ledger);

Mat sigma_update_optimized(const SigmaInput& in, const Mat& L, SigmaKernel mode, FlopLedger& ledger,
                           SigmaInfo* info = nullptr);

// Inverse with the pivot test; errors name the location.
Mat checked_inverse(const Mat& M, const std::string& where);

// Complex-symmetric A = L D L^T without pivoting; L unit lower.
std::pair<Mat, Vec> ldlt_factor(const Mat& A);

// Ledger charges shared by the kernels and by ledger-only traversals.
void charge_kernel(Kernel k, const Partition& p, bool want_L, FlopLedger& ledger);
void charge_sigma(SigmaKernel k, const Partition& p, FlopLedger& ledger);
std::int64_t kernel_cost_sixths(Kernel k, const Partition& p, bool want_L);
std::int64_t sigma_cost_sixths(SigmaKernel k, const Partition& p);

// Closed-form polynomials with m = s/2, n = b/2.
double flop_model(Kernel k, double m, double n);
double flop_model_sb(Kernel k, double s, double b);
double sigma_flop_model(SigmaKernel k, double s, double b);

}  // namespace fsi

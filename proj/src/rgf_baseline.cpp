// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "rgf_baseline.hpp"

#include <chrono>

#include "elimination_kernels.hpp"

namespace fsi {

namespace {

void charge_forward(Index n, bool first, FlopLedger& ledger) {
  ledger.add("rgf_forward", FlopLedger::kUnit * (first ? n * n * n : 3 * n * n * n));
}

void charge_backward(Index n, FlopLedger& ledger) { ledger.add("rgf_backward", FlopLedger::kUnit * 4 * n * n * n); }

void charge_right(Index n, bool first, FlopLedger& ledger) {
  ledger.add("rgf_right", FlopLedger::kUnit * (first ? n * n * n : 3 * n * n * n));
}

void charge_gless(Index n, bool has_left, bool has_right, FlopLedger& ledger) {
  // Reduced block operator (two products per coupled side) and G S G^H.
  const Index sides = (has_left ? 1 : 0) + (has_right ? 1 : 0);
  ledger.add("rgf_gless", FlopLedger::kUnit * (2 * sides + 3) * n * n * n);
}

}  // namespace

std::vector<NodeList> block_partition(const Mesh& mesh) {
  std::vector<NodeList> blocks(mesh.ny);
  for (int y = 0; y < mesh.ny; ++y)
    for (int x = 0; x < mesh.nx; ++x) blocks[y].push_back(mesh.id(x, y));
  return blocks;
}

RgfResult rgf_solve(const Mesh& mesh, const SparseOperator& A, const SparseOperator* Sigma) {
  const auto t0 = std::chrono::steady_clock::now();
  check_stencil_pattern(A, mesh);
  const bool gless = Sigma != nullptr;
  if (gless) check_pattern_subset(*Sigma, A);
  const auto blocks = block_partition(mesh);
  const int nb = mesh.ny;
  const Index n = mesh.nx;
  RgfResult r;
  r.has_gless = gless;
  FlopLedger& ledger = r.ledger;

  auto Aii = [&](int i) { return extract(A, blocks[i], blocks[i]); };
  auto Aij = [&](int i, int j) { return extract(A, blocks[i], blocks[j]); };
  auto where = [](int i) { return "block " + std::to_string(i); };

  // Left-connected sweep.
  std::vector<Mat> gl(nb);
  gl[0] = checked_inverse(Aii(0), where(0));
  charge_forward(n, true, ledger);
  for (int i = 1; i < nb; ++i) {
    const Mat T = Aij(i, i - 1) * gl[i - 1];
    gl[i] = checked_inverse(Aii(i) - T * Aij(i - 1, i), where(i));
    charge_forward(n, false, ledger);
  }

  // Backward sweep for the diagonal blocks of G.
  std::vector<Mat> G(nb);
  G[nb - 1] = gl[nb - 1];
  for (int i = nb - 2; i >= 0; --i) {
    const Mat X = gl[i] * Aij(i, i + 1);
    const Mat Y = Aij(i + 1, i) * gl[i];
    G[i] = gl[i] + X * (G[i + 1] * Y);
    charge_backward(n, ledger);
  }
  r.gr_diag.assign(mesh.size(), cplx(0.0));
  for (int i = 0; i < nb; ++i)
    for (Index k = 0; k < n; ++k) r.gr_diag[blocks[i][k]] = G[i](k, k);

  if (gless) {
    const SparseOperator& S = *Sigma;
    auto Sij = [&](int i, int j) { return extract(S, blocks[i], blocks[j]); };
    // Right-connected sweep.
    std::vector<Mat> gr(nb);
    gr[nb - 1] = checked_inverse(Aii(nb - 1), where(nb - 1));
    charge_right(n, true, ledger);
    for (int i = nb - 2; i >= 0; --i) {
      const Mat T = Aij(i, i + 1) * gr[i + 1];
      gr[i] = checked_inverse(Aii(i) - T * Aij(i + 1, i), where(i));
      charge_right(n, false, ledger);
    }
    // Sigma reduced onto block i from the left and from the right.
    std::vector<Mat> RL(nb), RR(nb);
    RL[0] = Sij(0, 0);
    for (int i = 1; i < nb; ++i) {
      const Mat L = Aij(i, i - 1) * gl[i - 1];
      RL[i] = sigma_update(RL[i - 1], Sij(i - 1, i), Sij(i, i - 1), Sij(i, i), L, ledger);
    }
    RR[nb - 1] = Sij(nb - 1, nb - 1);
    for (int i = nb - 2; i >= 0; --i) {
      const Mat L = Aij(i, i + 1) * gr[i + 1];
      RR[i] = sigma_update(RR[i + 1], Sij(i + 1, i), Sij(i, i + 1), Sij(i, i), L, ledger);
    }
    r.gless_diag.assign(mesh.size(), cplx(0.0));
    for (int i = 0; i < nb; ++i) {
      Mat Ared = Aii(i);
      if (i > 0) Ared -= Aij(i, i - 1) * gl[i - 1] * Aij(i - 1, i);
      if (i + 1 < nb) Ared -= Aij(i, i + 1) * gr[i + 1] * Aij(i + 1, i);
      const Mat Gi = checked_inverse(Ared, where(i));
      const Mat Gl = Gi * (RL[i] + RR[i] - Sij(i, i)) * Gi.adjoint();
      charge_gless(n, i > 0, i + 1 < nb, ledger);
      for (Index k = 0; k < n; ++k) r.gless_diag[blocks[i][k]] = Gl(k, k);
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<cplx> rgf_gr_diag(const Mesh& mesh, const SparseOperator& A) {
  return rgf_solve(mesh, A, nullptr).gr_diag;
}

std::vector<cplx> rgf_gless_diag(const Mesh& mesh, const SparseOperator& A, const SparseOperator& Sigma) {
  return rgf_solve(mesh, A, &Sigma).gless_diag;
}

FlopLedger rgf_ledger_dry_run(const Mesh& mesh, bool gless) {
  FlopLedger ledger;
  const Index n = mesh.nx;
  const int nb = mesh.ny;
  for (int i = 0; i < nb; ++i) charge_forward(n, i == 0, ledger);
  for (int i = nb - 2; i >= 0; --i) charge_backward(n, ledger);
  if (gless) {
    for (int i = nb - 1; i >= 0; --i) charge_right(n, i == nb - 1, ledger);
    for (int i = 1; i < nb; ++i) charge_sigma(SigmaKernel::naive, Partition::flat(n, n), ledger);
    for (int i = nb - 2; i >= 0; --i) charge_sigma(SigmaKernel::naive, Partition::flat(n, n), ledger);
    for (int i = 0; i < nb; ++i) charge_gless(n, i > 0, i + 1 < nb, ledger);
  }
  return ledger;
}

}  // namespace fsi

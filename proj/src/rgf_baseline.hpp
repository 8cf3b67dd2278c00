// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "flops.hpp"
#include "mesh_partition.hpp"
#include "operators.hpp"

namespace fsi {

// One block per mesh row y, nodes in ascending x.
std::vector<NodeList> block_partition(const Mesh& mesh);

struct RgfResult {
  std::vector<cplx> gr_diag;
  std::vector<cplx> gless_diag;
  bool has_gless = false;
  FlopLedger ledger;
  double seconds = 0;
};

// Recursive Green's function sweeps over the row blocks; Sigma may be null.
RgfResult rgf_solve(const Mesh& mesh, const SparseOperator& A, const SparseOperator* Sigma);
std::vector<cplx> rgf_gr_diag(const Mesh& mesh, const SparseOperator& A);
std::vector<cplx> rgf_gless_diag(const Mesh& mesh, const SparseOperator& A, const SparseOperator& Sigma);

// Ledger of rgf_solve computed from block sizes alone.
FlopLedger rgf_ledger_dry_run(const Mesh& mesh, bool gless);

}  // namespace fsi

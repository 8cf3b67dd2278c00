// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elimination_kernels.hpp"
#include "flops.hpp"
#include "mesh_partition.hpp"
#include "operators.hpp"

namespace fsi {

enum class Tiling { full_leaves, half_leaves };

const char* tiling_name(Tiling t);
Tiling tiling_from_name(const std::string& name);

struct SolverConfig {
  Kernel kernel = Kernel::naive_dense;
  bool use_symmetry = false;
  bool compute_gless = true;
  bool compute_offdiag = false;
  Tiling tiling = Tiling::full_leaves;
  int leaf_max = 2;
  std::optional<SigmaKernel> sigma_kernel;  // unset: chosen from the kernel
  int threads = 1;
  bool keep_cluster_data = false;
};

// U and R over a boundary list (label order is the block order).
struct ClusterData {
  NodeList labels;
  Mat U;
  Mat R;
  bool present = false;

  Index pos(int label) const;
  bool has(int label) const;
  void index();

 private:
  std::vector<std::pair<int, Index>> lookup_;
};

struct OffdiagEntry {
  int i;
  int j;
  cplx value;
};

struct TilingPlan {
  Tiling mode = Tiling::full_leaves;
  std::vector<int> selected;           // leaf cluster indices, ascending leaf order
  std::vector<char> is_selected;       // per cluster index
  std::vector<int> node_owner;         // cluster index reporting each node
  std::vector<std::pair<int, int>> edges;  // undirected edges (i < j), ascending
  std::vector<int> edge_owner;         // cluster index reporting each edge
};

// Requires complement sets on the tree.
TilingPlan select_tiling(const ClusterTree& tree, const Adjacency& pattern, Tiling mode,
                         std::vector<std::string>* warnings = nullptr);

struct SelectedInverse {
  int nx = 0, ny = 0;
  std::vector<cplx> gr_diag;
  std::vector<cplx> gless_diag;
  bool has_gless = false;
  std::vector<OffdiagEntry> offdiag;  // ordered pairs, sorted by (i, j)
  FlopLedger ledger;
  double seconds_upward = 0, seconds_downward = 0, seconds_total = 0;
  std::vector<std::string> warnings;
  Kernel kernel = Kernel::naive_dense;
  SigmaKernel sigma_kernel = SigmaKernel::naive;
  Tiling tiling = Tiling::full_leaves;
  std::vector<int> selected_leaves;
};

class FindSolver {
 public:
  // Sigma may be null when G^< is not requested.
  FindSolver(const Mesh& mesh, const SparseOperator& A, const SparseOperator* Sigma, SolverConfig config);

  void upward_pass();
  // Computes complement data for every cluster and keeps it.
  void downward_pass();

  DenseBlock leaf_extract_gr(int leaf_index);
  DenseBlock leaf_extract_gless(int leaf_index);
  std::vector<OffdiagEntry> leaf_extract_offdiag(int leaf_index);

  SelectedInverse run();

  const ClusterTree& tree() const { return tree_; }
  const TilingPlan& plan() const { return plan_; }
  const ClusterData& data(std::int64_t signed_id) const;
  const FlopLedger& ledger() const { return ledger_; }
  Kernel kernel() const { return kernel_; }
  SigmaKernel sigma_kernel() const { return sigma_kernel_; }

 private:
  struct LeafOutput {
    int leaf = -1;
    NodeList nodes;  // X list: C, or B_{-C} ++ C
    Mat G;
    Mat Gless;
  };
  struct Task;

  void upward(int k, int depth, FlopLedger& ledger);
  void upward_step(int k, FlopLedger& ledger);
  void downward(int k, int depth, FlopLedger& ledger, bool extract, bool keep);
  void downward_step(int k, FlopLedger& ledger);
  LeafOutput extract_leaf(int leaf, bool halo, bool want_offdiag, FlopLedger& ledger,
                          std::vector<OffdiagEntry>* offdiag);
  void harvest(const LeafOutput& out, const std::vector<OffdiagEntry>& off);
  ClusterData merge(const ClusterData& left, const ClusterData& right, const NodeList& S, const NodeList& B,
                    std::int64_t id, FlopLedger& ledger) const;
  bool parallel_at(int depth) const;

  Mesh mesh_;
  const SparseOperator& A_;
  const SparseOperator* Sigma_;
  SolverConfig config_;
  Kernel kernel_;
  Kernel leaf_kernel_;
  SigmaKernel sigma_kernel_;
  SigmaKernel leaf_sigma_kernel_;
  bool gless_;
  Adjacency pattern_;
  ClusterTree tree_;
  TilingPlan plan_;
  std::vector<ClusterData> pos_;
  std::vector<ClusterData> neg_;
  FlopLedger ledger_;
  bool upward_done_ = false;
  int par_depth_ = 0;

  SelectedInverse* result_ = nullptr;
  std::vector<std::vector<OffdiagEntry>> leaf_offdiag_;
};

// Convenience wrapper around FindSolver::run.
SelectedInverse solve(const Mesh& mesh, const SparseOperator& A, const SparseOperator* Sigma,
                      const SolverConfig& config);

// Ledger of a full solve computed from block sizes alone.
FlopLedger find_ledger_dry_run(const Mesh& mesh, const Adjacency& pattern, const SolverConfig& config);

// Writes node,x,y,re_gr,im_gr,re_gless,im_gless.
void write_result_csv(const std::string& path, const SelectedInverse& r);
std::string result_csv(const SelectedInverse& r);
// Writes i,j,re,im.
void write_offdiag_csv(const std::string& path, const SelectedInverse& r);
std::string offdiag_csv(const SelectedInverse& r);

}  // namespace fsi

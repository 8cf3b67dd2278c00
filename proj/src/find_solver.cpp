// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "find_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <tuple>

namespace fsi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::int64_t cube(std::int64_t v) { return v * v * v; }

// Ledger keys of the leaf extraction step beyond the Schur and sigma charges.
void charge_leaf_extras(Index b, Index c, bool halo, bool gless, bool offdiag, FlopLedger& ledger) {
  const std::int64_t u = FlopLedger::kUnit;
  ledger.add("leaf_inverse", u * cube(c));
  if (halo) {
    ledger.add("leaf_halo", u * (cube(b) + 2 * c * c * b + 2 * b * b * c));
    if (gless) ledger.add("leaf_gless", u * 2 * cube(b + c));
  } else {
    if (gless) ledger.add("leaf_gless", u * 2 * cube(c));
    if (offdiag && b > 0) ledger.add("leaf_offdiag", 2 * b * b * b + u * (2 * c * c * b + b * b * c));
  }
}

Kernel leaf_kernel_for(Kernel k) {
  switch (k) {
    case Kernel::cholesky:
    case Kernel::symmetric_sparse:
      return Kernel::cholesky;
    case Kernel::ldlt:
      return Kernel::ldlt;
    default:
      return Kernel::naive_dense;
  }
}

SigmaKernel default_sigma_kernel(Kernel k) {
  return (kernel_is_structured(k) || k == Kernel::symmetric_sparse) ? SigmaKernel::sparse : SigmaKernel::naive;
}

std::vector<Index> positions(const ClusterData& d, const NodeList& labels) {
  std::vector<Index> out(labels.size());
  for (size_t k = 0; k < labels.size(); ++k) out[k] = d.pos(labels[k]);
  return out;
}

Mat block2(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
  Mat out(a.rows() + c.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.topRightCorner(b.rows(), b.cols()) = b;
  out.bottomLeftCorner(c.rows(), c.cols()) = c;
  out.bottomRightCorner(d.rows(), d.cols()) = d;
  return out;
}

NodeList concat(const NodeList& a, const NodeList& b) {
  NodeList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Splits a sorted list by membership in the left data set.
template <typename Pred>
std::pair<NodeList, NodeList> split_by(const NodeList& v, Pred in_left) {
  std::pair<NodeList, NodeList> out;
  for (int x : v) (in_left(x) ? out.first : out.second).push_back(x);
  return out;
}


[[noreturn]] void rethrow_at(const Error& e, std::int64_t id) {
  fail(e.code(), "cluster " + std::to_string(id) + ": " + e.what());
}

std::vector<std::pair<int, int>> pattern_edges(const Adjacency& pattern) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < static_cast<int>(pattern.size()); ++i)
    for (int j : pattern[i])
      if (i < j) edges.emplace_back(i, j);
  return edges;
}

TilingPlan full_plan(const ClusterTree& tree, const Adjacency& pattern) {
  TilingPlan plan;
  plan.mode = Tiling::full_leaves;
  plan.selected = tree.leaves;
  plan.is_selected.assign(tree.clusters.size(), 0);
  plan.node_owner.assign(tree.mesh.size(), -1);
  for (int l : tree.leaves) {
    plan.is_selected[l] = 1;
    for (int v : tree.clusters[l].nodes) plan.node_owner[v] = l;
  }
  plan.edges = pattern_edges(pattern);
  plan.edge_owner.resize(plan.edges.size());
  for (size_t e = 0; e < plan.edges.size(); ++e) plan.edge_owner[e] = plan.node_owner[plan.edges[e].first];
  return plan;
}

}  // namespace

const char* tiling_name(Tiling t) { return t == Tiling::full_leaves ? "full_leaves" : "half_leaves"; }

Tiling tiling_from_name(const std::string& name) {
  if (name == "full_leaves" || name == "full") return Tiling::full_leaves;
  if (name == "half_leaves" || name == "half") return Tiling::half_leaves;
  fail(ErrorCode::invalid_argument, "unknown tiling: " + name);
}

void ClusterData::index() {
  lookup_.resize(labels.size());
  for (size_t k = 0; k < labels.size(); ++k) lookup_[k] = {labels[k], static_cast<Index>(k)};
  std::sort(lookup_.begin(), lookup_.end());
}

Index ClusterData::pos(int label) const {
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::make_pair(label, Index{-1}));
  if (it == lookup_.end() || it->first != label)
    fail(ErrorCode::internal, "label " + std::to_string(label) + " is not in the cluster boundary");
  return it->second;
}

bool ClusterData::has(int label) const {
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::make_pair(label, Index{-1}));
  return it != lookup_.end() && it->first == label;
}

TilingPlan select_tiling(const ClusterTree& tree, const Adjacency& pattern, Tiling mode,
                         std::vector<std::string>* warnings) {
  if (!tree.has_complements()) fail(ErrorCode::state, "select_tiling requires complement sets");
  if (mode == Tiling::full_leaves) return full_plan(tree, pattern);

  const Cluster& first = tree.clusters[tree.leaves.front()];
  for (int l : tree.leaves) {
    const Cluster& c = tree.clusters[l];
    if (c.w != first.w || c.h != first.h) {
      if (warnings) warnings->push_back("half-leaves tiling needs uniform leaves; using full-leaves");
      return full_plan(tree, pattern);
    }
  }

  const int n = tree.mesh.size();
  std::vector<int> node_leaf(n, -1);
  for (int l : tree.leaves)
    for (int v : tree.clusters[l].nodes) node_leaf[v] = l;

  std::vector<char> sel(tree.clusters.size(), 0);
  std::vector<std::vector<int>> in_x(n);  // selected leaves whose X contains each node
  auto select = [&](int l) {
    if (sel[l]) return;
    sel[l] = 1;
    for (int v : tree.clusters[l].nodes) in_x[v].push_back(l);
    for (int v : tree.complements[l].boundary) in_x[v].push_back(l);
  };
  for (int l : tree.leaves) {
    const Cluster& c = tree.clusters[l];
    if (((c.x0 / first.w) + (c.y0 / first.h)) % 2 == 0) select(l);
  }
  auto common = [&](int i, int j) {
    int best = -1;
    for (int a : in_x[i])
      if (std::find(in_x[j].begin(), in_x[j].end(), a) != in_x[j].end()) best = best < 0 ? a : std::min(best, a);
    return best;
  };

  TilingPlan plan;
  plan.mode = Tiling::half_leaves;
  plan.edges = pattern_edges(pattern);
  for (const auto& [i, j] : plan.edges)
    if (common(i, j) < 0) select(node_leaf[i]);
  for (int v = 0; v < n; ++v)
    if (in_x[v].empty()) select(node_leaf[v]);

  // Owners follow left-to-right leaf order.
  std::vector<int> rank(tree.clusters.size(), -1);
  for (size_t r = 0; r < tree.leaves.size(); ++r) rank[tree.leaves[r]] = static_cast<int>(r);
  auto first_of = [&](const std::vector<int>& ls) {
    int best = -1;
    for (int l : ls)
      if (best < 0 || rank[l] < rank[best]) best = l;
    return best;
  };

  plan.is_selected.assign(tree.clusters.size(), 0);
  for (int l : tree.leaves)
    if (sel[l]) {
      plan.selected.push_back(l);
      plan.is_selected[l] = 1;
    }
  plan.node_owner.resize(n);
  for (int v = 0; v < n; ++v) plan.node_owner[v] = first_of(in_x[v]);
  plan.edge_owner.resize(plan.edges.size());
  for (size_t e = 0; e < plan.edges.size(); ++e) {
    const auto [i, j] = plan.edges[e];
    std::vector<int> both;
    for (int a : in_x[i])
      if (std::find(in_x[j].begin(), in_x[j].end(), a) != in_x[j].end()) both.push_back(a);
    plan.edge_owner[e] = first_of(both);
  }
  return plan;
}

FindSolver::FindSolver(const Mesh& mesh, const SparseOperator& A, const SparseOperator* Sigma, SolverConfig config)
    : mesh_(mesh), A_(A), Sigma_(Sigma), config_(config) {
  require(mesh.nx > 0 && mesh.ny > 0, "mesh dimensions must be positive");
  require(config.leaf_max >= 1, "leaf_max must be at least 1");
  require(config.threads >= 1, "threads must be at least 1");
  check_stencil_pattern(A, mesh);
  require(check_structural_symmetry(A), "the pattern of A must be structurally symmetric");
  gless_ = config.compute_gless;
  if (gless_) {
    require(Sigma != nullptr, "G^< requires a Sigma operator");
    require(Sigma->size() == A.size(), "Sigma dimension does not match A");
    check_pattern_subset(*Sigma, A);
  }

  kernel_ = config.kernel;
  if (config.use_symmetry) {
    if (is_hermitian(A, 1e-12)) {
      kernel_ = (kernel_is_structured(kernel_) || kernel_ == Kernel::symmetric_sparse) ? Kernel::symmetric_sparse
                                                                                        : Kernel::cholesky;
      if (kernel_ == Kernel::ldlt) kernel_ = Kernel::cholesky;
    } else if (is_complex_symmetric(A, 1e-12)) {
      kernel_ = Kernel::ldlt;
    } else {
      fail(ErrorCode::invalid_argument, "use_symmetry requires a Hermitian or complex-symmetric A");
    }
  }
  if (kernel_needs_hermitian(kernel_))
    require(is_hermitian(A, 1e-12), std::string(kernel_name(kernel_)) + " requires a Hermitian A");
  if (kernel_needs_complex_symmetric(kernel_))
    require(is_complex_symmetric(A, 1e-12), std::string(kernel_name(kernel_)) + " requires a complex-symmetric A");
  leaf_kernel_ = leaf_kernel_for(kernel_);
  sigma_kernel_ = config.sigma_kernel.value_or(default_sigma_kernel(kernel_));
  if (gless_ && sigma_kernel_ != SigmaKernel::naive && sigma_kernel_ != SigmaKernel::sparse)
    require(is_hermitian(*Sigma, 1e-12),
            std::string(sigma_kernel_name(sigma_kernel_)) + " requires a Hermitian Sigma");
  leaf_sigma_kernel_ = sigma_kernel_ == SigmaKernel::symmetric ? SigmaKernel::symmetric : SigmaKernel::naive;

  pattern_ = A.adjacency();
  tree_ = build_partition(mesh, config.leaf_max, pattern_);
  std::vector<std::string> warnings;
  plan_ = select_tiling(tree_, pattern_, config.tiling, &warnings);
  pos_.resize(tree_.clusters.size());
  neg_.resize(tree_.clusters.size());
  for (int t = config.threads; t > 1; t /= 2) ++par_depth_;
  (void)warnings;
}

bool FindSolver::parallel_at(int depth) const { return depth < par_depth_; }

const ClusterData& FindSolver::data(std::int64_t id) const {
  const int k = tree_.index_of(id < 0 ? -id : id);
  const ClusterData& d = id < 0 ? neg_[k] : pos_[k];
  if (!d.present) fail(ErrorCode::state, "no data stored for cluster " + std::to_string(id));
  return d;
}

ClusterData FindSolver::merge(const ClusterData& left, const ClusterData& right, const NodeList& S, const NodeList& B,
                              std::int64_t id, FlopLedger& ledger) const {
  auto in_left = [&](int v) { return left.has(v); };
  const auto [SL, SR] = split_by(S, in_left);
  const auto [BL, BR] = split_by(B, in_left);
  const auto sl = positions(left, SL), bl = positions(left, BL);
  const auto sr = positions(right, SR), br = positions(right, BR);

  EliminationInput in;
  in.part = Partition{static_cast<Index>(SL.size()), static_cast<Index>(SR.size()), static_cast<Index>(BL.size()),
                      static_cast<Index>(BR.size())};
  in.Ass = block2(left.U(sl, sl), extract(A_, SL, SR), extract(A_, SR, SL), right.U(sr, sr));
  in.Asb = block2(left.U(sl, bl), extract(A_, SL, BR), extract(A_, SR, BL), right.U(sr, br));
  in.Abs = block2(left.U(bl, sl), extract(A_, BL, SR), extract(A_, BR, SL), right.U(br, sr));
  in.Abb = block2(left.U(bl, bl), extract(A_, BL, BR), extract(A_, BR, BL), right.U(br, br));
  in.s_labels = concat(SL, SR);

  ClusterData out;
  out.labels = concat(BL, BR);
  try {
    SchurResult res = eliminate(kernel_, in, gless_, ledger);
    out.U = std::move(res.U);
    if (gless_) {
      const SparseOperator& Sg = *Sigma_;
      SigmaInput si;
      si.part = in.part;
      si.Sss = block2(left.R(sl, sl), extract(Sg, SL, SR), extract(Sg, SR, SL), right.R(sr, sr));
      si.Ssb = block2(left.R(sl, bl), extract(Sg, SL, BR), extract(Sg, SR, BL), right.R(sr, br));
      si.Sbs = block2(left.R(bl, sl), extract(Sg, BL, SR), extract(Sg, BR, SL), right.R(br, sr));
      si.Sbb = block2(left.R(bl, bl), extract(Sg, BL, BR), extract(Sg, BR, BL), right.R(br, br));
      out.R = sigma_update_optimized(si, res.L, sigma_kernel_, ledger);
    }
  } catch (const Error& e) {
    rethrow_at(e, id);
  }
  out.present = true;
  out.index();
  return out;
}

void FindSolver::upward_step(int k, FlopLedger& ledger) {
  const Cluster& c = tree_.clusters[k];
  if (!c.is_leaf()) {
    pos_[k] = merge(pos_[c.left], pos_[c.right], c.private_inner, c.boundary, c.id, ledger);
    return;
  }
  const NodeList& S = c.private_inner;
  const NodeList& B = c.boundary;
  EliminationInput in;
  in.part = Partition::flat(static_cast<Index>(S.size()), static_cast<Index>(B.size()));
  in.Ass = extract(A_, S, S);
  in.Asb = extract(A_, S, B);
  in.Abs = extract(A_, B, S);
  in.Abb = extract(A_, B, B);
  in.s_labels = S;
  ClusterData d;
  d.labels = B;
  try {
    SchurResult res = eliminate(leaf_kernel_, in, gless_, ledger);
    d.U = std::move(res.U);
    if (gless_) {
      SigmaInput si;
      si.part = in.part;
      si.Sss = extract(*Sigma_, S, S);
      si.Ssb = extract(*Sigma_, S, B);
      si.Sbs = extract(*Sigma_, B, S);
      si.Sbb = extract(*Sigma_, B, B);
      d.R = sigma_update_optimized(si, res.L, leaf_sigma_kernel_, ledger);
    }
  } catch (const Error& e) {
    rethrow_at(e, c.id);
  }
  d.present = true;
  d.index();
  pos_[k] = std::move(d);
}

void FindSolver::upward(int k, int depth, FlopLedger& ledger) {
  const Cluster& c = tree_.clusters[k];
  if (!c.is_leaf()) {
    if (parallel_at(depth)) {
      FlopLedger side;
      auto fut = std::async(std::launch::async, [&] { upward(c.left, depth + 1, side); });
      upward(c.right, depth + 1, ledger);
      fut.get();
      ledger.merge(side);
    } else {
      upward(c.left, depth + 1, ledger);
      upward(c.right, depth + 1, ledger);
    }
  }
  if (k != 0) upward_step(k, ledger);
}

void FindSolver::upward_pass() {
  upward(0, 0, ledger_);
  upward_done_ = true;
}

void FindSolver::downward_step(int k, FlopLedger& ledger) {
  const Cluster& c = tree_.clusters[k];
  const int d = c.parent;
  const int d1 = tree_.sibling(k);
  if (d == 0) {
    neg_[k] = pos_[d1];
    return;
  }
  const ComplementSets& cs = tree_.complements[k];
  neg_[k] = merge(neg_[d], pos_[d1], cs.private_inner, cs.boundary, -c.id, ledger);
}

void FindSolver::downward(int k, int depth, FlopLedger& ledger, bool extract, bool keep) {
  const Cluster& c = tree_.clusters[k];
  if (k != 0) {
    if (extract && c.is_leaf() && !plan_.is_selected[k]) return;
    downward_step(k, ledger);
  }
  if (c.is_leaf()) {
    if (extract) {
      const int slot = static_cast<int>(std::find(tree_.leaves.begin(), tree_.leaves.end(), k) - tree_.leaves.begin());
      std::vector<OffdiagEntry>* off = config_.compute_offdiag ? &leaf_offdiag_[slot] : nullptr;
      const LeafOutput out = extract_leaf(k, plan_.mode == Tiling::half_leaves, config_.compute_offdiag, ledger, off);
      harvest(out, off ? *off : std::vector<OffdiagEntry>{});
    }
  } else if (parallel_at(depth)) {
    FlopLedger side;
    auto fut = std::async(std::launch::async, [&] { downward(c.left, depth + 1, side, extract, keep); });
    downward(c.right, depth + 1, ledger, extract, keep);
    fut.get();
    ledger.merge(side);
  } else {
    downward(c.left, depth + 1, ledger, extract, keep);
    downward(c.right, depth + 1, ledger, extract, keep);
  }
  if (!keep && k != 0) neg_[k] = ClusterData{};
}

void FindSolver::downward_pass() {
  if (!upward_done_) fail(ErrorCode::state, "downward_pass requires the upward pass");
  downward(0, 0, ledger_, false, true);
}

FindSolver::LeafOutput FindSolver::extract_leaf(int leaf, bool halo, bool want_offdiag, FlopLedger& ledger,
                                                std::vector<OffdiagEntry>* offdiag) {
  const Cluster& c = tree_.clusters[leaf];
  if (!c.is_leaf()) fail(ErrorCode::invalid_argument, "cluster " + std::to_string(c.id) + " is not a leaf");
  const NodeList& C = c.nodes;
  const Index nc = static_cast<Index>(C.size());
  LeafOutput out;
  out.leaf = leaf;

  NodeList Bn;
  const ClusterData* comp = nullptr;
  if (leaf != 0) {
    comp = &neg_[leaf];
    if (!comp->present) fail(ErrorCode::state, "complement data of cluster " + std::to_string(c.id) + " is missing");
    Bn = comp->labels;
  }
  const Index nb = static_cast<Index>(Bn.size());
  const bool need_L = gless_ || want_offdiag || halo;

  try {
    const Mat Acc = extract(A_, C, C);
    Mat Uc = Acc;
    Mat L, Acb, Abc;
    if (nb > 0) {
      EliminationInput in;
      in.part = Partition::flat(nb, nc);
      in.Ass = comp->U;
      Abc = extract(A_, Bn, C);
      Acb = extract(A_, C, Bn);
      in.Asb = Abc;
      in.Abs = Acb;
      in.Abb = Acc;
      in.s_labels = Bn;
      SchurResult res = schur_update(in, ledger, need_L);
      Uc = std::move(res.U);
      L = std::move(res.L);
    }
    const Mat G = checked_inverse(Uc, "leaf " + std::to_string(c.id));
    Mat Rc;
    if (gless_ && !halo) {
      const Mat Scc = extract(*Sigma_, C, C);
      Rc = nb > 0 ? sigma_update(comp->R, extract(*Sigma_, Bn, C), extract(*Sigma_, C, Bn), Scc, L, ledger) : Scc;
    }
    charge_leaf_extras(nb, nc, halo, gless_, want_offdiag, ledger);

    if (!halo) {
      out.nodes = C;
      out.G = G;
      if (gless_) out.Gless = G * Rc * G.adjoint();
      if (want_offdiag && nb > 0) {
        // X = B ++ C; the B x B block is not formed.
        out.nodes = concat(Bn, C);
        Mat Gx = Mat::Zero(nb + nc, nb + nc);
        Gx.bottomRightCorner(nc, nc) = G;
        Gx.bottomLeftCorner(nc, nb).noalias() = -G * L;
        const Mat K = Eigen::PartialPivLU<Mat>(comp->U).solve(Abc);
        Gx.topRightCorner(nb, nc).noalias() = -K * G;
        out.G = std::move(Gx);
        if (gless_) {
          Mat Gl = Mat::Zero(nb + nc, nb + nc);
          Gl.bottomRightCorner(nc, nc) = G * Rc * G.adjoint();
          out.Gless = std::move(Gl);
        }
      }
    } else {
      out.nodes = concat(Bn, C);
      Mat Gx(nb + nc, nb + nc);
      Gx.bottomRightCorner(nc, nc) = G;
      if (nb > 0) {
        const Mat Uinv = checked_inverse(comp->U, "complement of leaf " + std::to_string(c.id));
        const Mat Gcb = -G * L;
        const Mat Gbc = -(Uinv * Abc) * G;
        Gx.bottomLeftCorner(nc, nb) = Gcb;
        Gx.topRightCorner(nb, nc) = Gbc;
        Gx.topLeftCorner(nb, nb) = Uinv;
        Gx.topLeftCorner(nb, nb).noalias() -= Gbc * L;
      }
      if (gless_) {
        const SparseOperator& Sg = *Sigma_;
        const Mat Rx = nb > 0 ? block2(comp->R, extract(Sg, Bn, C), extract(Sg, C, Bn), extract(Sg, C, C))
                              : extract(Sg, C, C);
        out.Gless = Gx * Rx * Gx.adjoint();
      }
      out.G = std::move(Gx);
    }
  } catch (const Error& e) {
    rethrow_at(e, c.id);
  }

  if (offdiag) {
    offdiag->clear();
    std::vector<std::pair<int, Index>> where(out.nodes.size());
    for (size_t k = 0; k < out.nodes.size(); ++k) where[k] = {out.nodes[k], static_cast<Index>(k)};
    std::sort(where.begin(), where.end());
    auto at = [&](int v) {
      return std::lower_bound(where.begin(), where.end(), std::make_pair(v, Index{-1}))->second;
    };
    for (size_t e = 0; e < plan_.edges.size(); ++e) {
      if (plan_.edge_owner[e] != leaf) continue;
      const auto [i, j] = plan_.edges[e];
      const Index pi = at(i), pj = at(j);
      offdiag->push_back({i, j, out.G(pi, pj)});
      offdiag->push_back({j, i, out.G(pj, pi)});
    }
  }
  return out;
}

DenseBlock FindSolver::leaf_extract_gr(int leaf_index) {
  const int k = tree_.leaves.at(leaf_index);
  FlopLedger scratch;
  const LeafOutput out = extract_leaf(k, false, false, scratch, nullptr);
  return DenseBlock{out.nodes, out.nodes, out.G};
}

DenseBlock FindSolver::leaf_extract_gless(int leaf_index) {
  if (!gless_) fail(ErrorCode::state, "G^< was not requested");
  const int k = tree_.leaves.at(leaf_index);
  FlopLedger scratch;
  const LeafOutput out = extract_leaf(k, false, false, scratch, nullptr);
  return DenseBlock{out.nodes, out.nodes, out.Gless};
}

std::vector<OffdiagEntry> FindSolver::leaf_extract_offdiag(int leaf_index) {
  const int k = tree_.leaves.at(leaf_index);
  FlopLedger scratch;
  std::vector<OffdiagEntry> off;
  extract_leaf(k, plan_.mode == Tiling::half_leaves, true, scratch, &off);
  return off;
}

void FindSolver::harvest(const LeafOutput& out, const std::vector<OffdiagEntry>&) {
  for (size_t k = 0; k < out.nodes.size(); ++k) {
    const int v = out.nodes[k];
    if (plan_.node_owner[v] != out.leaf) continue;
    const Index p = static_cast<Index>(k);
    result_->gr_diag[v] = out.G(p, p);
    if (gless_) result_->gless_diag[v] = out.Gless(p, p);
  }
}

SelectedInverse FindSolver::run() {
  const auto t0 = Clock::now();
  SelectedInverse r;
  r.nx = mesh_.nx;
  r.ny = mesh_.ny;
  r.kernel = kernel_;
  r.sigma_kernel = sigma_kernel_;
  r.tiling = plan_.mode;
  r.selected_leaves = plan_.selected;
  r.has_gless = gless_;
  if (config_.tiling != plan_.mode) r.warnings.push_back("half-leaves tiling needs uniform leaves; using full-leaves");
  r.gr_diag.assign(mesh_.size(), cplx(0.0));
  if (gless_) r.gless_diag.assign(mesh_.size(), cplx(0.0));
  leaf_offdiag_.assign(tree_.leaves.size(), {});
  result_ = &r;

  ledger_ = FlopLedger{};
  upward(0, 0, ledger_);
  upward_done_ = true;
  r.seconds_upward = seconds_since(t0);
  const auto t1 = Clock::now();
  downward(0, 0, ledger_, true, config_.keep_cluster_data);
  r.seconds_downward = seconds_since(t1);
  result_ = nullptr;

  if (config_.compute_offdiag) {
    for (auto& v : leaf_offdiag_) r.offdiag.insert(r.offdiag.end(), v.begin(), v.end());
    std::sort(r.offdiag.begin(), r.offdiag.end(),
              [](const OffdiagEntry& a, const OffdiagEntry& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    leaf_offdiag_.clear();
  }
  r.ledger = ledger_;
  r.seconds_total = seconds_since(t0);
  return r;
}

SelectedInverse solve(const Mesh& mesh, const SparseOperator& A, const SparseOperator* Sigma,
                      const SolverConfig& config) {
  FindSolver solver(mesh, A, Sigma, config);
  return solver.run();
}

FlopLedger find_ledger_dry_run(const Mesh& mesh, const Adjacency& pattern, const SolverConfig& config) {
  require(config.leaf_max >= 1, "leaf_max must be at least 1");
  require(!config.use_symmetry || kernel_needs_hermitian(config.kernel) || kernel_needs_complex_symmetric(config.kernel),
          "ledger dry run needs an explicit symmetric kernel");
  const ClusterTree tree = build_partition(mesh, config.leaf_max, pattern);
  const TilingPlan plan = select_tiling(tree, pattern, config.tiling);
  const bool gless = config.compute_gless;
  const Kernel kernel = config.kernel;
  const Kernel leaf_kernel = leaf_kernel_for(kernel);
  const SigmaKernel sk = config.sigma_kernel.value_or(default_sigma_kernel(kernel));
  const SigmaKernel leaf_sk = sk == SigmaKernel::symmetric ? SigmaKernel::symmetric : SigmaKernel::naive;
  FlopLedger ledger;

  auto charge_merge = [&](const NodeList& left, const NodeList& right, const NodeList& S, const NodeList& B) {
    Partition p;
    p.mL = static_cast<Index>(set_intersection(S, left).size());
    p.mR = static_cast<Index>(set_intersection(S, right).size());
    p.nL = static_cast<Index>(set_intersection(B, left).size());
    p.nR = static_cast<Index>(set_intersection(B, right).size());
    charge_kernel(kernel, p, gless, ledger);
    if (gless) charge_sigma(sk, p, ledger);
  };

  for (int k : tree.post_order()) {
    if (k == 0) continue;
    const Cluster& c = tree.clusters[k];
    if (c.is_leaf()) {
      const Partition p = Partition::flat(static_cast<Index>(c.private_inner.size()), static_cast<Index>(c.boundary.size()));
      charge_kernel(leaf_kernel, p, gless, ledger);
      if (gless) charge_sigma(leaf_sk, p, ledger);
    } else {
      charge_merge(tree.clusters[c.left].boundary, tree.clusters[c.right].boundary, c.private_inner, c.boundary);
    }
  }
  const bool halo = plan.mode == Tiling::half_leaves;
  for (int k : tree.pre_order()) {
    const Cluster& c = tree.clusters[k];
    if (k != 0) {
      if (c.is_leaf() && !plan.is_selected[k]) continue;
      if (c.parent != 0)
        charge_merge(tree.complements[c.parent].boundary, tree.clusters[tree.sibling(k)].boundary,
                     tree.complements[k].private_inner, tree.complements[k].boundary);
    }
    if (!c.is_leaf()) continue;
    const Index nb = k == 0 ? 0 : static_cast<Index>(tree.complements[k].boundary.size());
    const Index nc = static_cast<Index>(c.nodes.size());
    if (nb > 0) {
      const bool need_L = gless || config.compute_offdiag || halo;
      charge_kernel(Kernel::naive_dense, Partition::flat(nb, nc), need_L, ledger);
      if (gless && !halo) charge_sigma(SigmaKernel::naive, Partition::flat(nb, nc), ledger);
    }
    charge_leaf_extras(nb, nc, halo, gless, config.compute_offdiag, ledger);
  }
  return ledger;
}

std::string result_csv(const SelectedInverse& r) {
  std::string out = r.has_gless ? "node,x,y,re_gr,im_gr,re_gless,im_gless\n" : "node,x,y,re_gr,im_gr\n";
  char buf[256];
  for (size_t v = 0; v < r.gr_diag.size(); ++v) {
    const int x = static_cast<int>(v) % r.nx, y = static_cast<int>(v) / r.nx;
    int len = std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g,%.17g", v, x, y, r.gr_diag[v].real(), r.gr_diag[v].imag());
    out.append(buf, static_cast<size_t>(len));
    if (r.has_gless) {
      len = std::snprintf(buf, sizeof buf, ",%.17g,%.17g", r.gless_diag[v].real(), r.gless_diag[v].imag());
      out.append(buf, static_cast<size_t>(len));
    }
    out.push_back('\n');
  }
  return out;
}

std::string offdiag_csv(const SelectedInverse& r) {
  std::string out = "i,j,re,im\n";
  char buf[160];
  for (const auto& e : r.offdiag) {
    const int len = std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", e.i, e.j, e.value.real(), e.value.imag());
    out.append(buf, static_cast<size_t>(len));
  }
  return out;
}

namespace {
void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot open " + path + " for writing");
  f << text;
  if (!f) fail(ErrorCode::io, "write failed: " + path);
}
}  // namespace

void write_result_csv(const std::string& path, const SelectedInverse& r) { write_text(path, result_csv(r)); }
void write_offdiag_csv(const std::string& path, const SelectedInverse& r) { write_text(path, offdiag_csv(r)); }

}  // namespace fsi

// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "mesh_partition.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iterator>

namespace fsi {

NodeList Mesh::neighbors(int node) const {
  if (!contains(node)) fail(ErrorCode::invalid_argument, "node id out of range: " + std::to_string(node));
  const int x = x_of(node), y = y_of(node);
  NodeList out;
  if (y > 0) out.push_back(id(x, y - 1));
  if (x > 0) out.push_back(id(x - 1, y));
  if (x + 1 < nx) out.push_back(id(x + 1, y));
  if (y + 1 < ny) out.push_back(id(x, y + 1));
  return out;
}

Mesh build_mesh(int nx, int ny) {
  require(nx >= 1 && ny >= 1, "mesh dimensions must be positive");
  require(static_cast<std::int64_t>(nx) * ny < (std::int64_t{1} << 31), "mesh too large");
  return Mesh{nx, ny};
}

Adjacency stencil_adjacency(const Mesh& mesh) {
  Adjacency adj(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) adj[i] = mesh.neighbors(i);
  return adj;
}

const Cluster& ClusterTree::at(std::int64_t id) const { return clusters[index_of(id)]; }

int ClusterTree::index_of(std::int64_t id) const {
  auto it = by_id.find(id);
  if (it == by_id.end()) fail(ErrorCode::invalid_argument, "unknown cluster id " + std::to_string(id));
  return it->second;
}

bool ClusterTree::contains(int cluster_index, int node) const {
  const Cluster& c = clusters[cluster_index];
  return c.contains_xy(mesh.x_of(node), mesh.y_of(node));
}

int ClusterTree::sibling(int cluster_index) const {
  const int p = clusters[cluster_index].parent;
  if (p < 0) return -1;
  return clusters[p].left == cluster_index ? clusters[p].right : clusters[p].left;
}

std::vector<int> ClusterTree::post_order() const {
  std::vector<int> out;
  out.reserve(clusters.size());
  std::function<void(int)> visit = [&](int k) {
    const Cluster& c = clusters[k];
    if (!c.is_leaf()) {
      visit(c.left);
      visit(c.right);
    }
    out.push_back(k);
  };
  if (!clusters.empty()) visit(0);
  return out;
}

std::vector<int> ClusterTree::pre_order() const {
  std::vector<int> out;
  out.reserve(clusters.size());
  std::function<void(int)> visit = [&](int k) {
    out.push_back(k);
    const Cluster& c = clusters[k];
    if (!c.is_leaf()) {
      visit(c.left);
      visit(c.right);
    }
  };
  if (!clusters.empty()) visit(0);
  return out;
}

int ClusterTree::depth() const {
  int d = 0;
  for (const auto& c : clusters) d = std::max(d, c.level);
  return d;
}

namespace {

NodeList rect_nodes(const Mesh& mesh, int x0, int y0, int w, int h) {
  NodeList out;
  out.reserve(static_cast<size_t>(w) * h);
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) out.push_back(mesh.id(x, y));
  return out;
}

}  // namespace

ClusterTree build_cluster_tree(const Mesh& mesh, int leaf_max) {
  require(leaf_max >= 1, "leaf_max must be >= 1");
  require(mesh.nx >= 1 && mesh.ny >= 1, "mesh dimensions must be positive");
  ClusterTree tree;
  tree.mesh = mesh;
  tree.leaf_max = leaf_max;

  Cluster root;
  root.id = 1;
  root.w = mesh.nx;
  root.h = mesh.ny;
  tree.clusters.push_back(root);

  // Breadth-first so that indices grow with level.
  for (size_t k = 0; k < tree.clusters.size(); ++k) {
    Cluster c = tree.clusters[k];
    if (c.w <= leaf_max && c.h <= leaf_max) continue;
    Cluster a, b;
    a.level = b.level = c.level + 1;
    a.parent = b.parent = static_cast<int>(k);
    a.id = 2 * c.id;
    b.id = 2 * c.id + 1;
    require(b.id > 0, "cluster tree too deep");
    if (c.w >= c.h) {
      const int wa = (c.w + 1) / 2;
      a.x0 = c.x0, a.y0 = c.y0, a.w = wa, a.h = c.h;
      b.x0 = c.x0 + wa, b.y0 = c.y0, b.w = c.w - wa, b.h = c.h;
      c.split_axis = SplitAxis::x;
    } else {
      const int ha = (c.h + 1) / 2;
      a.x0 = c.x0, a.y0 = c.y0, a.w = c.w, a.h = ha;
      b.x0 = c.x0, b.y0 = c.y0 + ha, b.w = c.w, b.h = c.h - ha;
      c.split_axis = SplitAxis::y;
    }
    c.left = static_cast<int>(tree.clusters.size());
    c.right = c.left + 1;
    tree.clusters[k] = c;
    tree.clusters.push_back(a);
    tree.clusters.push_back(b);
  }

  for (size_t k = 0; k < tree.clusters.size(); ++k) {
    Cluster& c = tree.clusters[k];
    c.nodes = rect_nodes(mesh, c.x0, c.y0, c.w, c.h);
    tree.by_id[c.id] = static_cast<int>(k);
  }
  for (int k : tree.post_order())
    if (tree.clusters[k].is_leaf()) tree.leaves.push_back(k);
  return tree;
}

NodeList boundary_nodes(const Adjacency& pattern, const NodeList& cluster_nodes) {
  const int n = static_cast<int>(pattern.size());
  NodeList sorted = cluster_nodes;
  std::sort(sorted.begin(), sorted.end());
  NodeList out;
  for (int v : sorted) {
    if (v < 0 || v >= n) fail(ErrorCode::invalid_argument, "node id out of range: " + std::to_string(v));
    for (int u : pattern[v]) {
      if (!std::binary_search(sorted.begin(), sorted.end(), u)) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

NodeList set_union(const NodeList& a, const NodeList& b) {
  NodeList out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeList set_difference(const NodeList& a, const NodeList& b) {
  NodeList out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeList set_intersection(const NodeList& a, const NodeList& b) {
  NodeList out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeList private_inner_nodes(Cluster& parent, const Cluster& left, const Cluster& right) {
  if (!set_intersection(left.nodes, right.nodes).empty() ||
      set_union(left.nodes, right.nodes) != parent.nodes)
    fail(ErrorCode::state, "children do not partition cluster " + std::to_string(parent.id));
  parent.private_inner = set_difference(set_union(left.boundary, right.boundary), parent.boundary);
  return parent.private_inner;
}

void annotate_cluster_tree(ClusterTree& tree, const Adjacency& pattern) {
  require(static_cast<int>(pattern.size()) == tree.mesh.size(), "pattern size does not match mesh");
  for (auto& c : tree.clusters) {
    c.boundary = boundary_nodes(pattern, c.nodes);
    c.inner = set_difference(c.nodes, c.boundary);
  }
  for (int k : tree.post_order()) {
    Cluster& c = tree.clusters[k];
    if (c.is_leaf())
      c.private_inner = c.inner;
    else
      private_inner_nodes(c, tree.clusters[c.left], tree.clusters[c.right]);
  }
  tree.annotated = true;
  tree.complements.clear();
}

void complement_boundary_sets(ClusterTree& tree, const Adjacency& pattern) {
  if (!tree.annotated) fail(ErrorCode::state, "complement sets requested before the basic tree is annotated");
  require(static_cast<int>(pattern.size()) == tree.mesh.size(), "pattern size does not match mesh");
  tree.complements.assign(tree.clusters.size(), ComplementSets{});
  for (int k : tree.pre_order()) {
    const Cluster& c = tree.clusters[k];
    ComplementSets& cs = tree.complements[k];
    cs.id = -c.id;
    if (c.parent < 0) continue;
    NodeList b;
    for (int v : c.nodes)
      for (int u : pattern[v])
        if (!tree.contains(k, u)) b.push_back(u);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    cs.boundary = std::move(b);
    if (c.parent == 0) continue;
    const NodeList& bd = tree.complements[c.parent].boundary;
    const NodeList& bs = tree.clusters[tree.sibling(k)].boundary;
    cs.private_inner = set_difference(set_union(bd, bs), cs.boundary);
  }
}

ClusterTree build_partition(const Mesh& mesh, int leaf_max, const Adjacency& pattern) {
  ClusterTree tree = build_cluster_tree(mesh, leaf_max);
  annotate_cluster_tree(tree, pattern);
  complement_boundary_sets(tree, pattern);
  return tree;
}

std::string dump_tree(const ClusterTree& tree) {
  std::string out = "# id level x0 y0 w h |C| |B| |S|\n";
  char buf[160];
  for (int k : tree.pre_order()) {
    const Cluster& c = tree.clusters[k];
    std::snprintf(buf, sizeof buf, "%lld %d %d %d %d %d %zu %zu %zu\n", static_cast<long long>(c.id), c.level,
                  c.x0, c.y0, c.w, c.h, c.nodes.size(), c.boundary.size(), c.private_inner.size());
    out += buf;
  }
  if (tree.has_complements()) {
    out += "# complement id level |B| |S|\n";
    for (int k : tree.pre_order()) {
      const ComplementSets& cs = tree.complements[k];
      std::snprintf(buf, sizeof buf, "%lld %d %zu %zu\n", static_cast<long long>(cs.id), tree.clusters[k].level,
                    cs.boundary.size(), cs.private_inner.size());
      out += buf;
    }
  }
  return out;
}

}  // namespace fsi

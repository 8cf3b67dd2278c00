// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace fsi {

struct Mesh {
  int nx = 0;
  int ny = 0;

  int size() const { return nx * ny; }
  int id(int x, int y) const { return x + nx * y; }
  int x_of(int node) const { return node % nx; }
  int y_of(int node) const { return node / nx; }
  bool contains(int node) const { return node >= 0 && node < size(); }
  // Stencil neighbors in ascending id order.
  NodeList neighbors(int node) const;
};

Mesh build_mesh(int nx, int ny);

// Off-diagonal adjacency lists, each sorted ascending.
using Adjacency = std::vector<NodeList>;

Adjacency stencil_adjacency(const Mesh& mesh);

enum class SplitAxis { none, x, y };

struct Cluster {
  std::int64_t id = 0;
  int level = 0;
  int x0 = 0, y0 = 0, w = 0, h = 0;
  int parent = -1;
  int left = -1;
  int right = -1;
  SplitAxis split_axis = SplitAxis::none;
  NodeList nodes;
  NodeList boundary;
  NodeList inner;
  NodeList private_inner;

  bool is_leaf() const { return left < 0; }
  bool contains_xy(int x, int y) const { return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h; }
};

// Sets carried by the complement cluster -g = M \ C_g.
struct ComplementSets {
  std::int64_t id = 0;
  NodeList boundary;
  NodeList private_inner;
};

struct ClusterTree {
  Mesh mesh;
  int leaf_max = 2;
  std::vector<Cluster> clusters;  // index 0 is the root
  std::vector<int> leaves;        // indices into clusters, left to right
  std::unordered_map<std::int64_t, int> by_id;
  bool annotated = false;
  std::vector<ComplementSets> complements;  // parallel to clusters, filled on demand

  const Cluster& root() const { return clusters.front(); }
  const Cluster& at(std::int64_t id) const;
  int index_of(std::int64_t id) const;
  bool contains(int cluster_index, int node) const;
  int sibling(int cluster_index) const;
  // Post-order (children before parents) cluster indices.
  std::vector<int> post_order() const;
  // Pre-order (parents before children) cluster indices.
  std::vector<int> pre_order() const;
  int depth() const;
  bool has_complements() const { return !complements.empty(); }
};

ClusterTree build_cluster_tree(const Mesh& mesh, int leaf_max);

// Nodes of cluster_nodes with a neighbor outside the set.
NodeList boundary_nodes(const Adjacency& pattern, const NodeList& cluster_nodes);

// (B_left U B_right) \ B_parent; stored on parent as its private inner set.
NodeList private_inner_nodes(Cluster& parent, const Cluster& left, const Cluster& right);

// Fill boundary, inner and private-inner sets of every basic cluster.
void annotate_cluster_tree(ClusterTree& tree, const Adjacency& pattern);

// Boundary and private-inner sets of every complement cluster.
void complement_boundary_sets(ClusterTree& tree, const Adjacency& pattern);

// Tree, boundary sets and complement sets in one call.
ClusterTree build_partition(const Mesh& mesh, int leaf_max, const Adjacency& pattern);

std::string dump_tree(const ClusterTree& tree);

// Sorted set helpers.
NodeList set_union(const NodeList& a, const NodeList& b);
NodeList set_difference(const NodeList& a, const NodeList& b);
NodeList set_intersection(const NodeList& a, const NodeList& b);

}  // namespace fsi

// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "mesh_partition.hpp"

namespace fsi {

struct Triplet {
  int row;
  int col;
  cplx value;
};

// Row-compressed complex operator; stored entries define the pattern.
class SparseOperator {
 public:
  using Entry = std::pair<int, cplx>;

  SparseOperator() = default;
  explicit SparseOperator(int n) : rows_(n) {}
  // Duplicate entries are summed.
  static SparseOperator from_triplets(int n, const std::vector<Triplet>& triplets);

  int size() const { return static_cast<int>(rows_.size()); }
  size_t nnz() const;
  const std::vector<Entry>& row(int i) const { return rows_[i]; }
  bool has(int i, int j) const;
  cplx get(int i, int j) const;
  std::vector<Triplet> triplets() const;
  Adjacency adjacency() const;
  Mat dense() const;
  bool is_diagonal() const;

 private:
  std::vector<std::vector<Entry>> rows_;
};

// Dense block over ordered node-label lists.
struct DenseBlock {
  NodeList rows;
  NodeList cols;
  Mat values;
};

struct Contacts {
  std::vector<cplx> left;   // one value per row y on column x = 0, or empty
  std::vector<cplx> right;  // one value per row y on column x = nx - 1, or empty
};

SparseOperator assemble_A(const Mesh& mesh, const std::vector<cplx>& onsite, cplx hop_x, cplx hop_y, double energy,
                          const Contacts& contacts = {});

enum class SigmaMode { diagonal, stencil };

// Diagonal mode uses diag only; stencil mode adds off_x / off_y couplings on
// the forward neighbor and their conjugates on the backward neighbor.
SparseOperator assemble_sigma(const Mesh& mesh, SigmaMode mode, const std::vector<cplx>& diag, cplx off_x = 0.0,
                              cplx off_y = 0.0);

bool check_structural_symmetry(const SparseOperator& op);

// Throws invalid-argument unless every stored entry of op lies on the
// diagonal or on a stencil edge of mesh.
void check_stencil_pattern(const SparseOperator& op, const Mesh& mesh);

// Throws invalid-argument unless pattern(sub) is contained in pattern(super).
void check_pattern_subset(const SparseOperator& sub, const SparseOperator& super);

bool is_hermitian(const SparseOperator& op, double rtol = 1e-14);
bool is_complex_symmetric(const SparseOperator& op, double rtol = 1e-14);

DenseBlock extract_block(const SparseOperator& op, const NodeList& rows, const NodeList& cols);
// Values only, for hot paths.
Mat extract(const SparseOperator& op, const NodeList& rows, const NodeList& cols);

SparseOperator identity_operator(int n);

// Matrix Market coordinate I/O. A "%%mesh nx ny" comment records the grid.
struct MatrixFile {
  SparseOperator op;
  int nx = 0;
  int ny = 0;
};

MatrixFile read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const SparseOperator& op, int nx, int ny);

}  // namespace fsi

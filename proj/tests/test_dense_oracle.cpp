// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "invariants.hpp"
#include "mesh_partition.hpp"
#include "operators.hpp"

using namespace fsi;
using namespace fsi::testing;

namespace {

SparseOperator two_by_two() {
  return SparseOperator::from_triplets(2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 2.0}});
}

}  // namespace

TEST_CASE("dense_gr_diag closed forms") {
  const auto id = dense_gr_diag(identity_operator(5));
  for (const cplx& v : id) CHECK(std::abs(v - cplx(1.0)) < 1e-15);
  const auto d = dense_gr_diag(two_by_two());
  REQUIRE(d.size() == 2);
  CHECK(std::abs(d[0] - cplx(2.0 / 3)) < 1e-15);
  CHECK(std::abs(d[1] - cplx(2.0 / 3)) < 1e-15);
  CHECK_THROWS_AS(dense_gr_diag(SparseOperator::from_triplets(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}})),
                  Error);
}

TEST_CASE("dense inverse against solves") {
  const Mesh mesh = build_mesh(5, 4);
  for (FixtureKind kind : {FixtureKind::general, FixtureKind::hermitian_pd, FixtureKind::complex_symmetric}) {
    const SparseOperator A = random_operator(mesh, kind, 3);
    CHECK(max_relative_error(dense_gr_diag(A), dense_gr_diag_by_solves(A)) < 1e-12);
    const DMat M = to_dmat(A);
    const DMat P = dmat_multiply(M, dense_inverse(M));
    DMat I(M.rows, M.cols);
    for (int i = 0; i < M.rows; ++i) I(i, i) = 1.0;
    CHECK(dmat_rel_diff(P, I) < 1e-12);
  }
}

TEST_CASE("dense_gless_diag closed forms and cross-check") {
  const Mesh mesh = build_mesh(4, 3);
  const SparseOperator S = random_sigma(mesh, SigmaMode::stencil, 5);
  SUBCASE("A = I gives diag(Sigma)") {
    const auto g = dense_gless_diag(identity_operator(mesh.size()), S);
    for (int i = 0; i < mesh.size(); ++i) CHECK(std::abs(g[i] - S.get(i, i)) < 1e-14);
  }
  SUBCASE("Sigma = I with real symmetric A gives diag(A^-2)") {
    const SparseOperator A = assemble_A(mesh, std::vector<cplx>(mesh.size(), 4.0), -1.0, -1.0, 0.0);
    const DMat M = to_dmat(A);
    const DMat M2inv = dense_inverse(dmat_multiply(M, M));
    const auto g = dense_gless_diag(A, identity_operator(mesh.size()));
    for (int i = 0; i < mesh.size(); ++i) CHECK(std::abs(g[i] - M2inv(i, i)) < 1e-13);
  }
  SUBCASE("triple product and solves agree") {
    const SparseOperator A = random_operator(mesh, FixtureKind::general, 9);
    CHECK(max_relative_error(dense_gless_diag(A, S), dense_gless_diag_by_solves(A, S)) < 1e-12);
  }
}

TEST_CASE("max_relative_error") {
  CHECK(max_relative_error({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(max_relative_error({1.1, 2.0}, {1.0, 2.0}) == doctest::Approx(0.1));
  CHECK(max_relative_error({0.5}, {0.0}) == doctest::Approx(0.5));
}

TEST_CASE("one elimination step produces the Schur complement") {
  const Mesh mesh = build_mesh(3, 2);
  const SparseOperator A = random_operator(mesh, FixtureKind::general, 21);
  const SparseOperator S = random_sigma(mesh, SigmaMode::diagonal, 22);
  const NodeList Sset{0, 3}, Bset{1, 4};
  const Trace t = partial_elimination_trace(A, S, {{1, Sset, Bset}});
  const Mat Ss = extract(A, Sset, Sset), Sb = extract(A, Sset, Bset), Bs = extract(A, Bset, Sset),
            Bb = extract(A, Bset, Bset);
  const Mat expect = Bb - Bs * Ss.inverse() * Sb;
  REQUIRE(t.steps.size() == 1);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(t.steps[0].U(i, j) - expect(i, j)) < 1e-13);
  CHECK(t.remaining == NodeList{1, 2, 4, 5});
}

TEST_CASE("tracer rejects orderings that eliminate a node twice") {
  const Mesh mesh = build_mesh(2, 2);
  const SparseOperator A = random_operator(mesh, FixtureKind::general, 1);
  const SparseOperator S = identity_operator(4);
  CHECK_THROWS_AS(partial_elimination_trace(A, S, {{1, {0}, {}}, {2, {0}, {}}}), Error);
}

TEST_CASE("full consistent ordering leaves the target block of the inverse") {
  const Mesh mesh = build_mesh(4, 4);
  const SparseOperator A = random_operator(mesh, FixtureKind::general, 31);
  const SparseOperator S = random_sigma(mesh, SigmaMode::stencil, 32);
  const ClusterTree tree = build_partition(mesh, 2, stencil_adjacency(mesh));
  const auto gr = dense_gr_diag(A);
  const auto gl = dense_gless_diag(A, S);
  for (int leaf : tree.leaves) {
    const Trace t = partial_elimination_trace(A, S, consistent_ordering(tree, leaf, OrderingVariant::post_order), false);
    CHECK(t.remaining == tree.clusters[leaf].nodes);
    const DMat G = dense_inverse(t.A_final);
    const DMat Gl = dmat_multiply(dmat_multiply(G, t.Sigma_final), dmat_adjoint(G));
    for (size_t i = 0; i < t.remaining.size(); ++i) {
      const int v = t.remaining[i];
      CHECK(std::abs(G(static_cast<int>(i), static_cast<int>(i)) - gr[v]) < 1e-12 * std::abs(gr[v]));
      CHECK(std::abs(Gl(static_cast<int>(i), static_cast<int>(i)) - gl[v]) < 1e-12 * std::abs(gl[v]));
    }
  }
}

TEST_CASE("consistent orderings partition the mesh minus the target") {
  const Mesh mesh = build_mesh(6, 5);
  const ClusterTree tree = build_partition(mesh, 2, stencil_adjacency(mesh));
  for (OrderingVariant v : {OrderingVariant::post_order, OrderingVariant::level_by_level,
                            OrderingVariant::level_reversed}) {
    for (int leaf : tree.leaves) {
      NodeList all;
      for (const auto& st : consistent_ordering(tree, leaf, v)) all = set_union(all, st.S);
      CHECK(set_union(all, tree.clusters[leaf].nodes).size() == static_cast<size_t>(mesh.size()));
      CHECK(set_intersection(all, tree.clusters[leaf].nodes).empty());
    }
  }
}

TEST_CASE("elimination invariants on 4x4 with 2x2 leaves") {
  const Mesh mesh = build_mesh(4, 4);
  const ClusterTree tree = build_partition(mesh, 2, stencil_adjacency(mesh));
  const SparseOperator A = random_operator(mesh, FixtureKind::general, 41);
  const SparseOperator S = random_sigma(mesh, SigmaMode::stencil, 42);
  SUBCASE("shared clusters are target independent") {
    const Report r = check_target_independence(tree, A, S);
    INFO(r.first_failure);
    CHECK(r.ok());
  }
  SUBCASE("zero pattern is exact") {
    const Report r = check_zero_pattern(tree, A, S);
    INFO(r.first_failure);
    CHECK(r.ok());
  }
  SUBCASE("merge identities") {
    const Report r = check_corollaries(tree, A, S);
    INFO(r.first_failure);
    CHECK(r.ok());
  }
}

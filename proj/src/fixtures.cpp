// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <cmath>

namespace fsi {

const char* fixture_name(FixtureKind k) {
  switch (k) {
    case FixtureKind::general: return "general";
    case FixtureKind::hermitian_pd: return "hpd";
    case FixtureKind::complex_symmetric: return "complex_symmetric";
  }
  return "unknown";
}

FixtureKind fixture_from_name(const std::string& name) {
  if (name == "general") return FixtureKind::general;
  if (name == "hpd") return FixtureKind::hermitian_pd;
  if (name == "complex_symmetric") return FixtureKind::complex_symmetric;
  fail(ErrorCode::invalid_argument, "unknown fixture '" + name + "'");
}

SparseOperator random_operator(const Mesh& mesh, FixtureKind kind, std::uint64_t seed) {
  Rng rng(seed);
  const int n = mesh.size();
  std::vector<Triplet> t;
  std::vector<double> rowsum(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int x = mesh.x_of(i), y = mesh.y_of(i);
    for (int j : {x + 1 < mesh.nx ? i + 1 : -1, y + 1 < mesh.ny ? i + mesh.nx : -1}) {
      if (j < 0) continue;
      const cplx h = rng.complex_unit_box();
      cplx back;
      switch (kind) {
        case FixtureKind::general: back = rng.complex_unit_box(); break;
        case FixtureKind::hermitian_pd: back = std::conj(h); break;
        case FixtureKind::complex_symmetric: back = h; break;
      }
      t.push_back({i, j, h});
      t.push_back({j, i, back});
      rowsum[i] += std::abs(h);
      rowsum[j] += std::abs(back);
    }
  }
  for (int i = 0; i < n; ++i) {
    const double mag = rowsum[i] + 0.5 + rng.uniform();
    cplx d = mag;
    if (kind != FixtureKind::hermitian_pd) d = mag * rng.phase();
    t.push_back({i, i, d});
  }
  return SparseOperator::from_triplets(n, t);
}

SparseOperator random_sigma(const Mesh& mesh, SigmaMode mode, std::uint64_t seed) {
  Rng rng(seed ^ 0x5167a3c2d1e4f809ULL);
  const int n = mesh.size();
  std::vector<Triplet> t;
  std::vector<double> rowsum(n, 0.0);
  if (mode == SigmaMode::stencil) {
    for (int i = 0; i < n; ++i) {
      const int x = mesh.x_of(i), y = mesh.y_of(i);
      for (int j : {x + 1 < mesh.nx ? i + 1 : -1, y + 1 < mesh.ny ? i + mesh.nx : -1}) {
        if (j < 0) continue;
        const cplx h = 0.5 * rng.complex_unit_box();
        t.push_back({i, j, h});
        t.push_back({j, i, std::conj(h)});
        rowsum[i] += std::abs(h);
        rowsum[j] += std::abs(h);
      }
    }
  }
  for (int i = 0; i < n; ++i) t.push_back({i, i, rowsum[i] + 0.5 + rng.uniform()});
  return SparseOperator::from_triplets(n, t);
}

SparseOperator device_operator(const Mesh& mesh, double energy, double disorder, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> onsite(mesh.size());
  for (auto& v : onsite) v = 4.0 + disorder * rng.uniform(-1, 1);
  Contacts c;
  c.left.assign(mesh.ny, cplx(0.0, 0.5));
  c.right.assign(mesh.ny, cplx(0.0, 0.5));
  return assemble_A(mesh, onsite, -1.0, -1.0, energy, c);
}

}  // namespace fsi

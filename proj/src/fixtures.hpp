// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "mesh_partition.hpp"
#include "operators.hpp"

namespace fsi {

// Deterministic generator; conversions are written out so values do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  cplx complex_unit_box() { return {uniform(-1, 1), uniform(-1, 1)}; }
  cplx phase() {
    const double t = uniform(0.0, 6.283185307179586);
    return {std::cos(t), std::sin(t)};
  }

 private:
  std::mt19937_64 eng_;
};

enum class FixtureKind { general, hermitian_pd, complex_symmetric };

const char* fixture_name(FixtureKind k);
FixtureKind fixture_from_name(const std::string& name);

// Diagonally dominant operators on the 5-point pattern.
SparseOperator random_operator(const Mesh& mesh, FixtureKind kind, std::uint64_t seed);

// Hermitian positive-definite sigma in diagonal or stencil pattern.
SparseOperator random_sigma(const Mesh& mesh, SigmaMode mode, std::uint64_t seed);

// Tight-binding style device operator with imaginary contact terms on the
// first and last columns.
SparseOperator device_operator(const Mesh& mesh, double energy, double disorder, std::uint64_t seed);

}  // namespace fsi

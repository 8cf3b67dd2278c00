// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "elimination_kernels.hpp"
#include "find_solver.hpp"
#include "fixtures.hpp"
#include "operators.hpp"
#include "report.hpp"

namespace fsi {

enum class OracleMode { off, on, automatic };

struct BenchConfig {
  std::vector<int> sizes;  // N for N x N meshes
  std::vector<Kernel> kernels{Kernel::naive_dense};
  std::vector<std::string> methods{"find", "rgf"};
  OracleMode oracle = OracleMode::automatic;
  int oracle_max_n = 32;
  int repetitions = 3;
  bool warmup = true;
  bool ledger_only = false;
  FixtureKind fixture = FixtureKind::general;
  bool gless = true;
  SigmaMode sigma = SigmaMode::diagonal;
  std::uint64_t seed = 1;
  int leaf_max = 2;
  Tiling tiling = Tiling::full_leaves;
  int threads = 1;
  bool parallel_cells = false;
};

// key=value lines; '#' starts a comment. Errors carry source:line.
BenchConfig parse_bench_config(const std::string& text, const std::string& source = "<config>");
BenchConfig read_bench_config(const std::string& path);

struct BenchTable {
  std::vector<BenchRow> rows;  // medians, one per (method, kernel, N)
  std::vector<BenchRow> raw;   // every timed repetition
};

using BenchLog = std::function<void(const std::string&)>;

BenchTable run_benchmark(const BenchConfig& config, const BenchLog& log = {});

struct CrossoverEntry {
  std::string kernel;
  std::string metric;  // "seconds" or "flops"
  ScalingFit find_fit;
  ScalingFit rgf_fit;
  double n_star = 0;
};

// Crossovers of every FIND kernel against RGF where both fits exist.
std::vector<CrossoverEntry> bench_crossovers(const BenchTable& table, bool use_flops);

// Writes results.csv, raw_timings.csv, fits.csv, crossover.csv, summary.txt and SVG plots; returns file names.
std::vector<std::string> emit_report(const BenchTable& table, const BenchConfig& config, const std::string& out_dir);

}  // namespace fsi

// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elimination_kernels.hpp"

namespace fsi {

// One benchmark cell; max_err is NaN when no oracle ran.
struct BenchRow {
  std::string method;
  std::string kernel;
  int N = 0;
  double seconds = 0;
  double flops = 0;
  double max_err = 0;
  int repetition = -1;  // -1 for median rows
};

// Least squares fit of log y = log c + p log N.
struct ScalingFit {
  double exponent = 0;
  double constant = 0;
  double residual = 0;  // RMS residual in natural log units
  int points = 0;
};

ScalingFit fit_scaling(const std::vector<double>& N, const std::vector<double>& y);
// Fits seconds (or flops) of the median rows matching method and kernel.
ScalingFit fit_rows(const std::vector<BenchRow>& rows, const std::string& method, const std::string& kernel,
                    bool use_flops);

// N where a.constant N^a.exponent equals b.constant N^b.exponent.
double crossover(const ScalingFit& a, const ScalingFit& b);
double model_crossover(double c1 = 457.0, double p1 = 3.0, double c2 = 3.5, double p2 = 4.0);

std::string rows_to_csv(const std::vector<BenchRow>& rows);
std::string raw_rows_to_csv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_rows_csv(const std::string& text);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<ScalingFit> fit;
};

struct PlotMarker {
  std::string label;
  double x = 0;
  double y = 0;
};

std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<PlotSeries>& series, const std::vector<PlotMarker>& markers);

struct KernelTableRow {
  Kernel kernel;
  std::string formula;
  double model = 0;   // closed form at (m, n)
  double ledger = 0;  // per-step charge at (m, n)
  double naive = 0;   // naive dense model at s = 2m, b = 2n
  double percent = 0;
};

const std::array<Kernel, 4>& kernel_table_kernels();
std::vector<KernelTableRow> kernel_table(int m, int n);
// Ledger percentages of naive at (a,3a), (2a,4a), (3a,2a), (4a,3a).
std::array<double, 4> kernel_table_cases(Kernel k, int a);
std::string kernel_table_text(int m, int n, int a);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace fsi

// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "bench.hpp"
#include "doctest.h"
#include "report.hpp"
#include "rgf_baseline.hpp"

using namespace fsi;

namespace {

std::string error_text(const std::string& config) {
  try {
    parse_bench_config(config, "cfg");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("benchmark config parsing") {
  const BenchConfig c = parse_bench_config(
      "# sweep\n"
      "sizes = 8, 16, 32\n"
      "kernels = naive, parallel\n"
      "methods = find\n"
      "repetitions = 5\n"
      "oracle = off\n"
      "fixture = hpd\n"
      "sigma = stencil\n"
      "tiling = half_leaves\n"
      "ledger_only = true\n",
      "cfg");
  CHECK(c.sizes == std::vector<int>{8, 16, 32});
  CHECK(c.kernels == std::vector<Kernel>{Kernel::naive_dense, Kernel::parallel_inverse});
  CHECK(c.methods == std::vector<std::string>{"find"});
  CHECK(c.repetitions == 5);
  CHECK(c.oracle == OracleMode::off);
  CHECK(c.fixture == FixtureKind::hermitian_pd);
  CHECK(c.sigma == SigmaMode::stencil);
  CHECK(c.tiling == Tiling::half_leaves);
  CHECK(c.ledger_only);
}

TEST_CASE("benchmark config errors carry line numbers") {
  CHECK(error_text("sizes = 4\nbogus = 1\n").find("cfg:2:") != std::string::npos);
  CHECK(error_text("sizes = 4\n\nkernels = nope\n").find("cfg:3:") != std::string::npos);
  CHECK(error_text("sizes = 4\nrepetitions = 2\n").find("cfg:2:") != std::string::npos);
  CHECK(error_text("sizes =\n").find("cfg:1:") != std::string::npos);
  CHECK(error_text("sizes = 4\nnot a pair\n").find("cfg:2:") != std::string::npos);
  CHECK_FALSE(error_text("kernels = naive\n").empty());
}

TEST_CASE("scaling fits") {
  const std::vector<double> N{8, 16, 32, 64};
  std::vector<double> y;
  for (double n : N) y.push_back(2.5 * n * n * n);
  const ScalingFit f = fit_scaling(N, y);
  CHECK(std::abs(f.exponent - 3.0) < 1e-6);
  CHECK(f.constant == doctest::Approx(2.5));
  CHECK(f.residual < 1e-9);
  CHECK_THROWS_AS(fit_scaling({8, 16}, {1, 2}), Error);
  CHECK_THROWS_AS(fit_scaling({8, 10, 12}, {1, 2, 3}), Error);
}

TEST_CASE("crossover of two power laws") {
  CHECK(model_crossover() == doctest::Approx(130.57).epsilon(1e-4));
  ScalingFit a{3.0, 457.0, 0, 4}, b{4.0, 3.5, 0, 4};
  CHECK(crossover(a, b) == doctest::Approx(457.0 / 3.5));
  CHECK_THROWS_AS(crossover(a, a), Error);
}

TEST_CASE("row CSV round trip") {
  std::vector<BenchRow> rows{{"find", "naive", 8, 0.25, 1234.5, 1e-15, -1},
                             {"rgf", "rgf", 16, 1.5, 99.0, std::nan(""), -1}};
  const std::string csv = rows_to_csv(rows);
  CHECK(csv.rfind("method,kernel,N,seconds,flops,max_err\n", 0) == 0);
  const auto back = parse_rows_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].method == "find");
  CHECK(back[0].seconds == 0.25);
  CHECK(back[0].flops == 1234.5);
  CHECK(back[1].N == 16);
  CHECK(std::isnan(back[1].max_err));
  try {
    parse_rows_csv("method,kernel,N,seconds,flops,max_err\nfind,naive,x,1,2,3\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("plots") {
  PlotSeries s{"find", {8, 16, 32}, {1, 8, 64}, std::nullopt};
  const std::string svg = loglog_svg("t", "N", "s", {s}, {{"N*", 20, 10}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("N*") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("table of kernel costs") {
  const auto rows = kernel_table(64, 192);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) CHECK(r.ledger == doctest::Approx(r.model));
  const auto par = kernel_table_cases(Kernel::parallel_inverse, 64);
  CHECK(par[0] == doctest::Approx(51.4).epsilon(2e-3));
  const auto nlu = kernel_table_cases(Kernel::naive_lu, 64);
  CHECK(nlu[2] == doctest::Approx(76.0).epsilon(2e-3));
  CHECK(kernel_table_text(64, 192, 64).find("block_lu") != std::string::npos);
}

TEST_CASE("ledger-only benchmark reproduces the dry runs") {
  BenchConfig c = parse_bench_config("sizes = 8, 16, 32\nkernels = naive, block_lu\nledger_only = true\n");
  const BenchTable t = run_benchmark(c);
  REQUIRE(t.rows.size() == 9);
  for (const auto& r : t.rows) {
    if (r.method != "rgf") continue;
    CHECK(r.flops == rgf_ledger_dry_run(build_mesh(r.N, r.N), true).multiplications());
  }
  const auto fits = bench_crossovers(t, true);
  REQUIRE(fits.size() == 2);
  for (const auto& e : fits) CHECK(e.rgf_fit.exponent > e.find_fit.exponent);
}

TEST_CASE("timed benchmark with oracle and report files") {
  BenchConfig c = parse_bench_config("sizes = 4, 8, 16\nkernels = naive, parallel\nrepetitions = 3\nwarmup = false\n");
  const BenchTable t = run_benchmark(c);
  CHECK(t.rows.size() == 9);
  CHECK(t.raw.size() == 27);
  for (const auto& r : t.rows) {
    CHECK(r.max_err < 1e-10);
    CHECK(r.flops > 0);
  }
  for (const auto& r : t.raw) {
    if (r.method == "rgf") continue;
    SolverConfig sc;
    sc.kernel = kernel_from_name(r.kernel);
    const Mesh mesh = build_mesh(r.N, r.N);
    CHECK(r.flops == find_ledger_dry_run(mesh, stencil_adjacency(mesh), sc).multiplications());
  }
  const auto dir = std::filesystem::temp_directory_path() / "findselinv_test_bench";
  std::filesystem::remove_all(dir);
  const auto files = emit_report(t, c, dir.string());
  for (const char* name : {"results.csv", "raw_timings.csv", "fits.csv", "crossover.csv", "summary.txt",
                           "time_vs_N.svg", "flops_vs_N.svg"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(dir / name));
    CHECK(std::filesystem::file_size(dir / name) > 0);
  }
  CHECK(parse_rows_csv(read_text_file((dir / "results.csv").string())).size() == 9);
  CHECK(files.size() >= 7);
}

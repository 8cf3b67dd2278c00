// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "findselinv/findselinv.h"

namespace {

struct Failure {
  fsi_status status;
};

void check(fsi_status s) {
  if (s != FSI_OK) throw Failure{s};
}

int exit_code(fsi_status s) {
  if (s == FSI_OK) return 0;
  if (s == FSI_ERR_SINGULAR_PIVOT || s == FSI_ERR_NOT_POSITIVE_DEFINITE) return 2;
  return 1;
}

bool parse_mesh(const std::string& text, int* nx, int* ny) {
  int a = 0, b = 0, used = 0;
  if (std::sscanf(text.c_str(), "%dx%d%n", &a, &b, &used) != 2 || used != static_cast<int>(text.size())) return false;
  if (a <= 0 || b <= 0) return false;
  *nx = a;
  *ny = b;
  return true;
}

std::string fetch(fsi_status (*f)(char*, size_t, size_t*, const void*), const void* ctx) {
  size_t needed = 0;
  check(f(nullptr, 0, &needed, ctx));
  std::vector<char> buf(needed);
  check(f(buf.data(), buf.size(), &needed, ctx));
  return std::string(buf.data());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selected inversion of 2D mesh operators by nested-dissection elimination"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fsi_version());

  auto* bench = app.add_subcommand("bench", "Run a benchmark config and write CSV and SVG reports");
  std::string bench_config, bench_out;
  bool bench_verbose = false;
  bench->add_option("--config", bench_config, "key=value benchmark config")->required();
  bench->add_option("--out", bench_out, "output directory")->required();
  bench->add_flag("--verbose", bench_verbose, "log each cell to stderr");

  auto* solve = app.add_subcommand("solve", "Compute diag(G^r), diag(G^<) and neighbor entries");
  std::string matrix, sigma, mesh_text, kernel = "naive", out, offdiag_out, tiling = "full_leaves",
                                         sigma_kernel = "auto", method = "find";
  int leaf_max = 2, threads = 1;
  bool symmetric = false, print_ledger = false;
  solve->add_option("--matrix", matrix, "A in Matrix Market format")->required();
  solve->add_option("--sigma", sigma, "Sigma in Matrix Market format; enables G^<");
  solve->add_option("--mesh", mesh_text, "mesh as NXxNY; defaults to the %%mesh line of the matrix file");
  solve->add_option("--kernel", kernel, "naive, parallel, sequential, block_lu, naive_lu, cholesky, ldlt, symmetric_sparse");
  solve->add_option("--out", out, "diagonal CSV output")->required();
  solve->add_option("--offdiag-out", offdiag_out, "neighbor-entry CSV output");
  solve->add_option("--tiling", tiling, "full_leaves or half_leaves");
  solve->add_option("--leaf-max", leaf_max, "largest leaf side")->check(CLI::PositiveNumber);
  solve->add_option("--sigma-kernel", sigma_kernel, "auto, naive, sparse, sparse_alt, symmetric");
  solve->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  solve->add_option("--method", method, "find or rgf")->check(CLI::IsMember({"find", "rgf"}));
  solve->add_flag("--symmetric", symmetric, "use the Cholesky / LDL^T kernels when A allows it");
  solve->add_flag("--ledger", print_ledger, "print the multiplication ledger");

  auto* model = app.add_subcommand("model", "Evaluate cost models without measurement");
  bool kernel_table = false, cross = false;
  int m = 64, n = 64, a = 64;
  double c1 = 457, p1 = 3, c2 = 3.5, p2 = 4;
  model->add_flag("--kernel-table", kernel_table, "block-kernel cost table");
  model->add_flag("--crossover", cross, "intersection of c1 N^p1 and c2 N^p2");
  model->add_option("--m", m, "half of the eliminated block size")->check(CLI::NonNegativeNumber);
  model->add_option("--n", n, "half of the boundary block size")->check(CLI::NonNegativeNumber);
  model->add_option("--a", a, "scale of the four reference cases")->check(CLI::PositiveNumber);
  model->add_option("--c1", c1, "first cost constant");
  model->add_option("--p1", p1, "first exponent");
  model->add_option("--c2", c2, "second cost constant");
  model->add_option("--p2", p2, "second exponent");

  auto* generate = app.add_subcommand("generate", "Write a random test operator");
  std::string gen_mesh, fixture = "general", gen_out, sigma_out, sigma_pattern = "diagonal";
  std::uint64_t seed = 1;
  generate->add_option("--mesh", gen_mesh, "mesh as NXxNY")->required();
  generate->add_option("--fixture", fixture, "general, hpd, complex_symmetric");
  generate->add_option("--seed", seed, "random seed");
  generate->add_option("--out", gen_out, "A output path")->required();
  generate->add_option("--sigma-out", sigma_out, "Sigma output path");
  generate->add_option("--sigma-pattern", sigma_pattern, "diagonal or stencil")
      ->check(CLI::IsMember({"diagonal", "stencil"}));

  auto* tree = app.add_subcommand("tree", "Print the cluster tree of a mesh");
  std::string tree_mesh;
  int tree_leaf = 2;
  tree->add_option("--mesh", tree_mesh, "mesh as NXxNY")->required();
  tree->add_option("--leaf-max", tree_leaf, "largest leaf side")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  fsi_operator* A = nullptr;
  fsi_operator* S = nullptr;
  fsi_result* res = nullptr;
  int rc = 0;
  try {
    if (*bench) {
      check(fsi_bench_run(bench_config.c_str(), bench_out.c_str(), bench_verbose ? 1 : 0));
      std::printf("wrote report to %s\n", bench_out.c_str());
    } else if (*solve) {
      int nx = 0, ny = 0;
      check(fsi_operator_read_mtx(matrix.c_str(), &A, &nx, &ny));
      if (!mesh_text.empty() && !parse_mesh(mesh_text, &nx, &ny)) {
        std::fprintf(stderr, "error: --mesh expects NXxNY\n");
        rc = 1;
      } else if (nx <= 0 || ny <= 0) {
        std::fprintf(stderr, "error: --mesh is required when the matrix file has no mesh line\n");
        rc = 1;
      } else {
        if (!sigma.empty()) check(fsi_operator_read_mtx(sigma.c_str(), &S, nullptr, nullptr));
        if (method == "rgf") {
          check(fsi_solve_rgf(A, S, nx, ny, &res));
        } else {
          fsi_solver_config cfg;
          fsi_solver_config_init(&cfg);
          check(fsi_kernel_from_name(kernel.c_str(), &cfg.kernel));
          check(fsi_tiling_from_name(tiling.c_str(), &cfg.tiling));
          check(fsi_sigma_kernel_from_name(sigma_kernel.c_str(), &cfg.sigma_kernel));
          cfg.use_symmetry = symmetric ? 1 : 0;
          cfg.compute_gless = S ? 1 : 0;
          cfg.compute_offdiag = offdiag_out.empty() ? 0 : 1;
          cfg.leaf_max = leaf_max;
          cfg.threads = threads;
          check(fsi_solve(A, S, nx, ny, &cfg, &res));
        }
        check(fsi_result_write_csv(res, out.c_str()));
        if (!offdiag_out.empty() && method == "find") check(fsi_result_write_offdiag_csv(res, offdiag_out.c_str()));
        std::string warnings = fetch(
            [](char* b, size_t c, size_t* nd, const void* r) {
              return fsi_result_warnings(static_cast<const fsi_result*>(r), b, c, nd);
            },
            res);
        if (!warnings.empty()) std::fprintf(stderr, "warning: %s", warnings.c_str());
        double mults = 0, secs = 0;
        check(fsi_result_flops(res, &mults, nullptr));
        check(fsi_result_seconds(res, &secs));
        std::printf("solved %dx%d in %.6f s, %.17g multiplications\n", nx, ny, secs, mults);
        if (print_ledger)
          std::printf("%s", fetch(
                                [](char* b, size_t c, size_t* nd, const void* r) {
                                  return fsi_result_ledger_text(static_cast<const fsi_result*>(r), b, c, nd);
                                },
                                res)
                                .c_str());
      }
    } else if (*model) {
      if (!kernel_table && !cross) kernel_table = cross = true;
      if (kernel_table) {
        const int args[3] = {m, n, a};
        std::printf("%s", fetch(
                              [](char* b, size_t c, size_t* nd, const void* p) {
                                const int* v = static_cast<const int*>(p);
                                return fsi_model_kernel_table(v[0], v[1], v[2], b, c, nd);
                              },
                              args)
                              .c_str());
      }
      if (cross) {
        double ns = 0;
        check(fsi_model_crossover(c1, p1, c2, p2, &ns));
        std::printf("crossover of %g N^%g and %g N^%g: N = %.4f\n", c1, p1, c2, p2, ns);
      }
    } else if (*generate) {
      int nx = 0, ny = 0, fx = 0;
      if (!parse_mesh(gen_mesh, &nx, &ny)) {
        std::fprintf(stderr, "error: --mesh expects NXxNY\n");
        rc = 1;
      } else {
        check(fsi_fixture_from_name(fixture.c_str(), &fx));
        check(fsi_operator_generate(nx, ny, fx, seed, &A));
        check(fsi_operator_write_mtx(A, gen_out.c_str(), nx, ny));
        if (!sigma_out.empty()) {
          const int pat = sigma_pattern == "stencil" ? FSI_SIGMA_PATTERN_STENCIL : FSI_SIGMA_PATTERN_DIAGONAL;
          check(fsi_operator_sigma(nx, ny, pat, seed + 1, &S));
          check(fsi_operator_write_mtx(S, sigma_out.c_str(), nx, ny));
        }
      }
    } else if (*tree) {
      int dims[3] = {0, 0, tree_leaf};
      if (!parse_mesh(tree_mesh, &dims[0], &dims[1])) {
        std::fprintf(stderr, "error: --mesh expects NXxNY\n");
        rc = 1;
      } else {
        std::printf("%s", fetch(
                              [](char* b, size_t c, size_t* nd, const void* p) {
                                const int* v = static_cast<const int*>(p);
                                return fsi_tree_dump(v[0], v[1], v[2], b, c, nd);
                              },
                              dims)
                              .c_str());
      }
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", fsi_status_name(f.status), fsi_last_error());
    rc = exit_code(f.status);
  }
  fsi_result_destroy(res);
  fsi_operator_destroy(S);
  fsi_operator_destroy(A);
  return rc;
}

// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "findselinv/findselinv.h"

namespace {

std::string tmp_path(const std::string& name) {
  const char* dir = std::getenv("FSI_TEST_TMP");
  return std::string(dir ? dir : ".") + "/capi_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fsi_operator* two_node_operator() {
  const int32_t rows[] = {0, 0, 1, 1};
  const int32_t cols[] = {0, 1, 0, 1};
  const double re[] = {2, 1, 1, 2};
  const double im[] = {0, 0, 0, 0};
  fsi_operator* op = nullptr;
  REQUIRE(fsi_operator_from_triplets(2, 4, rows, cols, re, im, &op) == FSI_OK);
  return op;
}

fsi_operator* identity(int n) {
  std::vector<int32_t> idx(n);
  std::vector<double> re(n, 1.0), im(n, 0.0);
  for (int i = 0; i < n; ++i) idx[i] = i;
  fsi_operator* op = nullptr;
  REQUIRE(fsi_operator_from_triplets(n, n, idx.data(), idx.data(), re.data(), im.data(), &op) == FSI_OK);
  return op;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(fsi_version()).size() > 0);
  CHECK(std::string(fsi_status_name(FSI_ERR_SINGULAR_PIVOT)) == "singular pivot");
  CHECK(std::string(fsi_kernel_name(FSI_KERNEL_BLOCK_LU)) == "block_lu");
  int k = -1;
  CHECK(fsi_kernel_from_name("symmetric_sparse", &k) == FSI_OK);
  CHECK(k == FSI_KERNEL_SYMMETRIC_SPARSE);
  CHECK(fsi_kernel_from_name("nope", &k) == FSI_ERR_INVALID_ARGUMENT);
  CHECK(std::string(fsi_last_error()).find("nope") != std::string::npos);
  int t = -1;
  CHECK(fsi_tiling_from_name("half", &t) == FSI_OK);
  CHECK(t == FSI_TILING_HALF_LEAVES);
  int f = -1;
  CHECK(fsi_fixture_from_name("hpd", &f) == FSI_OK);
  CHECK(f == FSI_FIXTURE_HERMITIAN_PD);
  int s = 0;
  CHECK(fsi_sigma_kernel_from_name("sparse_alt", &s) == FSI_OK);
  CHECK(s == FSI_SIGMA_SPARSE_ALT);
}

TEST_CASE("two-node closed form") {
  fsi_operator* A = two_node_operator();
  fsi_operator* S = identity(2);
  fsi_solver_config cfg;
  fsi_solver_config_init(&cfg);
  CHECK(cfg.kernel == FSI_KERNEL_NAIVE);
  CHECK(cfg.compute_gless == 1);
  fsi_result* r = nullptr;
  REQUIRE(fsi_solve(A, S, 2, 1, &cfg, &r) == FSI_OK);
  int n = 0;
  CHECK(fsi_result_size(r, &n) == FSI_OK);
  CHECK(n == 2);
  fsi_complex gr[2], gl[2];
  CHECK(fsi_result_gr_diag(r, gr, 2) == FSI_OK);
  CHECK(fsi_result_gless_diag(r, gl, 2) == FSI_OK);
  for (int i = 0; i < 2; ++i) {
    CHECK(gr[i].re == doctest::Approx(2.0 / 3));
    CHECK(gl[i].re == doctest::Approx(5.0 / 9));
    CHECK(std::abs(gr[i].im) < 1e-15);
  }
  CHECK(fsi_result_gr_diag(r, gr, 1) == FSI_ERR_INVALID_ARGUMENT);
  double mult = 0;
  int64_t sixths = 0;
  CHECK(fsi_result_flops(r, &mult, &sixths) == FSI_OK);
  CHECK(mult * 6 == doctest::Approx(static_cast<double>(sixths)));
  fsi_result_destroy(r);
  fsi_operator_destroy(A);
  fsi_operator_destroy(S);
}

TEST_CASE("FIND and RGF agree through the C interface") {
  fsi_operator* A = nullptr;
  fsi_operator* S = nullptr;
  REQUIRE(fsi_operator_generate(6, 5, FSI_FIXTURE_GENERAL, 3, &A) == FSI_OK);
  REQUIRE(fsi_operator_sigma(6, 5, FSI_SIGMA_PATTERN_STENCIL, 4, &S) == FSI_OK);
  size_t nnz = 0;
  CHECK(fsi_operator_nnz(A, &nnz) == FSI_OK);
  CHECK(nnz == 30 + 2 * (5 * 5 + 6 * 4));
  fsi_solver_config cfg;
  fsi_solver_config_init(&cfg);
  cfg.kernel = FSI_KERNEL_SEQUENTIAL;
  cfg.compute_offdiag = 1;
  fsi_result *f = nullptr, *g = nullptr;
  REQUIRE(fsi_solve(A, S, 6, 5, &cfg, &f) == FSI_OK);
  REQUIRE(fsi_solve_rgf(A, S, 6, 5, &g) == FSI_OK);
  std::vector<fsi_complex> a(30), b(30), c(30), d(30);
  fsi_result_gr_diag(f, a.data(), 30);
  fsi_result_gr_diag(g, b.data(), 30);
  fsi_result_gless_diag(f, c.data(), 30);
  fsi_result_gless_diag(g, d.data(), 30);
  for (int i = 0; i < 30; ++i) {
    CHECK(std::hypot(a[i].re - b[i].re, a[i].im - b[i].im) < 1e-10 * std::hypot(b[i].re, b[i].im));
    CHECK(std::hypot(c[i].re - d[i].re, c[i].im - d[i].im) < 1e-10 * std::hypot(d[i].re, d[i].im));
  }
  size_t count = 0;
  CHECK(fsi_result_offdiag_count(f, &count) == FSI_OK);
  CHECK(count == 2 * (5 * 5 + 6 * 4));
  std::vector<fsi_offdiag_entry> off(count);
  CHECK(fsi_result_offdiag(f, off.data(), count) == FSI_OK);

  size_t needed = 0;
  CHECK(fsi_result_ledger_text(f, nullptr, 0, &needed) == FSI_OK);
  REQUIRE(needed > 1);
  std::string text(needed, '\0');
  CHECK(fsi_result_ledger_text(f, text.data(), needed, &needed) == FSI_OK);
  CHECK(text.find("sequential") != std::string::npos);

  const std::string p1 = tmp_path("a.csv"), p2 = tmp_path("b.csv");
  CHECK(fsi_result_write_csv(f, p1.c_str()) == FSI_OK);
  fsi_result* again = nullptr;
  REQUIRE(fsi_solve(A, S, 6, 5, &cfg, &again) == FSI_OK);
  CHECK(fsi_result_write_csv(again, p2.c_str()) == FSI_OK);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(p1).rfind("node,x,y,re_gr,im_gr,re_gless,im_gless", 0) == 0);
  CHECK(fsi_result_write_offdiag_csv(f, tmp_path("off.csv").c_str()) == FSI_OK);
  CHECK(fsi_result_offdiag_count(g, &count) == FSI_OK);
  CHECK(count == 0);

  fsi_result_destroy(f);
  fsi_result_destroy(g);
  fsi_result_destroy(again);
  fsi_operator_destroy(A);
  fsi_operator_destroy(S);
}

TEST_CASE("matrix market round trip") {
  fsi_operator* A = nullptr;
  REQUIRE(fsi_operator_generate(3, 4, FSI_FIXTURE_HERMITIAN_PD, 5, &A) == FSI_OK);
  const std::string path = tmp_path("a.mtx");
  CHECK(fsi_operator_write_mtx(A, path.c_str(), 3, 4) == FSI_OK);
  fsi_operator* B = nullptr;
  int nx = 0, ny = 0;
  CHECK(fsi_operator_read_mtx(path.c_str(), &B, &nx, &ny) == FSI_OK);
  CHECK(nx == 3);
  CHECK(ny == 4);
  int n = 0;
  CHECK(fsi_operator_size(B, &n) == FSI_OK);
  CHECK(n == 12);
  fsi_operator_destroy(A);
  fsi_operator_destroy(B);
  CHECK(fsi_operator_read_mtx(tmp_path("missing.mtx").c_str(), &B, &nx, &ny) == FSI_ERR_IO);
}

TEST_CASE("error reporting") {
  fsi_solver_config cfg;
  fsi_solver_config_init(&cfg);
  fsi_result* r = nullptr;
  CHECK(fsi_solve(nullptr, nullptr, 2, 1, &cfg, &r) == FSI_ERR_INVALID_ARGUMENT);
  CHECK(r == nullptr);

  fsi_operator* A = two_node_operator();
  CHECK(fsi_solve(A, nullptr, 2, 1, &cfg, &r) == FSI_ERR_INVALID_ARGUMENT);
  CHECK(std::string(fsi_last_error()).size() > 0);
  CHECK(fsi_solve(A, nullptr, 3, 1, &cfg, &r) == FSI_ERR_INVALID_ARGUMENT);

  cfg.compute_gless = 0;
  REQUIRE(fsi_solve(A, nullptr, 2, 1, &cfg, &r) == FSI_OK);
  CHECK(std::string(fsi_last_error()).empty());
  fsi_complex out[2];
  CHECK(fsi_result_gless_diag(r, out, 2) == FSI_ERR_STATE);
  fsi_result_destroy(r);
  fsi_operator_destroy(A);

  const int32_t rows[] = {0, 0, 1, 1};
  const int32_t cols[] = {0, 1, 0, 1};
  const double ones[] = {1, 1, 1, 1};
  const double zeros[] = {0, 0, 0, 0};
  fsi_operator* Z = nullptr;
  REQUIRE(fsi_operator_from_triplets(2, 4, rows, cols, ones, zeros, &Z) == FSI_OK);
  r = nullptr;
  CHECK(fsi_solve(Z, nullptr, 2, 1, &cfg, &r) == FSI_ERR_SINGULAR_PIVOT);
  CHECK(r == nullptr);
  fsi_operator_destroy(Z);

  const int32_t bad_rows[] = {5};
  const int32_t bad_cols[] = {0};
  CHECK(fsi_operator_from_triplets(2, 1, bad_rows, bad_cols, ones, zeros, &Z) == FSI_ERR_INVALID_ARGUMENT);
}

TEST_CASE("models and tree dump") {
  double n_star = 0;
  CHECK(fsi_model_crossover(457, 3, 3.5, 4, &n_star) == FSI_OK);
  CHECK(n_star == doctest::Approx(130.57).epsilon(1e-4));
  double pct[4];
  CHECK(fsi_model_kernel_table_cases(FSI_KERNEL_PARALLEL, 64, pct) == FSI_OK);
  CHECK(pct[0] == doctest::Approx(51.4).epsilon(2e-3));
  size_t needed = 0;
  CHECK(fsi_model_kernel_table(64, 192, 64, nullptr, 0, &needed) == FSI_OK);
  std::string t(needed, '\0');
  CHECK(fsi_model_kernel_table(64, 192, 64, t.data(), needed, &needed) == FSI_OK);
  CHECK(t.find("naive_lu") != std::string::npos);
  CHECK(fsi_tree_dump(4, 4, 2, nullptr, 0, &needed) == FSI_OK);
  std::string d(needed, '\0');
  CHECK(fsi_tree_dump(4, 4, 2, d.data(), needed, &needed) == FSI_OK);
  CHECK(d.size() > 10);
}

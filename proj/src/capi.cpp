// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "findselinv/findselinv.h"

#include <cstdio>
#include <cstring>
#include <iostream>
#include <new>
#include <string>

#include "bench.hpp"
#include "find_solver.hpp"
#include "fixtures.hpp"
#include "mesh_partition.hpp"
#include "operators.hpp"
#include "report.hpp"
#include "rgf_baseline.hpp"

struct fsi_operator {
  fsi::SparseOperator op;
};

struct fsi_result {
  fsi::SelectedInverse r;
};

namespace {

thread_local std::string g_last_error;

fsi_status to_status(fsi::ErrorCode c) {
  switch (c) {
    case fsi::ErrorCode::invalid_argument: return FSI_ERR_INVALID_ARGUMENT;
    case fsi::ErrorCode::singular_pivot: return FSI_ERR_SINGULAR_PIVOT;
    case fsi::ErrorCode::not_positive_definite: return FSI_ERR_NOT_POSITIVE_DEFINITE;
    case fsi::ErrorCode::state: return FSI_ERR_STATE;
    case fsi::ErrorCode::io: return FSI_ERR_IO;
    case fsi::ErrorCode::parse: return FSI_ERR_PARSE;
    case fsi::ErrorCode::internal: return FSI_ERR_INTERNAL;
  }
  return FSI_ERR_INTERNAL;
}

template <typename F>
fsi_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return FSI_OK;
  } catch (const fsi::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FSI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FSI_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FSI_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fsi::fail(fsi::ErrorCode::invalid_argument, std::string(what) + " must not be null");
}

void copy_string(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (cap == 0) return;
  need(buf, "buf");
  if (cap < s.size() + 1) fsi::fail(fsi::ErrorCode::invalid_argument, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

fsi::Mesh mesh_for(const fsi::SparseOperator& op, int nx, int ny) {
  if (nx <= 0 || ny <= 0) fsi::fail(fsi::ErrorCode::invalid_argument, "mesh dimensions must be positive");
  if (static_cast<long long>(nx) * ny != op.size())
    fsi::fail(fsi::ErrorCode::invalid_argument, "mesh " + std::to_string(nx) + "x" + std::to_string(ny) +
                                                    " does not match operator dimension " + std::to_string(op.size()));
  return fsi::build_mesh(nx, ny);
}

void copy_diag(const std::vector<fsi::cplx>& v, fsi_complex* out, size_t count) {
  need(out, "out");
  if (count < v.size()) fsi::fail(fsi::ErrorCode::invalid_argument, "output array too small");
  for (size_t i = 0; i < v.size(); ++i) out[i] = fsi_complex{v[i].real(), v[i].imag()};
}

}  // namespace

extern "C" {

const char* fsi_version(void) { return "1.0.0"; }

const char* fsi_last_error(void) { return g_last_error.c_str(); }

const char* fsi_status_name(fsi_status s) {
  switch (s) {
    case FSI_OK: return "ok";
    case FSI_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FSI_ERR_SINGULAR_PIVOT: return "singular pivot";
    case FSI_ERR_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case FSI_ERR_STATE: return "invalid state";
    case FSI_ERR_IO: return "i/o error";
    case FSI_ERR_PARSE: return "parse error";
    case FSI_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

fsi_status fsi_operator_read_mtx(const char* path, fsi_operator** out, int* nx, int* ny) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    fsi::MatrixFile f = fsi::read_matrix_market(path);
    *out = new fsi_operator{std::move(f.op)};
    if (nx) *nx = f.nx;
    if (ny) *ny = f.ny;
  });
}

fsi_status fsi_operator_write_mtx(const fsi_operator* op, const char* path, int nx, int ny) {
  return guarded([&] {
    need(op, "op");
    need(path, "path");
    fsi::write_matrix_market(path, op->op, nx, ny);
  });
}

fsi_status fsi_operator_generate(int nx, int ny, int fixture, uint64_t seed, fsi_operator** out) {
  return guarded([&] {
    need(out, "out");
    if (fixture < FSI_FIXTURE_GENERAL || fixture > FSI_FIXTURE_COMPLEX_SYMMETRIC)
      fsi::fail(fsi::ErrorCode::invalid_argument, "unknown fixture");
    if (nx <= 0 || ny <= 0) fsi::fail(fsi::ErrorCode::invalid_argument, "mesh dimensions must be positive");
    const fsi::Mesh m = fsi::build_mesh(nx, ny);
    *out = new fsi_operator{fsi::random_operator(m, static_cast<fsi::FixtureKind>(fixture), seed)};
  });
}

fsi_status fsi_operator_sigma(int nx, int ny, int pattern, uint64_t seed, fsi_operator** out) {
  return guarded([&] {
    need(out, "out");
    if (pattern != FSI_SIGMA_PATTERN_DIAGONAL && pattern != FSI_SIGMA_PATTERN_STENCIL)
      fsi::fail(fsi::ErrorCode::invalid_argument, "unknown sigma pattern");
    if (nx <= 0 || ny <= 0) fsi::fail(fsi::ErrorCode::invalid_argument, "mesh dimensions must be positive");
    const fsi::Mesh m = fsi::build_mesh(nx, ny);
    const auto mode = pattern == FSI_SIGMA_PATTERN_DIAGONAL ? fsi::SigmaMode::diagonal : fsi::SigmaMode::stencil;
    *out = new fsi_operator{fsi::random_sigma(m, mode, seed)};
  });
}

fsi_status fsi_operator_from_triplets(int n, size_t count, const int32_t* rows, const int32_t* cols, const double* re,
                                      const double* im, fsi_operator** out) {
  return guarded([&] {
    need(out, "out");
    if (n <= 0) fsi::fail(fsi::ErrorCode::invalid_argument, "dimension must be positive");
    if (count > 0) {
      need(rows, "rows");
      need(cols, "cols");
      need(re, "re");
    }
    std::vector<fsi::Triplet> t(count);
    for (size_t k = 0; k < count; ++k) t[k] = {rows[k], cols[k], fsi::cplx(re[k], im ? im[k] : 0.0)};
    *out = new fsi_operator{fsi::SparseOperator::from_triplets(n, t)};
  });
}

fsi_status fsi_operator_size(const fsi_operator* op, int* n) {
  return guarded([&] {
    need(op, "op");
    need(n, "n");
    *n = op->op.size();
  });
}

fsi_status fsi_operator_nnz(const fsi_operator* op, size_t* nnz) {
  return guarded([&] {
    need(op, "op");
    need(nnz, "nnz");
    *nnz = op->op.nnz();
  });
}

void fsi_operator_destroy(fsi_operator* op) { delete op; }

void fsi_solver_config_init(fsi_solver_config* c) {
  if (!c) return;
  c->kernel = FSI_KERNEL_NAIVE;
  c->use_symmetry = 0;
  c->compute_gless = 1;
  c->compute_offdiag = 0;
  c->tiling = FSI_TILING_FULL_LEAVES;
  c->leaf_max = 2;
  c->sigma_kernel = FSI_SIGMA_AUTO;
  c->threads = 1;
}

fsi_status fsi_kernel_from_name(const char* name, int* kernel) {
  return guarded([&] {
    need(name, "name");
    need(kernel, "kernel");
    *kernel = static_cast<int>(fsi::kernel_from_name(name));
  });
}

const char* fsi_kernel_name(int kernel) {
  if (kernel < FSI_KERNEL_NAIVE || kernel > FSI_KERNEL_SYMMETRIC_SPARSE) return "unknown";
  return fsi::kernel_name(static_cast<fsi::Kernel>(kernel));
}

fsi_status fsi_sigma_kernel_from_name(const char* name, int* sigma_kernel) {
  return guarded([&] {
    need(name, "name");
    need(sigma_kernel, "sigma_kernel");
    *sigma_kernel = std::string(name) == "auto" ? FSI_SIGMA_AUTO : static_cast<int>(fsi::sigma_kernel_from_name(name));
  });
}

fsi_status fsi_tiling_from_name(const char* name, int* tiling) {
  return guarded([&] {
    need(name, "name");
    need(tiling, "tiling");
    *tiling = static_cast<int>(fsi::tiling_from_name(name));
  });
}

fsi_status fsi_fixture_from_name(const char* name, int* fixture) {
  return guarded([&] {
    need(name, "name");
    need(fixture, "fixture");
    *fixture = static_cast<int>(fsi::fixture_from_name(name));
  });
}

fsi_status fsi_solve(const fsi_operator* A, const fsi_operator* sigma, int nx, int ny, const fsi_solver_config* config,
                     fsi_result** out) {
  return guarded([&] {
    need(A, "A");
    need(config, "config");
    need(out, "out");
    *out = nullptr;
    const fsi::Mesh mesh = mesh_for(A->op, nx, ny);
    if (config->kernel < FSI_KERNEL_NAIVE || config->kernel > FSI_KERNEL_SYMMETRIC_SPARSE)
      fsi::fail(fsi::ErrorCode::invalid_argument, "unknown kernel");
    if (config->tiling != FSI_TILING_FULL_LEAVES && config->tiling != FSI_TILING_HALF_LEAVES)
      fsi::fail(fsi::ErrorCode::invalid_argument, "unknown tiling");
    if (config->sigma_kernel < FSI_SIGMA_AUTO || config->sigma_kernel > FSI_SIGMA_SYMMETRIC)
      fsi::fail(fsi::ErrorCode::invalid_argument, "unknown sigma kernel");
    fsi::SolverConfig sc;
    sc.kernel = static_cast<fsi::Kernel>(config->kernel);
    sc.use_symmetry = config->use_symmetry != 0;
    sc.compute_gless = config->compute_gless != 0;
    sc.compute_offdiag = config->compute_offdiag != 0;
    sc.tiling = static_cast<fsi::Tiling>(config->tiling);
    sc.leaf_max = config->leaf_max;
    if (config->sigma_kernel != FSI_SIGMA_AUTO) sc.sigma_kernel = static_cast<fsi::SigmaKernel>(config->sigma_kernel);
    sc.threads = config->threads;
    auto* r = new fsi_result{fsi::solve(mesh, A->op, sigma ? &sigma->op : nullptr, sc)};
    *out = r;
  });
}

fsi_status fsi_solve_rgf(const fsi_operator* A, const fsi_operator* sigma, int nx, int ny, fsi_result** out) {
  return guarded([&] {
    need(A, "A");
    need(out, "out");
    *out = nullptr;
    const fsi::Mesh mesh = mesh_for(A->op, nx, ny);
    fsi::RgfResult g = fsi::rgf_solve(mesh, A->op, sigma ? &sigma->op : nullptr);
    auto* r = new fsi_result;
    r->r.nx = nx;
    r->r.ny = ny;
    r->r.gr_diag = std::move(g.gr_diag);
    r->r.gless_diag = std::move(g.gless_diag);
    r->r.has_gless = g.has_gless;
    r->r.ledger = g.ledger;
    r->r.seconds_total = g.seconds;
    *out = r;
  });
}

fsi_status fsi_result_size(const fsi_result* r, int* n) {
  return guarded([&] {
    need(r, "result");
    need(n, "n");
    *n = static_cast<int>(r->r.gr_diag.size());
  });
}

fsi_status fsi_result_gr_diag(const fsi_result* r, fsi_complex* out, size_t count) {
  return guarded([&] {
    need(r, "result");
    copy_diag(r->r.gr_diag, out, count);
  });
}

fsi_status fsi_result_gless_diag(const fsi_result* r, fsi_complex* out, size_t count) {
  return guarded([&] {
    need(r, "result");
    if (!r->r.has_gless) fsi::fail(fsi::ErrorCode::state, "G^< was not computed");
    copy_diag(r->r.gless_diag, out, count);
  });
}

fsi_status fsi_result_offdiag_count(const fsi_result* r, size_t* count) {
  return guarded([&] {
    need(r, "result");
    need(count, "count");
    *count = r->r.offdiag.size();
  });
}

fsi_status fsi_result_offdiag(const fsi_result* r, fsi_offdiag_entry* out, size_t count) {
  return guarded([&] {
    need(r, "result");
    const auto& v = r->r.offdiag;
    if (v.empty()) return;
    need(out, "out");
    if (count < v.size()) fsi::fail(fsi::ErrorCode::invalid_argument, "output array too small");
    for (size_t k = 0; k < v.size(); ++k) out[k] = fsi_offdiag_entry{v[k].i, v[k].j, v[k].value.real(), v[k].value.imag()};
  });
}

fsi_status fsi_result_flops(const fsi_result* r, double* multiplications, int64_t* sixths) {
  return guarded([&] {
    need(r, "result");
    if (multiplications) *multiplications = r->r.ledger.multiplications();
    if (sixths) *sixths = r->r.ledger.sixths();
  });
}

fsi_status fsi_result_ledger_text(const fsi_result* r, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(r, "result");
    std::string s;
    char line[160];
    for (const auto& [key, v] : r->r.ledger.breakdown()) {
      std::snprintf(line, sizeof line, "%s %.17g %lld\n", key.c_str(),
                    static_cast<double>(v) / fsi::FlopLedger::kUnit, static_cast<long long>(r->r.ledger.calls(key)));
      s += line;
    }
    copy_string(s, buf, cap, needed);
  });
}

fsi_status fsi_result_seconds(const fsi_result* r, double* seconds) {
  return guarded([&] {
    need(r, "result");
    need(seconds, "seconds");
    *seconds = r->r.seconds_total;
  });
}

fsi_status fsi_result_warnings(const fsi_result* r, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(r, "result");
    std::string s;
    for (const auto& w : r->r.warnings) s += w + "\n";
    copy_string(s, buf, cap, needed);
  });
}

fsi_status fsi_result_write_csv(const fsi_result* r, const char* path) {
  return guarded([&] {
    need(r, "result");
    need(path, "path");
    fsi::write_result_csv(path, r->r);
  });
}

fsi_status fsi_result_write_offdiag_csv(const fsi_result* r, const char* path) {
  return guarded([&] {
    need(r, "result");
    need(path, "path");
    fsi::write_offdiag_csv(path, r->r);
  });
}

void fsi_result_destroy(fsi_result* r) { delete r; }

fsi_status fsi_bench_run(const char* config_path, const char* out_dir, int verbose) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out_dir, "out_dir");
    const fsi::BenchConfig config = fsi::read_bench_config(config_path);
    fsi::BenchLog log;
    if (verbose) log = [](const std::string& s) { std::cerr << "bench: " << s << "\n"; };
    const fsi::BenchTable table = fsi::run_benchmark(config, log);
    fsi::emit_report(table, config, out_dir);
  });
}

fsi_status fsi_model_kernel_table(int m, int n, int a, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    if (m < 0 || n < 0 || a <= 0) fsi::fail(fsi::ErrorCode::invalid_argument, "m, n must be >= 0 and a > 0");
    copy_string(fsi::kernel_table_text(m, n, a), buf, cap, needed);
  });
}

fsi_status fsi_model_kernel_table_cases(int kernel, int a, double percent[4]) {
  return guarded([&] {
    need(percent, "percent");
    if (kernel < FSI_KERNEL_NAIVE || kernel > FSI_KERNEL_SYMMETRIC_SPARSE)
      fsi::fail(fsi::ErrorCode::invalid_argument, "unknown kernel");
    if (a <= 0) fsi::fail(fsi::ErrorCode::invalid_argument, "a must be positive");
    const auto c = fsi::kernel_table_cases(static_cast<fsi::Kernel>(kernel), a);
    for (int i = 0; i < 4; ++i) percent[i] = c[i];
  });
}

fsi_status fsi_model_crossover(double c1, double p1, double c2, double p2, double* n_star) {
  return guarded([&] {
    need(n_star, "n_star");
    if (!(c1 > 0 && c2 > 0)) fsi::fail(fsi::ErrorCode::invalid_argument, "constants must be positive");
    *n_star = fsi::model_crossover(c1, p1, c2, p2);
  });
}

fsi_status fsi_tree_dump(int nx, int ny, int leaf_max, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    if (nx <= 0 || ny <= 0 || leaf_max < 1) fsi::fail(fsi::ErrorCode::invalid_argument, "bad mesh or leaf size");
    const fsi::Mesh m = fsi::build_mesh(nx, ny);
    const fsi::ClusterTree t = fsi::build_partition(m, leaf_max, fsi::stencil_adjacency(m));
    copy_string(fsi::dump_tree(t), buf, cap, needed);
  });
}

}  // extern "C"

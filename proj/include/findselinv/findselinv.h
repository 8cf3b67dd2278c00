/* Copyright 2026 The findselinv Authors
 * SPDX-License-Identifier: Apache-2.0 */
#ifndef FINDSELINV_FINDSELINV_H_
#define FINDSELINV_FINDSELINV_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FSI_BUILDING_LIBRARY)
#define FSI_API __declspec(dllexport)
#else
#define FSI_API __declspec(dllimport)
#endif
#else
#define FSI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fsi_status {
  FSI_OK = 0,
  FSI_ERR_INVALID_ARGUMENT = 1,
  FSI_ERR_SINGULAR_PIVOT = 2,
  FSI_ERR_NOT_POSITIVE_DEFINITE = 3,
  FSI_ERR_STATE = 4,
  FSI_ERR_IO = 5,
  FSI_ERR_PARSE = 6,
  FSI_ERR_INTERNAL = 7
} fsi_status;

typedef enum fsi_kernel {
  FSI_KERNEL_NAIVE = 0,
  FSI_KERNEL_PARALLEL = 1,
  FSI_KERNEL_SEQUENTIAL = 2,
  FSI_KERNEL_BLOCK_LU = 3,
  FSI_KERNEL_NAIVE_LU = 4,
  FSI_KERNEL_CHOLESKY = 5,
  FSI_KERNEL_LDLT = 6,
  FSI_KERNEL_SYMMETRIC_SPARSE = 7
} fsi_kernel;

typedef enum fsi_sigma_kernel {
  FSI_SIGMA_AUTO = -1,
  FSI_SIGMA_NAIVE = 0,
  FSI_SIGMA_SPARSE = 1,
  FSI_SIGMA_SPARSE_ALT = 2,
  FSI_SIGMA_SYMMETRIC = 3
} fsi_sigma_kernel;

typedef enum fsi_tiling { FSI_TILING_FULL_LEAVES = 0, FSI_TILING_HALF_LEAVES = 1 } fsi_tiling;

typedef enum fsi_fixture {
  FSI_FIXTURE_GENERAL = 0,
  FSI_FIXTURE_HERMITIAN_PD = 1,
  FSI_FIXTURE_COMPLEX_SYMMETRIC = 2
} fsi_fixture;

typedef enum fsi_sigma_pattern { FSI_SIGMA_PATTERN_DIAGONAL = 0, FSI_SIGMA_PATTERN_STENCIL = 1 } fsi_sigma_pattern;

/* Sparse complex operator on an nx x ny mesh, node id = x + nx * y. */
typedef struct fsi_operator fsi_operator;
/* Output of one solve. */
typedef struct fsi_result fsi_result;

typedef struct fsi_complex {
  double re;
  double im;
} fsi_complex;

typedef struct fsi_offdiag_entry {
  int32_t i;
  int32_t j;
  double re;
  double im;
} fsi_offdiag_entry;

typedef struct fsi_solver_config {
  int kernel;           /* fsi_kernel */
  int use_symmetry;     /* map to the Cholesky / LDL^T family when A allows it */
  int compute_gless;    /* requires a sigma operator */
  int compute_offdiag;  /* entries between stencil neighbors */
  int tiling;           /* fsi_tiling */
  int leaf_max;         /* largest leaf side */
  int sigma_kernel;     /* fsi_sigma_kernel */
  int threads;          /* worker threads for independent subtrees */
} fsi_solver_config;

/* Library version string. */
FSI_API const char* fsi_version(void);
/* Message of the last failing call on this thread; empty after success. */
FSI_API const char* fsi_last_error(void);
FSI_API const char* fsi_status_name(fsi_status status);

/* String outputs: *needed receives strlen + 1; buf may be NULL when cap is 0. */

FSI_API fsi_status fsi_operator_read_mtx(const char* path, fsi_operator** out, int* nx, int* ny);
FSI_API fsi_status fsi_operator_write_mtx(const fsi_operator* op, const char* path, int nx, int ny);
FSI_API fsi_status fsi_operator_generate(int nx, int ny, int fixture, uint64_t seed, fsi_operator** out);
FSI_API fsi_status fsi_operator_sigma(int nx, int ny, int pattern, uint64_t seed, fsi_operator** out);
FSI_API fsi_status fsi_operator_from_triplets(int n, size_t count, const int32_t* rows, const int32_t* cols,
                                              const double* re, const double* im, fsi_operator** out);
FSI_API fsi_status fsi_operator_size(const fsi_operator* op, int* n);
FSI_API fsi_status fsi_operator_nnz(const fsi_operator* op, size_t* nnz);
FSI_API void fsi_operator_destroy(fsi_operator* op);

FSI_API void fsi_solver_config_init(fsi_solver_config* config);
FSI_API fsi_status fsi_kernel_from_name(const char* name, int* kernel);
FSI_API const char* fsi_kernel_name(int kernel);
FSI_API fsi_status fsi_sigma_kernel_from_name(const char* name, int* sigma_kernel);
FSI_API fsi_status fsi_tiling_from_name(const char* name, int* tiling);
FSI_API fsi_status fsi_fixture_from_name(const char* name, int* fixture);

/* sigma may be NULL when compute_gless is 0. */
FSI_API fsi_status fsi_solve(const fsi_operator* A, const fsi_operator* sigma, int nx, int ny,
                             const fsi_solver_config* config, fsi_result** out);
/* Block-tridiagonal baseline over mesh rows; fills diagonals and the ledger only. */
FSI_API fsi_status fsi_solve_rgf(const fsi_operator* A, const fsi_operator* sigma, int nx, int ny, fsi_result** out);

FSI_API fsi_status fsi_result_size(const fsi_result* r, int* n);
FSI_API fsi_status fsi_result_gr_diag(const fsi_result* r, fsi_complex* out, size_t count);
FSI_API fsi_status fsi_result_gless_diag(const fsi_result* r, fsi_complex* out, size_t count);
FSI_API fsi_status fsi_result_offdiag_count(const fsi_result* r, size_t* count);
FSI_API fsi_status fsi_result_offdiag(const fsi_result* r, fsi_offdiag_entry* out, size_t count);
/* Multiplication count and the exact count in units of 1/6 multiplication. */
FSI_API fsi_status fsi_result_flops(const fsi_result* r, double* multiplications, int64_t* sixths);
FSI_API fsi_status fsi_result_ledger_text(const fsi_result* r, char* buf, size_t cap, size_t* needed);
FSI_API fsi_status fsi_result_seconds(const fsi_result* r, double* seconds);
FSI_API fsi_status fsi_result_warnings(const fsi_result* r, char* buf, size_t cap, size_t* needed);
FSI_API fsi_status fsi_result_write_csv(const fsi_result* r, const char* path);
FSI_API fsi_status fsi_result_write_offdiag_csv(const fsi_result* r, const char* path);
FSI_API void fsi_result_destroy(fsi_result* r);

/* Runs a key=value benchmark config and writes CSV and SVG files into out_dir. */
FSI_API fsi_status fsi_bench_run(const char* config_path, const char* out_dir, int verbose);
/* Block-kernel cost table at (m, n) plus the four-case percentages at a. */
FSI_API fsi_status fsi_model_kernel_table(int m, int n, int a, char* buf, size_t cap, size_t* needed);
FSI_API fsi_status fsi_model_kernel_table_cases(int kernel, int a, double percent[4]);
/* N where c1 N^p1 = c2 N^p2. */
FSI_API fsi_status fsi_model_crossover(double c1, double p1, double c2, double p2, double* n_star);
FSI_API fsi_status fsi_tree_dump(int nx, int ny, int leaf_max, char* buf, size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* FINDSELINV_FINDSELINV_H_ */

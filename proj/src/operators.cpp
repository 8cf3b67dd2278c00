// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fsi {

SparseOperator SparseOperator::from_triplets(int n, const std::vector<Triplet>& triplets) {
  require(n >= 0, "operator dimension must be non-negative");
  SparseOperator op(n);
  for (const auto& t : triplets) {
    require(t.row >= 0 && t.row < n && t.col >= 0 && t.col < n,
            "entry (" + std::to_string(t.row) + "," + std::to_string(t.col) + ") out of range");
    op.rows_[t.row].emplace_back(t.col, t.value);
  }
  for (auto& r : op.rows_) {
    std::stable_sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::vector<Entry> merged;
    for (const auto& e : r) {
      if (!merged.empty() && merged.back().first == e.first)
        merged.back().second += e.second;
      else
        merged.push_back(e);
    }
    r = std::move(merged);
  }
  return op;
}

size_t SparseOperator::nnz() const {
  size_t total = 0;
  for (const auto& r : rows_) total += r.size();
  return total;
}

bool SparseOperator::has(int i, int j) const {
  const auto& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, int c) { return e.first < c; });
  return it != r.end() && it->first == j;
}

cplx SparseOperator::get(int i, int j) const {
  const auto& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, int c) { return e.first < c; });
  return (it != r.end() && it->first == j) ? it->second : cplx(0.0);
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (int i = 0; i < size(); ++i)
    for (const auto& [j, v] : rows_[i]) out.push_back({i, j, v});
  return out;
}

Adjacency SparseOperator::adjacency() const {
  Adjacency adj(size());
  for (int i = 0; i < size(); ++i)
    for (const auto& e : rows_[i])
      if (e.first != i) adj[i].push_back(e.first);
  return adj;
}

Mat SparseOperator::dense() const {
  Mat m = Mat::Zero(size(), size());
  for (int i = 0; i < size(); ++i)
    for (const auto& [j, v] : rows_[i]) m(i, j) = v;
  return m;
}

bool SparseOperator::is_diagonal() const {
  for (int i = 0; i < size(); ++i)
    for (const auto& e : rows_[i])
      if (e.first != i) return false;
  return true;
}

SparseOperator assemble_A(const Mesh& mesh, const std::vector<cplx>& onsite, cplx hop_x, cplx hop_y, double energy,
                          const Contacts& contacts) {
  const int n = mesh.size();
  require(static_cast<int>(onsite.size()) == n, "onsite length must equal the number of mesh nodes");
  require(contacts.left.empty() || static_cast<int>(contacts.left.size()) == mesh.ny,
          "left contact length must equal ny");
  require(contacts.right.empty() || static_cast<int>(contacts.right.size()) == mesh.ny,
          "right contact length must equal ny");
  std::vector<Triplet> t;
  t.reserve(5 * static_cast<size_t>(n));
  for (int y = 0; y < mesh.ny; ++y) {
    for (int x = 0; x < mesh.nx; ++x) {
      const int i = mesh.id(x, y);
      cplx d = energy - onsite[i];
      if (x == 0 && !contacts.left.empty()) d += contacts.left[y];
      if (x == mesh.nx - 1 && !contacts.right.empty()) d += contacts.right[y];
      t.push_back({i, i, d});
      if (x + 1 < mesh.nx) {
        t.push_back({i, i + 1, hop_x});
        t.push_back({i + 1, i, std::conj(hop_x)});
      }
      if (y + 1 < mesh.ny) {
        t.push_back({i, i + mesh.nx, hop_y});
        t.push_back({i + mesh.nx, i, std::conj(hop_y)});
      }
    }
  }
  return SparseOperator::from_triplets(n, t);
}

SparseOperator assemble_sigma(const Mesh& mesh, SigmaMode mode, const std::vector<cplx>& diag, cplx off_x,
                              cplx off_y) {
  const int n = mesh.size();
  require(static_cast<int>(diag.size()) == n, "sigma diagonal length must equal the number of mesh nodes");
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, diag[i]});
  if (mode == SigmaMode::stencil) {
    for (int y = 0; y < mesh.ny; ++y)
      for (int x = 0; x < mesh.nx; ++x) {
        const int i = mesh.id(x, y);
        if (x + 1 < mesh.nx) {
          t.push_back({i, i + 1, off_x});
          t.push_back({i + 1, i, std::conj(off_x)});
        }
        if (y + 1 < mesh.ny) {
          t.push_back({i, i + mesh.nx, off_y});
          t.push_back({i + mesh.nx, i, std::conj(off_y)});
        }
      }
  }
  return SparseOperator::from_triplets(n, t);
}

bool check_structural_symmetry(const SparseOperator& op) {
  for (int i = 0; i < op.size(); ++i)
    for (const auto& e : op.row(i))
      if (!op.has(e.first, i)) return false;
  return true;
}

void check_stencil_pattern(const SparseOperator& op, const Mesh& mesh) {
  require(op.size() == mesh.size(), "operator dimension does not match mesh");
  for (int i = 0; i < op.size(); ++i) {
    const int xi = mesh.x_of(i), yi = mesh.y_of(i);
    for (const auto& e : op.row(i)) {
      const int j = e.first;
      const int dx = std::abs(mesh.x_of(j) - xi), dy = std::abs(mesh.y_of(j) - yi);
      if (dx + dy > 1)
        fail(ErrorCode::invalid_argument,
             "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is outside the 5-point stencil");
    }
  }
}

void check_pattern_subset(const SparseOperator& sub, const SparseOperator& super) {
  require(sub.size() == super.size(), "operator dimensions differ");
  for (int i = 0; i < sub.size(); ++i)
    for (const auto& e : sub.row(i))
      require(super.has(i, e.first),
              "entry (" + std::to_string(i) + "," + std::to_string(e.first) + ") lies outside the pattern of A");
}

namespace {

double max_abs(const SparseOperator& op) {
  double m = 0.0;
  for (int i = 0; i < op.size(); ++i)
    for (const auto& e : op.row(i)) m = std::max(m, std::abs(e.second));
  return m;
}

template <class F>
bool mirrored(const SparseOperator& op, double rtol, F f) {
  const double tol = rtol * std::max(1.0, max_abs(op));
  for (int i = 0; i < op.size(); ++i)
    for (const auto& [j, v] : op.row(i))
      if (std::abs(f(v) - op.get(j, i)) > tol || !op.has(j, i)) return false;
  return true;
}

}  // namespace

bool is_hermitian(const SparseOperator& op, double rtol) {
  return mirrored(op, rtol, [](cplx v) { return std::conj(v); });
}

bool is_complex_symmetric(const SparseOperator& op, double rtol) {
  return mirrored(op, rtol, [](cplx v) { return v; });
}

Mat extract(const SparseOperator& op, const NodeList& rows, const NodeList& cols) {
  const int n = op.size();
  std::vector<std::pair<int, int>> col_pos(cols.size());
  for (size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] < 0 || cols[k] >= n)
      fail(ErrorCode::invalid_argument, "column label out of range: " + std::to_string(cols[k]));
    col_pos[k] = {cols[k], static_cast<int>(k)};
  }
  std::sort(col_pos.begin(), col_pos.end());
  Mat out = Mat::Zero(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= n)
      fail(ErrorCode::invalid_argument, "row label out of range: " + std::to_string(rows[r]));
    for (const auto& [j, v] : op.row(rows[r])) {
      auto it = std::lower_bound(col_pos.begin(), col_pos.end(), std::make_pair(j, -1));
      for (; it != col_pos.end() && it->first == j; ++it) out(static_cast<Index>(r), it->second) = v;
    }
  }
  return out;
}

DenseBlock extract_block(const SparseOperator& op, const NodeList& rows, const NodeList& cols) {
  return DenseBlock{rows, cols, extract(op, rows, cols)};
}

SparseOperator identity_operator(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return SparseOperator::from_triplets(n, t);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  fail(ErrorCode::parse, path + ":" + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

MatrixFile read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
  ++line_no;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") parse_fail(path, line_no, "missing %%MatrixMarket banner");
  object = lower(object), format = lower(format), field = lower(field), symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate") parse_fail(path, line_no, "only coordinate matrices are supported");
  if (field != "complex" && field != "real" && field != "integer" && field != "pattern")
    parse_fail(path, line_no, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian" && symmetry != "skew-symmetric")
    parse_fail(path, line_no, "unsupported symmetry '" + symmetry + "'");

  MatrixFile mf;
  long long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '%') {
      if (line.rfind("%%mesh", 0) == 0) {
        std::istringstream ms(line.substr(6));
        if (!(ms >> mf.nx >> mf.ny) || mf.nx < 1 || mf.ny < 1) parse_fail(path, line_no, "malformed %%mesh line");
      }
      continue;
    }
    std::istringstream hs(line);
    if (!(hs >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
      parse_fail(path, line_no, "malformed size line");
    break;
  }
  if (rows < 0) parse_fail(path, line_no, "missing size line");
  if (rows != cols) parse_fail(path, line_no, "matrix must be square");
  if (rows > (1LL << 30)) parse_fail(path, line_no, "matrix too large");

  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(nnz) * (symmetry == "general" ? 1 : 2));
  long long seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    long long i, j;
    double re = 1.0, im = 0.0;
    if (!(es >> i >> j)) parse_fail(path, line_no, "malformed entry");
    if (field == "complex") {
      if (!(es >> re >> im)) parse_fail(path, line_no, "complex entry needs two values");
    } else if (field != "pattern") {
      if (!(es >> re)) parse_fail(path, line_no, "entry needs a value");
    }
    if (i < 1 || i > rows || j < 1 || j > cols) parse_fail(path, line_no, "index out of range");
    const int r = static_cast<int>(i - 1), c = static_cast<int>(j - 1);
    const cplx v(re, im);
    t.push_back({r, c, v});
    if (r != c) {
      if (symmetry == "symmetric") t.push_back({c, r, v});
      if (symmetry == "hermitian") t.push_back({c, r, std::conj(v)});
      if (symmetry == "skew-symmetric") t.push_back({c, r, -v});
    }
    ++seen;
  }
  if (seen < nnz) parse_fail(path, line_no, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
  mf.op = SparseOperator::from_triplets(static_cast<int>(rows), t);
  return mf;
}

void write_matrix_market(const std::string& path, const SparseOperator& op, int nx, int ny) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorCode::io, "cannot write " + path);
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate complex general\n");
  if (nx > 0 && ny > 0) std::fprintf(f, "%%%%mesh %d %d\n", nx, ny);
  std::fprintf(f, "%d %d %zu\n", op.size(), op.size(), op.nnz());
  for (int i = 0; i < op.size(); ++i)
    for (const auto& [j, v] : op.row(i)) std::fprintf(f, "%d %d %.17g %.17g\n", i + 1, j + 1, v.real(), v.imag());
  const bool ok = std::fflush(f) == 0;
  std::fclose(f);
  if (!ok) fail(ErrorCode::io, "write failed for " + path);
}

}  // namespace fsi

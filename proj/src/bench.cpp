// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "dense_oracle.hpp"
#include "rgf_baseline.hpp"

namespace fsi {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> list_of(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(v);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

long long to_int(const std::string& v) {
  size_t used = 0;
  const long long x = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument(v);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

FixtureKind fixture_for(Kernel k, FixtureKind fallback) {
  if (kernel_needs_hermitian(k)) return FixtureKind::hermitian_pd;
  if (kernel_needs_complex_symmetric(k)) return FixtureKind::complex_symmetric;
  return fallback;
}

struct Cell {
  std::string method;
  Kernel kernel = Kernel::naive_dense;
  int N = 0;
};

struct OracleValues {
  std::vector<cplx> gr;
  std::vector<cplx> gless;
};

}  // namespace

BenchConfig parse_bench_config(const std::string& text, const std::string& source) {
  BenchConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::parse, where + "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "sizes") {
        c.sizes.clear();
        for (const auto& s : list_of(val)) {
          const long long n = to_int(s);
          if (n < 1 || n > 4096) throw std::invalid_argument(s);
          c.sizes.push_back(static_cast<int>(n));
        }
        if (c.sizes.empty()) throw std::invalid_argument("empty");
      } else if (key == "kernels") {
        c.kernels.clear();
        for (const auto& s : list_of(val)) c.kernels.push_back(kernel_from_name(s));
      } else if (key == "methods") {
        c.methods.clear();
        for (const auto& s : list_of(val)) {
          if (s != "find" && s != "rgf") throw std::invalid_argument(s);
          c.methods.push_back(s);
        }
      } else if (key == "oracle") {
        if (val == "auto") c.oracle = OracleMode::automatic;
        else c.oracle = to_bool(val) ? OracleMode::on : OracleMode::off;
      } else if (key == "oracle_max_n") {
        c.oracle_max_n = static_cast<int>(to_int(val));
      } else if (key == "repetitions") {
        const long long r = to_int(val);
        if (r < 3) fail(ErrorCode::parse, where + "repetitions must be at least 3");
        c.repetitions = static_cast<int>(r);
      } else if (key == "warmup") {
        c.warmup = to_bool(val);
      } else if (key == "ledger_only") {
        c.ledger_only = to_bool(val);
      } else if (key == "fixture") {
        c.fixture = fixture_from_name(val);
      } else if (key == "gless") {
        c.gless = to_bool(val);
      } else if (key == "sigma") {
        if (val == "diagonal") c.sigma = SigmaMode::diagonal;
        else if (val == "stencil") c.sigma = SigmaMode::stencil;
        else throw std::invalid_argument(val);
      } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(to_int(val));
      } else if (key == "leaf_max") {
        const long long l = to_int(val);
        if (l < 1) throw std::invalid_argument(val);
        c.leaf_max = static_cast<int>(l);
      } else if (key == "tiling") {
        c.tiling = tiling_from_name(val);
      } else if (key == "threads") {
        const long long t = to_int(val);
        if (t < 1) throw std::invalid_argument(val);
        c.threads = static_cast<int>(t);
      } else if (key == "parallel") {
        c.parallel_cells = to_bool(val);
      } else {
        fail(ErrorCode::parse, where + "unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::parse) throw;
      fail(ErrorCode::parse, where + "bad value for " + key + ": " + e.what());
    } catch (const std::exception&) {
      fail(ErrorCode::parse, where + "bad value for " + key + ": '" + val + "'");
    }
  }
  if (c.sizes.empty()) fail(ErrorCode::parse, source + ": sizes must list at least one mesh size");
  return c;
}

BenchConfig read_bench_config(const std::string& path) { return parse_bench_config(read_text_file(path), path); }

BenchTable run_benchmark(const BenchConfig& config, const BenchLog& log) {
  require(!config.sizes.empty(), "benchmark needs at least one mesh size");
  require(config.repetitions >= 1, "repetitions must be positive");
  std::vector<Cell> cells;
  for (int N : config.sizes)
    for (const auto& m : config.methods) {
      if (m == "rgf") {
        cells.push_back({m, Kernel::naive_dense, N});
      } else {
        for (Kernel k : config.kernels) cells.push_back({m, k, N});
      }
    }

  std::map<std::pair<int, int>, OracleValues> oracle_cache;
  std::mutex oracle_mutex;
  auto oracle_for = [&](int N, FixtureKind kind, const SparseOperator& A, const SparseOperator* S) -> const OracleValues& {
    std::lock_guard<std::mutex> lock(oracle_mutex);
    auto key = std::make_pair(N, static_cast<int>(kind));
    auto it = oracle_cache.find(key);
    if (it == oracle_cache.end()) {
      OracleValues v;
      v.gr = dense_gr_diag(A);
      if (S) v.gless = dense_gless_diag(A, *S);
      it = oracle_cache.emplace(key, std::move(v)).first;
    }
    return it->second;
  };

  auto run_cell = [&](const Cell& cell) {
    std::vector<BenchRow> raw;
    const Mesh mesh = build_mesh(cell.N, cell.N);
    const bool is_rgf = cell.method == "rgf";
    const std::string kname = is_rgf ? "rgf" : kernel_name(cell.kernel);
    const FixtureKind kind = is_rgf ? config.fixture : fixture_for(cell.kernel, config.fixture);
    const std::uint64_t seed = config.seed * 1000003ULL + static_cast<std::uint64_t>(cell.N);
    SolverConfig sc;
    sc.kernel = cell.kernel;
    sc.compute_gless = config.gless;
    sc.leaf_max = config.leaf_max;
    sc.tiling = config.tiling;
    sc.threads = config.threads;

    if (config.ledger_only) {
      const FlopLedger ledger = is_rgf ? rgf_ledger_dry_run(mesh, config.gless)
                                       : find_ledger_dry_run(mesh, stencil_adjacency(mesh), sc);
      raw.push_back({cell.method, kname, cell.N, 0.0, ledger.multiplications(),
                     std::numeric_limits<double>::quiet_NaN(), 0});
      return raw;
    }

    const SparseOperator A = random_operator(mesh, kind, seed);
    SparseOperator S;
    if (config.gless) S = random_sigma(mesh, config.sigma, seed + 1);
    const SparseOperator* Sp = config.gless ? &S : nullptr;
    const bool use_oracle = config.oracle == OracleMode::on ||
                            (config.oracle == OracleMode::automatic && cell.N <= config.oracle_max_n);

    struct Run {
      std::vector<cplx> gr, gless;
      double flops = 0;
    };
    auto once = [&]() {
      Run r;
      if (is_rgf) {
        RgfResult x = rgf_solve(mesh, A, Sp);
        r.gr = std::move(x.gr_diag);
        r.gless = std::move(x.gless_diag);
        r.flops = x.ledger.multiplications();
      } else {
        SelectedInverse x = solve(mesh, A, Sp, sc);
        r.gr = std::move(x.gr_diag);
        r.gless = std::move(x.gless_diag);
        r.flops = x.ledger.multiplications();
      }
      return r;
    };
    if (config.warmup) once();
    double err = std::numeric_limits<double>::quiet_NaN();
    for (int rep = 0; rep < config.repetitions; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      Run r = once();
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (rep == 0 && use_oracle) {
        const OracleValues& o = oracle_for(cell.N, kind, A, Sp);
        err = max_relative_error(r.gr, o.gr);
        if (Sp) err = std::max(err, max_relative_error(r.gless, o.gless));
      }
      raw.push_back({cell.method, kname, cell.N, secs, r.flops, err, rep});
    }
    return raw;
  };

  std::vector<std::vector<BenchRow>> per_cell(cells.size());
  if (config.parallel_cells) {
    std::vector<std::future<std::vector<BenchRow>>> futs;
    for (const auto& c : cells) futs.push_back(std::async(std::launch::async, run_cell, c));
    for (size_t i = 0; i < cells.size(); ++i) per_cell[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (log) log(cells[i].method + " " + (cells[i].method == "rgf" ? "" : kernel_name(cells[i].kernel)) + " N=" +
                   std::to_string(cells[i].N));
      per_cell[i] = run_cell(cells[i]);
    }
  }

  BenchTable table;
  for (const auto& raw : per_cell) {
    if (raw.empty()) continue;
    std::vector<double> secs;
    for (const auto& r : raw) secs.push_back(r.seconds);
    BenchRow m = raw.front();
    m.seconds = median(secs);
    m.repetition = -1;
    table.rows.push_back(m);
    if (!config.ledger_only) table.raw.insert(table.raw.end(), raw.begin(), raw.end());
  }
  return table;
}

std::vector<CrossoverEntry> bench_crossovers(const BenchTable& table, bool use_flops) {
  std::vector<CrossoverEntry> out;
  ScalingFit rgf;
  try {
    rgf = fit_rows(table.rows, "rgf", "rgf", use_flops);
  } catch (const Error&) {
    return out;
  }
  std::set<std::string> kernels;
  for (const auto& r : table.rows)
    if (r.method == "find") kernels.insert(r.kernel);
  for (const auto& k : kernels) {
    try {
      CrossoverEntry e;
      e.kernel = k;
      e.metric = use_flops ? "flops" : "seconds";
      e.find_fit = fit_rows(table.rows, "find", k, use_flops);
      e.rgf_fit = rgf;
      e.n_star = crossover(e.find_fit, e.rgf_fit);
      out.push_back(e);
    } catch (const Error&) {
    }
  }
  return out;
}

std::vector<std::string> emit_report(const BenchTable& table, const BenchConfig& config, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + out_dir + ": " + ec.message());
  const std::filesystem::path dir(out_dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    write_text_file((dir / name).string(), text);
    written.push_back(name);
  };
  put("results.csv", rows_to_csv(table.rows));
  if (!config.ledger_only) put("raw_timings.csv", raw_rows_to_csv(table.raw));

  char buf[256];
  std::string fits = "method,kernel,metric,exponent,constant,residual,points\n";
  std::vector<std::pair<std::string, std::string>> series_keys;
  for (const auto& r : table.rows)
    if (std::find(series_keys.begin(), series_keys.end(), std::make_pair(r.method, r.kernel)) == series_keys.end())
      series_keys.emplace_back(r.method, r.kernel);
  std::vector<std::string> metrics{"flops"};
  if (!config.ledger_only) metrics.insert(metrics.begin(), "seconds");

  for (const auto& metric : metrics) {
    const bool use_flops = metric == "flops";
    std::vector<PlotSeries> series;
    for (const auto& [method, kernel] : series_keys) {
      PlotSeries s;
      s.label = method == "rgf" ? "rgf" : "find " + kernel;
      for (const auto& r : table.rows)
        if (r.method == method && r.kernel == kernel) {
          s.x.push_back(r.N);
          s.y.push_back(use_flops ? r.flops : r.seconds);
        }
      try {
        s.fit = fit_scaling(s.x, s.y);
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%.17g,%.17g,%.17g,%d\n", method.c_str(), kernel.c_str(), metric.c_str(),
                      s.fit->exponent, s.fit->constant, s.fit->residual, s.fit->points);
        fits += buf;
      } catch (const Error&) {
      }
      series.push_back(std::move(s));
    }
    std::vector<PlotMarker> markers;
    for (const auto& c : bench_crossovers(table, use_flops)) {
      std::snprintf(buf, sizeof buf, "N*=%.1f (%s)", c.n_star, c.kernel.c_str());
      markers.push_back({buf, c.n_star, c.rgf_fit.constant * std::pow(c.n_star, c.rgf_fit.exponent)});
    }
    bool plottable = false;
    for (const auto& s : series)
      for (double y : s.y) plottable = plottable || y > 0;
    if (plottable)
      put(metric == "seconds" ? "time_vs_N.svg" : "flops_vs_N.svg",
          loglog_svg(metric == "seconds" ? "wall time vs N" : "multiplications vs N", "N (N x N mesh)",
                     metric == "seconds" ? "seconds" : "multiplications", series, markers));
  }
  put("fits.csv", fits);

  std::string cross = "kernel,metric,find_exponent,rgf_exponent,n_star\n";
  for (const auto& metric : metrics)
    for (const auto& c : bench_crossovers(table, metric == "flops")) {
      std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g\n", c.kernel.c_str(), c.metric.c_str(), c.find_fit.exponent,
                    c.rgf_fit.exponent, c.n_star);
      cross += buf;
    }
  put("crossover.csv", cross);

  std::snprintf(buf, sizeof buf, "model crossover of 457 N^3 and 3.5 N^4: N = %.2f\n", model_crossover());
  std::string summary = buf;
  std::snprintf(buf, sizeof buf, "rows: %zu, repetitions: %d, ledger_only: %s\n", table.rows.size(), config.repetitions,
                config.ledger_only ? "true" : "false");
  summary += buf;
  put("summary.txt", summary);
  return written;
}

}  // namespace fsi

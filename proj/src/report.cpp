// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace fsi {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') fail(ErrorCode::parse, "line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

ScalingFit fit_scaling(const std::vector<double>& N, const std::vector<double>& y) {
  require(N.size() == y.size(), "fit_scaling: size mismatch");
  if (N.size() < 3) fail(ErrorCode::invalid_argument, "fit_scaling needs at least 3 points");
  double lo = N.front(), hi = N.front();
  for (size_t i = 0; i < N.size(); ++i) {
    require(N[i] > 0 && y[i] > 0, "fit_scaling needs positive data");
    lo = std::min(lo, N[i]);
    hi = std::max(hi, N[i]);
  }
  if (hi < 4 * lo) fail(ErrorCode::invalid_argument, "fit_scaling needs sizes spanning at least a factor of 4");
  const double k = static_cast<double>(N.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < N.size(); ++i) {
    const double lx = std::log(N[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  ScalingFit f;
  f.points = static_cast<int>(N.size());
  f.exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double logc = (sy - f.exponent * sx) / k;
  f.constant = std::exp(logc);
  double rss = 0;
  for (size_t i = 0; i < N.size(); ++i) {
    const double r = std::log(y[i]) - logc - f.exponent * std::log(N[i]);
    rss += r * r;
  }
  f.residual = std::sqrt(rss / k);
  return f;
}

ScalingFit fit_rows(const std::vector<BenchRow>& rows, const std::string& method, const std::string& kernel,
                    bool use_flops) {
  std::vector<double> x, y;
  for (const auto& r : rows)
    if (r.method == method && r.kernel == kernel && r.repetition < 0) {
      x.push_back(r.N);
      y.push_back(use_flops ? r.flops : r.seconds);
    }
  return fit_scaling(x, y);
}

double crossover(const ScalingFit& a, const ScalingFit& b) {
  if (a.exponent == b.exponent) fail(ErrorCode::invalid_argument, "crossover needs distinct exponents");
  return std::pow(a.constant / b.constant, 1.0 / (b.exponent - a.exponent));
}

double model_crossover(double c1, double p1, double c2, double p2) {
  return crossover(ScalingFit{p1, c1, 0, 0}, ScalingFit{p2, c2, 0, 0});
}

std::string rows_to_csv(const std::vector<BenchRow>& rows) {
  std::string out = "method,kernel,N,seconds,flops,max_err\n";
  for (const auto& r : rows)
    out += r.method + "," + r.kernel + "," + std::to_string(r.N) + "," + fmt("%.17g", r.seconds) + "," +
           fmt("%.17g", r.flops) + "," + fmt("%.17g", r.max_err) + "\n";
  return out;
}

std::string raw_rows_to_csv(const std::vector<BenchRow>& rows) {
  std::string out = "method,kernel,N,repetition,seconds,flops,max_err\n";
  for (const auto& r : rows)
    out += r.method + "," + r.kernel + "," + std::to_string(r.N) + "," + std::to_string(r.repetition) + "," +
           fmt("%.17g", r.seconds) + "," + fmt("%.17g", r.flops) + "," + fmt("%.17g", r.max_err) + "\n";
  return out;
}

std::vector<BenchRow> parse_rows_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<BenchRow> rows;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (!header) {
      if (line != "method,kernel,N,seconds,flops,max_err")
        fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    if (f.size() != 6) fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected 6 fields");
    BenchRow r;
    r.method = f[0];
    r.kernel = f[1];
    r.N = static_cast<int>(parse_double(f[2], lineno));
    r.seconds = parse_double(f[3], lineno);
    r.flops = parse_double(f[4], lineno);
    r.max_err = parse_double(f[5], lineno);
    rows.push_back(r);
  }
  if (!header) fail(ErrorCode::parse, "missing header");
  return rows;
}

std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<PlotSeries>& series, const std::vector<PlotMarker>& markers) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = 0, y0 = x0, y1 = 0;
  auto extend = [&](double x, double y) {
    if (!(x > 0 && y > 0) || !std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) extend(s.x[i], s.y[i]);
  for (const auto& m : markers) extend(m.x, m.y);
  if (!(x1 > 0)) fail(ErrorCode::invalid_argument, "plot has no positive data");
  for (const auto& s : series)
    if (s.fit)
      for (double x : {x0, x1}) extend(x, s.fit->constant * std::pow(x, s.fit->exponent));
  const double lx0 = std::floor(std::log10(x0)), lx1 = std::max(std::ceil(std::log10(x1)), lx0 + 1);
  const double ly0 = std::floor(std::log10(y0)), ly1 = std::max(std::ceil(std::log10(y1)), ly0 + 1);
  const double W = 720, H = 480, L = 80, R = 200, T = 40, B = 60;
  auto px = [&](double x) { return L + (std::log10(x) - lx0) / (lx1 - lx0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (std::log10(y) - ly0) / (ly1 - ly0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title) << "</text>\n";
  for (double e = lx0; e <= lx1; e += 1) {
    const double x = px(std::pow(10.0, e));
    o << "<line x1=\"" << x << "\" y1=\"" << T << "\" x2=\"" << x << "\" y2=\"" << H - B << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << x << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (double e = ly0; e <= ly1; e += 1) {
    const double y = py(std::pow(10.0, e));
    o << "<line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << W - R << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << escape_xml(xlabel) << "</text>\n";
  o << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(ylabel)
    << "</text>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 8];
    for (size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0)
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3.5\" fill=\"" << c << "\"/>\n";
    if (s.fit) {
      const double a = std::pow(10.0, lx0), b = std::pow(10.0, lx1);
      const double ya = s.fit->constant * std::pow(a, s.fit->exponent), yb = s.fit->constant * std::pow(b, s.fit->exponent);
      o << "<line x1=\"" << px(a) << "\" y1=\"" << py(ya) << "\" x2=\"" << px(b) << "\" y2=\"" << py(yb) << "\" stroke=\"" << c
        << "\" stroke-dasharray=\"5,3\" clip-path=\"url(#plot)\"/>\n";
    }
    const double ly = T + 16 + 18 * static_cast<double>(k);
    std::string label = s.label;
    if (s.fit) label += " (p=" + fmt("%.2f", s.fit->exponent) + ")";
    o << "<rect x=\"" << W - R + 10 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << c << "\"/>\n";
    o << "<text x=\"" << W - R + 26 << "\" y=\"" << ly << "\">" << escape_xml(label) << "</text>\n";
  }
  for (const auto& m : markers) {
    if (!(m.x > 0 && m.y > 0)) continue;
    o << "<circle cx=\"" << px(m.x) << "\" cy=\"" << py(m.y) << "\" r=\"6\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << px(m.x) + 8 << "\" y=\"" << py(m.y) - 8 << "\">" << escape_xml(m.label) << "</text>\n";
  }
  o << "<defs><clipPath id=\"plot\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
    << H - T - B << "\"/></clipPath></defs>\n";
  o << "</svg>\n";
  return o.str();
}

const std::array<Kernel, 4>& kernel_table_kernels() {
  static const std::array<Kernel, 4> ks = {Kernel::parallel_inverse, Kernel::sequential_inverse, Kernel::block_lu,
                                           Kernel::naive_lu};
  return ks;
}

namespace {
const char* kernel_table_formula(Kernel k) {
  switch (k) {
    case Kernel::parallel_inverse: return "8/3 m^3 + 4 m^2 n + 4 m n^2";
    case Kernel::sequential_inverse: return "4/3 m^3 + 5 m^2 n + 4 m n^2";
    case Kernel::block_lu: return "4/3 m^3 + 4 m^2 n + 5 m n^2";
    case Kernel::naive_lu: return "8/3 m^3 + 13/2 m^2 n + 4 m n^2";
    default: return "";
  }
}

double naive_at(double m, double n) { return flop_model_sb(Kernel::naive_dense, 2 * m, 2 * n); }
}  // namespace

std::vector<KernelTableRow> kernel_table(int m, int n) {
  require(m >= 0 && n >= 0, "kernel_table needs non-negative m, n");
  std::vector<KernelTableRow> out;
  const Partition p{m, m, n, n};
  for (Kernel k : kernel_table_kernels()) {
    KernelTableRow r;
    r.kernel = k;
    r.formula = kernel_table_formula(k);
    r.model = flop_model(k, m, n);
    r.ledger = static_cast<double>(kernel_cost_sixths(k, p, false)) / FlopLedger::kUnit;
    r.naive = naive_at(m, n);
    r.percent = r.naive > 0 ? 100.0 * r.ledger / r.naive : 0.0;
    out.push_back(r);
  }
  return out;
}

std::array<double, 4> kernel_table_cases(Kernel k, int a) {
  const int cases[4][2] = {{1, 3}, {2, 4}, {3, 2}, {4, 3}};
  std::array<double, 4> out{};
  for (int c = 0; c < 4; ++c) {
    const int m = cases[c][0] * a, n = cases[c][1] * a;
    const double ledger = static_cast<double>(kernel_cost_sixths(k, Partition{m, m, n, n}, false)) / FlopLedger::kUnit;
    out[c] = 100.0 * ledger / naive_at(m, n);
  }
  return out;
}

std::string kernel_table_text(int m, int n, int a) {
  std::ostringstream o;
  char buf[256];
  std::snprintf(buf, sizeof buf, "block kernel costs at m=%d n=%d (naive dense: %.17g)\n", m, n, naive_at(m, n));
  o << buf;
  std::snprintf(buf, sizeof buf, "%-20s %-32s %22s %22s %9s\n", "kernel", "formula", "model", "ledger", "% naive");
  o << buf;
  for (const auto& r : kernel_table(m, n)) {
    std::snprintf(buf, sizeof buf, "%-20s %-32s %22.17g %22.17g %8.2f%%\n", kernel_name(r.kernel), r.formula.c_str(),
                  r.model, r.ledger, r.percent);
    o << buf;
  }
  std::snprintf(buf, sizeof buf, "percent of naive at (m,n) = (a,3a) (2a,4a) (3a,2a) (4a,3a), a=%d\n", a);
  o << buf;
  for (Kernel k : kernel_table_kernels()) {
    const auto c = kernel_table_cases(k, a);
    std::snprintf(buf, sizeof buf, "%-20s %6.1f %6.1f %6.1f %6.1f\n", kernel_name(k), c[0], c[1], c[2], c[3]);
    o << buf;
  }
  return o.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot open " + path + " for writing");
  f << text;
  f.close();
  if (!f) fail(ErrorCode::io, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace fsi

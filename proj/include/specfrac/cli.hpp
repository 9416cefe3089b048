#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "specfrac/errors.hpp"
#include "specfrac/fd_oracle.hpp"
#include "specfrac/fracop.hpp"
#include "specfrac/logistic.hpp"
#include "specfrac/weight.hpp"
#include "specfrac/weighted_eigen.hpp"

namespace specfrac {

// ---------------------------------------------------------------------------
// Weight spec grammar:  m1 | m2 | const:<c> | series:<c>;<j1>=<a1>,<j2>=<a2>,...
// ---------------------------------------------------------------------------

namespace detail {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;

  bool done() const { return pos >= s.size(); }
  char peek() const { return pos < s.size() ? s[pos] : '\0'; }

  bool eat(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }

  double number(const char* what) {
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError(std::string("expected ") + what, pos);
    pos += static_cast<std::size_t>(end - begin);
    if (!std::isfinite(v)) throw ParseError(std::string(what) + " must be finite", pos);
    return v;
  }

  long integer(const char* what) {
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin) throw ParseError(std::string("expected ") + what, pos);
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }
};

}  // namespace detail

inline Weight parse_weight(const std::string& spec) {
  detail::Cursor c{spec};
  auto expect_end = [&](Weight w) {
    if (!c.done()) throw ParseError("unexpected trailing characters in weight spec", c.pos);
    return w;
  };
  if (spec.rfind("m1", 0) == 0 && spec.size() == 2) return weight_m1();
  if (spec.rfind("m2", 0) == 0 && spec.size() == 2) return weight_m2();
  if (spec.rfind("const:", 0) == 0) {
    c.pos = 6;
    const double v = c.number("constant value");
    return expect_end(constant_weight(v));
  }
  if (spec.rfind("series:", 0) == 0) {
    c.pos = 7;
    const double offset = c.number("offset");
    if (!c.eat(';')) throw ParseError("expected ';' after the series offset", c.pos);
    std::vector<Weight::Harmonic> harmonics;
    if (!c.done()) {
      while (true) {
        const std::size_t at = c.pos;
        const long j = c.integer("harmonic index");
        if (j < 1) throw ParseError("harmonic index must be >= 1", at);
        if (!c.eat('=')) throw ParseError("expected '=' after harmonic index", c.pos);
        const double a = c.number("harmonic amplitude");
        harmonics.push_back({static_cast<int>(j), a});
        if (c.done()) break;
        if (!c.eat(',')) throw ParseError("expected ',' between harmonics", c.pos);
      }
    }
    try {
      return make_weight(offset, std::move(harmonics));
    } catch (const InvalidParameter& e) {
      throw ParseError(e.what(), 7);
    }
  }
  throw ParseError("unknown weight spec (want m1, m2, const:<c> or series:<c>;<j>=<a>,...)", 0);
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string command;  // eigen | sweep | branch | compare | extend
  std::vector<double> L;
  std::vector<double> s{0.5};
  std::vector<std::string> weights;
  int K = 64;
  double lambda_max = 5.0;
  std::string out;       // empty: stdout
  int oracle_nx = 0;     // 0: per-command default
  int oracle_ny = 0;
  double oracle_Y = 0.0;  // 0: 8 / sqrt(mu_1)
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

inline double parse_double_token(const std::string& tok, const char* what) {
  detail::Cursor c{tok};
  const double v = c.number(what);
  if (!c.done()) throw ParseError(std::string("bad ") + what, c.pos);
  return v;
}

inline long parse_int_token(const std::string& tok, const char* what) {
  detail::Cursor c{tok};
  const long v = c.integer(what);
  if (!c.done()) throw ParseError(std::string("bad ") + what, c.pos);
  return v;
}

/// Expands "min:max:step" into an inclusive grid.
inline std::vector<double> parse_s_grid(const std::string& spec) {
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.size() != 3) throw ParseError("s-grid must be min:max:step", 0);
  const double lo = parse_double_token(parts[0], "s-grid min");
  const double hi = parse_double_token(parts[1], "s-grid max");
  const double step = parse_double_token(parts[2], "s-grid step");
  if (!(step > 0.0)) throw ParseError("s-grid step must be positive", 0);
  if (hi < lo) throw ParseError("s-grid max must be >= min", 0);
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    double v = lo + i * step;
    if (std::abs(v - hi) <= 1e-12 * std::max(1.0, std::abs(hi))) v = hi;  // ulp drift
    out[i] = v;
  }
  return out;
}

/// Plain key=value file; '#' starts a comment, blank lines are skipped,
/// repeated keys accumulate.
inline std::map<std::string, std::vector<std::string>> parse_config_file(std::istream& in) {
  static const std::set<std::string> known = {"L",   "s",          "s-grid",    "weight",
                                              "K",   "lambda-max", "out",       "oracle-nx",
                                              "oracle-ny", "oracle-Y"};
  std::map<std::string, std::vector<std::string>> kv;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string t) {
    const std::size_t a = t.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const std::size_t b = t.find_last_not_of(" \t\r");
    return t.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line is not key=value", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known.count(key)) throw ParseError("unknown config key '" + key + "'", lineno);
    if (value.empty()) throw ParseError("empty value for config key '" + key + "'", lineno);
    kv[key].push_back(value);
  }
  return kv;
}

/// Builds a RunConfig from merged key/value entries (config file overlaid by
/// command-line flags; the caller resolves precedence by overwriting keys).
inline RunConfig make_run_config(const std::string& command,
                                 const std::map<std::string, std::vector<std::string>>& kv) {
  static const std::set<std::string> commands = {"eigen", "sweep", "branch", "compare", "extend"};
  if (!commands.count(command))
    throw ParseError("unknown command '" + command + "'", 0);
  RunConfig cfg;
  cfg.command = command;
  auto last = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second.back();
  };
  if (auto it = kv.find("L"); it != kv.end()) {
    cfg.L.clear();
    for (const std::string& entry : it->second)
      for (const std::string& tok : split(entry, ','))
        cfg.L.push_back(parse_double_token(tok, "interval length"));
    for (double l : cfg.L)
      if (!(l > 0.0)) throw ParseError("interval length must be positive", 0);
  }
  const bool has_s = kv.count("s") > 0, has_grid = kv.count("s-grid") > 0;
  if (has_s && has_grid) throw ParseError("give either s or s-grid, not both", 0);
  if (has_s) {
    cfg.s.clear();
    for (const std::string& entry : kv.at("s"))
      for (const std::string& tok : split(entry, ','))
        cfg.s.push_back(parse_double_token(tok, "fractional power"));
  } else if (has_grid) {
    cfg.s = parse_s_grid(kv.at("s-grid").back());
  }
  for (double sv : cfg.s)
    if (!(sv > 0.0 && sv <= 1.0)) throw ParseError("fractional power must lie in (0, 1]", 0);
  if (auto it = kv.find("weight"); it != kv.end()) {
    for (const std::string& entry : it->second) {
      parse_weight(entry);  // fail fast on malformed specs
      cfg.weights.push_back(entry);
    }
  }
  if (const std::string* v = last("K")) {
    const long k = parse_int_token(*v, "mode cutoff K");
    if (k < 1 || k > 16384) throw ParseError("mode cutoff K out of range", 0);
    cfg.K = static_cast<int>(k);
  }
  if (const std::string* v = last("lambda-max")) {
    cfg.lambda_max = parse_double_token(*v, "lambda-max");
    if (!(cfg.lambda_max > 0.0)) throw ParseError("lambda-max must be positive", 0);
  }
  if (const std::string* v = last("out")) cfg.out = *v;
  if (const std::string* v = last("oracle-nx")) {
    const long n = parse_int_token(*v, "oracle-nx");
    if (n < 2 || n > 65536) throw ParseError("oracle-nx out of range", 0);
    cfg.oracle_nx = static_cast<int>(n);
  }
  if (const std::string* v = last("oracle-ny")) {
    const long n = parse_int_token(*v, "oracle-ny");
    if (n < 2 || n > 65536) throw ParseError("oracle-ny out of range", 0);
    cfg.oracle_ny = static_cast<int>(n);
  }
  if (const std::string* v = last("oracle-Y")) {
    cfg.oracle_Y = parse_double_token(*v, "oracle-Y");
    if (!(cfg.oracle_Y > 0.0)) throw ParseError("oracle-Y must be positive", 0);
  }
  if (cfg.weights.empty()) throw ParseError("at least one weight is required", 0);
  if (cfg.L.empty()) throw ParseError("at least one interval length L is required", 0);
  return cfg;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

namespace detail {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace detail

struct RunOutput {
  std::string csv;
  bool any_error = false;
};

namespace detail {

struct SweepKey {
  int weight_pos;
  double L;
  double s;
};

inline std::string sweep_row(const RunConfig& cfg, double s, double L, const std::string& wspec,
                             bool& err) {
  std::string row = g17(s) + "," + g17(L) + "," + csv_field(wspec) + "," + std::to_string(cfg.K);
  try {
    const Weight w = parse_weight(wspec);
    const SpectralBasis basis(L, cfg.K);
    const EigenPair pair = smallest_positive_eigen(basis, w, FracPower(s));
    const double resid = std::max(pair.op_residual, pair.constraint_residual);
    row += "," + g17(pair.lambda) + "," + std::string(pair.positive ? "1" : "0") + "," +
           g17(resid) + "," + std::to_string(pair.jacobi_sweeps) + ",";
  } catch (const Error& e) {
    err = true;
    row += ",nan,0,nan,0," + csv_field(e.what());
  }
  return row + "\n";
}

inline double default_cylinder_Y(const RunConfig& cfg, double L) {
  return cfg.oracle_Y > 0.0 ? cfg.oracle_Y : 8.0 * L / kPi;  // 8 / sqrt(mu_1)
}

}  // namespace detail

inline RunOutput run_eigen(const RunConfig& cfg) {
  if (cfg.weights.size() != 1 || cfg.L.size() != 1 || cfg.s.size() != 1)
    throw InvalidParameter("eigen expects exactly one weight, one L and one s");
  RunOutput out;
  out.csv = "s,L,weight,K,lambda,positive,rayleigh_residual,iters,error\n";
  out.csv += detail::sweep_row(cfg, cfg.s[0], cfg.L[0], cfg.weights[0], out.any_error);
  return out;
}

/// Sweep rows are computed concurrently but emitted in (weight, L, s) order,
/// weights in the order they were listed.
inline RunOutput run_sweep(const RunConfig& cfg) {
  std::vector<double> ls(cfg.L);
  std::sort(ls.begin(), ls.end());
  std::vector<double> ss(cfg.s);
  std::sort(ss.begin(), ss.end());
  struct Job {
    double s, L;
    const std::string* w;
  };
  std::vector<Job> jobs;
  for (const std::string& w : cfg.weights)
    for (double L : ls)
      for (double s : ss) jobs.push_back({s, L, &w});

  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8u));
  std::vector<std::string> rows(jobs.size());
  std::vector<char> errs(jobs.size(), 0);
  std::vector<std::future<void>> futures;
  std::atomic<std::size_t> next{0};
  for (unsigned t = 0; t < workers; ++t) {
    futures.push_back(std::async(std::launch::async, [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        bool err = false;
        rows[i] = detail::sweep_row(cfg, jobs[i].s, jobs[i].L, *jobs[i].w, err);
        errs[i] = err ? 1 : 0;
      }
    }));
  }
  for (auto& f : futures) f.get();

  RunOutput out;
  out.csv = "s,L,weight,K,lambda,positive,rayleigh_residual,iters,error\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out.csv += rows[i];
    if (errs[i]) out.any_error = true;
  }
  return out;
}

inline RunOutput run_branch(const RunConfig& cfg) {
  if (cfg.weights.size() != 1 || cfg.L.size() != 1)
    throw InvalidParameter("branch expects exactly one weight and one L");
  RunOutput out;
  out.csv = "lambda,h,sup_u,min_u,mass_residual,newton_iters,error\n";
  using detail::g17;
  try {
    const Weight w = parse_weight(cfg.weights[0]);
    const SpectralBasis basis(cfg.L[0], cfg.K);
    const Branch branch = branch_continue(basis, w, cfg.lambda_max);
    for (const BranchPoint& pt : branch.points) {
      out.csv += g17(pt.state.lambda) + "," + g17(pt.state.h) + "," + g17(pt.check.sup_u) + "," +
                 g17(pt.check.min_u) + "," + g17(pt.check.mass_residual) + "," +
                 std::to_string(pt.newton_iters) + ",\n";
    }
  } catch (const BranchStall& e) {
    out.any_error = true;
    out.csv += g17(e.last_good_lambda) + ",nan,nan,nan,nan,0," + detail::csv_field(e.what()) + "\n";
  } catch (const Error& e) {
    out.any_error = true;
    out.csv += "nan,nan,nan,nan,nan,0," + detail::csv_field(e.what()) + "\n";
  }
  return out;
}

inline RunOutput run_compare(const RunConfig& cfg) {
  RunOutput out;
  out.csv = "s,L,weight,lambda_spectral,lambda_oracle,rel_err,error\n";
  using detail::g17;
  std::vector<double> ls(cfg.L);
  std::sort(ls.begin(), ls.end());
  const int nx = cfg.oracle_nx > 0 ? cfg.oracle_nx : 128;
  const int ny = cfg.oracle_ny > 0 ? cfg.oracle_ny : 256;
  for (const std::string& wspec : cfg.weights) {
    for (double L : ls) {
      for (double s : {0.5, 1.0}) {
        std::string row = g17(s) + "," + g17(L) + "," + detail::csv_field(wspec);
        try {
          const Weight w = parse_weight(wspec);
          const SpectralBasis basis(L, cfg.K);
          const EigenPair pair = smallest_positive_eigen(basis, w, FracPower(s));
          double oracle;
          if (s == 1.0) {
            oracle = fd_eigen_laplace(L, nx, w).lambda;
          } else {
            const CylinderGrid grid{nx, ny, detail::default_cylinder_Y(cfg, L)};
            oracle = fd_cylinder_eigen(L, grid, w).lambda;
          }
          const double rel = std::abs(pair.lambda - oracle) / std::abs(oracle);
          row += "," + g17(pair.lambda) + "," + g17(oracle) + "," + g17(rel) + ",";
        } catch (const Error& e) {
          out.any_error = true;
          row += ",nan,nan,nan," + detail::csv_field(e.what());
        }
        out.csv += row + "\n";
      }
    }
  }
  return out;
}

/// Samples the harmonic extension of the principal half-Laplacian
/// eigenfunction on a (x, y) grid; `energy` is the cross-sectional Dirichlet
/// energy at that height.
inline RunOutput run_extend(const RunConfig& cfg) {
  if (cfg.weights.size() != 1 || cfg.L.size() != 1)
    throw InvalidParameter("extend expects exactly one weight and one L");
  RunOutput out;
  out.csv = "x,y,v,energy,error\n";
  using detail::g17;
  try {
    const Weight w = parse_weight(cfg.weights[0]);
    const double L = cfg.L[0];
    const SpectralBasis basis(L, cfg.K);
    const EigenPair pair = smallest_positive_eigen(basis, w, FracPower(0.5));
    const int nx = cfg.oracle_nx > 0 ? cfg.oracle_nx : 64;
    const int ny = cfg.oracle_ny > 0 ? cfg.oracle_ny : 32;
    const double Y = detail::default_cylinder_Y(cfg, L);
    for (int j = 0; j <= ny; ++j) {
      const double y = Y * j / ny;
      const double energy = energy_profile(pair.field, y);
      for (int i = 0; i <= nx; ++i) {
        const double x = L * i / nx;
        out.csv += g17(x) + "," + g17(y) + "," + g17(extend_value(pair.field, x, y)) + "," +
                   g17(energy) + ",\n";
      }
    }
  } catch (const Error& e) {
    out.any_error = true;
    out.csv += "nan,nan,nan,nan," + detail::csv_field(e.what()) + "\n";
  }
  return out;
}

inline RunOutput run_command(const RunConfig& cfg) {
  if (cfg.command == "eigen") return run_eigen(cfg);
  if (cfg.command == "sweep") return run_sweep(cfg);
  if (cfg.command == "branch") return run_branch(cfg);
  if (cfg.command == "compare") return run_compare(cfg);
  if (cfg.command == "extend") return run_extend(cfg);
  throw InvalidParameter("unknown command '" + cfg.command + "'");
}

}  // namespace specfrac

#pragma once

#include "tvmoo/engine.hpp"
#include "tvmoo/metrics.hpp"
#include "tvmoo/oracles.hpp"

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tvmoo {

/// Malformed scenario document; names the line (0 for --override) and key.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, std::string key, const std::string& message)
      : std::runtime_error(describe(line, key, message)), line_(line), key_(std::move(key)) {}

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  static std::string describe(int line, const std::string& key, const std::string& message) {
    std::ostringstream os;
    if (line > 0)
      os << "line " << line;
    else
      os << "override";
    os << ", key '" << key << "': " << message;
    return os.str();
  }

  int line_;
  std::string key_;
};

/// Scalar offset delta(t) of a quadratic's center along its drift direction.
struct DriftSchedule {
  enum class Kind { none, linear, sinusoidal, jump };
  Kind kind = Kind::none;
  double rate = 0.0;
  double amplitude = 0.0;
  double period = 1.0;
  int jump_time = 1;
  double jump_delta = 0.0;

  double offset(int t) const {
    switch (kind) {
      case Kind::none: return 0.0;
      case Kind::linear: return rate * (t - 1);
      case Kind::sinusoidal: return amplitude * std::sin(2.0 * std::numbers::pi * (t - 1) / period);
      case Kind::jump: return t >= jump_time ? jump_delta : 0.0;
    }
    return 0.0;
  }
};

struct ObjectiveSpec {
  QuadraticData quadratic;
  DriftSchedule drift;
  ProxFamily g{ProxFamily::Kind::zero, 0.0, 0.0, 0.0};
  std::optional<double> step;
};

struct ScenarioSpec {
  std::string name;
  int n = 0;
  int N = 0;
  int T = 0;
  int K = 0;
  std::vector<double> alphas;
  Vector x1;
  std::uint64_t seed = 0;
  std::vector<ObjectiveSpec> objectives;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::string key, Entry e) : key_(std::move(key)), e_(std::move(e)) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(e_.line, key_, msg); }

  double real(std::string_view tok) const {
    const std::string s(trim(tok));
    if (s.empty()) fail("empty number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) fail("not a finite number: '" + s + "'");
    return v;
  }

  double real() const { return real(e_.value); }

  long integer() const {
    const std::string s(trim(e_.value));
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) fail("not an integer: '" + s + "'");
    return v;
  }

  int positive() const {
    const long v = integer();
    if (v <= 0 || v > 1'000'000'000) fail("must be a positive integer");
    return static_cast<int>(v);
  }

  std::vector<double> list() const {
    std::vector<double> out;
    std::string_view rest = e_.value;
    while (true) {
      const auto comma = rest.find(',');
      out.push_back(real(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  Vector vector(std::size_t expected, const char* what) const {
    const auto v = list();
    if (v.size() != expected) {
      std::ostringstream os;
      os << "dimension mismatch: " << what << " needs " << expected << " entries, got " << v.size();
      fail(os.str());
    }
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  std::pair<std::string, std::string> tagged() const {
    const std::string s(trim(e_.value));
    const auto colon = s.find(':');
    if (colon == std::string::npos) return {s, ""};
    return {std::string(trim(std::string_view(s).substr(0, colon))), s.substr(colon + 1)};
  }

  std::vector<double> args(const std::string& body, std::size_t count, const std::string& form) const {
    const Reader sub(key_, Entry{body, e_.line});
    const auto v = body.empty() ? std::vector<double>{} : sub.list();
    if (v.size() != count) fail("expected " + form);
    return v;
  }

 private:
  std::string key_;
  Entry e_;
};

inline DriftSchedule parse_drift(const Reader& r) {
  const auto [tag, body] = r.tagged();
  DriftSchedule d;
  if (tag == "none") {
    if (!body.empty()) r.fail("'none' takes no arguments");
  } else if (tag == "linear") {
    d.kind = DriftSchedule::Kind::linear;
    d.rate = r.args(body, 1, "linear:<rate>")[0];
  } else if (tag == "sin") {
    const auto a = r.args(body, 2, "sin:<amp>,<period>");
    if (!(a[1] > 0.0)) r.fail("sinusoid period must be positive");
    d.kind = DriftSchedule::Kind::sinusoidal;
    d.amplitude = a[0];
    d.period = a[1];
  } else if (tag == "jump") {
    const auto a = r.args(body, 2, "jump:<t>,<delta>");
    if (a[0] != std::floor(a[0]) || a[0] < 1) r.fail("jump time must be a positive integer");
    d.kind = DriftSchedule::Kind::jump;
    d.jump_time = static_cast<int>(a[0]);
    d.jump_delta = a[1];
  } else {
    r.fail("unknown drift '" + tag + "' (none | linear:<rate> | sin:<amp>,<period> | jump:<t>,<delta>)");
  }
  return d;
}

inline ProxFamily parse_g(const Reader& r) {
  const auto [tag, body] = r.tagged();
  if (tag == "zero") {
    if (!body.empty()) r.fail("'zero' takes no arguments");
    return {ProxFamily::Kind::zero, 0.0, 0.0, 0.0};
  }
  if (tag == "l1") {
    const double lambda = r.args(body, 1, "l1:<lambda>")[0];
    if (lambda < 0.0) r.fail("l1 weight must be nonnegative");
    return {ProxFamily::Kind::l1, lambda, 0.0, 0.0};
  }
  if (tag == "box") {
    const auto a = r.args(body, 2, "box:<lo>,<hi>");
    if (a[0] > a[1]) r.fail("box needs lo <= hi");
    return {ProxFamily::Kind::box, 0.0, a[0], a[1]};
  }
  r.fail("unknown nonsmooth term '" + tag + "' (zero | l1:<lambda> | box:<lo>,<hi>)");
}

}  // namespace detail

/// Parses the line-oriented `key = value` format; `overrides` are extra
/// `key=value` assignments applied on top of the document.
inline ScenarioSpec parse_scenario(const std::string& text, const std::vector<std::string>& overrides = {}) {
  using detail::Entry;
  using detail::Reader;
  std::map<std::string, Entry> entries;

  auto add = [&](std::string_view raw, int line, bool replace) {
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, std::string(detail::trim(raw)), "expected 'key = value'");
    const std::string key(detail::trim(raw.substr(0, eq)));
    const std::string value(detail::trim(raw.substr(eq + 1)));
    if (key.empty()) throw ParseError(line, key, "empty key");
    if (!replace && entries.count(key)) throw ParseError(line, key, "duplicate key");
    entries[key] = Entry{value, line};
  };

  std::istringstream in(text);
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (!s.empty()) add(s, line, false);
  }
  for (const auto& o : overrides) add(o, 0, true);

  auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, Entry>> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    auto out = std::make_pair(it->first, it->second);
    entries.erase(it);
    return out;
  };
  auto require = [&](const std::string& key) {
    auto e = take(key);
    if (!e) throw ParseError(0, key, "missing required key");
    return *e;
  };

  ScenarioSpec spec;
  {
    auto [k, e] = require("name");
    if (e.value.empty()) throw ParseError(e.line, k, "name must not be empty");
    spec.name = e.value;
  }
  for (auto [key, field] : {std::pair{"n", &spec.n}, {"N", &spec.N}, {"T", &spec.T}, {"K", &spec.K}}) {
    auto [k, e] = require(key);
    *field = Reader(k, e).positive();
  }
  if (auto e = take("seed")) {
    const long s = Reader(e->first, e->second).integer();
    if (s < 0) Reader(e->first, e->second).fail("seed must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(s);
  }
  const auto n = static_cast<std::size_t>(spec.n);
  const auto N = static_cast<std::size_t>(spec.N);

  if (auto e = take("x1"))
    spec.x1 = Reader(e->first, e->second).vector(n, "x1");
  else
    spec.x1 = Vector::Zero(spec.n);

  if (auto e = take("alphas")) {
    Reader r(e->first, e->second);
    const auto a = r.list();
    if (a.size() != N) r.fail("dimension mismatch: alphas needs N entries");
    double sum = 0.0;
    for (double w : a) {
      if (w < 0.0 || w > 1.0) r.fail("every weight must lie in [0, 1]");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) r.fail("weights must sum to 1");
    spec.alphas = a;
  } else {
    spec.alphas.assign(N, 1.0 / static_cast<double>(N));
  }

  spec.objectives.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    auto& obj = spec.objectives[i];
    const std::string prefix = "objective." + std::to_string(i + 1) + ".";
    {
      auto [k, e] = require(prefix + "quadratic.A");
      const auto a = Reader(k, e).vector(n * n, "A (row-major n x n)");
      obj.quadratic.A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          a.data(), spec.n, spec.n);
    }
    if (auto e = take(prefix + "quadratic.b"))
      obj.quadratic.b = Reader(e->first, e->second).vector(n, "b");
    else
      obj.quadratic.b = Vector::Zero(spec.n);
    if (auto e = take(prefix + "quadratic.c")) obj.quadratic.c = Reader(e->first, e->second).real();

    auto drift = take(prefix + "quadratic.drift");
    auto drift_alias = take(prefix + "drift");
    if (drift && drift_alias) throw ParseError(drift_alias->second.line, drift_alias->first, "drift given twice");
    if (!drift) drift = drift_alias;
    if (drift) obj.drift = detail::parse_drift(Reader(drift->first, drift->second));

    if (auto e = take(prefix + "g")) obj.g = detail::parse_g(Reader(e->first, e->second));
    if (auto e = take(prefix + "step")) {
      Reader r(e->first, e->second);
      const double c = r.real();
      if (!(c > 0.0)) r.fail("step size must be positive");
      obj.step = c;
    }
    try {
      (void)quadratic_term(obj.quadratic);
    } catch (const ContractError& err) {
      throw ParseError(0, prefix + "quadratic.A", err.what());
    }
  }

  if (!entries.empty()) {
    const auto& [k, e] = *entries.begin();
    if (k.rfind("objective.", 0) == 0) throw ParseError(e.line, k, "unknown key (objective index outside 1..N or unknown field)");
    throw ParseError(e.line, k, "unknown key");
  }
  return spec;
}

inline ScenarioSpec load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

/// Unit drift direction of each objective, reproducible from the seed.
inline std::vector<Vector> drift_directions(const ScenarioSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<Vector> dirs;
  for (int i = 0; i < spec.N; ++i) {
    Vector u(spec.n);
    for (int j = 0; j < spec.n; ++j) u[j] = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
    const double len = u.norm();
    if (len > 0.0)
      u /= len;
    else
      u = Vector::Unit(spec.n, 0);
    dirs.push_back(std::move(u));
  }
  return dirs;
}

/// phi_{i,t}(x) = f_i(x - delta_i(t) u_i) + g_i(x) for t = 1..T.
inline ObjectiveStream build_stream(const ScenarioSpec& spec) {
  const auto dirs = drift_directions(spec);
  auto families = std::make_shared<std::vector<QuadraticFamily>>();
  auto terms = std::make_shared<std::vector<ProxTerm>>();
  for (int i = 0; i < spec.N; ++i) {
    const auto& o = spec.objectives[static_cast<std::size_t>(i)];
    const Vector dir = dirs[static_cast<std::size_t>(i)];
    const DriftSchedule drift = o.drift;
    families->push_back(make_quadratic(
        o.quadratic, [dir, drift](int t, const QuadraticData& base) { return shift_quadratic(base, drift.offset(t) * dir); },
        spec.T));
    terms->push_back(make_prox_term(o.g));
  }
  return ObjectiveStream(spec.n, spec.N, spec.T, [families, terms](int t) {
    std::vector<CompositeObjective> objs;
    objs.reserve(families->size());
    for (std::size_t i = 0; i < families->size(); ++i) objs.push_back({(*families)[i].at(t), (*terms)[i]});
    return objs;
  });
}

/// Engine parameters; unset steps default to 1 / max_t L_{f_{i,t}}.
inline EngineConfig make_config(const ScenarioSpec& spec, const ObjectiveStream& stream) {
  EngineConfig cfg;
  cfg.alphas = spec.alphas;
  cfg.K = spec.K;
  cfg.T = spec.T;
  for (int i = 0; i < spec.N; ++i) {
    const auto& o = spec.objectives[static_cast<std::size_t>(i)];
    if (o.step) {
      cfg.steps.push_back(*o.step);
      continue;
    }
    double L = 0.0;
    for (int t = 1; t <= spec.T; ++t) L = std::max(L, stream.at(t)[static_cast<std::size_t>(i)].smooth.lipschitz);
    cfg.steps.push_back(L > 0.0 ? 1.0 / L : 1.0);
  }
  return cfg;
}

struct ExperimentOptions {
  bool record_inner = false;
  double tol = 1e-10;
};

struct ExperimentResult {
  ScenarioSpec spec;
  EngineConfig config;
  ObjectiveStream stream;
  Trajectory trajectory;
  OptimumTrace optima;
  RegretReport report;
  /// argmin sum_i alpha_i phi_{i,T}; empty when the nonsmooth terms do not combine.
  std::optional<Vector> scalarized;
};

inline ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentOptions& opts = {}) {
  ObjectiveStream stream = build_stream(spec);
  EngineConfig cfg = make_config(spec, stream);
  StreamingPathLengths streaming(stream);
  Trajectory traj = run_online(stream, spec.x1, cfg, streaming.observer(), opts.record_inner);
  OptimumTrace trace = compute_optimum_trace(stream, spec.T, opts.tol);
  RegretReport report = evaluate_run(stream, traj, trace, cfg, opts.tol);

  std::optional<Vector> scal;
  try {
    scal = solve_scalarized(stream.at(spec.T), spec.alphas, spec.x1, opts.tol);
  } catch (const UnsupportedScenario&) {
  }
  return {spec, std::move(cfg), std::move(stream), std::move(traj), std::move(trace), std::move(report), std::move(scal)};
}

/// Shortest round-trip decimal form; identical across runs.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_trace_csv(const ExperimentResult& r) {
  std::ostringstream os;
  os << "t,i,phi_t_xt,phi_t_opt,gap,reg_cum,v_t,w_t,sigma_t,sigma_surrogate\n";
  const auto& rep = r.report;
  const int N = r.stream.count();
  std::vector<double> cum(static_cast<std::size_t>(N), 0.0);
  for (int t = 1; t <= r.trajectory.horizon(); ++t) {
    const auto ti = static_cast<std::size_t>(t - 1);
    for (int i = 0; i < N; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double gap = rep.gaps[ii][ti];
      const double opt = r.optima.at(t, i).value;
      cum[ii] += gap;
      os << t << ',' << i + 1 << ',' << format_number(opt + gap) << ',' << format_number(opt) << ','
         << format_number(gap) << ',' << format_number(cum[ii]) << ',' << format_number(rep.paths.v[ti]) << ','
         << format_number(rep.paths.w[ti]) << ',' << format_number(rep.paths.sigma[ti]) << ','
         << (rep.paths.sigma_surrogate[ti][ii] ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

inline std::string format_bound_line(const BoundSummary& b) {
  std::ostringstream os;
  os << b.name;
  if (b.skipped) {
    os << " lhs=nan rhs=nan satisfied=skipped slack=nan";
  } else {
    os << " lhs=" << format_number(b.worst.lhs) << " rhs=" << format_number(b.worst.rhs)
       << " satisfied=" << (b.satisfied() ? "true" : "false") << " slack=" << format_number(b.worst.slack);
    if (b.surrogate) os << " basis=surrogate";
  }
  return os.str();
}

inline std::string format_summary(const ExperimentResult& r) {
  const auto& rep = r.report;
  std::ostringstream os;
  for (const auto& b : rep.bounds) os << format_bound_line(b) << '\n';
  os << "e=" << format_number(rep.drift.e.as_double()) << '\n';
  os << "alpha_min=" << format_number(rep.alpha_min) << '\n';
  os << "L=" << format_number(rep.L) << '\n';
  for (std::size_t i = 0; i < rep.dynamic_regret.size(); ++i) {
    os << "Reg_" << i + 1 << '=' << format_number(rep.dynamic_regret[i]) << '\n';
    os << "SReg_" << i + 1 << '=' << (rep.static_regret[i] ? format_number(*rep.static_regret[i]) : "unsupported") << '\n';
  }
  os << "x_scalarized=";
  if (r.scalarized) {
    for (Eigen::Index j = 0; j < r.scalarized->size(); ++j) os << (j ? "," : "") << format_number((*r.scalarized)[j]);
  } else {
    os << "unsupported";
  }
  os << '\n';
  return os.str();
}

/// Writes trace.csv and summary.txt into `dir` (created if missing).
inline void emit_report(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto write = [&](const char* file, const std::string& body) {
    const auto path = dir / file;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << body;
    out.flush();
    if (!out) throw std::ios_base::failure("write failed for " + path.string());
  };
  write("trace.csv", format_trace_csv(r));
  write("summary.txt", format_summary(r));
}

}  // namespace tvmoo

// delta_lab: command-line front end.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "delta_lab/arith.hpp"
#include "delta_lab/bulk_sums.hpp"
#include "delta_lab/delta.hpp"
#include "delta_lab/error.hpp"
#include "delta_lab/et_sets.hpp"
#include "delta_lab/fourier.hpp"
#include "delta_lab/kernels.hpp"
#include "delta_lab/moments.hpp"
#include "delta_lab/parallel.hpp"
#include "delta_lab/random_model.hpp"
#include "delta_lab/verify.hpp"
#include "table_writer.hpp"

#ifndef DELTA_LAB_VERSION
#define DELTA_LAB_VERSION "0.0.0"
#endif

using namespace delta_lab;
using cli::Cell;
using cli::Json;

namespace {

struct Common {
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
  std::string seed = "0x5EED";
};

// Accepts 1000, 1e6, 10^6.
std::uint64_t parse_count(const std::string& s, const char* what) {
  auto bad = [&] { return ConfigError(std::string("invalid ") + what + ": '" + s + "'"); };
  if (s.empty()) throw bad();
  if (auto caret = s.find('^'); caret != std::string::npos) {
    const std::uint64_t base = parse_count(s.substr(0, caret), what);
    const std::uint64_t exp = parse_count(s.substr(caret + 1), what);
    long double v = std::pow(static_cast<long double>(base), static_cast<long double>(exp));
    if (v > 1.8e19L) throw bad();
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) r *= base;
    return r;
  }
  if (s.find_first_not_of("0123456789") == std::string::npos) {
    try {
      return std::stoull(s);
    } catch (...) {
      throw bad();
    }
  }
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (*end != '\0' || !(v >= 0) || v > 1.8e19L || v != std::floor(v)) throw bad();
  return static_cast<std::uint64_t>(v);
}

double parse_real(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError(std::string("invalid ") + what + ": '" + s + "'");
  }
  return v;
}

std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(s, &pos, 0);
    if (pos != s.size()) throw ConfigError("invalid seed");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("invalid seed: '" + s + "'");
  }
}

Json base_meta(const std::string& command, const Common& c) {
  Json m;
  m["command"] = command;
  m["version"] = DELTA_LAB_VERSION;
  m["format"] = c.format;
  return m;
}

class Output {
 public:
  explicit Output(const Common& c) {
    if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
    format_ = c.format == "csv" ? cli::Format::csv : cli::Format::json;
    if (!c.out.empty()) {
      file_ = std::make_unique<std::ofstream>(c.out, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file '" + c.out + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  cli::Format format() const { return format_; }

 private:
  cli::Format format_ = cli::Format::csv;
  std::unique_ptr<std::ofstream> file_;
};

std::string factor_string(const arith::FactoredInteger& f) {
  std::string s;
  for (const auto& [p, a] : f.factors()) {
    if (!s.empty()) s += '*';
    s += std::to_string(p);
    if (a > 1) s += '^' + std::to_string(a);
  }
  return s.empty() ? "1" : s;
}

Cell integer_cell(const arith::FactoredInteger& f) {
  if (f.fits_u64()) return f.value();
  return f.big_value().get_str();
}

// ---- delta ---------------------------------------------------------------

struct DeltaArgs {
  std::string n, range;
  std::vector<double> v;
  bool breakpoints = false;
};

int cmd_delta(const DeltaArgs& a, const Common& c) {
  if (a.n.empty() == a.range.empty()) throw ConfigError("delta needs exactly one of --n or --range");
  for (double v : a.v) {
    if (!(v > 0)) throw ConfigError("--v must be positive");
  }
  Output out(c);
  Json meta = base_meta("delta", c);
  if (!a.n.empty()) meta["n"] = a.n;
  if (!a.range.empty()) meta["range"] = a.range;
  meta["v"] = a.v;

  if (a.breakpoints) {
    if (a.n.empty()) throw ConfigError("--breakpoints needs --n");
    const auto f = arith::factorize(parse_count(a.n, "--n"));
    const auto step = delta::delta_step_function(delta::delta_profile(f));
    cli::TableWriter w(out.stream(), out.format(), meta, {"u_start", "u_end", "value"});
    const auto& bp = step.breakpoints();
    for (std::size_t i = 0; i < step.values().size(); ++i) {
      w.row({static_cast<double>(bp[i]), static_cast<double>(bp[i + 1]), step.values()[i]});
    }
    return 0;
  }

  std::uint64_t lo, hi;
  if (!a.n.empty()) {
    lo = hi = parse_count(a.n, "--n");
  } else {
    const auto dots = a.range.find("..");
    if (dots == std::string::npos) throw ConfigError("--range must look like A..B");
    lo = parse_count(a.range.substr(0, dots), "--range");
    hi = parse_count(a.range.substr(dots + 2), "--range");
  }
  if (lo < 1 || hi < lo) throw ConfigError("need 1 <= n and a nonempty range");

  std::vector<std::string> cols{"n", "tau", "omega", "delta"};
  for (double v : a.v) cols.push_back("delta_v=" + cli::format_double(v));
  cli::TableWriter w(out.stream(), out.format(), meta, cols);
  std::unique_ptr<arith::SpfSieve> sieve;
  if (hi - lo > 1000 && hi <= 200'000'000) sieve = std::make_unique<arith::SpfSieve>(static_cast<std::uint32_t>(hi));
  for (std::uint64_t n = lo;; ++n) {
    const auto f = arith::factorize(n, sieve.get());
    const auto p = delta::delta_profile(f);
    std::vector<Cell> row{n, f.tau(), static_cast<std::uint64_t>(f.omega()), delta::delta_max(p)};
    for (double v : a.v) row.emplace_back(delta::delta_max(p, v));
    w.row(row);
    if (n == hi) break;
  }
  return 0;
}

// ---- sum -----------------------------------------------------------------

struct SumArgs {
  std::string x;
  std::string poly, weight;
  std::string chunk = std::to_string(bulk::kDefaultChunk);
  double time_budget = 0;
};

bulk::Weight parse_weight(const std::string& spec) {
  if (spec.find('=') == std::string::npos) return bulk::weight_from_name(spec);
  // Rules such as "2^*=0,*^2=0.5": prime^exponent=value, '*' matches anything.
  std::vector<bulk::WeightRule> rules;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    const auto caret = item.find('^');
    if (eq == std::string::npos || caret == std::string::npos || caret > eq) {
      throw ConfigError("weight rule must look like P^A=V: '" + item + "'");
    }
    const std::string p = item.substr(0, caret), e = item.substr(caret + 1, eq - caret - 1);
    bulk::WeightRule r;
    r.prime = p == "*" ? 0 : parse_count(p, "weight prime");
    r.exponent = e == "*" ? 0 : static_cast<int>(parse_count(e, "weight exponent"));
    r.value = parse_real(item.substr(eq + 1), "weight value");
    rules.push_back(r);
  }
  return bulk::weight_from_rules(std::move(rules), spec);
}

int cmd_sum(const SumArgs& a, const Common& c) {
  if (!a.poly.empty() && !a.weight.empty()) throw ConfigError("--poly and --weight are exclusive");
  bulk::SumJob job;
  job.x = parse_count(a.x, "--x");
  job.chunk = parse_count(a.chunk, "--chunk");
  job.threads = c.threads;
  job.time_budget = a.time_budget;
  std::string mode = "plain";
  if (!a.poly.empty()) {
    job.mode = bulk::SumMode::polynomial;
    job.poly = bulk::Polynomial::parse(a.poly);
    mode = "polynomial";
  } else if (!a.weight.empty()) {
    job.mode = bulk::SumMode::weighted;
    job.weight = parse_weight(a.weight);
    mode = "weighted";
  }
  Output out(c);
  const auto t = bulk::run(job);
  Json meta = base_meta("sum", c);
  meta["x"] = job.x;
  meta["mode"] = mode;
  if (!a.poly.empty()) meta["poly"] = job.poly.to_string();
  if (!a.weight.empty()) meta["weight"] = job.weight.name;
  meta["chunk"] = job.chunk;
  meta["truncated"] = t.truncated;
  meta["skipped_zero"] = t.skipped_zero;
  meta["failures"] = t.failures;
  meta["caveat"] = t.caveat;
  cli::TableWriter w(out.stream(), out.format(), meta,
                     {"x", "S", "S_over_x", "S_over_x_loglog_1", "S_over_x_loglog_1.5",
                      "S_over_x_loglog_2", "S_over_x_loglog_2.5", "status"});
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    Cell s = job.mode == bulk::SumMode::weighted ? Cell(static_cast<double>(r.sum))
                                                 : Cell(static_cast<std::uint64_t>(r.sum));
    const bool partial = t.truncated && i + 1 == t.rows.size();
    w.row({r.x, s, r.per_x, r.normalized[0], r.normalized[1], r.normalized[2], r.normalized[3],
           std::string(partial ? "truncated" : "ok")});
  }
  return 0;
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  std::string n_max = "5000";
  std::string samples = "500";
};

int cmd_verify(const VerifyArgs& a, const Common& c) {
  verify::Options o;
  o.n_max = parse_count(a.n_max, "--n-max");
  o.samples = parse_count(a.samples, "--samples");
  o.seed = parse_seed(c.seed);
  std::vector<std::string> suites;
  if (a.suite == "all") {
    suites = verify::suite_names();
  } else {
    suites.push_back(a.suite);
  }
  std::vector<verify::SuiteReport> reports;
  for (const auto& s : suites) reports.push_back(verify::run_suite(s, o));
  bool pass = true;
  for (const auto& r : reports) pass = pass && r.pass();

  Output out(c);
  Json meta = base_meta("verify", c);
  meta["suite"] = a.suite;
  meta["n_max"] = o.n_max;
  meta["samples"] = o.samples;
  meta["seed"] = o.seed;
  meta["pass"] = pass;
  cli::TableWriter w(out.stream(), out.format(), meta,
                     {"suite", "pass", "checked", "failures", "first_failure", "monitors"});
  for (const auto& r : reports) {
    Json mon = Json::object();
    for (const auto& [k, v] : r.monitors) mon[k] = cli::json_double(v);
    w.row({r.suite, r.pass(), r.checked, r.failures, r.first_failure, mon});
  }
  return pass ? 0 : 1;
}

// ---- sample / estimate ----------------------------------------------------

struct MeasureArgs {
  double y = 2;
  std::string x = "1e6";
  std::string count = "10000";
};

random_model::MeasureSpec measure(const MeasureArgs& a, const Common& c) {
  return {a.y, static_cast<double>(parse_count(a.x, "--x")), parse_seed(c.seed)};
}

int cmd_sample(const MeasureArgs& a, const Common& c) {
  const auto spec = measure(a, c);
  const random_model::Sampler s(spec);
  const std::uint64_t count = parse_count(a.count, "--count");
  if (count < 1) throw ConfigError("--count must be >= 1");
  Output out(c);
  Json meta = base_meta("sample", c);
  meta["y"] = cli::json_double(spec.y);
  meta["x"] = cli::json_double(spec.x);
  meta["count"] = count;
  meta["seed"] = spec.seed;
  cli::TableWriter w(out.stream(), out.format(), meta, {"index", "n", "omega", "factors"});
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto n = s.draw(i);
    w.row({i, integer_cell(n), static_cast<std::uint64_t>(n.omega()), factor_string(n)});
  }
  return 0;
}

struct EstimateArgs {
  MeasureArgs m;
  std::string stat = "one";
  double T = 3;
  double delta = 0.01;
};

random_model::Statistic statistic(const EstimateArgs& a) {
  const std::string& s = a.stat;
  if (s == "one") return [](const arith::FactoredInteger&) { return 1.0; };
  if (s == "omega") return [](const arith::FactoredInteger& n) { return static_cast<double>(n.omega()); };
  if (s == "tau") return [](const arith::FactoredInteger& n) { return static_cast<double>(n.tau()); };
  if (s == "delta") {
    return [](const arith::FactoredInteger& n) {
      return static_cast<double>(delta::delta_max(delta::delta_profile(n)));
    };
  }
  if (s == "m2") {
    return [](const arith::FactoredInteger& n) {
      return static_cast<double>(moments::moment(n, 2) / static_cast<long double>(n.tau()));
    };
  }
  if (s == "dy") {
    const double y = a.m.y;
    return [y](const arith::FactoredInteger& n) { return fourier::d_y(n, y).value; };
  }
  if (s == "et-complement") {
    et::EtParams p;
    p.T = a.T;
    p.delta = a.delta;
    p.validate();
    return [p](const arith::FactoredInteger& n) { return et::in_E_T(n, p).member ? 0.0 : 1.0; };
  }
  throw ConfigError("unknown statistic '" + s + "' (one, omega, tau, delta, m2, dy, et-complement)");
}

int cmd_estimate(const EstimateArgs& a, const Common& c) {
  const auto spec = measure(a.m, c);
  const std::uint64_t count = parse_count(a.m.count, "--count");
  const auto stat = statistic(a);
  const auto e = random_model::estimate_expectation(spec, stat, count, c.threads);
  Output out(c);
  Json meta = base_meta("estimate", c);
  meta["stat"] = a.stat;
  meta["y"] = cli::json_double(spec.y);
  meta["x"] = cli::json_double(spec.x);
  meta["count"] = count;
  meta["seed"] = spec.seed;
  if (a.stat == "et-complement") {
    meta["T"] = cli::json_double(a.T);
    meta["delta"] = cli::json_double(a.delta);
  }
  cli::TableWriter w(out.stream(), out.format(), meta,
                     {"stat", "mean", "stderr", "ci95_low", "ci95_high", "n_samples", "failures",
                      "valid", "ratio_loglog_x"});
  w.row({a.stat, e.mean, e.stderr_, e.ci95.first, e.ci95.second, e.n_samples, e.failures, e.valid,
         e.mean / std::log(std::log(spec.x))});
  return 0;
}

// ---- fiber / tail --------------------------------------------------------

int cmd_fiber(const MeasureArgs& a, const Common& c) {
  const double y = static_cast<double>(parse_count(a.x, "--x"));
  const std::uint64_t count = parse_count(a.count, "--count");
  const auto h = random_model::fiber_histogram(y, count, parse_seed(c.seed), c.threads);
  Output out(c);
  Json meta = base_meta("fiber", c);
  meta["y"] = cli::json_double(y);
  meta["h"] = cli::json_double(h.h);
  meta["count"] = count;
  meta["seed"] = parse_seed(c.seed);
  cli::TableWriter w(out.stream(), out.format(), meta, {"k", "probability", "stderr", "model", "ratio"});
  for (std::size_t k = 0; k < h.probability.size(); ++k) {
    w.row({static_cast<std::uint64_t>(k), h.probability[k], h.stderr_[k], h.model[k],
           h.probability[k] / h.model[k]});
  }
  return 0;
}

int cmd_tail(const MeasureArgs& a, const std::vector<double>& grid, const Common& c) {
  const double x = static_cast<double>(parse_count(a.x, "--x"));
  const std::uint64_t count = parse_count(a.count, "--count");
  const auto rows = random_model::tail_probability_m2(x, grid, count, parse_seed(c.seed), c.threads);
  Output out(c);
  Json meta = base_meta("tail", c);
  meta["x"] = cli::json_double(x);
  meta["count"] = count;
  meta["seed"] = parse_seed(c.seed);
  cli::TableWriter w(out.stream(), out.format(), meta,
                     {"T", "estimate", "stderr", "envelope_low", "envelope_high"});
  for (const auto& r : rows) {
    w.row({r.T, r.estimate.mean, r.estimate.stderr_, r.envelope_low, r.envelope_high});
  }
  return 0;
}

// ---- et ------------------------------------------------------------------

struct EtArgs {
  std::string n;
  double T = 3;
  double delta = 0.01;
  int q = 3;
  double c0 = 1;
};

int cmd_et(const EtArgs& a, const Common& c) {
  et::EtParams p;
  p.T = a.T;
  p.delta = a.delta;
  p.c0 = a.c0;
  p.validate();
  const auto f = arith::factorize(parse_count(a.n, "--n"));
  const auto r = et::membership_report(f, a.q, p);
  Output out(c);
  Json meta = base_meta("et", c);
  meta["n"] = f.value();
  meta["T"] = cli::json_double(p.T);
  meta["delta"] = cli::json_double(p.delta);
  meta["c0"] = cli::json_double(p.c0);
  meta["q"] = a.q;
  std::vector<std::string> cols{"n", "in_E", "in_ET", "in_ETstar"};
  for (int q = 0; q <= a.q; ++q) cols.push_back("in_EqT_" + std::to_string(q));
  cols.push_back("witness_y");
  cli::TableWriter w(out.stream(), out.format(), meta, cols);
  std::vector<Cell> row{f.value(), r.in_E, r.in_ET, r.in_ETstar};
  for (bool b : r.in_EqT) row.emplace_back(b);
  if (r.witness_y) {
    row.emplace_back(*r.witness_y);
  } else {
    row.emplace_back(std::string());
  }
  w.row(row);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and Monte Carlo computations with the divisor concentration function"};
  app.set_version_flag("--version", std::string(DELTA_LAB_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  if (const char* env = std::getenv("DELTA_LAB_THREADS")) {
    common.threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }
  app.add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", common.out, "Output file (default stdout)");
  app.add_option("--threads", common.threads, "Worker threads (default DELTA_LAB_THREADS or all cores)");
  app.add_option("--seed", common.seed, "Random seed");

  DeltaArgs da;
  auto* delta_cmd = app.add_subcommand("delta", "tau, omega, Delta and Delta_v for n or a range");
  delta_cmd->add_option("--n", da.n, "Single n");
  delta_cmd->add_option("--range", da.range, "Range A..B");
  delta_cmd->add_option("--v", da.v, "Extra window widths")->expected(1, -1);
  delta_cmd->add_flag("--breakpoints", da.breakpoints, "Dump the step function u -> Delta(n, u)");

  SumArgs sa;
  auto* sum_cmd = app.add_subcommand("sum", "Exact partial sums of Delta");
  sum_cmd->add_option("--x", sa.x, "Upper limit")->required();
  sum_cmd->add_option("--poly", sa.poly, "Sum Delta(|F(n)|) for an integer polynomial F");
  sum_cmd->add_option("--weight", sa.weight, "one, squarefree, zero, tau, or rules P^A=V,...");
  sum_cmd->add_option("--chunk", sa.chunk, "Segment length");
  sum_cmd->add_option("--time-budget", sa.time_budget, "Seconds before the table is truncated");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite; exit status 0 iff it passes");
  std::vector<std::string> suite_choices = verify::suite_names();
  suite_choices.push_back("all");
  verify_cmd->add_option("suite", va.suite, "Suite name")->required()->check(CLI::IsMember(suite_choices));
  verify_cmd->add_option("--n-max", va.n_max, "Largest n for exhaustive checks");
  verify_cmd->add_option("--samples", va.samples, "Random instances for sampled checks");

  MeasureArgs ma;
  auto* sample_cmd = app.add_subcommand("sample", "Draw integers from the random model");
  sample_cmd->add_option("--y", ma.y, "Lower prime bound");
  sample_cmd->add_option("--x", ma.x, "Upper prime bound");
  sample_cmd->add_option("--count", ma.count, "Number of samples");

  EstimateArgs ea;
  auto* estimate_cmd = app.add_subcommand("estimate", "Monte Carlo expectation of a statistic");
  estimate_cmd->add_option("--stat", ea.stat, "one, omega, tau, delta, m2, dy, et-complement");
  estimate_cmd->add_option("--y", ea.m.y, "Lower prime bound");
  estimate_cmd->add_option("--x", ea.m.x, "Upper prime bound");
  estimate_cmd->add_option("--count", ea.m.count, "Number of samples");
  estimate_cmd->add_option("--T", ea.T, "T for et-complement");
  estimate_cmd->add_option("--delta", ea.delta, "delta for et-complement");

  MeasureArgs fa;
  auto* fiber_cmd = app.add_subcommand("fiber", "Histogram of omega(n) under the model on [2, x)");
  fiber_cmd->add_option("--x", fa.x, "Upper prime bound y")->required();
  fiber_cmd->add_option("--count", fa.count, "Number of samples");

  MeasureArgs ta;
  std::vector<double> t_grid{3, 10, 30, 100};
  auto* tail_cmd = app.add_subcommand("tail", "Tail probabilities of M_2 / tau");
  tail_cmd->add_option("--x", ta.x, "Upper prime bound");
  tail_cmd->add_option("--count", ta.count, "Number of samples");
  tail_cmd->add_option("--T", t_grid, "Thresholds")->expected(1, -1);

  EtArgs eta;
  auto* et_cmd = app.add_subcommand("et", "Membership in the nested E-sets");
  et_cmd->add_option("--n", eta.n, "n")->required();
  et_cmd->add_option("--T", eta.T, "T >= 3");
  et_cmd->add_option("--delta", eta.delta, "Shaping constant");
  et_cmd->add_option("--q", eta.q, "Largest moment order")->check(CLI::Range(0, moments::kMaxMomentOrder));
  et_cmd->add_option("--c0", eta.c0, "Constant of the default theta sequence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*delta_cmd) return cmd_delta(da, common);
    if (*sum_cmd) return cmd_sum(sa, common);
    if (*verify_cmd) return cmd_verify(va, common);
    if (*sample_cmd) return cmd_sample(ma, common);
    if (*estimate_cmd) return cmd_estimate(ea, common);
    if (*fiber_cmd) return cmd_fiber(fa, common);
    if (*tail_cmd) return cmd_tail(ta, t_grid, common);
    if (*et_cmd) return cmd_et(eta, common);
  } catch (const ConfigError& e) {
    std::cerr << "delta_lab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "delta_lab: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

// waring: command-line front end.
//
//   waring bounds --k-range 3:20 --theorem 2
//   waring count --k 3 --s 2 --P 50,100,200
//   waring smooth --k 3 --P 1e4
//   waring arcs --k 3 --P 10
//   waring diff --k 4 --s 6
//   waring verify --quick --seed 7
//
// Every command writes one table (CSV by default, JSON with --format json)
// to stdout or --out. Options may also come from a `key = value` file given
// with --config. Exit codes: 0 ok, 1 computation error, 2 config error,
// 3 budget exceeded, 4 verification failed.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "waring/acceptance.hpp"
#include "waring/aux_count.hpp"
#include "waring/bound_engine.hpp"
#include "waring/differences.hpp"
#include "waring/expsum_arcs.hpp"
#include "waring/smooth_sets.hpp"

using json = nlohmann::ordered_json;
using namespace waring;

namespace {

enum Exit { kOk = 0, kCompute = 1, kConfig = 2, kBudget = 3, kVerify = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string command;
  std::optional<int> k;
  std::string k_range;
  int theorem = 0;  // 0: both
  std::vector<double> P;
  std::optional<double> theta;
  std::optional<int> s;
  std::optional<double> W;
  int levels = 0;
  std::int64_t q = 5;
  std::int64_t p_prime = 0;
  std::int64_t q_prime = 0;
  std::string set_file;
  std::string write_set_file;
  bool table = false;
  bool dump = false;
  bool timings = false;
  bool quick = false;
  double budget_ops = 1e9;
  double budget_grid = 4e9;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string format = "csv";
  std::string out;
  bool paper_faithful = false;
};

// A table with typed cells; CSV and JSON renderings are both deterministic.
struct Report {
  std::string title;
  json meta = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::vector<std::string> notes;

  void add(std::vector<json> row) { rows.push_back(std::move(row)); }
};

json num(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return v.convert_to<std::int64_t>();
  return v.str();
}

std::string cell(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

std::string render(const Report& r, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    json j;
    j["command"] = r.title;
    j["meta"] = r.meta;
    j["rows"] = json::array();
    for (const auto& row : r.rows) {
      json o = json::object();
      for (std::size_t i = 0; i < r.columns.size(); ++i) o[r.columns[i]] = row[i];
      j["rows"].push_back(o);
    }
    if (!r.notes.empty()) j["notes"] = r.notes;
    os << j.dump(2) << "\n";
    return os.str();
  }
  os << "# waring " << r.title;
  for (const auto& [key, v] : r.meta.items()) os << " " << key << "=" << cell(v);
  os << "\n";
  for (const auto& n : r.notes) os << "# " << n << "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
    os << "\n";
  }
  return os.str();
}

std::vector<int> k_values(const Config& c, int fallback) {
  if (!c.k_range.empty()) {
    const auto colon = c.k_range.find(':');
    if (colon == std::string::npos) throw ConfigError("k-range must look like a:b");
    int a = 0;
    int b = 0;
    try {
      std::size_t pa = 0;
      std::size_t pb = 0;
      a = std::stoi(c.k_range.substr(0, colon), &pa);
      b = std::stoi(c.k_range.substr(colon + 1), &pb);
      if (pa != colon || pb != c.k_range.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("k-range must look like a:b with integers");
    }
    if (a > b) throw ConfigError("k-range is empty");
    std::vector<int> ks;
    for (int k = a; k <= b; ++k) ks.push_back(k);
    return ks;
  }
  return {c.k.value_or(fallback)};
}

int single_k(const Config& c, int fallback) {
  const auto ks = k_values(c, fallback);
  if (ks.size() != 1) throw ConfigError("this command takes a single --k");
  return ks.front();
}

void validate(const Config& c) {
  if (!(c.budget_ops > 0)) throw ConfigError("budget-ops must be positive");
  if (!(c.budget_grid > 0)) throw ConfigError("budget-grid must be positive");
  if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
  if (c.theorem != 0 && c.theorem != 1 && c.theorem != 2) throw ConfigError("theorem must be 1 or 2");
  if (c.k && !c.k_range.empty()) throw ConfigError("give either --k or --k-range");
  for (double P : c.P)
    if (!(P >= 1)) throw ConfigError("P values must be >= 1");
  if (c.s && *c.s < 1) throw ConfigError("s must be positive");
  if (c.levels < 0) throw ConfigError("levels must be nonnegative");
  (void)k_values(c, 3);
}

aux::Budget aux_budget(const Config& c) {
  aux::Budget b;
  b.table_ops = c.budget_ops;
  b.brute_force = c.budget_ops;
  b.threads = c.threads;
  return b;
}

void flags_meta(Report& r, const Config& c) {
  r.meta["paper_faithful"] = c.paper_faithful ? 1 : 0;
  r.meta["seed"] = c.seed;
}

std::string elapsed(const Config& c, std::chrono::steady_clock::time_point t0) {
  if (!c.timings) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return buf;
}


Report cmd_bounds(const Config& c) {
  Report r;
  r.title = "bounds";
  flags_meta(r, c);
  const auto ks = k_values(c, 10);
  const auto variant = bounds::ThetaVariant::Truncated;
  r.meta["theta_variant"] = bounds::to_string(variant);

  if (c.table) {
    const int smax = c.s.value_or(40);
    if (smax < 2) throw ConfigError("s must be >= 2 for an exponent table");
    r.title = "bounds-table";
    r.columns = {"k", "s", "lambda_fixed", "lambda_coupled", "delta_coupled", "delta_bound", "theta_used", "provenance"};
    for (int k : ks) {
      const double theta = c.theta.value_or(1.0 / k);
      const auto fixed = bounds::lambda_iterate(k, smax, theta);
      const auto coupled = bounds::delta_iterate(k, smax, variant);
      for (int s = 2; s <= smax; ++s)
        r.add({k, s, fixed.lambda[s], coupled.lambda[s], coupled.delta[s], bounds::delta_bound(k, s),
               s == 2 ? json() : json(coupled.theta_used[s]), "bound_engine.lambda_iterate+delta_iterate"});
    }
    return r;
  }

  r.meta["delta_u_source"] = c.paper_faithful ? "exponential bound" : "sharpest of bound, iteration, scan";
  r.columns = {"k", "theorem", "selected", "bound", "v", "t", "u", "ceil_term", "scan_choice", "scan_bound",
               "bound_exact_delta", "continuous_optimum", "asymptote", "sigma_hat", "small_k", "provenance"};
  for (int k : ks) {
    for (auto th : {bounds::Theorem::T1, bounds::Theorem::T2}) {
      if (c.theorem == 1 && th != bounds::Theorem::T1) continue;
      if (c.theorem == 2 && th != bounds::Theorem::T2) continue;
      const auto g = bounds::gk_bound(k, th);
      long selected = g.bound;
      if (!c.paper_faithful) {
        selected = std::min(selected, g.scan_bound);
        if (th == bounds::Theorem::T2) selected = std::min(selected, g.bound_exact_delta);
      }
      const bool t1 = th == bounds::Theorem::T1;
      r.add({k, bounds::to_string(th), selected, g.bound, t1 ? json(g.v) : json(), t1 ? json(g.t) : json(), g.u,
             g.ceil_term, g.scan_choice, g.scan_bound, t1 ? json() : json(g.bound_exact_delta), g.continuous_optimum,
             g.asymptote, g.sigma.sigma_hat, g.small_k ? 1 : 0, "bound_engine.gk_bound"});
    }
    if (k < 10) r.notes.push_back("k=" + std::to_string(k) + ": k < 10, the estimates are asymptotic only");
  }
  return r;
}

aux::IntSet load_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open set file " + path);
  return aux::as_set(smooth::read_set(in).elements);
}

Report cmd_count(const Config& c) {
  Report r;
  r.title = "count";
  flags_meta(r, c);
  const int k = single_k(c, 3);
  const int s = c.s.value_or(2);
  const auto budget = aux_budget(c);

  std::vector<std::pair<double, aux::IntSet>> domains;
  if (!c.set_file.empty()) {
    const auto X = load_set(c.set_file);
    domains.emplace_back(X.empty() ? 0.0 : static_cast<double>(X.back()), X);
  } else {
    const auto Ps = c.P.empty() ? std::vector<double>{50, 100, 200} : c.P;
    for (double P : Ps) {
      aux::IntSet X;
      for (std::int64_t x = 1; x <= static_cast<std::int64_t>(std::floor(P)); ++x) X.push_back(x);
      domains.emplace_back(P, std::move(X));
    }
  }

  if (c.p_prime || c.q_prime) {
    r.title = "count-tpq";
    r.meta["p"] = c.p_prime;
    r.meta["q"] = c.q_prime;
    r.columns = {"k", "s", "P", "|E|", "T", "E_times_S_s_minus_1", "seconds", "provenance"};
    for (const auto& [P, X] : domains) {
      aux::IntSet E;
      for (auto x : X)
        if (c.p_prime == 0 || x % c.p_prime != 0) E.push_back(x);
      const auto t0 = std::chrono::steady_clock::now();
      const auto t = aux::t_pq_count(E, s, k, c.p_prime, c.q_prime, budget);
      const BigInt cmp = s > 1 ? BigInt(E.size()) * aux::s_count(E, s - 1, k, budget).S : BigInt(0);
      r.add({k, s, P, E.size(), num(t.S), num(cmp), elapsed(c, t0), "aux_count.t_pq_count"});
    }
    return r;
  }

  r.columns = {"k", "s", "P", "|X|", "S", "diag_lb", "seconds", "provenance"};
  std::vector<std::pair<double, BigInt>> runs;
  for (const auto& [P, X] : domains) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = aux::s_count(X, s, k, budget);
    r.add({k, s, P, X.size(), num(res.S), num(res.diagonal_lb), elapsed(c, t0), "aux_count.s_count"});
    runs.emplace_back(P, res.S);
  }
  if (runs.size() >= 3) {
    const auto fit = aux::exponent_fit(runs);
    r.meta["fit_slope"] = fit.slope;
    r.meta["fit_intercept"] = fit.intercept;
  }
  return r;
}

Report cmd_smooth(const Config& c) {
  Report r;
  r.title = "smooth";
  flags_meta(r, c);
  const int k = single_k(c, 3);
  const double P = c.P.empty() ? 1e4 : c.P.front();
  if (c.P.size() > 1) throw ConfigError("smooth takes a single --P");
  r.columns = {"level", "size", "window_lo", "window_hi", "window_primes", "max_element", "collisions",
               "residue_max_deviation", "provenance"};
  r.meta["k"] = k;
  r.meta["P"] = P;
  r.meta["q"] = c.q;

  std::vector<smooth::SmoothSet> sets;
  if (c.theta) {
    sets.push_back(smooth::build_single_levels(k, *c.theta, P, c.levels));
    r.meta["mode"] = sets.back().spec.describe();
    if (sets.back().spec.theta_at_limit) r.notes.push_back("theta = 1/k: limiting case of the construction");
  } else {
    // Schedule from the coupled iteration at s - 1.
    const int s = c.s.value_or(k + 1);
    if (s < 3) throw ConfigError("s must be >= 3 for the multi-level schedule");
    const auto table = bounds::delta_iterate(k, s - 1);
    smooth::SmoothSpec spec;
    spec.k = k;
    spec.mode = smooth::MultiMode{bounds::theta_schedule(k, table.delta[s - 1])};
    sets = smooth::build_multilevel(spec, P);
    r.meta["mode"] = spec.describe();
    r.meta["s"] = s;
  }
  for (auto it = sets.rbegin(); it != sets.rend(); ++it) {
    const auto& set = *it;
    const bool has_window = !set.windows.empty() && (!c.theta || set.level > 0);
    const auto prof = smooth::residue_profile(set, c.q);
    r.add({set.level, set.size(), has_window ? json(set.windows.back().lo) : json(),
           has_window ? json(set.windows.back().hi) : json(), has_window ? json(set.windows.back().Z()) : json(),
           set.elements.empty() ? json() : json(set.elements.back()), set.collision_count, prof.max_deviation,
           "smooth_sets.build"});
  }
  if (P >= 16) {
    const double est = smooth::size_estimate(k, P);
    r.meta["size_estimate"] = est;
    if (est > P) r.notes.push_back("size estimate exceeds P");
  }
  if (!c.write_set_file.empty()) {
    std::ofstream os(c.write_set_file);
    if (!os) throw ConfigError("cannot write " + c.write_set_file);
    smooth::write_set(os, c.theta ? sets.back() : sets.front());
  }
  return r;
}

Report cmd_arcs(const Config& c) {
  Report r;
  r.title = "arcs";
  flags_meta(r, c);
  const int k = single_k(c, 3);
  const double P = c.P.empty() ? 10 : c.P.front();
  const arcs::ArcDissection d(P, k, c.W);
  r.meta["k"] = k;
  r.meta["P"] = P;
  r.meta["W"] = d.W();
  r.meta["tau"] = d.tau();

  if (c.dump) {
    r.title = "arcs-dump";
    r.columns = {"family", "q", "a", "center", "halfwidth"};
    for (auto fam : {arcs::ArcFamily::M, arcs::ArcFamily::N})
      for (const auto& a : d.arcs(fam))
        r.add({fam == arcs::ArcFamily::M ? "M" : "N", a.q, a.a, a.center, a.halfwidth});
    return r;
  }

  const auto Pint = static_cast<std::int64_t>(std::floor(P));
  auto f = std::make_shared<const arcs::ExpSum>(arcs::ExpSum::full(Pint, k));
  arcs::GridBudget gb;
  gb.grid_ops = c.budget_grid;
  gb.threads = c.threads;
  r.columns = {"moment_id", "P", "k", "params", "region", "value", "err_est", "seconds", "provenance"};
  const int two_s = 2 * c.s.value_or(2);
  const std::string params = "|f|^" + std::to_string(two_s);
  auto m = arcs::MomentSpec::abs_power(f, two_s);
  auto t0 = std::chrono::steady_clock::now();
  const auto ex = arcs::exact_moment(m, gb);
  r.add({"full", P, k, params, "full", ex.value, 0.0, elapsed(c, t0), "expsum_arcs.exact_moment"});
  for (auto reg : {arcs::Region::Major, arcs::Region::Minor, arcs::Region::MajorN, arcs::Region::MinorN}) {
    m.region = reg;
    t0 = std::chrono::steady_clock::now();
    const auto a = arcs::arc_moment(m, d);
    r.add({"arc", P, k, params, arcs::to_string(reg), a.value, a.err_est, elapsed(c, t0), "expsum_arcs.arc_moment"});
  }
  auto lemma3 = arcs::MomentSpec::modulus_power(f, k + 2);
  lemma3.region = arcs::Region::Major;
  t0 = std::chrono::steady_clock::now();
  const auto l3 = arcs::arc_moment(lemma3, d);
  r.add({"major_over_P2", P, k, "|f|^" + std::to_string(k + 2) + "/P^2", "major", l3.value / (P * P),
         l3.err_est / (P * P), elapsed(c, t0), "expsum_arcs.arc_moment"});

  arcs::SamplingPolicy pol;
  pol.seed = c.seed;
  t0 = std::chrono::steady_clock::now();
  const auto w = arcs::weyl_ratio(Pint, k, pol);
  r.add({"weyl_ratio", P, k, "alpha=" + std::to_string(w.argmax_alpha), "minor", w.max_ratio, json(), elapsed(c, t0),
         "expsum_arcs.weyl_ratio"});

  if (Pint >= 4) {
    std::vector<double> Ws;
    for (double W = 1; W <= P; W *= 2) Ws.push_back(W);
    if (Ws.size() >= 2) {
      auto nm = arcs::MomentSpec::abs_power(f, two_s);
      nm.region = arcs::Region::MajorN;
      t0 = std::chrono::steady_clock::now();
      const double slope = arcs::measured_w_exponent(nm, P, k, Ws);
      r.add({"w_exponent", P, k, params, "major_N", slope, json(), elapsed(c, t0), "expsum_arcs.measured_w_exponent"});
    }
  }
  return r;
}

Report cmd_diff(const Config& c) {
  Report r;
  r.title = "diff";
  flags_meta(r, c);
  const int k = single_k(c, 4);
  const int s = c.s.value_or(k + 2);
  if (s < 3) throw ConfigError("s must be >= 3");
  r.columns = {"kind", "i", "h", "p", "value", "degree", "leading", "provenance"};
  std::vector<std::int64_t> h;
  std::vector<std::int64_t> p;
  for (int i = 0; i <= k; ++i) {
    const auto chain = diff::psi(k, h, p);
    std::string hs;
    std::string ps;
    for (std::size_t j = 0; j < h.size(); ++j) {
      hs += (j ? " " : "") + std::to_string(h[j]);
      ps += (j ? " " : "") + std::to_string(p[j]);
    }
    r.add({"psi", i, hs, ps, chain.result.to_string(), chain.result.degree(), num(chain.result.leading()),
           "differences.psi"});
    h.push_back(1);
    p.push_back(2);
  }

  const auto table = bounds::delta_iterate(k, s - 1);
  const auto sched = bounds::theta_schedule(k, table.delta[s - 1]);
  const double P = c.P.empty() ? 1e12 : c.P.front();
  const auto g = diff::geometry_from_schedule(sched, P);
  const auto counts = diff::model_counts(g, table.lambda[s - 1]);
  r.meta["k"] = k;
  r.meta["s"] = s;
  r.meta["P"] = P;
  r.meta["counts"] = "model";
  for (int i = 0; i < k; ++i) {
    const auto t = diff::lemma7_terms(i, s, counts, g);
    r.add({"balance", i, json(), json(), t.residual, json(), json(), "differences.lemma7_terms"});
  }
  for (int j = 1; j <= k; ++j)
    r.add({"theta", j, json(), json(), sched.theta(j), json(), json(), "bound_engine.theta_schedule"});
  return r;
}

int run(const Config& c, std::string& output) {
  validate(c);
  Report r;
  if (c.command == "bounds") {
    r = cmd_bounds(c);
  } else if (c.command == "count") {
    r = cmd_count(c);
  } else if (c.command == "smooth") {
    r = cmd_smooth(c);
  } else if (c.command == "arcs") {
    r = cmd_arcs(c);
  } else if (c.command == "diff") {
    r = cmd_diff(c);
  } else if (c.command == "verify") {
    acceptance::Options opt;
    opt.quick = c.quick;
    opt.seed = c.seed;
    opt.threads = c.threads;
    const auto results = acceptance::run_all(opt);
    if (c.format == "json") {
      json j;
      j["command"] = "verify";
      j["meta"] = {{"seed", c.seed}, {"quick", c.quick ? 1 : 0}};
      j["criteria"] = json::array();
      for (const auto& x : results)
        j["criteria"].push_back({{"id", x.id}, {"name", x.name}, {"pass", x.pass}, {"detail", x.detail}});
      output = j.dump(2) + "\n";
    } else {
      output = acceptance::render_report(results, opt);
    }
    for (const auto& x : results) std::cerr << x.id << " " << (x.pass ? "PASS" : "FAIL") << " " << x.seconds << "s\n";
    return acceptance::all_passed(results) ? kOk : kVerify;
  } else {
    throw ConfigError("no command given");
  }
  output = render(r, c.format);
  return kOk;
}

void error_record(const char* kind, const std::string& msg) {
  std::cerr << json{{"error", kind}, {"message", msg}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Bounds, counts and exponential-sum experiments for Waring's problem"};
  app.set_config("--config", "", "key = value file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  app.add_option("--k", c.k, "power k");
  app.add_option("--k-range", c.k_range, "inclusive range a:b");
  app.add_option("--theorem", c.theorem, "1 or 2 (default both)");
  app.add_option("--P", c.P, "size parameter(s)")->delimiter(',');
  app.add_option("--theta", c.theta, "single-mode theta, or fixed theta for tables");
  app.add_option("--s", c.s, "number of variables s");
  app.add_option("--W", c.W, "N-arc parameter (default sqrt P)");
  app.add_option("--levels", c.levels, "single-mode product layers");
  app.add_option("--q", c.q, "modulus for residue profiles");
  app.add_option("--p-prime", c.p_prime, "p for T_pq counts");
  app.add_option("--q-prime", c.q_prime, "q for T_pq counts");
  app.add_option("--set", c.set_file, "read the domain from a set file");
  app.add_option("--write-set", c.write_set_file, "write the constructed set");
  app.add_flag("--table", c.table, "bounds: exponent table instead of G(k)");
  app.add_flag("--dump", c.dump, "arcs: list the arcs");
  app.add_flag("--timings", c.timings, "fill the seconds column");
  app.add_flag("--quick", c.quick, "verify: quick mode");
  app.add_option("--budget-ops", c.budget_ops, "table/enumeration budget");
  app.add_option("--budget-grid", c.budget_grid, "grid evaluation budget");
  app.add_option("--seed", c.seed, "sampling seed");
  app.add_option("--threads", c.threads, "worker threads (0: all)");
  app.add_option("--format", c.format, "csv or json");
  app.add_option("--out", c.out, "output file (default stdout)");
  app.add_flag("--paper-faithful", c.paper_faithful, "literal readings of ambiguous choices");

  for (const char* name : {"bounds", "count", "smooth", "arcs", "diff", "verify"})
    app.add_subcommand(name)->fallthrough()->callback([&c, name] { c.command = name; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("config", e.what());
    return kConfig;
  }

  std::string output;
  int code = kOk;
  try {
    code = run(c, output);
  } catch (const ConfigError& e) {
    error_record("config", e.what());
    return kConfig;
  } catch (const DomainError& e) {
    error_record("config", e.what());
    return kConfig;
  } catch (const BudgetError& e) {
    error_record("budget", e.what());
    return kBudget;
  } catch (const std::exception& e) {
    error_record("compute", e.what());
    return kCompute;
  }

  if (c.out.empty()) {
    std::cout << output;
  } else {
    std::ofstream os(c.out, std::ios::binary);
    if (!os) {
      error_record("config", "cannot write " + c.out);
      return kConfig;
    }
    os << output;
  }
  return code;
}

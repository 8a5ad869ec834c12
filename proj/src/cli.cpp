#include "aflx/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aflx/code_sim.hpp"
#include "aflx/dmc.hpp"
#include "aflx/exponents.hpp"
#include "aflx/ht.hpp"
#include "aflx/ht_sim.hpp"
#include "aflx/verify.hpp"

namespace aflx {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Options can come from the command line or from a flat key=value config
// file; command-line values win. Keys equal the long option names.
class OptionSet {
 public:
  explicit OptionSet(CLI::App* cmd) : cmd_(cmd) {
    cmd_->add_option("--config", config_path_,
                     "key=value config file ('#' comments); flags override");
  }

  void add(const std::string& key, const std::string& help) {
    opts_[key] = cmd_->add_option("--" + key, storage_[key], help);
  }

  void add_flag(const std::string& key, const std::string& help) {
    flags_[key] = cmd_->add_flag("--" + key, help);
  }

  void add_hidden_flag(const std::string& key) {
    flags_[key] = cmd_->add_flag("--" + key)->group("");
  }

  // Read the config file (if any) after parsing so --config itself is known.
  void resolve() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw UsageError("cannot open config file: " + config_path_);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw UsageError("config line " + std::to_string(lineno) +
                         ": expected key = value");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (!opts_.count(key) && !flags_.count(key))
        throw UsageError("config: unknown key '" + key + "'");
      file_[key] = value;
    }
  }

  bool has(const std::string& key) const {
    auto it = opts_.find(key);
    if (it != opts_.end() && it->second->count() > 0) return true;
    return file_.count(key) > 0;
  }

  std::string get(const std::string& key, const std::string& fallback = "") const {
    auto it = opts_.find(key);
    if (it != opts_.end() && it->second->count() > 0) return storage_.at(key);
    auto f = file_.find(key);
    if (f != file_.end()) return f->second;
    return fallback;
  }

  bool flag(const std::string& key) const {
    auto it = flags_.find(key);
    if (it != flags_.end() && it->second->count() > 0) return true;
    auto f = file_.find(key);
    if (f != file_.end()) {
      const std::string& v = f->second;
      if (v == "1" || v == "true" || v == "yes") return true;
      if (v == "0" || v == "false" || v == "no") return false;
      throw UsageError("config: boolean expected for '" + key + "'");
    }
    return false;
  }

 private:
  CLI::App* cmd_;
  std::string config_path_;
  std::map<std::string, CLI::Option*> opts_;
  std::map<std::string, CLI::Option*> flags_;
  std::map<std::string, std::string> storage_;
  std::map<std::string, std::string> file_;
};

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path, std::ios::binary);
    if (!file) throw UsageError("cannot open output file: " + path);
    os = &file;
  }
};

// ---------------------------------------------------------------------------
// exponents: channel-coding error-exponent bounds on a rate grid
// ---------------------------------------------------------------------------

int cmd_exponents(const OptionSet& o) {
  if (!o.has("channel")) throw UsageError("exponents: --channel is required");
  Channel ch = parse_channel(o.get("channel"));
  const ErCache& cache = er_cache(ch);
  double cap = cache.capacity_bits();
  if (!(cap > 0)) throw UsageError("exponents: channel has zero capacity");

  std::vector<double> rates;
  if (o.has("rates")) {
    rates = parse_double_list(o.get("rates"), "rates");
  } else {
    for (int i = 1; i <= 128; ++i) rates.push_back(cap * i / 129.0);
  }
  std::vector<double> gammas;
  if (o.has("gammas")) gammas = parse_double_list(o.get("gammas"), "gammas");
  int k = parse_int(o.get("k", "2"), "k");
  if (k < 2) throw UsageError("exponents: k must be >= 2");

  for (double r : rates) {
    if (!(r > 0.0) || r > cap)
      throw UsageError("exponents: rates must lie in (0, capacity]");
    if (!gammas.empty() && r >= cap)
      throw UsageError(
          "exponents: rates must lie strictly below capacity when gammas are "
          "given");
  }
  for (double g : gammas)
    if (!(g >= 0.0)) throw UsageError("exponents: gammas must be >= 0");

  Output out(o.get("output", "-"));
  std::ostream& os = *out.os;
  os << "rate,bound,exponent,gamma,k\n";
  for (double r : rates)
    os << fmt_g(r) << ",random_coding," << fmt_g(random_coding_exponent(ch, r))
       << ",,\n";
  for (double r : rates)
    os << fmt_g(r) << ",sphere_packing,"
       << fmt_g(sphere_packing_exponent(ch, r)) << ",,\n";
  for (double r : rates)
    os << fmt_g(r) << ",burnashev," << fmt_g(burnashev_exponent(ch, r))
       << ",,\n";
  for (double g : gammas) {
    for (double r : rates) {
      AflfBound b = aflf_lower_bound(ch, r, g, k);
      if (!b.feasible)
        std::cerr << "note: empty feasible window at rate=" << fmt_g(r)
                  << " gamma=" << fmt_g(g)
                  << "; reporting the one-shot exponent\n";
      os << fmt_g(r) << ",aflf_lower," << fmt_g(b.value) << "," << fmt_g(g)
         << "," << k << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// ht-region: achievable error-exponent region boundaries
// ---------------------------------------------------------------------------

int cmd_ht_region(const OptionSet& o) {
  if (!o.has("pair")) throw UsageError("ht-region: --pair is required");
  HtPair pair = parse_pair(o.get("pair"));

  std::vector<double> gammas{0.0};
  if (o.has("gammas")) gammas = parse_double_list(o.get("gammas"), "gammas");
  double k = parse_double(o.get("k", "2"), "k");
  if (!(k >= 1.0)) throw UsageError("ht-region: k must be >= 1");
  int grid = parse_int(o.get("grid", "512"), "grid");
  if (grid < 8 || grid > 65536)
    throw UsageError("ht-region: grid must lie in [8, 65536]");
  for (double g : gammas)
    if (!(g >= 0.0)) throw UsageError("ht-region: gammas must be >= 0");

  Output out(o.get("output", "-"));
  std::ostream& os = *out.os;
  os << "e1,e2,region,gamma,k\n";
  ExponentRegion fl = fl_region_boundary(pair, grid);
  for (auto& pt : fl.boundary)
    os << fmt_g(pt.first) << "," << fmt_g(pt.second) << ",fl,,\n";
  ExponentRegion seq = seq_region(pair);
  for (auto& pt : seq.boundary)
    os << fmt_g(pt.first) << "," << fmt_g(pt.second) << ",seq,,\n";
  for (double g : gammas) {
    ExponentRegion afl = afl_region(pair, g, k, grid);
    for (auto& pt : afl.boundary)
      os << fmt_g(pt.first) << "," << fmt_g(pt.second) << ",afl," << fmt_g(g)
         << "," << fmt_g(k) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// ht-sim: two-phase sequential test, Monte Carlo plus exact binary oracle
// ---------------------------------------------------------------------------

struct SlopeInput {
  std::vector<std::pair<double, double>> linear;  // (n, probability)
  std::vector<std::pair<double, double>> logs;    // (n, exact log2 prob)
  bool use_log2 = false;

  std::optional<double> slope() const {
    try {
      ExponentFit fit =
          use_log2 ? empirical_exponent_log2(logs) : empirical_exponent(linear);
      return fit.slope;
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }
};

int cmd_ht_sim(const OptionSet& o) {
  if (!o.has("pair")) throw UsageError("ht-sim: --pair is required");
  HtPair pair = parse_pair(o.get("pair"));
  if (!o.has("n-list")) throw UsageError("ht-sim: --n-list is required");
  std::vector<int> n_list = parse_int_list(o.get("n-list"), "n-list");
  double gamma = parse_double(o.get("gamma", "0"), "gamma");
  int k = parse_int(o.get("k", "2"), "k");
  std::uint64_t trials = parse_u64(o.get("trials", "100000"), "trials");
  std::uint64_t seed = kDefaultSeed;
  if (o.has("seed")) seed = parse_u64(o.get("seed"), "seed");

  std::string lam_text = o.get("lambda", "chernoff");
  double lambda = (lam_text == "chernoff") ? chernoff_exponent(pair).lambda
                                           : parse_double(lam_text, "lambda");

  for (int n : n_list) {
    if (n < 1) throw UsageError("ht-sim: n values must be >= 1");
    if (static_cast<long long>(n) * k > 10000000)
      throw UsageError("ht-sim: n*k is too large");
  }

  const bool binary = pair.p1.size() == 2;
  if (trials == 0 && !binary)
    throw UsageError(
        "ht-sim: exact-only mode (trials = 0) needs binary alphabets");
  const bool with_agree = trials > 0 && binary;

  Output out(o.get("output", "-"));
  std::ostream& os = *out.os;
  os << "hypothesis,n,k,gamma,lambda,trials,err_count,err_freq,exact_err,"
        "p_continue,mean_tau,seed";
  if (with_agree) os << ",agree";
  os << "\n";

  SlopeInput err_in[2], cont_in[2];
  for (int n : n_list) {
    TwoPhaseTestConfig cfg(pair, n, k, gamma, lambda);
    std::optional<ExactResult> exact;
    if (binary) exact = exact_binary_oracle(cfg);

    if (trials > 0) {
      HtSimReport rep = monte_carlo_ht(cfg, trials, seed);
      for (int hyp = 1; hyp <= 2; ++hyp) {
        Hypothesis H = hyp == 1 ? Hypothesis::h1 : Hypothesis::h2;
        const HypothesisReport& h = rep.per(H);
        double ef = rep.err_freq(H);
        double cf = rep.continue_freq(H);
        double e_exact =
            exact ? (hyp == 1 ? exact->p1_err : exact->p2_err) : 0.0;
        os << hyp << "," << n << "," << k << "," << fmt_g(gamma) << ","
           << fmt_g(lambda) << "," << trials << "," << h.err_count << ","
           << fmt_sci(ef) << "," << (exact ? fmt_sci(e_exact) : std::string())
           << "," << fmt_sci(cf) << "," << fmt_g(rep.mean_tau(H)) << ","
           << seed;
        if (with_agree) {
          double r = wilson_radius(h.err_count, trials, 1.0);
          os << "," << (std::fabs(ef - e_exact) <= 3.0 * r ? 1 : 0);
        }
        os << "\n";
        if (exact) {
          err_in[hyp - 1].use_log2 = cont_in[hyp - 1].use_log2 = true;
          err_in[hyp - 1].logs.emplace_back(
              n, hyp == 1 ? exact->log2_p1_err : exact->log2_p2_err);
          cont_in[hyp - 1].logs.emplace_back(
              n, hyp == 1 ? exact->log2_p1_continue : exact->log2_p2_continue);
        } else {
          err_in[hyp - 1].linear.emplace_back(n, ef);
          cont_in[hyp - 1].linear.emplace_back(n, cf);
        }
      }
    } else {
      for (int hyp = 1; hyp <= 2; ++hyp) {
        double pe = hyp == 1 ? exact->p1_err : exact->p2_err;
        double pc = hyp == 1 ? exact->p1_continue : exact->p2_continue;
        double mean_tau = n + (k - 1.0) * n * pc;
        os << hyp << "," << n << "," << k << "," << fmt_g(gamma) << ","
           << fmt_g(lambda) << ",0,,," << fmt_sci(pe) << "," << fmt_sci(pc)
           << "," << fmt_g(mean_tau) << "," << seed << "\n";
        err_in[hyp - 1].use_log2 = cont_in[hyp - 1].use_log2 = true;
        err_in[hyp - 1].logs.emplace_back(
            n, hyp == 1 ? exact->log2_p1_err : exact->log2_p2_err);
        cont_in[hyp - 1].logs.emplace_back(
            n, hyp == 1 ? exact->log2_p1_continue : exact->log2_p2_continue);
      }
    }
  }

  // Trailing slope rows (empty n column): error-probability decay rate in
  // err_freq, continuation decay rate in p_continue. Omitted when fewer than
  // three usable points exist.
  if (n_list.size() >= 3) {
    for (int hyp = 1; hyp <= 2; ++hyp) {
      auto es = err_in[hyp - 1].slope();
      auto cs = cont_in[hyp - 1].slope();
      if (!es && !cs) continue;
      os << hyp << ",," << k << "," << fmt_g(gamma) << "," << fmt_g(lambda)
         << "," << (trials > 0 ? std::to_string(trials) : std::string("0"))
         << ",," << (es ? fmt_g(*es) : std::string()) << ",,"
         << (cs ? fmt_g(*cs) : std::string()) << ",," << seed;
      if (with_agree) os << ",";
      os << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// code-sim: two-phase almost-fixed-length code over a DMC
// ---------------------------------------------------------------------------

int cmd_code_sim(const OptionSet& o) {
  if (!o.has("channel")) throw UsageError("code-sim: --channel is required");
  Channel ch = parse_channel(o.get("channel"));
  if (!o.has("rate")) throw UsageError("code-sim: --rate is required");
  double rate = parse_double(o.get("rate"), "rate");
  double gamma = parse_double(o.get("gamma", "0"), "gamma");
  int k = parse_int(o.get("k", "2"), "k");
  if (!o.has("ell-list")) throw UsageError("code-sim: --ell-list is required");
  std::vector<int> ells = parse_int_list(o.get("ell-list"), "ell-list");
  std::uint64_t trials = parse_u64(o.get("trials", "10000"), "trials");
  std::uint64_t seed = kDefaultSeed;
  if (o.has("seed")) seed = parse_u64(o.get("seed"), "seed");
  bool baseline = o.flag("baseline");

  SelectedParams sel{1.0, 0.0, true};
  if (o.has("alpha") || o.has("lambda")) {
    sel.degenerate = false;
    sel.alpha = o.has("alpha") ? parse_double(o.get("alpha"), "alpha")
                               : select_parameters(ch, rate, gamma).alpha;
    sel.lambda = o.has("lambda") ? parse_double(o.get("lambda"), "lambda")
                                 : 0.0;
  } else {
    sel = select_parameters(ch, rate, gamma);
    if (sel.degenerate)
      std::cerr << "note: selected parameters degenerate to a fixed-length "
                   "code (alpha = 1)\n";
  }
  if (!(sel.alpha > 0.0 && sel.alpha <= 1.0))
    throw UsageError("code-sim: alpha must lie in (0, 1]");
  if (!(sel.lambda >= 0.0 && sel.lambda <= 1.0))
    throw UsageError("code-sim: lambda must lie in [0, 1]");

  Distribution q = Distribution::uniform(ch.nx());

  Output out(o.get("output", "-"));
  std::ostream& os = *out.os;
  os << "ell,rate,alpha,lambda,gamma,k,trials,err_freq,retransmit_freq,"
        "mean_tau,seed\n";

  std::vector<std::pair<double, double>> errs, retxs;
  for (int ell : ells) {
    CodeConfig cfg(ch, rate, ell, sel.alpha, sel.lambda, gamma, k, q, seed);
    CodeSimReport rep = monte_carlo_code(cfg, trials);
    os << ell << "," << fmt_g(rate) << "," << fmt_g(sel.alpha) << ","
       << fmt_g(sel.lambda) << "," << fmt_g(gamma) << "," << k << "," << trials
       << "," << fmt_sci(rep.error_freq()) << ","
       << fmt_sci(rep.retransmit_freq()) << "," << fmt_g(rep.mean_tau()) << ","
       << seed << "\n";
    errs.emplace_back(ell, rep.error_freq());
    retxs.emplace_back(ell, rep.retransmit_freq());
  }

  std::vector<std::pair<double, double>> berrs;
  if (baseline) {
    for (int ell : ells) {
      CodeSimReport rep = run_flf_baseline(ch, rate, ell, q, trials, seed);
      os << ell << "," << fmt_g(rate) << ",1,,,1," << trials << ","
         << fmt_sci(rep.error_freq()) << "," << fmt_sci(rep.retransmit_freq())
         << "," << fmt_g(rep.mean_tau()) << "," << seed << "\n";
      berrs.emplace_back(ell, rep.error_freq());
    }
  }

  // Trailing slope rows (empty ell column): error decay rate in err_freq,
  // retransmit decay rate in retransmit_freq.
  auto fit_or_empty =
      [](const std::vector<std::pair<double, double>>& pts) -> std::string {
    if (pts.size() < 3) return "";
    try {
      return fmt_g(empirical_exponent(pts).slope);
    } catch (const std::invalid_argument&) {
      return "";
    }
  };
  if (ells.size() >= 3) {
    std::string es = fit_or_empty(errs);
    std::string rs = fit_or_empty(retxs);
    if (!es.empty() || !rs.empty())
      os << "," << fmt_g(rate) << "," << fmt_g(sel.alpha) << ","
         << fmt_g(sel.lambda) << "," << fmt_g(gamma) << "," << k << ","
         << trials << "," << es << "," << rs << ",," << seed << "\n";
    if (baseline) {
      std::string bs = fit_or_empty(berrs);
      if (!bs.empty())
        os << "," << fmt_g(rate) << ",1,,,1," << trials << "," << bs << ",,,"
           << seed << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify: release checks
// ---------------------------------------------------------------------------

int cmd_verify(const OptionSet& o) {
  bool quick = o.flag("quick");
  bool inject = o.flag("inject-failure");
  std::vector<CheckResult> results;
  if (quick) {
    results = invariant_checks();
  } else {
    results = acceptance_checks();
    std::vector<CheckResult> inv = invariant_checks();
    results.insert(results.end(), inv.begin(), inv.end());
  }
  if (inject)
    results.push_back(
        {"injected failure probe", false, "requested via --inject-failure"});
  int fails = 0;
  for (const CheckResult& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) std::cout << " | " << r.detail;
    std::cout << "\n";
    if (!r.pass) ++fails;
  }
  std::cout << results.size() << " checks, " << fails << " failed\n";
  return fails > 0 ? 2 : 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// parsers and formatting
// ---------------------------------------------------------------------------

double parse_double(const std::string& text, const std::string& what) {
  std::string t = trim(text);
  if (t.empty()) throw UsageError(what + ": empty number");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw UsageError(what + ": invalid number '" + t + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  std::string t = trim(text);
  if (t.empty()) throw UsageError(what + ": empty integer");
  char* end = nullptr;
  long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw UsageError(what + ": invalid integer '" + t + "'");
  if (v < -1000000000L || v > 1000000000L)
    throw UsageError(what + ": integer out of range");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::string t = trim(text);
  if (t.empty() || t[0] == '-')
    throw UsageError(what + ": nonnegative integer required");
  char* end = nullptr;
  unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw UsageError(what + ": invalid integer '" + t + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::string t = trim(text);
  if (t.rfind("lin:", 0) == 0) {
    std::vector<std::string> parts = split(t.substr(4), ':');
    if (parts.size() != 3)
      throw UsageError(what + ": expected lin:<lo>:<hi>:<count>");
    double lo = parse_double(parts[0], what);
    double hi = parse_double(parts[1], what);
    int count = parse_int(parts[2], what);
    if (count < 1 || count > 1000000)
      throw UsageError(what + ": count must lie in [1, 1000000]");
    std::vector<double> out;
    if (count == 1) {
      out.push_back(lo);
    } else {
      for (int i = 0; i < count; ++i)
        out.push_back(lo + (hi - lo) * i / (count - 1.0));
    }
    return out;
  }
  std::vector<double> out;
  for (const std::string& tok : split(t, ','))
    out.push_back(parse_double(tok, what));
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& what) {
  std::vector<int> out;
  for (const std::string& tok : split(trim(text), ','))
    out.push_back(parse_int(tok, what));
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

Channel parse_channel(const std::string& text) {
  std::string t = trim(text);
  auto colon = t.find(':');
  if (colon == std::string::npos)
    throw UsageError("channel: expected bsc:<p>, bec:<e> or matrix:<rows>");
  std::string kind = t.substr(0, colon);
  std::string rest = t.substr(colon + 1);
  try {
    if (kind == "bsc") return Channel::bsc(parse_double(rest, "channel"));
    if (kind == "bec") return Channel::bec(parse_double(rest, "channel"));
    if (kind == "matrix") {
      std::vector<std::vector<double>> rows;
      for (const std::string& row_text : split(rest, ';')) {
        std::vector<double> row;
        for (const std::string& tok : split(row_text, ','))
          row.push_back(parse_double(tok, "channel"));
        rows.push_back(row);
      }
      return Channel(rows);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("channel: ") + e.what());
  }
  throw UsageError("channel: unknown kind '" + kind + "'");
}

HtPair parse_pair(const std::string& text) {
  std::string t = trim(text);
  auto colon = t.find(':');
  if (colon == std::string::npos)
    throw UsageError("pair: expected ber:<p1>,<p2> or vecs:<p>;<q>");
  std::string kind = t.substr(0, colon);
  std::string rest = t.substr(colon + 1);
  try {
    if (kind == "ber") {
      std::vector<double> ps = parse_double_list(rest, "pair");
      if (ps.size() != 2) throw UsageError("pair: ber needs two parameters");
      return HtPair(Distribution::bernoulli(ps[0]),
                    Distribution::bernoulli(ps[1]));
    }
    if (kind == "vecs") {
      std::vector<std::string> halves = split(rest, ';');
      if (halves.size() != 2)
        throw UsageError("pair: vecs needs two ';'-separated vectors");
      return HtPair(Distribution(parse_double_list(halves[0], "pair")),
                    Distribution(parse_double_list(halves[1], "pair")));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("pair: ") + e.what());
  }
  throw UsageError("pair: unknown kind '" + kind + "'");
}

std::string fmt_sci(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

std::string fmt_g(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// entry points
// ---------------------------------------------------------------------------

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"almost-fixed-length coding and testing toolkit"};
  app.require_subcommand(1);

  CLI::App* c_exp = app.add_subcommand(
      "exponents", "error-exponent bounds over a rate grid (CSV)");
  OptionSet o_exp(c_exp);
  o_exp.add("channel", "bsc:<p> | bec:<e> | matrix:<r00>,<r01>;<r10>,...");
  o_exp.add("rates", "comma list or lin:<lo>:<hi>:<count>; default: 128-point grid");
  o_exp.add("gammas", "continuation budgets for the two-phase lower bound");
  o_exp.add("k", "blocklength stretch factor (int >= 2, default 2)");
  o_exp.add("output", "output path, '-' for stdout");

  CLI::App* c_reg = app.add_subcommand(
      "ht-region", "testing error-exponent region boundaries (CSV)");
  OptionSet o_reg(c_reg);
  o_reg.add("pair", "ber:<p1>,<p2> | vecs:<p0>,<p1>,...;<q0>,...");
  o_reg.add("gammas", "continuation budgets (default 0)");
  o_reg.add("k", "stretch factor (real >= 1, default 2)");
  o_reg.add("grid", "boundary sample count (default 512)");
  o_reg.add("output", "output path, '-' for stdout");

  CLI::App* c_hts = app.add_subcommand(
      "ht-sim", "two-phase sequential test simulation (CSV)");
  OptionSet o_hts(c_hts);
  o_hts.add("pair", "ber:<p1>,<p2> | vecs:<p0>,...;<q0>,...");
  o_hts.add("n-list", "comma list of first-phase sample sizes");
  o_hts.add("gamma", "continuation budget (default 0)");
  o_hts.add("k", "stretch factor (int >= 2, default 2)");
  o_hts.add("lambda", "tilt in [0,1] or 'chernoff' (default)");
  o_hts.add("trials", "Monte Carlo trials per hypothesis; 0 = exact only");
  o_hts.add("seed", "base RNG seed (default 123456789)");
  o_hts.add("output", "output path, '-' for stdout");

  CLI::App* c_cs = app.add_subcommand(
      "code-sim", "two-phase almost-fixed-length code simulation (CSV)");
  OptionSet o_cs(c_cs);
  o_cs.add("channel", "bsc:<p> | bec:<e> | matrix:...");
  o_cs.add("rate", "message rate in bits per channel use");
  o_cs.add("gamma", "continuation budget (default 0)");
  o_cs.add("k", "blocklength stretch factor (int >= 2, default 2)");
  o_cs.add("ell-list", "comma list of nominal blocklengths (2..128)");
  o_cs.add("alpha", "first-phase fraction override in (0, 1]");
  o_cs.add("lambda", "verification tilt override in [0, 1]");
  o_cs.add("trials", "Monte Carlo trials (default 10000)");
  o_cs.add("seed", "base RNG seed (default 123456789)");
  o_cs.add_flag("baseline", "also run the fixed-length baseline code");
  o_cs.add("output", "output path, '-' for stdout");

  CLI::App* c_ver = app.add_subcommand("verify", "run the release checks");
  OptionSet o_ver(c_ver);
  o_ver.add_flag("quick", "run only the fast invariant sweeps");
  o_ver.add_hidden_flag("inject-failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (c_exp->parsed()) {
      o_exp.resolve();
      return cmd_exponents(o_exp);
    }
    if (c_reg->parsed()) {
      o_reg.resolve();
      return cmd_ht_region(o_reg);
    }
    if (c_hts->parsed()) {
      o_hts.resolve();
      return cmd_ht_sim(o_hts);
    }
    if (c_cs->parsed()) {
      o_cs.resolve();
      return cmd_code_sim(o_cs);
    }
    if (c_ver->parsed()) {
      o_ver.resolve();
      return cmd_verify(o_ver);
    }
    throw UsageError("no subcommand given");
  } catch (const UnsupportedChannelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("aflx");
  for (const std::string& a : args) argv_store.push_back(a);
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace aflx

// sparsegauss: error coefficients, reference tables, convergence studies,
// exact sigma oracles and sparse-grid inspection.
//
// Exit codes: 0 ok, 2 usage, 3 precision policy, 4 oracle disagreement.

#include "sparsegauss/sparsegauss.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace sparsegauss;
using nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitPrecision = 3;
constexpr int kExitOracle = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Options

struct Common {
  std::string output;
  std::string config;
};

struct CoeffArgs {
  long dim = 0;
  long level = 0;
  std::vector<std::int64_t> k;
  std::string format = "json";
  std::string rounding = "nearest";
  std::optional<unsigned long> bits;
  bool force = false;
};

struct TableArgs {
  std::string preset;
  long dim = 0;
  std::vector<std::string> k;
  std::vector<long> n_list;
  std::string format = "paper";
  std::string rounding = "nearest";
  std::optional<unsigned long> bits;
  bool force = false;
};

struct ConvergeArgs {
  std::string mode = "full";
  std::string family = "product_cosine";
  std::string function_file;
  long dim = 2;
  std::string n_range = "4:10";
  double beta = 4.0;
  std::int64_t max_frequency = 8;
  std::uint64_t seed = 1;
  std::vector<std::int64_t> k0;
  unsigned resolution = 0;
  std::optional<unsigned long> bits;
};

struct SigmaArgs {
  long dim = 0;
  long power = -1;
  long sum = 0;
  std::vector<std::int64_t> k;
  std::string check = "default";
  bool decimal = false;
  std::string format = "text";
};

struct GridArgs {
  long dim = 0;
  long level = 0;
  bool stats = false;
  bool list = false;
  std::string format = "csv";
};

DecimalRounding parse_rounding(const std::string &s) {
  if (s == "nearest")
    return DecimalRounding::nearest_even;
  if (s == "down")
    return DecimalRounding::toward_zero;
  if (s == "up")
    return DecimalRounding::away_from_zero;
  throw UsageError("unknown rounding '" + s + "' (nearest, down, up)");
}

WaveVector wave(const std::vector<std::int64_t> &k, long dim, const char *what) {
  if (k.empty())
    throw UsageError(std::string(what) + " is required");
  if (static_cast<long>(k.size()) != dim)
    throw UsageError(std::string(what) + " must have " + std::to_string(dim) +
                     " components");
  return WaveVector(k);
}

WaveVector parse_wave(const std::string &text, long dim) {
  std::vector<std::int64_t> c;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      c.push_back(std::stoll(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw UsageError("bad wave vector '" + text + "'");
    }
  }
  return wave(c, dim, "--k");
}

/// Precision for an error-coefficient run: flag/config, else SPARSEGAUSS_BITS,
/// else the default rule.
unsigned long resolve_bits(const std::optional<unsigned long> &flag, long n, long d) {
  if (flag)
    return *flag;
  if (const char *env = std::getenv("SPARSEGAUSS_BITS"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(env, &used);
      if (used != std::strlen(env))
        throw std::invalid_argument(env);
      return v;
    } catch (const std::exception &) {
      throw UsageError(std::string("SPARSEGAUSS_BITS is not a number: '") + env + "'");
    }
  }
  return default_bits(static_cast<unsigned long>(n), static_cast<unsigned long>(d));
}

PrecisionContext context_for(unsigned long bits) {
  if (bits < PrecisionContext::min_bits)
    throw UsageError("precision must be at least " +
                     std::to_string(PrecisionContext::min_bits) + " bits");
  return PrecisionContext(bits);
}

std::string decimal(const BigReal &x, int digits = 30) {
  char *raw = nullptr;
  mpfr_asprintf(&raw, "%.*Rg", digits, x.get());
  std::string s(raw);
  mpfr_free_str(raw);
  return s;
}

ordered_json k_json(const WaveVector &k) {
  ordered_json a = ordered_json::array();
  for (auto v : k.components())
    a.push_back(v);
  return a;
}

std::string k_text(const WaveVector &k, char sep) {
  std::string s;
  for (std::size_t i = 0; i < k.dimension(); ++i)
    s += (i ? std::string(1, sep) : "") + std::to_string(k[i]);
  return s;
}

ordered_json result_json(const ErrorCoefficientResult &r, DecimalRounding mode) {
  ordered_json j;
  j["n"] = r.n;
  j["d"] = r.d;
  j["k"] = k_json(r.k);
  j["value"] = format_paper_sci(r.value, mode);
  j["asymptotic"] = format_paper_sci(r.asymptotic, mode);
  if (r.ratio)
    j["ratio"] = r.ratio->to_double();
  else
    j["ratio"] = nullptr;
  j["bits"] = r.bits;
  j["reliable"] = r.reliable;
  return j;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_coeff(const CoeffArgs &a, std::ostream &out) {
  if (a.dim < 2)
    throw UsageError("--dim must be >= 2");
  if (a.level < 1)
    throw UsageError("-n must be >= 1");
  const WaveVector k = wave(a.k, a.dim, "--k");
  const DecimalRounding mode = parse_rounding(a.rounding);
  const auto ctx = context_for(resolve_bits(a.bits, a.level, a.dim));
  const auto r = sparse_error_coeff(a.level, static_cast<std::size_t>(a.dim), k, ctx, a.force);
  if (a.format == "json") {
    out << result_json(r, mode).dump() << "\n";
  } else if (a.format == "csv") {
    out << "n,d,k,value,asymptotic,ratio,bits,reliable\n";
    out << r.n << "," << r.d << "," << k_text(k, ';') << "," << format_paper_sci(r.value, mode)
        << "," << format_paper_sci(r.asymptotic, mode) << ","
        << (r.ratio ? decimal(*r.ratio, 17) : "") << "," << r.bits << ","
        << (r.reliable ? "true" : "false") << "\n";
  } else if (a.format == "paper") {
    out << format_paper_sci(r.value, mode) << "  " << format_paper_sci(r.asymptotic, mode)
        << "\n";
  } else {
    throw UsageError("unknown --format '" + a.format + "' (json, csv, paper)");
  }
}

void cmd_table(const TableArgs &a, std::ostream &out) {
  const TablePreset *preset = nullptr;
  std::size_t d = 0;
  std::vector<WaveVector> ks;
  std::vector<long> ns;
  if (!a.preset.empty()) {
    preset = find_preset(a.preset);
    if (!preset)
      throw UsageError("unknown preset '" + a.preset + "' (table1, table2)");
    if (!a.k.empty() || !a.n_list.empty() || a.dim != 0)
      throw UsageError("--preset excludes --dim, --k and --n-list");
    d = preset->d;
    ks = preset->k_list;
    ns = preset->n_list;
  } else {
    if (a.dim < 2)
      throw UsageError("--dim (>= 2) or --preset is required");
    if (a.k.empty() || a.n_list.empty())
      throw UsageError("--k and --n-list are required without --preset");
    d = static_cast<std::size_t>(a.dim);
    for (const auto &text : a.k)
      ks.push_back(parse_wave(text, a.dim));
    ns = a.n_list;
    for (long n : ns)
      if (n < 1)
        throw UsageError("--n-list entries must be >= 1");
  }
  const DecimalRounding mode = parse_rounding(a.rounding);

  std::vector<ErrorCoefficientResult> cells;
  for (long n : ns)
    for (const auto &k : ks) {
      const auto ctx =
          context_for(resolve_bits(a.bits, n, static_cast<long>(d)));
      cells.push_back(sparse_error_coeff(n, d, k, ctx, a.force));
    }

  auto printed = [&](std::size_t row, std::size_t col, std::size_t which) -> std::string {
    return preset ? preset->printed[row][col][which] : std::string();
  };

  if (a.format == "json") {
    ordered_json j;
    j["d"] = d;
    if (preset)
      j["preset"] = preset->name;
    j["cells"] = ordered_json::array();
    for (std::size_t row = 0; row < ns.size(); ++row)
      for (std::size_t col = 0; col < ks.size(); ++col) {
        const auto &r = cells[row * ks.size() + col];
        ordered_json c = result_json(r, mode);
        if (preset) {
          c["printed_value"] = printed(row, col, 0);
          c["printed_asymptotic"] = printed(row, col, 1);
          c["value_match"] = to_string(match_printed(r.value, printed(row, col, 0)));
          c["asymptotic_match"] = to_string(match_printed(r.asymptotic, printed(row, col, 1)));
        }
        j["cells"].push_back(std::move(c));
      }
    out << j.dump() << "\n";
  } else if (a.format == "csv") {
    out << "n,k,value,asymptotic,ratio,bits";
    if (preset)
      out << ",printed_value,printed_asymptotic,value_match,asymptotic_match";
    out << "\n";
    for (std::size_t row = 0; row < ns.size(); ++row)
      for (std::size_t col = 0; col < ks.size(); ++col) {
        const auto &r = cells[row * ks.size() + col];
        out << r.n << "," << k_text(r.k, ';') << "," << format_paper_sci(r.value, mode) << ","
            << format_paper_sci(r.asymptotic, mode) << ","
            << (r.ratio ? decimal(*r.ratio, 17) : "") << "," << r.bits;
        if (preset)
          out << "," << printed(row, col, 0) << "," << printed(row, col, 1) << ","
              << to_string(match_printed(r.value, printed(row, col, 0))) << ","
              << to_string(match_printed(r.asymptotic, printed(row, col, 1)));
        out << "\n";
      }
  } else if (a.format == "paper") {
    // Header: one block of (computed, formula) per k.
    std::ostringstream head;
    head << std::left << std::setw(6) << "n";
    for (const auto &k : ks)
      head << " | " << std::setw(27) << ("k=(" + k_text(k, ',') + ")");
    out << head.str() << "\n";
    for (std::size_t row = 0; row < ns.size(); ++row) {
      std::ostringstream line;
      line << std::left << std::setw(6) << ns[row];
      for (std::size_t col = 0; col < ks.size(); ++col) {
        const auto &r = cells[row * ks.size() + col];
        line << " | " << std::setw(13) << format_paper_sci(r.value, mode) << " "
             << std::setw(13) << format_paper_sci(r.asymptotic, mode);
      }
      out << line.str() << "\n";
    }
  } else {
    throw UsageError("unknown --format '" + a.format + "' (json, csv, paper)");
  }
}

std::pair<int, int> parse_range(const std::string &text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos)
      throw std::invalid_argument(text);
    std::size_t u1 = 0, u2 = 0;
    const std::string lo_s = text.substr(0, colon), hi_s = text.substr(colon + 1);
    const int lo = std::stoi(lo_s, &u1);
    const int hi = std::stoi(hi_s, &u2);
    if (u1 != lo_s.size() || u2 != hi_s.size())
      throw std::invalid_argument(text);
    if (lo < 1 || hi < lo)
      throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::exception &) {
    throw UsageError("--n-range must be lo:hi with 1 <= lo <= hi, got '" + text + "'");
  }
}

void cmd_converge(const ConvergeArgs &a, std::ostream &out) {
  if (a.mode != "full" && a.mode != "sparse")
    throw UsageError("--mode must be full or sparse");
  if (a.dim < 1 || (a.mode == "sparse" && a.dim < 2))
    throw UsageError("--dim must be >= 1 (>= 2 for sparse)");
  const auto [lo, hi] = parse_range(a.n_range);
  if (a.mode == "full" && hi > 20)
    throw UsageError("full-grid levels are limited to 20");

  PeriodicFunction f = [&] {
    try {
      if (!a.function_file.empty()) {
        std::ifstream in(a.function_file);
        if (!in)
          throw UsageError("cannot read --function '" + a.function_file + "'");
        auto g = function_from_json(in);
        if (static_cast<long>(g.dimension()) != a.dim)
          throw UsageError("--function dimension differs from --dim");
        return g;
      }
      FamilyParams p;
      if (!a.k0.empty())
        p.k0 = wave(a.k0, a.dim, "--k0");
      p.beta = a.beta;
      p.max_frequency = a.max_frequency;
      p.seed = a.seed;
      return make_test_function(a.family, static_cast<std::size_t>(a.dim), p);
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    } catch (const nlohmann::json::exception &e) {
      throw UsageError(std::string("bad --function file: ") + e.what());
    }
  }();
  if (!f.real_valued())
    throw UsageError("convergence studies need a real-valued function");

  const auto ctx = context_for(a.bits.value_or(256));
  const auto rows = a.mode == "full" ? order_study(f, lo, hi, ctx, a.resolution)
                                     : sparse_order_study(f, lo, hi, ctx, a.resolution);
  out << "n,error,log2_ratio\n";
  for (const auto &r : rows) {
    out << r.n << "," << format_paper_sci(r.error) << ",";
    if (r.log2_ratio) {
      std::ostringstream s;
      s.imbue(std::locale::classic());
      s << std::fixed << std::setprecision(6) << *r.log2_ratio;
      out << s.str();
    }
    out << "\n";
  }
}

void cmd_sigma(const SigmaArgs &a, std::ostream &out) {
  if (a.dim < 1)
    throw UsageError("--dim must be >= 1");
  if (a.power < 0)
    throw UsageError("-p (>= 0) is required");
  if (a.sum < a.dim)
    throw UsageError("-m must be >= d");
  const WaveVector k = wave(a.k, a.dim, "--k");

  std::vector<std::string> routes;
  if (a.check == "default")
    routes = {"bruteforce", "recurrence"};
  else if (a.check == "all") {
    routes = {"bruteforce", "recurrence"};
    if (a.dim == 2 && a.power >= 1)
      routes.push_back("closed_d2");
    if (a.power == 1)
      routes.push_back("p1_reduced");
  } else {
    std::stringstream in(a.check);
    std::string r;
    while (std::getline(in, r, ','))
      routes.push_back(r);
  }

  std::vector<std::pair<std::string, BigRational>> values;
  for (const auto &r : routes) {
    if (r == "bruteforce")
      values.emplace_back(r, sigma_bruteforce(a.dim, a.power, a.sum, k).value);
    else if (r == "recurrence")
      values.emplace_back(r, sigma_recurrence(a.dim, a.power, a.sum, k).value);
    else if (r == "recurrence_printed")
      values.emplace_back(
          r, sigma_recurrence(a.dim, a.power, a.sum, k, RecurrenceBound::printed).value);
    else if (r == "closed_d2") {
      if (a.dim != 2 || a.power < 1)
        throw UsageError("closed_d2 needs d = 2 and p >= 1");
      values.emplace_back(r, sigma_closed_d2(a.power, a.sum, k).value);
    } else if (r == "p1_reduced") {
      if (a.power != 1)
        throw UsageError("p1_reduced needs p = 1");
      values.emplace_back(r, sigma_p1_reduced(a.dim, a.sum, k).value);
    } else
      throw UsageError("unknown oracle '" + r +
                       "' (bruteforce, recurrence, recurrence_printed, closed_d2, p1_reduced)");
  }
  if (values.empty())
    throw UsageError("--check selects no oracle");

  bool agree = true;
  for (const auto &[name, v] : values)
    agree = agree && v == values.front().second;

  const BigRational &value = values.front().second;
  const PrecisionContext ctx(256);
  if (a.format == "json") {
    ordered_json j;
    j["d"] = a.dim;
    j["p"] = a.power;
    j["m"] = a.sum;
    j["k"] = k_json(k);
    j["value"] = to_string(value);
    if (a.decimal)
      j["decimal"] = decimal(BigReal(value, ctx));
    ordered_json o = ordered_json::object();
    for (const auto &[name, v] : values)
      o[name] = to_string(v);
    j["oracles"] = o;
    j["agree"] = agree;
    out << j.dump() << "\n";
  } else if (a.format == "text") {
    out << to_string(value) << "\n";
    if (a.decimal)
      out << "decimal " << decimal(BigReal(value, ctx)) << "\n";
    for (const auto &[name, v] : values)
      out << "oracle " << name << " " << to_string(v) << "\n";
    out << (agree ? "agree" : "DISAGREE") << "\n";
  } else {
    throw UsageError("unknown --format '" + a.format + "' (text, json)");
  }
  if (!agree) {
    out.flush();
    throw OracleDisagreement("sigma oracles disagree");
  }
}

void cmd_grid(const GridArgs &a, std::ostream &out) {
  if (a.dim < 2)
    throw UsageError("--dim must be >= 2");
  if (a.level < 1)
    throw UsageError("-n must be >= 1");
  if (a.level > 30)
    throw UsageError("-n is limited to 30");
  const auto d = static_cast<std::size_t>(a.dim);
  if (!a.stats && !a.list)
    throw UsageError("grid needs --stats and/or --list");
  const auto sparse = sparse_union_nodes(a.level, d);
  if (a.stats) {
    const BigInt full = grid_size(MultiIndex(std::vector<int>(d, static_cast<int>(a.level))));
    // The node-by-node equivalence check enumerates the full grid.
    std::string check = "skipped";
    if (full <= 2000000) {
      if (combination_equivalence_violations(a.level, d) == 0)
        check = "pass";
      else
        check = "fail";
    }
    if (a.format == "json") {
      ordered_json j;
      j["d"] = a.dim;
      j["n"] = a.level;
      j["full"] = full.get_str();
      j["sparse"] = sparse.size();
      j["multiplicity_check"] = check;
      out << j.dump() << "\n";
    } else if (a.format == "csv") {
      out << "d,n,full,sparse,multiplicity_check\n"
          << a.dim << "," << a.level << "," << full.get_str() << "," << sparse.size() << ","
          << check << "\n";
    } else {
      throw UsageError("unknown --format '" + a.format + "' (csv, json)");
    }
    if (check == "fail") {
      out.flush();
      throw OracleDisagreement("signed multiplicities differ from the sparse-grid indicator");
    }
  }
  if (a.list) {
    for (std::size_t i = 0; i < d; ++i)
      out << (i ? "," : "") << "x" << i + 1;
    out << "\n";
    for (const auto &x : sparse) {
      for (std::size_t i = 0; i < d; ++i)
        out << (i ? "," : "") << x[i].str();
      out << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Config file: key=value lines, '#' comments. Keys are long option names
// (without dashes) of the chosen subcommand; flags on the command line win.

std::vector<std::pair<std::string, std::string>> read_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot read config '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

/// Appends --key value tokens for config entries whose option was not given.
std::vector<std::string> merge_config(CLI::App &cmd,
                                      const std::vector<std::pair<std::string, std::string>> &cfg) {
  std::vector<std::string> extra;
  std::map<std::string, bool> seen;
  for (const auto &[key, value] : cfg) {
    if (key == "config" || key == "output")
      continue;
    std::string flag = "--" + key;
    CLI::Option *opt = cmd.get_option_no_throw(flag);
    if (!opt && key.size() == 1) {
      flag = "-" + key;
      opt = cmd.get_option_no_throw(flag);
    }
    if (!opt)
      throw UsageError("config key '" + key + "' is not an option of '" + cmd.get_name() + "'");
    if (opt->count() > 0 || seen[flag])
      continue; // the command line wins
    seen[flag] = true;
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1" || value == "yes")
        extra.push_back(flag);
      else if (!(value == "false" || value == "0" || value == "no"))
        throw UsageError("config key '" + key + "' expects true or false");
    } else {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  return extra;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Sparse-grid Gaussian convolution: error coefficients, tables, "
               "convergence studies and exact oracles"};
  app.name("sparsegauss");
  app.require_subcommand(1);
  Common common;
  app.add_option("--output", common.output, "Write results to this file instead of stdout");
  app.add_option("--config", common.config, "key=value file mirroring the flags");
  app.fallthrough();

  CoeffArgs coeff;
  auto *c = app.add_subcommand("coeff", "Sparse error coefficient E_{n,d}(k) and its asymptotic law");
  c->add_option("--dim", coeff.dim, "Dimension d (>= 2)");
  c->add_option("-n,--level", coeff.level, "Level n (>= 1)");
  c->add_option("--k", coeff.k, "Wave vector, comma separated")->delimiter(',');
  c->add_option("--format", coeff.format, "json, csv or paper");
  c->add_option("--rounding", coeff.rounding, "3-digit rendering: nearest, down or up");
  c->add_option("--bits", coeff.bits, "Working precision (default rule otherwise)");
  c->add_flag("--force", coeff.force, "Allow precision below the default rule");

  TableArgs table;
  auto *t = app.add_subcommand("table", "Reference tables or custom (n, k) grids");
  t->add_option("--preset", table.preset, "table1 or table2");
  t->add_option("--dim", table.dim, "Dimension for custom tables");
  t->add_option("--k", table.k, "Wave vector (repeatable), e.g. --k 1,1 --k 2,3");
  t->add_option("--n-list", table.n_list, "Levels, comma separated")->delimiter(',');
  t->add_option("--format", table.format, "paper, csv or json");
  t->add_option("--rounding", table.rounding, "3-digit rendering: nearest, down or up");
  t->add_option("--bits", table.bits, "Working precision for every cell");
  t->add_flag("--force", table.force, "Allow precision below the default rule");

  ConvergeArgs conv;
  auto *v = app.add_subcommand("converge", "Observed convergence orders (CSV n,error,log2_ratio)");
  v->add_option("--mode", conv.mode, "full or sparse");
  v->add_option("--family", conv.family,
                "constant, product_cosine, trig_monomial_pair, beta_decay_random");
  v->add_option("--function", conv.function_file, "JSON coefficient file instead of --family");
  v->add_option("--dim", conv.dim, "Dimension d");
  v->add_option("--n-range", conv.n_range, "Levels lo:hi");
  v->add_option("--beta", conv.beta, "Smoothness for beta_decay_random");
  v->add_option("--K", conv.max_frequency, "Frequency cutoff for beta_decay_random");
  v->add_option("--seed", conv.seed, "Phase seed for beta_decay_random");
  v->add_option("--k0", conv.k0, "Wave vector for trig_monomial_pair")->delimiter(',');
  v->add_option("--resolution", conv.resolution, "Sample points per axis (0: automatic)");
  v->add_option("--bits", conv.bits, "Working precision (default 256)");

  SigmaArgs sig;
  auto *s = app.add_subcommand("sigma", "Exact composition power sum sigma_{d,p}(m,k)");
  s->add_option("--dim", sig.dim, "Dimension d");
  s->add_option("-p,--power", sig.power, "Power p (>= 0)");
  s->add_option("-m,--sum", sig.sum, "Composition sum m (>= d)");
  s->add_option("--k", sig.k, "Wave vector, comma separated")->delimiter(',');
  s->add_option("--check", sig.check,
                "default, all, or a comma list of oracles to cross-check");
  s->add_flag("--decimal", sig.decimal, "Also print a 30-digit decimal");
  s->add_option("--format", sig.format, "text or json");

  GridArgs grid;
  auto *g = app.add_subcommand("grid", "Sparse-grid node counts and listings");
  g->add_option("--dim", grid.dim, "Dimension d (>= 2)");
  g->add_option("-n,--level", grid.level, "Level n (>= 1)");
  g->add_flag("--stats", grid.stats, "Node counts and the multiplicity check");
  g->add_flag("--list", grid.list, "CSV of node coordinates as exact fractions");
  g->add_option("--format", grid.format, "csv or json (for --stats)");

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i)
    args.emplace_back(argv[i]);

  try {
    try {
      app.parse(args);
      if (!common.config.empty()) {
        CLI::App *cmd = app.get_subcommands().front();
        const auto extra = merge_config(*cmd, read_config(common.config));
        if (!extra.empty()) {
          // CLI11 consumes a reversed token vector; config tokens go last.
          std::vector<std::string> again;
          for (int i = argc - 1; i >= 1; --i)
            again.emplace_back(argv[i]);
          again.insert(again.begin(), extra.rbegin(), extra.rend());
          coeff = {};
          table = {};
          conv = {};
          sig = {};
          grid = {};
          app.clear();
          app.parse(again);
        }
      }
    } catch (const CLI::CallForHelp &e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
      return app.exit(e);
    } catch (const CLI::ParseError &e) {
      app.exit(e);
      return kExitUsage;
    }

    std::ofstream file;
    std::ostringstream buffer;
    std::ostream &out = buffer;
    auto flush = [&] {
      if (common.output.empty()) {
        std::cout << buffer.str();
        std::cout.flush();
      } else {
        file.open(common.output, std::ios::binary);
        if (!file)
          throw UsageError("cannot write --output '" + common.output + "'");
        file << buffer.str();
      }
    };
    buffer.imbue(std::locale::classic());

    try {
      if (c->parsed())
        cmd_coeff(coeff, out);
      else if (t->parsed())
        cmd_table(table, out);
      else if (v->parsed())
        cmd_converge(conv, out);
      else if (s->parsed())
        cmd_sigma(sig, out);
      else if (g->parsed())
        cmd_grid(grid, out);
    } catch (...) {
      flush();
      throw;
    }
    flush();
    return 0;
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PrecisionPolicyError &e) {
    std::cerr << "precision policy: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const OracleDisagreement &e) {
    std::cerr << "oracle disagreement: " << e.what() << "\n";
    return kExitOracle;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

// Command-line surface for the exact q-adic measure and Takagi machinery:
//   eval    - evaluate cdf / takagi / derivative / theorem-rhs at one point
//   sample  - write a CSV of exact values over a q-adic grid
//   verify  - run the seeded identity suites
// Exit codes: 0 ok, 1 identity failure, 2 configuration error, 3 cap
// violation, 4 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtakagi/qtakagi.hpp"

namespace {

using namespace qtakagi;

struct RawOptions {
  std::optional<int> q;
  std::optional<std::string> sigma;
  std::optional<std::string> d, r, e, s;
  std::optional<std::string> u;
  std::optional<std::string> x;
  std::optional<int> grid_level;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> output;
  std::optional<std::string> suite;
  std::optional<std::string> function;
  std::optional<std::string> fd_step;
  bool corrupt_sigma = false;
};

// Mirrors of every flag; presence is read back through CLI11 counts so that
// explicit flags win over JSON config values.
struct FlagVars {
  int q = 0;
  std::string sigma, d, r, e, s, u, x, output, suite, function, config, fd_step;
  int grid_level = 0, k = 0, trials = 0;
  std::uint64_t seed = 0;
  bool corrupt_sigma = false;
};

void add_common_flags(CLI::App* cmd, FlagVars& v) {
  cmd->add_option("--q", v.q, "base (integer >= 2)");
  cmd->add_option("--sigma", v.sigma, "permutation image table, comma separated");
  cmd->add_option("--d", v.d, "leading weights, comma separated rationals");
  cmd->add_option("--r", v.r, "refinement weights, comma separated rationals");
  cmd->add_option("--e", v.e, "alternative leading weights (reserved)");
  cmd->add_option("--s", v.s, "alternative refinement weights (reserved)");
  cmd->add_option("--u", v.u, "derivative orders, comma separated (q-1 entries)");
  cmd->add_option("--config", v.config, "JSON config file; explicit flags win");
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

int parse_int(const char* field, const std::string& text) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(field) + ": '" + text + "' is not an integer");
  }
}

void apply_json_config(const std::string& path, RawOptions& raw) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  auto join = [](const nlohmann::json& arr) {
    std::string out;
    for (const auto& item : arr) {
      if (!out.empty()) out += ",";
      if (item.is_string())
        out += item.get<std::string>();
      else
        out += item.dump();
    }
    return out;
  };
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "q")
        raw.q = value.get<int>();
      else if (key == "sigma")
        raw.sigma = value.is_array() ? join(value) : value.get<std::string>();
      else if (key == "d" || key == "r" || key == "e" || key == "s" || key == "u") {
        std::string joined = value.is_array() ? join(value) : value.get<std::string>();
        if (key == "d") raw.d = joined;
        if (key == "r") raw.r = joined;
        if (key == "e") raw.e = joined;
        if (key == "s") raw.s = joined;
        if (key == "u") raw.u = joined;
      } else if (key == "x")
        raw.x = value.get<std::string>();
      else if (key == "grid_level")
        raw.grid_level = value.get<int>();
      else if (key == "k")
        raw.k = value.get<int>();
      else if (key == "seed")
        raw.seed = value.get<std::uint64_t>();
      else if (key == "trials")
        raw.trials = value.get<int>();
      else if (key == "output")
        raw.output = value.get<std::string>();
      else if (key == "suite")
        raw.suite = value.get<std::string>();
      else if (key == "function")
        raw.function = value.get<std::string>();
      else
        throw ConfigError("config: unknown field " + key);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config: field " + key + " has the wrong type");
    }
  }
}

bool provided(CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

RawOptions merge_options(CLI::App* cmd, const FlagVars& v) {
  RawOptions raw;
  if (provided(cmd, "--config")) apply_json_config(v.config, raw);
  if (provided(cmd, "--q")) raw.q = v.q;
  if (provided(cmd, "--sigma")) raw.sigma = v.sigma;
  if (provided(cmd, "--d")) raw.d = v.d;
  if (provided(cmd, "--r")) raw.r = v.r;
  if (provided(cmd, "--e")) raw.e = v.e;
  if (provided(cmd, "--s")) raw.s = v.s;
  if (provided(cmd, "--u")) raw.u = v.u;
  if (provided(cmd, "--x")) raw.x = v.x;
  if (provided(cmd, "--grid-level")) raw.grid_level = v.grid_level;
  if (provided(cmd, "--k")) raw.k = v.k;
  if (provided(cmd, "--seed")) raw.seed = v.seed;
  if (provided(cmd, "--trials")) raw.trials = v.trials;
  if (provided(cmd, "--output")) raw.output = v.output;
  if (provided(cmd, "--suite")) raw.suite = v.suite;
  if (provided(cmd, "--function")) raw.function = v.function;
  if (provided(cmd, "--fd-step")) raw.fd_step = v.fd_step;
  if (provided(cmd, "--selftest-corrupt-sigma")) raw.corrupt_sigma = true;
  return raw;
}

SystemConfig build_config(const RawOptions& raw) {
  if (!raw.q) throw ConfigError("q: required");
  if (!raw.sigma) throw ConfigError("sigma: required");
  std::vector<int> table;
  for (const std::string& part : split_commas(*raw.sigma))
    table.push_back(parse_int("sigma", part));
  return validate_config(*raw.q, table);
}

WeightVec build_weights(const char* field, const std::optional<std::string>& text, int q) {
  if (!text) throw ConfigError(std::string(field) + ": required");
  std::vector<Rational> parts;
  for (const std::string& item : split_commas(*text)) {
    std::optional<Rational> v = parse_rational(item);
    if (!v) throw ConfigError(std::string(field) + ": '" + item + "' is not a rational p/q");
    parts.push_back(*v);
  }
  try {
    if (static_cast<int>(parts.size()) == q - 1)
      return WeightVec::from_prefix(q, std::move(parts));
    if (static_cast<int>(parts.size()) == q) return WeightVec(std::move(parts));
  } catch (const ConfigError& ex) {
    throw ConfigError(std::string(field) + ": " + ex.what());
  }
  throw ConfigError(std::string(field) + ": expected " + std::to_string(q - 1) + " or " +
                    std::to_string(q) + " components");
}

MultiIndex build_orders(const RawOptions& raw, int q) {
  if (!raw.u) throw ConfigError("u: required");
  std::vector<int> orders;
  for (const std::string& part : split_commas(*raw.u))
    orders.push_back(parse_int("u", part));
  if (static_cast<int>(orders.size()) != q - 1)
    throw ConfigError("u: expected exactly " + std::to_string(q - 1) + " entries");
  try {
    MultiIndex u(q, std::move(orders));
    if (u.total() == 0) throw ConfigError("u: total order must be >= 1");
    return u;
  } catch (const ConfigError& ex) {
    throw ConfigError(std::string("u: ") + ex.what());
  }
}

QAdicPoint build_point(const RawOptions& raw, int q) {
  if (!raw.x) throw ConfigError("x: required");
  std::optional<Rational> v = parse_rational(*raw.x);
  if (!v) throw ConfigError("x: '" + *raw.x + "' is not a rational p/q");
  if (sgn(*v) < 0 || *v > 1) throw ConfigError("x out of [0,1]");
  std::optional<QAdicPoint> p = QAdicPoint::from_rational(q, *v);
  if (!p) throw ConfigError("x: denominator must be a power of q");
  return *p;
}

void print_value(const Rational& v) {
  std::cout << to_fraction_string(v) << " " << to_decimal_string(v) << "\n";
}

// Central finite differences on the symbolic cdf, a cheap cross-check of the
// polynomial differentiation path; not used by any exact suite.
Rational finite_difference_diagnostic(const SystemConfig& cfg, const QAdicPoint& x,
                                      const MultiIndex& u, const WeightVec& r,
                                      const Rational& h) {
  SparsePoly poly = cdf_weight_polynomial(cfg, DerivMode::coupled, x);
  std::vector<std::pair<Rational, std::vector<Rational>>> nodes{
      {Rational(1), std::vector<Rational>(r.components().begin(), r.components().end() - 1)}};
  for (int l = 0; l <= cfg.q() - 2; ++l)
    for (int rep = 0; rep < u.order(l); ++rep) {
      std::vector<std::pair<Rational, std::vector<Rational>>> next;
      for (const auto& [coeff, point] : nodes) {
        auto up = point, down = point;
        up[static_cast<std::size_t>(l)] += h;
        down[static_cast<std::size_t>(l)] -= h;
        next.push_back({coeff / (2 * h), std::move(up)});
        next.push_back({-coeff / (2 * h), std::move(down)});
      }
      nodes = std::move(next);
    }
  Rational total = 0;
  for (const auto& [coeff, point] : nodes) total += coeff * poly.evaluate(point);
  return total / (Rational(cfg.q()) * Rational(u.factorial_product()));
}

int run_eval(const std::string& which, const RawOptions& raw) {
  SystemConfig cfg = build_config(raw);
  int q = cfg.q();
  QAdicPoint x = build_point(raw, q);
  if (which == "cdf") {
    MeasureContext mc(cfg, build_weights("d", raw.d, q), build_weights("r", raw.r, q));
    print_value(cdf(mc, x));
    return 0;
  }
  if (which == "takagi") {
    MeasureContext mc(cfg, build_weights("d", raw.d, q), build_weights("r", raw.r, q));
    MultiIndex u = build_orders(raw, q);
    print_value(raw.k ? takagi_truncated(mc, u, *raw.k, x) : takagi_function(mc, u, x));
    return 0;
  }
  WeightVec r = build_weights("r", raw.r, q);
  MultiIndex u = build_orders(raw, q);
  if (which == "derivative") {
    Rational norm = Rational(q) * Rational(u.factorial_product());
    print_value(cdf_mixed_partial(cfg, DerivMode::coupled, x, u, r) / norm);
    if (raw.fd_step) {
      std::optional<Rational> h = parse_rational(*raw.fd_step);
      if (!h || sgn(*h) <= 0) throw ConfigError("fd-step: must be a positive rational");
      Rational fd = finite_difference_diagnostic(cfg, x, u, r, *h);
      std::cout << "fd-diagnostic " << to_fraction_string(fd) << " "
                << to_decimal_string(fd) << "\n";
    }
    return 0;
  }
  if (which == "theorem-rhs") {
    print_value(derivative_takagi_form(cfg, r, u, x));
    return 0;
  }
  throw ConfigError("eval: unknown function " + which);
}

int run_sample(const RawOptions& raw) {
  SystemConfig cfg = build_config(raw);
  int q = cfg.q();
  if (!raw.function) throw ConfigError("function: required");
  const std::string& fn = *raw.function;
  if (fn != "cdf" && fn != "takagi" && fn != "derivative" && fn != "theorem-rhs")
    throw ConfigError("function: must be one of cdf, takagi, derivative, theorem-rhs");
  if (!raw.grid_level) throw ConfigError("grid-level: required");
  if (*raw.grid_level < 0) throw ConfigError("grid-level: must be >= 0");
  if (!raw.output) throw ConfigError("output: required");
  std::int64_t cells = table_size(q, *raw.grid_level);

  std::optional<MeasureContext> mc;
  std::optional<WeightVec> r;
  std::optional<MultiIndex> u;
  if (fn == "cdf" || fn == "takagi")
    mc.emplace(cfg, build_weights("d", raw.d, q), build_weights("r", raw.r, q));
  else
    r = build_weights("r", raw.r, q);
  if (fn != "cdf") u = build_orders(raw, q);

  std::ofstream out(*raw.output, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open output file " << *raw.output << "\n";
    return 4;
  }
  out << "x_num,x_den,value_num,value_den,value_decimal\n";
  for (std::int64_t m = 0; m <= cells; ++m) {
    QAdicPoint x(q, m, *raw.grid_level);
    Rational value;
    if (fn == "cdf")
      value = cdf(*mc, x);
    else if (fn == "takagi")
      value = raw.k ? takagi_truncated(*mc, *u, *raw.k, x) : takagi_function(*mc, *u, x);
    else if (fn == "derivative")
      value = cdf_mixed_partial(cfg, DerivMode::coupled, x, *u, *r) /
              (Rational(q) * Rational(u->factorial_product()));
    else
      value = derivative_takagi_form(cfg, *r, *u, x);
    Rational xv = x.value();
    out << xv.get_num().get_str() << "," << xv.get_den().get_str() << ","
        << value.get_num().get_str() << "," << value.get_den().get_str() << ","
        << to_decimal_string(value) << "\n";
  }
  out.flush();
  if (!out) {
    std::cerr << "failed writing " << *raw.output << "\n";
    return 4;
  }
  return 0;
}

int run_verify(const RawOptions& raw) {
  std::string suite = raw.suite.value_or("all");
  std::vector<std::string> names = verify_suite_names();
  if (suite != "all") {
    bool known = false;
    for (const std::string& n : names) known = known || n == suite;
    if (!known) throw ConfigError("suite: unknown suite " + suite);
    names = {suite};
  }
  SuiteScale scale = SuiteScale::from_trials(raw.trials.value_or(5));
  std::uint64_t seed = raw.seed.value_or(1);
  bool all_ok = true;
  for (const std::string& name : names) {
    std::vector<SuiteReport> reports =
        run_named_suite(name, scale, seed, raw.corrupt_sigma);
    for (const SuiteReport& rep : reports) {
      std::cout << "suite " << name << " [" << rep.name << "]: " << rep.checks
                << " checks, " << rep.failures << " failures\n";
      if (!rep.ok()) {
        all_ok = false;
        std::cout << "  first counterexample: " << rep.first_counterexample << "\n";
      }
    }
  }
  std::cout << "verify: " << (all_ok ? "PASS" : "FAIL") << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact twisted q-adic measures and generalized Takagi functions"};
  app.require_subcommand(1);

  FlagVars ev;
  CLI::App* eval = app.add_subcommand("eval", "evaluate one function at one point");
  eval->require_subcommand(1);
  std::vector<CLI::App*> eval_cmds;
  for (const char* name : {"cdf", "takagi", "derivative", "theorem-rhs"}) {
    CLI::App* sub = eval->add_subcommand(name);
    add_common_flags(sub, ev);
    sub->add_option("--x", ev.x, "evaluation point, a rational m/q^k in [0,1]");
    sub->add_option("--k", ev.k, "truncation depth (takagi only; default exact)");
    sub->add_option("--fd-step", ev.fd_step,
                    "derivative only: also print a finite-difference diagnostic");
    eval_cmds.push_back(sub);
  }

  FlagVars sm;
  CLI::App* sample = app.add_subcommand("sample", "write exact values on a grid to CSV");
  add_common_flags(sample, sm);
  sample->add_option("--function", sm.function, "cdf | takagi | derivative | theorem-rhs");
  sample->add_option("--grid-level", sm.grid_level, "sample at every m/q^G");
  sample->add_option("--k", sm.k, "truncation depth (takagi only; default exact)");
  sample->add_option("--output", sm.output, "CSV output path");

  FlagVars vf;
  CLI::App* verify = app.add_subcommand("verify", "run the seeded identity suites");
  verify->add_option("--suite", vf.suite,
                     "measure-axioms | substitution | zero-expectation | radon-nikodym | "
                     "takagi-equiv | theorem | bounds | all");
  verify->add_option("--seed", vf.seed, "random seed (default 1)");
  verify->add_option("--trials", vf.trials, "random instances per family (default 5)");
  verify->add_option("--config", vf.config, "JSON config file; explicit flags win");
  verify->add_flag("--selftest-corrupt-sigma", vf.corrupt_sigma)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(eval)) {
      for (std::size_t i = 0; i < eval_cmds.size(); ++i)
        if (eval->got_subcommand(eval_cmds[i]))
          return run_eval(eval_cmds[i]->get_name(), merge_options(eval_cmds[i], ev));
    } else if (app.got_subcommand(sample)) {
      return run_sample(merge_options(sample, sm));
    } else if (app.got_subcommand(verify)) {
      return run_verify(merge_options(verify, vf));
    }
  } catch (const LevelCapExceeded& ex) {
    std::cerr << ex.what() << "\n";
    return 3;
  } catch (const CombinatorialGuard& ex) {
    std::cerr << ex.what() << "\n";
    return 3;
  } catch (const Error& ex) {
    std::cerr << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << ex.what() << "\n";
    return 2;
  }
  return 2;
}

// newform_lab: conductor tables, property suites and reducibility reports for
// parabolically induced representations of unramified U(2,1).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "newform/newform.hpp"

namespace {

using nlohmann::json;
using namespace newform;

constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;

struct RunConfig {
  int p = 3;
  int rel_prec = 0;  // 0: the largest value up to 24 that fits the arithmetic
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string out;
  int samples = 0;  // 0: the suite default
};

/// What a command produces: a JSON document plus a flat table for md/csv.
struct Document {
  json j;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool passed = true;
};

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("NEWFORM_LAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParseError(std::string("NEWFORM_LAB_SEED is not an unsigned integer: \"") + env + "\"");
    }
  }
  return 1;
}

const FieldParams& resolve_field(const RunConfig& cfg) {
  int rel = cfg.rel_prec;
  if (rel == 0) {
    rel = 24;
    while (rel > 5 && std::pow(static_cast<double>(cfg.p), rel) >= std::pow(2.0, 62)) --rel;
  }
  return FieldParams::get(cfg.p, rel);
}

json header(const std::string& command, const FieldParams& fp, std::uint64_t seed) {
  return {{"command", command}, {"p", fp.p}, {"rel_prec", fp.rel_prec}, {"eps", fp.eps}, {"seed", seed}};
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back({{"property", c.property}, {"passed", c.passed}, {"detail", c.detail}});
  return a;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ParseError("range must look like \"lo..hi\" or \"k\", got \"" + text + "\"");
  }
}

json dims_json(const std::vector<int>& d) { return json(d); }

// ---------------------------------------------------------------------------

Document cmd_tables(const RunConfig& cfg, const std::string& c1r, const std::string& c2r, int n_max) {
  const FieldParams& fp = resolve_field(cfg);
  const auto [c1_lo, c1_hi] = parse_range(c1r);
  const auto [c2_lo, c2_hi] = parse_range(c2r);
  if (c1_lo < 0 || c2_lo < 0 || c1_lo > c1_hi || c2_lo > c2_hi || n_max < 0) {
    throw ParseError("tables: ranges must be non-empty and non-negative");
  }
  const SuiteResult r = grid_table(fp, c1_lo, c1_hi, c2_lo, c2_hi, n_max);
  Document d;
  d.j = header("tables", fp, resolve_seed(cfg));
  d.j["n_max"] = n_max;
  json rows = json::array();
  for (const auto& row : r.rows) {
    std::vector<int> dims;
    std::istringstream ss(row[4]);
    for (int v; ss >> v;) dims.push_back(v);
    rows.push_back({{"c1", std::stoi(row[0])},
                    {"c2", std::stoi(row[1])},
                    {"conductor_formula", std::stoi(row[2])},
                    {"conductor_basis", row[3] == "-" ? json(nullptr) : json(std::stoi(row[3]))},
                    {"dims", dims},
                    {"pass", row[5] == "pass"}});
  }
  d.j["rows"] = rows;
  d.j["checks"] = checks_json(r.checks);
  d.j["passed"] = r.passed();
  d.columns = r.columns;
  d.rows = r.rows;
  d.passed = r.passed();
  return d;
}

Document cmd_verify(const RunConfig& cfg, const std::string& suite, int n, int m, int c_max, int n_max) {
  const FieldParams& fp = resolve_field(cfg);
  const std::uint64_t seed = resolve_seed(cfg);
  std::mt19937_64 rng(seed);
  SuiteResult r;
  if (suite == "cosets") {
    r = verify_cosets(fp, n, cfg.samples > 0 ? cfg.samples : 200, rng);
  } else if (suite == "intertwine") {
    r = verify_intertwine(fp, c_max, n_max, cfg.samples > 0 ? cfg.samples : 50, rng);
  } else if (suite == "theta") {
    r = verify_theta(fp, rng);
  } else if (suite == "oldforms") {
    r = verify_oldforms(fp, 4, rng);
  } else {
    r = verify_e1(fp, m);
  }
  Document d;
  d.j = header("verify", fp, seed);
  d.j["suite"] = suite;
  if (suite == "cosets") {
    // One audited certificate per representative.
    json certs = json::array();
    for (int i = (n + 1) / 2; i <= n; ++i) {
      const GMat g = sample_borel(fp, rng) * gamma_elem(fp, i) * sample(SubgroupSpec::K(n), fp, rng);
      const ReductionCertificate c = reduce(g, n, &rng);
      certs.push_back({{"n", c.n},
                       {"i", c.i},
                       {"g", g.to_string()},
                       {"b", c.b.to_string()},
                       {"k", c.k.to_string()},
                       {"verified", verify_certificate(c, g, n)}});
    }
    d.j["certificates"] = certs;
  }
  d.j["columns"] = r.columns;
  d.j["rows"] = r.rows;
  d.j["checks"] = checks_json(r.checks);
  d.j["passed"] = r.passed();
  d.columns = r.columns;
  d.rows = r.rows;
  d.passed = r.passed();
  return d;
}

json mu1_json(const std::string& spec, const QuasiCharE& mu1) {
  return {{"spec", spec},
          {"conductor", mu1.conductor()},
          {"unit_character", mu1.unit_char().j()},
          {"pi_value", mu1.pi_value().to_scalar(mu1.session().field()).to_string()}};
}

json mu2_json(const std::string& spec, const CharE1& mu2) {
  return {{"spec", spec}, {"conductor", mu2.conductor()}, {"character", mu2.character().j()}};
}

Document classify_document(const RunConfig& cfg, const std::string& command, const std::string& m1,
                           const std::string& m2, int n_max) {
  const FieldParams& fp = resolve_field(cfg);
  const std::uint64_t seed = resolve_seed(cfg);
  std::mt19937_64 rng(seed);
  const int level = std::max({spec_conductor(m1), spec_conductor(m2), 1});
  const CharacterSession& s = CharacterSession::get(fp, level);
  const QuasiCharE mu1 = parse_mu1(s, m1);
  const CharE1 mu2 = parse_mu2(s, m2);
  const TorusChar mu{mu1, mu2};
  const SubquotientReport rep = subquotient_table(mu1, mu2, n_max, &rng);
  const CentralCharacter cc = central_character(mu1, mu2);

  Document d;
  d.j = header(command, fp, seed);
  d.j["cyclotomic_order"] = s.cyclotomic_order();
  d.j["n_max"] = n_max;
  d.j["mu1"] = mu1_json(m1, mu1);
  d.j["mu2"] = mu2_json(m2, mu2);
  d.j["class"] = rep.cls.tag();
  d.j["reducibility"] = to_string(rep.cls.cls);
  d.j["unramified_case"] = to_string(rep.cls.ru);
  d.j["induced_conductor"] = rep.full_conductor;
  d.j["central_character_conductor"] = cc.conductor;
  d.j["full_dims"] = dims_json(rep.full_dims);
  json cons = json::array();
  d.columns = {"n", "dim_V(n)"};
  for (const auto& c : rep.constituents) {
    cons.push_back({{"name", c.name},
                    {"generic", c.generic},
                    {"conductor", c.conductor ? json(*c.conductor) : json(nullptr)},
                    {"dims", dims_json(c.dims)}});
    d.columns.push_back("dim_" + c.name);
  }
  for (int n = 0; n <= n_max; ++n) {
    std::vector<std::string> row = {std::to_string(n), std::to_string(rep.full_dims[static_cast<std::size_t>(n)])};
    for (const auto& c : rep.constituents) row.push_back(std::to_string(c.dims[static_cast<std::size_t>(n)]));
    d.rows.push_back(row);
  }
  d.j["constituents"] = cons;
  d.j["checks"] = {{"additivity", rep.additivity}, {"profile", rep.profile}};
  d.j["evidence"] = rep.evidence;
  bool ok = rep.additivity && rep.profile;
  for (const auto& [k, v] : rep.evidence) ok = ok && v;

  const Newform nf = newform_of(mu1, mu2);
  d.j["newform"] = {{"vector", nf.vector.to_string()},
                    {"formula", nf.description},
                    {"conductor", nf.conductor},
                    {"space", nf.companion_space ? "companion conj(mu1)^-1 (x) mu2" : "induced"}};
  d.j["passed"] = ok;
  d.passed = ok;
  return d;
}

Document cmd_steinberg(const RunConfig& cfg, int n_max) {
  Document d = classify_document(cfg, "steinberg", "|.|_E", "triv", n_max);
  const FieldParams& fp = resolve_field(cfg);
  std::mt19937_64 rng(resolve_seed(cfg));
  const CharacterSession& s = CharacterSession::get(fp, 1);
  const TorusChar mu{QuasiCharE::abs_power(s, 1), CharE1::trivial(s)};
  const CycMatrix m = operator_matrix(mu, 2, 1, [&](const InducedFn& f) { return op_delta_st(f, &rng); });
  const Rational q = s.q();
  const CycScalar want21(s.field(), q * q - 1), want22(s.field(), 1 / q + 1);
  json row = json::array();
  for (const auto& c : m.at(0)) row.push_back(c.to_string());
  const Newform nf = newform_of(mu.mu1, mu.mu2);
  const InducedFn k = nf.vector;
  // Kernel condition f(1) = −q(q−1)f(γ_1) on the newform.
  const bool condition = k.coeff(2) == CycScalar(s.field(), -q * (q - 1)) * k.coeff(1);
  const bool functional = m[0][0] == want21 && m[0][1] == want22;
  const int kernel_dim = 2 - rank(m);
  const bool in_kernel = op_delta_st(k, &rng).is_zero();
  d.j["delta"] = {{"basis", {1, 2}},
                  {"matrix", json::array({row})},
                  {"functional_matches", functional},
                  {"kernel_dimension", kernel_dim},
                  {"kernel_vector", k.to_string()},
                  {"kernel_condition", condition},
                  {"newform_in_kernel", in_kernel}};
  d.passed = d.passed && functional && kernel_dim == 1 && condition && in_kernel;
  d.j["passed"] = d.passed;
  return d;
}

// ---------------------------------------------------------------------------
// Rendering.

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Document& d, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << d.j.dump(2) << "\n";
  } else if (format == "csv") {
    for (std::size_t k = 0; k < d.columns.size(); ++k) os << (k ? "," : "") << csv_escape(d.columns[k]);
    os << "\n";
    for (const auto& row : d.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_escape(row[k]);
      os << "\n";
    }
  } else {
    os << "# " << d.j.value("command", "") << (d.j.contains("suite") ? " " + d.j["suite"].get<std::string>() : "")
       << "\n\n";
    for (const auto& [k, v] : d.j.items()) {
      if (v.is_primitive()) os << "- " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
    os << "\n|";
    for (const auto& c : d.columns) os << " " << c << " |";
    os << "\n|";
    for (std::size_t k = 0; k < d.columns.size(); ++k) os << "---|";
    os << "\n";
    for (const auto& row : d.rows) {
      os << "|";
      for (const auto& c : row) os << " " << c << " |";
      os << "\n";
    }
    if (d.j.contains("checks") && d.j["checks"].is_array()) {
      os << "\n";
      for (const auto& c : d.j["checks"]) {
        os << "- [" << (c["passed"].get<bool>() ? "pass" : "FAIL") << "] " << c["property"].get<std::string>() << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"newform_lab: newforms for parabolically induced representations of unramified U(2,1)"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--p", cfg.p, "odd prime")->check(CLI::PositiveNumber);
  app.add_option("--rel-prec", cfg.rel_prec, "relative p-adic precision in digits");
  app.add_option("--seed", cfg.seed, "RNG seed (fallback: NEWFORM_LAB_SEED, then 1)");
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "md", "csv"}));
  app.add_option("--out", cfg.out, "write output to this file instead of stdout");
  app.add_option("--samples", cfg.samples, "sample count for randomized suites")->check(CLI::NonNegativeNumber);

  std::string c1r = "0..2", c2r = "0..2";
  int n_max = 8;
  auto* tables = app.add_subcommand("tables", "conductor and dim V(n) over a character grid");
  tables->add_option("--c1", c1r, "range of c(mu1), e.g. 0..2");
  tables->add_option("--c2", c2r, "range of c(mu2), e.g. 0..2");
  tables->add_option("--n-max", n_max, "largest level");

  std::string suite;
  int vn = 4, vm = 3, c_max = 2, v_n_max = 6;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", suite, "cosets | intertwine | theta | oldforms | e1")
      ->required()
      ->check(CLI::IsMember({"cosets", "intertwine", "theta", "oldforms", "e1"}));
  verify->add_option("--n", vn, "level (cosets)");
  verify->add_option("--m", vm, "largest filtration level (e1)");
  verify->add_option("--c-max", c_max, "largest conductor in the grid (intertwine)");
  verify->add_option("--n-max", v_n_max, "largest level (intertwine)");

  std::string m1 = "triv", m2 = "triv";
  int c_n_max = 8;
  auto* classify = app.add_subcommand("classify", "reducibility class, subquotient table and newform");
  classify->add_option("--mu1", m1, "mu1: |.|_E, |.|_E^-1, triv, omega*|.|, omega*|.|^-1 or c1=..,idx=..,pi=..");
  classify->add_option("--mu2", m2, "mu2: triv or c2=..,idx=..");
  classify->add_option("--n-max", c_n_max, "largest level in the tables");

  int s_n_max = 8;
  auto* steinberg = app.add_subcommand("steinberg", "classify the Steinberg pair and report the level-lowering operator");
  steinberg->add_option("--n-max", s_n_max, "largest level in the tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Document doc;
    if (*tables) {
      doc = cmd_tables(cfg, c1r, c2r, n_max);
    } else if (*verify) {
      doc = cmd_verify(cfg, suite, vn, vm, c_max, v_n_max);
    } else if (*classify) {
      doc = classify_document(cfg, "classify", m1, m2, c_n_max);
    } else {
      doc = cmd_steinberg(cfg, s_n_max);
    }
    const std::string text = render(doc, cfg.format);
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(cfg.out);
      if (!f) {
        std::cerr << "newform_lab: cannot write " << cfg.out << "\n";
        return kExitUsage;
      }
      f << text;
    }
    if (!doc.passed) {
      std::cerr << "newform_lab: verification failed\n";
      return kExitVerification;
    }
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "newform_lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "newform_lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "newform_lab: " << e.what() << "\n";
    return kExitVerification;
  }
}

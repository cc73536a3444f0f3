#include "cli.hpp"

#include "jcone/sonine.hpp"
#include "jcone/mc.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

namespace jcone::cli {

namespace {

using json = nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  // shared
  int q = 1;
  std::string field = "R";
  int jobs = default_jobs();
  std::uint64_t seed = 1;
  std::string output;
  bool compare = false;
  std::string config;
  std::string format = "json";
  // parameters
  std::string mu, nu, nu1, nu2, z, z_im = "0", w, poles;
  int k = -1;
  std::string alpha, beta, partition, at;
  std::string x, spectrum;
  bool negative = false;
  int max_degree = 60;
  double rel_tol = 1e-12;
  std::uint64_t samples = 0;
  int p = -1, pt = -1;
  int degree = -1;
  std::string localizer = "one";
  int dmax = 8;
  std::string mode = "auto";
  std::string r;
  double z_max = 10;
  int z_points = 101;
  double tol = 1e-8;
  double floor = 1e-2;
  double bands = 3;
};

struct Outcome {
  Outcome() = default;
  Outcome(json r, bool p = true, std::string c = {}) : result(std::move(r)), pass(p), csv(std::move(c)) {}

  json result;
  bool pass = true;
  std::string csv;  // non-empty: written instead of the JSON report
};

using Handler = std::function<Outcome(const Options&)>;

// --- parsing helpers -------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

Rational need_rational(const std::string& text, const char* name) {
  if (text.empty()) throw UsageError(std::string("--") + name + " is required");
  return parse_rational(text);
}

std::vector<Rational> rational_list(const std::string& text, const char* name) {
  if (text.empty()) throw UsageError(std::string("--") + name + " is required");
  std::vector<Rational> out;
  for (const auto& t : split(text, ',')) out.push_back(parse_rational(t));
  return out;
}

std::vector<double> double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& t : split(text, ',')) out.push_back(to_double(parse_rational(t)));
  return out;
}

Partition parse_partition(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != '(' && c != ')' && c != ' ') s += c;
  std::vector<int> parts;
  for (const auto& t : split(s, ',')) {
    std::size_t used = 0;
    int v = std::stoi(t, &used);
    if (used != t.size()) throw UsageError("bad partition '" + text + "'");
    parts.push_back(v);
  }
  return Partition(parts);
}

ConeStructure make_cone(const Options& o) { return ConeStructure::make(parse_field(o.field), o.q); }

std::vector<std::vector<double>> spectra(const std::string& text, const ConeStructure& cone) {
  std::vector<std::vector<double>> out;
  if (text.empty()) {
    const std::vector<std::vector<double>> defaults{{0.5, 0.2, 0.1}, {2, 0.5, 0.1}, {5, 1, 0.5}};
    for (const auto& d : defaults) out.emplace_back(d.begin(), d.begin() + cone.q);
    return out;
  }
  for (const auto& item : split(text, ';')) {
    auto xi = double_list(item);
    if (static_cast<int>(xi.size()) != cone.q) throw UsageError("spectrum '" + item + "' does not have q entries");
    out.push_back(xi);
  }
  return out;
}

json complex_json(Complex z) {
  if (z.imag() == 0) return z.real();
  return json::array({z.real(), z.imag()});
}

json rational_json(const Rational& r) { return {{"exact", to_string(r)}, {"value", to_double(r)}}; }

json matrix_json(const SmallMat& m, Field f) {
  json rows = json::array();
  for (int i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(f == Field::Real ? json(m(i, j).real()) : complex_json(m(i, j)));
    rows.push_back(row);
  }
  return {{"field", field_tag(f)}, {"rows", rows}};
}

ConeElement parse_matrix(const std::string& text, const ConeStructure& cone) {
  std::string body = text;
  if (!body.empty() && body[0] == '@') {
    std::ifstream in(body.substr(1));
    if (!in) throw UsageError("cannot read matrix file '" + body.substr(1) + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw UsageError(std::string("matrix is not valid JSON: ") + e.what());
  }
  json rows = j;
  Field f = cone.field;
  if (j.is_object()) {
    for (const auto& [key, _] : j.items())
      if (key != "field" && key != "rows") throw UsageError("unknown matrix key '" + key + "'");
    if (j.contains("field")) f = parse_field(j.at("field").get<std::string>());
    rows = j.at("rows");
  }
  if (f != cone.field) throw UsageError("matrix field does not match --field");
  if (!rows.is_array() || static_cast<int>(rows.size()) != cone.q) throw UsageError("matrix must have q rows");
  SmallMat m(cone.q);
  for (int i = 0; i < cone.q; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != cone.q) throw UsageError("matrix must be q x q");
    for (int jj = 0; jj < cone.q; ++jj) {
      const auto& e = rows[i][jj];
      if (e.is_number()) {
        m(i, jj) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, jj) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw UsageError("matrix entries are numbers or [re, im] pairs");
      }
    }
  }
  return {f, m};
}

ConeElement point(const Options& o, const ConeStructure& cone) {
  if (!o.x.empty() && !o.spectrum.empty()) throw UsageError("give either --x or --spectrum");
  if (!o.x.empty()) return parse_matrix(o.x, cone);
  if (o.spectrum.empty()) throw UsageError("--x or --spectrum is required");
  auto xi = double_list(o.spectrum);
  if (static_cast<int>(xi.size()) != cone.q) throw UsageError("--spectrum needs q entries");
  return ConeElement::from_spectrum(cone.field, xi);
}

ExactBetaParams exact_params(const Options& o, const ConeStructure& cone) {
  Rational mu = need_rational(o.mu, "mu");
  Rational nu = need_rational(o.nu, "nu");
  int k = o.k >= 0 ? o.k : minimal_extension_level(nu, cone);
  return ExactBetaParams::make(mu, nu, k, cone);
}

json witness_json(const NegativeWitness& w) {
  json poly = json::array();
  for (std::size_t i = 0; i < w.index.size(); ++i)
    if (w.vector[i] != 0) poly.push_back({{"partition", w.index[i].str()}, {"coefficient", to_string(w.vector[i])}});
  return {{"degree", w.degree},
          {"localizer", localizer_name(w.localizer)},
          {"polynomial", poly},
          {"value", rational_json(w.value)},
          {"min_eigenvalue", w.min_eigenvalue}};
}

constexpr const char* kOneSided =
    "no_obstruction_up_to is a necessary condition only; it does not prove that the measure is positive";

// --- subcommands -----------------------------------------------------------

Outcome cmd_gamma(const Options& o) {
  auto cone = make_cone(o);
  Complex z(to_double(need_rational(o.z, "z")), to_double(parse_rational(o.z_im)));
  json res{{"z", complex_json(z)}};
  bool pole = is_cone_pole(z, cone);
  res["pole"] = pole;
  res["gamma"] = pole ? json(nullptr) : complex_json(gamma_cone(z, cone));
  res["log_gamma"] = pole ? json(nullptr) : complex_json(lgamma_cone(z, cone));
  if (!o.w.empty()) {
    Complex w(to_double(parse_rational(o.w)));
    bool bad = pole || is_cone_pole(w, cone) || is_cone_pole(z + w, cone);
    res["w"] = complex_json(w);
    res["beta"] = bad ? json(nullptr) : complex_json(beta_cone(z, w, cone));
  }
  if (!o.poles.empty()) {
    auto lims = rational_list(o.poles, "poles");
    if (lims.size() != 2) throw UsageError("--poles takes lo,hi");
    json list = json::array();
    for (const auto& p : gamma_poles(cone, PoleWindow{lims[0], lims[1]})) list.push_back(to_string(p));
    res["poles"] = list;
  }
  return {res};
}

Outcome cmd_jack(const Options& o) {
  auto cone = make_cone(o);
  Rational alpha = o.alpha.empty() ? cone.alpha : parse_rational(o.alpha);
  if (!(alpha > 0)) throw UsageError("--alpha must be positive");
  Partition lam = parse_partition(o.partition);
  if (lam.length() > o.q) throw UsageError("partition has more parts than --q");
  SymCaps caps{std::max(lam.weight(), SymCaps{}.max_degree), std::max(o.q, SymCaps{}.max_rank)};
  auto table = jack_table(alpha, o.q, caps);
  auto poly = jack_expand_monomial(lam, *table);
  json coeffs = json::array();
  for (const auto& [kappa, c] : poly.coeffs) coeffs.push_back({{"partition", kappa.str()}, {"coefficient", to_string(c)}});
  json res{{"alpha", to_string(alpha)},
           {"rank", o.q},
           {"partition", lam.str()},
           {"monomial_coefficients", coeffs},
           {"at_ones", rational_json(jack_at_ones(lam, *table))}};
  if (!o.at.empty()) {
    std::vector<Rational> xs;
    for (const auto& t : split(o.at, ',')) xs.push_back(parse_rational(t));
    if (static_cast<int>(xs.size()) != o.q) throw UsageError("--at needs q values");
    res["at"] = rational_json(jack_eval(lam, *table, xs));
  }
  return {res};
}

Outcome cmd_eval_bessel(const Options& o) {
  auto cone = make_cone(o);
  Complex mu(to_double(need_rational(o.mu, "mu")));
  ConeElement x = point(o, cone);
  TruncationControl ctl{o.max_degree, o.rel_tol, TruncationControl{}.stagnation_window};
  BesselValue v = o.negative ? bessel_at_neg(mu.real(), x, cone, ctl) : bessel_eval(mu, x, cone, ctl);
  json res{{"mu", complex_json(mu)},
           {"x", matrix_json(x.matrix(), cone.field)},
           {"eigenvalues", x.eigenvalues()},
           {"negative", o.negative},
           {"value", complex_json(v.value)},
           {"degree", v.degree},
           {"last_block", v.last_block}};
  return {res};
}

Outcome cmd_sample_beta(const Options& o) {
  auto cone = make_cone(o);
  if (o.samples == 0) throw UsageError("--samples must be positive");
  std::unique_ptr<BetaSampler> sampler;
  if (o.p >= 0) {
    if (!o.mu.empty() || !o.nu.empty()) throw UsageError("give either --p/--pt or --mu/--nu");
    sampler = std::make_unique<BetaSampler>(BetaSampler::group_case(o.p, std::max(o.pt, 0), cone));
  } else {
    sampler = std::make_unique<BetaSampler>(BetaSampler::for_parameters(
        to_double(need_rational(o.mu, "mu")), to_double(need_rational(o.nu, "nu")), cone));
  }
  auto xs = sample_stream(*sampler, o.samples, o.seed, o.jobs);
  if (o.format == "csv") {
    std::ostringstream os;
    os << "sample";
    for (int i = 1; i <= cone.q; ++i) os << ",xi_" << i;
    os << '\n' << std::setprecision(17);
    for (std::size_t s = 0; s < xs.size(); ++s) {
      os << s;
      for (double v : xs[s].eigenvalues()) os << ',' << v;
      os << '\n';
    }
    return {json(), true, os.str()};
  }
  const double mu = sampler->mu(), nu = sampler->nu();
  const bool comparable = nu > cone.mu0_value() || nu == 0;
  json moments = json::array();
  for (const auto& lam : enumerate_partitions_upto(2, cone.q)) {
    if (lam.weight() == 0) continue;
    double s = 0, s2 = 0;
    for (const auto& x : xs) {
      double v = jack_eval(lam, cone.alpha_value(), x.eigenvalues());
      s += v;
      s2 += v * v;
    }
    double n = static_cast<double>(xs.size());
    double mean = s / n;
    double se = std::sqrt(std::max(s2 / n - mean * mean, 0.0) / n);
    json m{{"partition", lam.str()}, {"mean", mean}, {"se", se}};
    if (comparable) {
      double want = moment_value(lam, BetaParams::make(mu, nu, nu > cone.mu0_value() ? 0 : 1, cone), cone).real();
      m["expected"] = want;
      m["within_3se"] = std::abs(mean - want) <= 3 * se + 1e-12;
    }
    moments.push_back(m);
  }
  json res{{"sampler", sampler->describe()}, {"mu", mu}, {"nu", nu}, {"samples", o.samples}, {"moments", moments}};
  return {res};
}

Outcome cmd_moment(const Options& o) {
  auto cone = make_cone(o);
  auto params = exact_params(o, cone);
  json res{{"mu", to_string(params.mu)}, {"nu", to_string(params.nu)}, {"k", params.k}};
  if (!o.partition.empty() == (o.degree >= 0)) throw UsageError("give exactly one of --partition or --degree");
  if (!o.partition.empty()) {
    Partition lam = parse_partition(o.partition);
    if (lam.length() > cone.q) throw UsageError("partition has more parts than --q");
    res["partition"] = lam.str();
    try {
      res["value"] = rational_json(moment_value(lam, params, cone));
      res["pole"] = false;
    } catch (const MomentPole&) {
      res["value"] = nullptr;
      res["pole"] = true;
    }
    return {res};
  }
  Localizer loc = parse_localizer(o.localizer);
  MomentFunctional L(params, cone, moment_caps(o.degree, cone.q));
  auto m = moment_matrix(o.degree, loc, L);
  auto a = analyze_psd(m);
  json index = json::array(), rows = json::array();
  for (const auto& p : m.index) index.push_back(p.str());
  for (int i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(to_string(m.at(i, j)));
    rows.push_back(row);
  }
  res["degree"] = o.degree;
  res["localizer"] = localizer_name(loc);
  res["index"] = index;
  res["entries"] = rows;
  res["psd"] = a.psd;
  res["rank"] = a.rank;
  res["min_eigenvalue"] = a.min_eigenvalue;
  return {res};
}

Outcome cmd_classify(const Options& o) {
  auto cone = make_cone(o);
  Rational mu = need_rational(o.mu, "mu"), nu = need_rational(o.nu, "nu");
  auto v = positivity_classify(mu, nu, cone, o.dmax);
  bool wallach = wallach_contains(nu, cone);
  json res{{"mu", to_string(mu)},
           {"nu", to_string(nu)},
           {"k", v.k},
           {"dmax", v.dmax},
           {"hypothesis_met", v.hypothesis_met},
           {"wallach", wallach},
           {"verdict", v.conclusive() ? "negative_witness" : "no_obstruction_up_to"}};
  res["witness"] = v.conclusive() ? witness_json(*v.witness) : json(nullptr);
  if (!v.conclusive()) res["note"] = kOneSided;
  // A witness at a Wallach point contradicts positivity there.
  return {res, !(wallach && v.conclusive())};
}

Outcome cmd_product_relation(const Options& o) {
  auto cone = make_cone(o);
  Rational mu = need_rational(o.mu, "mu"), nu = need_rational(o.nu, "nu");
  int degree = o.degree >= 0 ? o.degree : 4;
  auto rep = product_relation_check(mu, nu, cone, degree);
  json res{{"mu", to_string(mu)},
           {"nu", to_string(nu)},
           {"degree", degree},
           {"factor", rational_json(rep.factor)},
           {"polynomials", rep.polynomials},
           {"max_discrepancy", rational_json(rep.max_discrepancy)}};
  return {res, rep.max_discrepancy == 0};
}

Outcome sonine_rank1(const Options& o) {
  auto alphas = double_list(o.alpha.empty() ? "-1/2,0,1,2.5" : o.alpha);
  auto betas = double_list(o.beta.empty() ? "1/2,1,3" : o.beta);
  if (o.z_points < 2) throw UsageError("--z-points must be >= 2");
  std::vector<double> z;
  for (int i = 0; i < o.z_points; ++i) z.push_back(o.z_max * i / (o.z_points - 1));
  json checks = json::array();
  bool pass = true;
  for (double a : alphas)
    for (double b : betas) {
      auto rep = sonine_rank1_quadrature(a, b, z);
      bool ok = rep.max_residual < o.tol;
      pass = pass && ok;
      checks.push_back(
          {{"alpha", a}, {"beta", b}, {"max_residual", rep.max_residual}, {"worst_z", rep.worst_z}, {"pass", ok}});
    }
  return {{{"mode", "rank1"}, {"tolerance", o.tol}, {"z_max", o.z_max}, {"z_points", o.z_points}, {"checks", checks}},
          pass};
}

Outcome sonine_mc(const Options& o, const ConeStructure& cone) {
  if (o.samples == 0) throw UsageError("--samples must be positive");
  std::unique_ptr<BetaSampler> sampler;
  if (o.p >= 0)
    sampler = std::make_unique<BetaSampler>(BetaSampler::group_case(o.p, std::max(o.pt, 0), cone));
  else
    sampler = std::make_unique<BetaSampler>(WishartFactor::bartlett(to_double(need_rational(o.mu, "mu"))),
                                            WishartFactor::bartlett(to_double(need_rational(o.nu, "nu"))), cone);
  json checks = json::array();
  bool pass = true;
  for (const auto& xi : spectra(o.r, cone)) {
    auto rep = sonine_cone_mc(*sampler, ConeElement::from_spectrum(cone.field, xi), o.samples, o.seed, o.jobs);
    bool ok = rep.residual < std::max(o.bands * rep.se, o.floor);
    pass = pass && ok;
    checks.push_back({{"spectrum", xi},
                      {"exact", rep.exact},
                      {"mean", rep.mean},
                      {"se", rep.se},
                      {"residual", rep.residual},
                      {"pass", ok}});
  }
  return {{{"mode", "mc"},
           {"sampler", sampler->describe()},
           {"mu", sampler->mu()},
           {"nu", sampler->nu()},
           {"samples", o.samples},
           {"bands", o.bands},
           {"floor", o.floor},
           {"checks", checks}},
          pass};
}

Outcome sonine_extended(const Options& o, const ConeStructure& cone) {
  Rational mu = need_rational(o.mu, "mu"), nu = need_rational(o.nu, "nu");
  int degree = o.degree >= 0 ? o.degree : 8;
  auto rep = sonine_extended_polynomial(mu, nu, cone, spectra(o.r, cone), degree);
  bool pass = rep.exact_mismatches == 0 && (!rep.rank1_mismatches || *rep.rank1_mismatches == 0) &&
              rep.max_poly_residual < 1e-10;
  json res{{"mode", "extended"},
           {"mu", to_string(mu)},
           {"nu", to_string(nu)},
           {"k", minimal_extension_level(nu, cone)},
           {"degree", degree},
           {"terms", rep.terms},
           {"exact_mismatches", rep.exact_mismatches},
           {"rank1_mismatches", rep.rank1_mismatches ? json(*rep.rank1_mismatches) : json(nullptr)},
           {"max_poly_residual", rep.max_poly_residual},
           {"max_tail", rep.max_tail}};
  return {res, pass};
}

Outcome cmd_sonine(const Options& o) {
  auto cone = make_cone(o);
  std::string mode = o.mode;
  if (mode == "auto") {
    if (o.p >= 0) {
      mode = "mc";
    } else {
      Rational mu = need_rational(o.mu, "mu"), nu = need_rational(o.nu, "nu");
      mode = mu > cone.mu0 && nu > cone.mu0 && o.samples > 0 ? "mc" : "extended";
    }
  }
  if (mode == "rank1") return sonine_rank1(o);
  if (mode == "mc") return sonine_mc(o, cone);
  if (mode == "extended") return sonine_extended(o, cone);
  throw UsageError("--mode must be auto, mc, extended or rank1");
}

Outcome cmd_compose(const Options& o) {
  auto cone = make_cone(o);
  double mu = to_double(need_rational(o.mu, "mu"));
  double nu1 = to_double(need_rational(o.nu1, "nu1")), nu2 = to_double(need_rational(o.nu2, "nu2"));
  std::uint64_t n = o.samples ? o.samples : 100000;
  int degree = o.degree >= 0 ? o.degree : 3;
  auto rep = composition_check(mu, nu1, nu2, cone, n, o.seed, o.jobs, degree, o.bands);
  json moments = json::array();
  for (const auto& m : rep.moments)
    moments.push_back({{"partition", m.lambda.str()},
                       {"expected", m.expected},
                       {"mean", m.mean},
                       {"se", m.se},
                       {"within", m.within}});
  return {{{"mu", mu}, {"nu1", nu1}, {"nu2", nu2}, {"samples", n}, {"bands", o.bands}, {"moments", moments}},
          rep.all_within()};
}

Outcome cmd_theorem_b(const Options& o) {
  auto cone = make_cone(o);
  Rational mu = need_rational(o.mu, "mu");
  auto t = theorem_b_table(cone, mu, rational_list(o.nu, "nu"), o.dmax);
  json rows = json::array();
  for (const auto& row : t.rows)
    rows.push_back({{"nu", to_string(row.nu)},
                    {"wallach", row.wallach},
                    {"k", row.verdict.k},
                    {"status", theorem_b_status_name(row.status)},
                    {"witness", row.verdict.conclusive() ? witness_json(*row.verdict.witness) : json(nullptr)}});
  return {{{"mu", to_string(mu)}, {"dmax", o.dmax}, {"rows", rows}, {"note", kOneSided}}, !t.any_hard_failure()};
}

// --- wiring ----------------------------------------------------------------

std::string timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--q", o.q, "Rank of the cone (matrix size)")->check(CLI::Range(1, 3));
  sub->add_option("--field", o.field, "R (real symmetric) or C (complex Hermitian)")
      ->check(CLI::IsMember({"R", "C"}));
  sub->add_option("--config", o.config, "JSON file with option values; command-line flags win");
  sub->add_option("--output", o.output, "Write the report here instead of stdout");
  sub->add_flag("--compare", o.compare, "Omit the timestamp so reports can be diffed byte for byte");
}

void add_sampling(CLI::App* sub, Options& o) {
  sub->add_option("--samples", o.samples, "Monte Carlo sample count");
  sub->add_option("--seed", o.seed, std::string("RNG seed (default from ") + kSeedEnv + ")");
  sub->add_option("--jobs", o.jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
}

// Turns config-file entries into flags placed before the user's own flags.
std::vector<std::string> config_args(const std::string& path, CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : j.items()) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config" || key == "help")
      throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back("--" + key);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number()) {
      text = value.dump();
    } else if (value.is_array()) {
      for (const auto& e : value) {
        if (!text.empty()) text += ",";
        text += e.is_string() ? e.get<std::string>() : e.dump();
      }
    } else if (value.is_object() && key == "x") {
      text = value.dump();
    } else {
      throw UsageError("config key '" + key + "' has an unsupported value");
    }
    out.push_back("--" + key);
    out.push_back(text);
  }
  return out;
}

json echo_config(CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty()) continue;
    const std::string& name = names.front();
    if (name == "help" || name == "config" || name == "output" || name == "compare") continue;
    if (opt->get_type_size() == 0) {
      cfg[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      cfg[name] = opt->as<std::string>();
    } else if (!opt->get_default_str().empty()) {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      std::size_t used = 0;
      o.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      err << "error: " << kSeedEnv << " is not an unsigned integer\n";
      return kUsage;
    }
  }

  CLI::App app{"Bessel functions, beta measures and Sonine formulas on symmetric cones", "jcone"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  std::map<std::string, Handler> handlers;

  auto sub = [&](const std::string& name, const std::string& help, Handler h) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, o);
    handlers[name] = std::move(h);
    return s;
  };
  auto mu_nu = [&](CLI::App* s) {
    s->add_option("--mu", o.mu, "Parameter mu (decimal or p/q, read exactly)");
    s->add_option("--nu", o.nu, "Parameter nu (decimal or p/q, read exactly)");
  };

  auto* g = sub("gamma", "Cone gamma function, beta function and pole set", cmd_gamma);
  g->add_option("--z", o.z, "Argument (real part)");
  g->add_option("--z-im", o.z_im, "Imaginary part of the argument");
  g->add_option("--w", o.w, "Second argument for B_Omega(z, w)");
  g->add_option("--poles", o.poles, "List poles in the window lo,hi");

  auto* j = sub("jack", "Jack polynomial C_lambda in the monomial basis", cmd_jack);
  j->add_option("--alpha", o.alpha, "Jack parameter (default 2/d)");
  j->add_option("--partition", o.partition, "Partition, e.g. 2,1")->required();
  j->add_option("--at", o.at, "Evaluate at these q values (exact)");

  auto* b = sub("eval-bessel", "Bessel function J_mu at a point of V", cmd_eval_bessel);
  b->add_option("--mu", o.mu, "Index mu");
  b->add_option("--x", o.x, "Matrix as JSON {\"field\", \"rows\"} or @file");
  b->add_option("--spectrum", o.spectrum, "Eigenvalues a,b,... instead of --x");
  b->add_flag("--negative", o.negative, "Evaluate J_mu(-x) for x in the closed cone");
  b->add_option("--max-degree", o.max_degree, "Series degree cap");
  b->add_option("--rel-tol", o.rel_tol, "Relative truncation tolerance");

  auto* sb = sub("sample-beta", "Draw beta-distributed cone elements", cmd_sample_beta);
  mu_nu(sb);
  add_sampling(sb, o);
  sb->add_option("--p", o.p, "Group case: rows of the first Gaussian factor");
  sb->add_option("--pt", o.pt, "Group case: rows of the second Gaussian factor");
  sb->add_option("--format", o.format, "json summary or csv spectra")->check(CLI::IsMember({"json", "csv"}));

  auto* m = sub("moment", "Exact moments and localized moment matrices", cmd_moment);
  mu_nu(m);
  m->add_option("--k", o.k, "Extension level (default: smallest admissible)");
  m->add_option("--partition", o.partition, "Moment L(Z_lambda) of this partition");
  m->add_option("--degree", o.degree, "Moment matrix of this degree");
  m->add_option("--localizer", o.localizer, "one, det_x or det_e_minus_x");

  auto* c = sub("classify-positivity", "Search for a certificate that beta_{mu,nu} is not positive", cmd_classify);
  mu_nu(c);
  c->add_option("--dmax", o.dmax, "Largest moment-matrix degree")->check(CLI::PositiveNumber);

  auto* pr = sub("check-product-relation", "Delta(e-x) beta_{mu,nu} = c beta_{mu,nu+1} on polynomials",
                 cmd_product_relation);
  mu_nu(pr);
  pr->add_option("--degree", o.degree, "Test degree (default 4)");

  auto* so = sub("sonine-check", "Sonine formulas: rank-1 quadrature, cone Monte Carlo, extended identity", cmd_sonine);
  mu_nu(so);
  add_sampling(so, o);
  so->add_option("--mode", o.mode, "auto, mc, extended or rank1");
  so->add_option("--p", o.p, "Group case: rows of the first Gaussian factor");
  so->add_option("--pt", o.pt, "Group case: rows of the second Gaussian factor");
  so->add_option("--r", o.r, "Spectra of r, e.g. 0.5,0.2;2,0.5");
  so->add_option("--degree", o.degree, "Truncation degree for the extended identity (default 8)");
  so->add_option("--alpha", o.alpha, "rank1: alpha list");
  so->add_option("--beta", o.beta, "rank1: beta list");
  so->add_option("--z-max", o.z_max, "rank1: grid end");
  so->add_option("--z-points", o.z_points, "rank1: grid size");
  so->add_option("--tol", o.tol, "rank1: residual tolerance");
  so->add_option("--bands", o.bands, "mc: standard-error bands");
  so->add_option("--floor", o.floor, "mc: absolute residual floor");

  auto* co = sub("compose-check", "Composition of beta measures by Monte Carlo", cmd_compose);
  co->add_option("--mu", o.mu, "Parameter mu");
  co->add_option("--nu1", o.nu1, "First nu");
  co->add_option("--nu2", o.nu2, "Second nu");
  add_sampling(co, o);
  co->add_option("--degree", o.degree, "Largest |lambda| (default 3)");
  co->add_option("--bands", o.bands, "Standard-error bands");

  auto* tb = sub("theorem-b", "Wallach set against the positivity detector", cmd_theorem_b);
  tb->add_option("--mu", o.mu, "Parameter mu");
  tb->add_option("--nu", o.nu, "Comma-separated nu values");
  tb->add_option("--dmax", o.dmax, "Largest moment-matrix degree")->check(CLI::PositiveNumber);

  std::vector<std::string> args = args_in;
  try {
    // Config entries go right after the subcommand so explicit flags override them.
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      if (args.size() < 2 || !app.get_subcommand_no_throw(args[1])) throw UsageError("--config needs a subcommand first");
      auto extra = config_args(config_path, app.get_subcommand(args[1]));
      args.insert(args.begin() + 2, extra.begin(), extra.end());
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Outcome outcome;
  try {
    outcome = handlers.at(chosen->get_name())(o);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kFailure;
  }

  std::string text;
  if (!outcome.csv.empty()) {
    text = outcome.csv;
  } else {
    json report{{"tool", "jcone"},
                {"version", kVersion},
                {"command", chosen->get_name()},
                {"config", echo_config(chosen)},
                {"field", field_tag(parse_field(o.field))},
                {"q", o.q},
                {"result", outcome.result},
                {"pass", outcome.pass}};
    if (!o.compare) report["timestamp"] = timestamp();
    text = report.dump(2) + "\n";
  }
  if (o.output.empty()) {
    out << text;
  } else {
    std::ofstream f(o.output);
    if (!f) {
      err << "error: cannot write '" << o.output << "'\n";
      return kUsage;
    }
    f << text;
  }
  if (!outcome.pass) err << "hard failure: see the report\n";
  return outcome.pass ? kOk : kFailure;
}

}  // namespace jcone::cli

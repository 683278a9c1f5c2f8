#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "secrsma/experiment.hpp"

namespace secrsma {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  fail(ErrorCode::Config, "config " + key + ": " + why);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ';') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

double number(std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || p != end) throw std::invalid_argument(t);
  return v;
}

// "a:step:b" expands to a, a + step, ..., b (inclusive within 1e-9 step)
std::vector<double> expand(const std::string& item, double (*parse)(std::string_view)) {
  const auto c1 = item.find(':');
  if (c1 == std::string::npos) return {parse(item)};
  const auto c2 = item.find(':', c1 + 1);
  if (c2 == std::string::npos) throw std::invalid_argument(item);
  const double a = parse(item.substr(0, c1)), step = parse(item.substr(c1 + 1, c2 - c1 - 1)),
               b = parse(item.substr(c2 + 1));
  if (!(step > 0.0) || b < a) throw std::invalid_argument(item);
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

std::vector<double> list(const std::string& key, const std::string& value, double (*parse)(std::string_view)) {
  std::vector<double> out;
  try {
    for (const auto& item : split(value)) {
      auto v = expand(item, parse);
      out.insert(out.end(), v.begin(), v.end());
    }
  } catch (const std::exception&) {
    bad(key, "cannot parse '" + value + "'");
  }
  return out;
}

double num_of(std::string_view s) { return number(s); }

double scalar(const std::string& key, const std::string& value) {
  try {
    return number(value);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + value + "'");
  }
}

std::uint64_t unsigned_of(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) bad(key, "expected a non-negative integer, got '" + value + "'");
  return v;
}

bool boolean(const std::string& key, const std::string& value) {
  const auto v = lower(trim(value));
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad(key, "expected true/false, got '" + value + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

}  // namespace

namespace {

double angle_of(std::string_view text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto at = t.find("pi");
  if (at == std::string::npos) return number(t);
  std::string coef = t.substr(0, at);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double c = 1.0;
  if (coef == "-") c = -1.0;
  else if (!coef.empty() && coef != "+") c = number(coef);
  std::string rest = t.substr(at + 2);
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw std::invalid_argument(std::string(text));
    den = number(rest.substr(1));
    if (den == 0.0) throw std::invalid_argument(std::string(text));
  }
  return c * std::numbers::pi / den;
}

}  // namespace

double parse_angle(std::string_view text) {
  try {
    return angle_of(text);
  } catch (const std::exception&) {
    fail(ErrorCode::Config, "malformed angle '" + std::string(text) + "'");
  }
}

RVec ExperimentConfig::user_weights() const {
  if (weights.empty()) return RVec::Constant(static_cast<Eigen::Index>(users), 1.0 / static_cast<double>(users));
  return Eigen::Map<const RVec>(weights.data(), static_cast<Eigen::Index>(weights.size()));
}

SolverOptions ExperimentConfig::solver_options() const {
  SolverOptions o;
  o.sca.tolerance = tolerance;
  o.sca.max_iterations = max_iterations;
  o.sca.kappa = kappa;
  o.sca.solve_tolerance = solve_tolerance;
  o.sca.feasibility_tolerance = feasibility_tolerance;
  switch (surrogate) {
    case SurrogateChoice::AsPrinted: o.sca.wiretap = WiretapSurrogate::AsPrinted; break;
    case SurrogateChoice::ConservativeCone: o.sca.wiretap = WiretapSurrogate::ConservativeCone; break;
    case SurrogateChoice::Auto:
      o.sca.wiretap = users <= 2 ? WiretapSurrogate::AsPrinted : WiretapSurrogate::ConservativeCone;
      break;
  }
  o.ao.outer_tolerance = tolerance;
  o.ao.inner_tolerance = inner_tolerance;
  o.ao.max_outer = max_iterations;
  o.ao.max_inner = max_inner;
  o.ao.kappa = kappa;
  o.ao.samples = samples;
  o.ao.solve_tolerance = solve_tolerance;
  o.ao.feasibility_tolerance = feasibility_tolerance;
  return o;
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& key, const std::string& why) {
    if (!ok) bad(key, why);
  };
  check(!name.empty() && name.find_first_of(",\"\n") == std::string::npos, "scenario.name",
        "must be non-empty without commas or quotes");
  check(users >= 1, "scenario.users", "must be at least 1");
  check(antennas >= 1, "scenario.antennas", "must be at least 1");
  check(trials >= 1, "scenario.trials", "must be at least 1");
  if (kind == ScenarioKind::Specific) {
    check(users == 2, "scenario.users", "the specific channel has two users");
    check(!thetas.empty(), "scenario.theta", "needs at least one angle");
    check(gamma > 0.0, "scenario.gamma", "must be positive");
  }
  if (!weights.empty()) {
    check(weights.size() == users, "scenario.weights", "needs one weight per user");
    double sum = 0.0;
    for (double w : weights) {
      check(w >= 0.0, "scenario.weights", "must be non-negative");
      sum += w;
    }
    check(sum > 0.0, "scenario.weights", "must not all be zero");
  }
  check(!schemes.empty(), "algorithm.schemes", "needs at least one scheme");
  check(!csit.empty(), "algorithm.csit", "needs at least one mode");
  check(csit_quality >= 0.0, "algorithm.csit_quality", "must be non-negative");
  check(csit_scaling >= 0.0, "algorithm.csit_scaling", "must be non-negative");
  check(samples >= 1, "algorithm.samples", "must be at least 1");
  check(tolerance > 0.0 && inner_tolerance > 0.0 && solve_tolerance > 0.0, "algorithm.tolerance",
        "tolerances must be positive");
  check(feasibility_tolerance >= 0.0, "algorithm.feasibility_tolerance", "must be non-negative");
  check(max_iterations >= 1 && max_inner >= 1, "algorithm.max_iterations", "must be at least 1");
  check(kappa >= 0.0 && kappa <= 1.0, "algorithm.kappa", "must lie in [0, 1]");
  for (double k : trace_kappas) check(k >= 0.0 && k <= 1.0, "algorithm.trace_kappas", "must lie in [0, 1]");
  check(!snr_db.empty(), "sweep.snr_db", "needs at least one value");
  check(!thresholds.empty(), "sweep.thresholds", "needs at least one value");
  for (double t : thresholds) check(t >= 0.0, "sweep.thresholds", "must be non-negative");
  for (CsitMode m : csit)
    if (m == CsitMode::Imperfect)
      for (double s : snr_db) {
        const double var = csit_quality * std::pow(db_to_linear(s), -csit_scaling);
        check(var <= 1.0, "algorithm.csit_quality",
              "error variance exceeds 1 at " + fmt(s) + " dB; raise the SNR or lower the quality factor");
      }
  for (const auto& f : {results_file, traces_file, manifest_file, timings_file})
    check(!f.empty(), "output", "file names must be non-empty");
}

ExperimentConfig parse_config(std::string_view ini_text) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in{std::string(ini_text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorCode::Config, std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }

  ExperimentConfig c;
  const std::set<std::string> sections{"scenario", "algorithm", "sweep", "output"};
  for (const auto& [section, body] : tree) {
    if (!sections.count(section)) bad(section, "unknown section");
    if (body.empty() && !body.data().empty()) bad(section, "key outside a section");
    for (const auto& [k, node] : body) {
      const std::string key = section + "." + k;
      const std::string v = trim(node.data());
      if (key == "scenario.name") c.name = v;
      else if (key == "scenario.type") {
        const auto t = lower(v);
        if (t == "specific") c.kind = ScenarioKind::Specific;
        else if (t == "random") c.kind = ScenarioKind::Random;
        else bad(key, "expected specific or random");
      } else if (key == "scenario.users") c.users = unsigned_of(key, v);
      else if (key == "scenario.antennas") c.antennas = unsigned_of(key, v);
      else if (key == "scenario.gamma") c.gamma = scalar(key, v);
      else if (key == "scenario.theta") c.thetas = list(key, v, angle_of);
      else if (key == "scenario.weights") c.weights = list(key, v, num_of);
      else if (key == "scenario.trials") c.trials = unsigned_of(key, v);
      else if (key == "scenario.seed") c.seed = unsigned_of(key, v);
      else if (key == "algorithm.schemes") {
        c.schemes.clear();
        for (const auto& s : split(v)) {
          const auto t = lower(s);
          if (t == "rs") c.schemes.push_back(Scheme::RS);
          else if (t == "mulp") c.schemes.push_back(Scheme::MULP);
          else bad(key, "unknown scheme '" + s + "'");
        }
      } else if (key == "algorithm.csit") {
        c.csit.clear();
        for (const auto& s : split(v)) {
          const auto t = lower(s);
          if (t == "perfect") c.csit.push_back(CsitMode::Perfect);
          else if (t == "imperfect") c.csit.push_back(CsitMode::Imperfect);
          else bad(key, "unknown CSIT mode '" + s + "'");
        }
      } else if (key == "algorithm.csit_quality") c.csit_quality = scalar(key, v);
      else if (key == "algorithm.csit_scaling") c.csit_scaling = scalar(key, v);
      else if (key == "algorithm.samples") c.samples = unsigned_of(key, v);
      else if (key == "algorithm.tolerance") c.tolerance = scalar(key, v);
      else if (key == "algorithm.inner_tolerance") c.inner_tolerance = scalar(key, v);
      else if (key == "algorithm.max_iterations") c.max_iterations = static_cast<int>(unsigned_of(key, v));
      else if (key == "algorithm.max_inner") c.max_inner = static_cast<int>(unsigned_of(key, v));
      else if (key == "algorithm.kappa") c.kappa = scalar(key, v);
      else if (key == "algorithm.trace_kappas") c.trace_kappas = list(key, v, num_of);
      else if (key == "algorithm.wiretap_surrogate") {
        const auto t = lower(v);
        if (t == "auto") c.surrogate = SurrogateChoice::Auto;
        else if (t == "as_printed") c.surrogate = SurrogateChoice::AsPrinted;
        else if (t == "conservative") c.surrogate = SurrogateChoice::ConservativeCone;
        else bad(key, "expected auto, as_printed or conservative");
      } else if (key == "algorithm.threshold_continuation") c.continuation = boolean(key, v);
      else if (key == "algorithm.feasibility_tolerance") c.feasibility_tolerance = scalar(key, v);
      else if (key == "algorithm.solve_tolerance") c.solve_tolerance = scalar(key, v);
      else if (key == "sweep.snr_db") c.snr_db = list(key, v, num_of);
      else if (key == "sweep.thresholds") c.thresholds = list(key, v, num_of);
      else if (key == "output.dir") c.out_dir = v;
      else if (key == "output.results") c.results_file = v;
      else if (key == "output.traces") c.traces_file = v;
      else if (key == "output.manifest") c.manifest_file = v;
      else if (key == "output.timings") c.timings_file = v;
      else if (key == "output.mean_rows") c.mean_rows = boolean(key, v);
      else bad(key, "unknown key");
    }
  }
  if (c.kind == ScenarioKind::Specific && c.thetas.empty()) c.thetas = {2 * std::numbers::pi / 9};
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_form(const ExperimentConfig& c) {
  std::map<std::string, std::string> kv;
  kv["scenario.name"] = c.name;
  kv["scenario.type"] = c.kind == ScenarioKind::Specific ? "specific" : "random";
  kv["scenario.users"] = std::to_string(c.users);
  kv["scenario.antennas"] = std::to_string(c.antennas);
  kv["scenario.gamma"] = fmt(c.gamma);
  kv["scenario.theta"] = join(c.thetas);
  const RVec w = c.user_weights();
  kv["scenario.weights"] = join(std::vector<double>(w.data(), w.data() + w.size()));
  kv["scenario.trials"] = std::to_string(c.trials);
  kv["scenario.seed"] = std::to_string(c.seed);
  std::string schemes, modes;
  for (auto s : c.schemes) schemes += std::string(schemes.empty() ? "" : ",") + to_string(s);
  for (auto m : c.csit) modes += std::string(modes.empty() ? "" : ",") + to_string(m);
  kv["algorithm.schemes"] = schemes;
  kv["algorithm.csit"] = modes;
  kv["algorithm.csit_quality"] = fmt(c.csit_quality);
  kv["algorithm.csit_scaling"] = fmt(c.csit_scaling);
  kv["algorithm.samples"] = std::to_string(c.samples);
  kv["algorithm.tolerance"] = fmt(c.tolerance);
  kv["algorithm.inner_tolerance"] = fmt(c.inner_tolerance);
  kv["algorithm.max_iterations"] = std::to_string(c.max_iterations);
  kv["algorithm.max_inner"] = std::to_string(c.max_inner);
  kv["algorithm.kappa"] = fmt(c.kappa);
  kv["algorithm.trace_kappas"] = join(c.trace_kappas);
  kv["algorithm.wiretap_surrogate"] = c.surrogate == SurrogateChoice::Auto        ? "auto"
                                      : c.surrogate == SurrogateChoice::AsPrinted ? "as_printed"
                                                                                   : "conservative";
  kv["algorithm.threshold_continuation"] = c.continuation ? "true" : "false";
  kv["algorithm.feasibility_tolerance"] = fmt(c.feasibility_tolerance);
  kv["algorithm.solve_tolerance"] = fmt(c.solve_tolerance);
  kv["sweep.snr_db"] = join(c.snr_db);
  kv["sweep.thresholds"] = join(c.thresholds);
  kv["output.mean_rows"] = c.mean_rows ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical_form(cfg));
  return os.str();
}

void apply(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.tolerance) {
    if (!(*o.tolerance > 0.0)) fail(ErrorCode::Config, "tolerance override must be positive");
    cfg.tolerance = *o.tolerance;
  }
}

}  // namespace secrsma

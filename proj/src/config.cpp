#include "codedmr/config.hpp"

#include <fstream>
#include <set>

#include "codedmr/errors.hpp"

namespace codedmr {

namespace {

Rational rational_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.dump());
  if (v.is_number_float()) return parse_rational(v.dump());  // shortest round-trip text
  throw InvalidConfig(std::string("key '") + key + "' must be a number or rational string");
}

template <typename T>
T unsigned_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw InvalidConfig(std::string("key '") + key + "' must be a non-negative integer");
  return v.get<T>();
}

}  // namespace

std::vector<Rational> SweepSpec::values() const {
  std::vector<Rational> out;
  if (var == "none") return out;
  if (step <= 0) throw InvalidConfig("sweep step must be positive");
  for (Rational v = from; v <= to; v += step) {
    v.canonicalize();
    out.push_back(v);
    if (out.size() > 100000) throw InvalidConfig("sweep has too many points");
  }
  return out;
}

void RunConfig::validate() const {
  system.validate();
  if (schemes.empty()) throw InvalidConfig("no scheme selected");
  if (!is_prime(prime)) throw InvalidConfig("prime " + std::to_string(prime) + " is not prime");
  const unsigned long floor_muK = system.max_r2();
  const BigInt bound = BigInt(static_cast<unsigned long>(system.m)) * (1 + floor_muK);
  if (BigInt(static_cast<unsigned long>(prime)) <= bound)
    throw InvalidConfig("prime must exceed m + floor(mu K) m = " + bound.get_str());
  if (prime >= (1ULL << 62)) throw InvalidConfig("prime must be below 2^62");
  if (q && (*q == 0 || *q > system.K)) throw InvalidConfig("q must lie in [1, K]");
  if (r2 && (*r2 == 0 || *r2 > system.K)) throw InvalidConfig("r2 must lie in [1, K]");
  if (b && *b == 0) throw InvalidConfig("b must be positive");
  if (dim == 0) throw InvalidConfig("dim must be positive");
  static const std::set<std::string> vars{"none", "q", "d", "alpha"};
  if (!vars.count(sweep.var)) throw InvalidConfig("sweep var must be one of q, d, alpha, none");
  if (sweep.var != "none") {
    if (sweep.step <= 0) throw InvalidConfig("sweep step must be positive");
    if (sweep.from > sweep.to) throw InvalidConfig("sweep from must not exceed to");
    if (sweep.var == "alpha" && (sweep.from < 0 || sweep.to > 1)) throw InvalidConfig("alpha sweep outside [0, 1]");
    if ((sweep.var == "q" || sweep.var == "d") &&
        (sweep.from.get_den() != 1 || sweep.step.get_den() != 1 || sweep.from < 1))
      throw InvalidConfig("q and d sweeps need positive integer bounds and step");
    if (sweep.var == "q" && sweep.to > system.K) throw InvalidConfig("q sweep exceeds K");
  }
}

RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
  static const std::set<std::string> known{"K",      "mu",   "N",     "m",      "d",    "gamma", "alpha",
                                           "scheme", "mode", "prime", "seed",   "trials", "sweep", "q",
                                           "r2",     "b",    "e2e_trials", "dim"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw InvalidConfig("unknown config key '" + key + "'");
  RunConfig c;
  try {
    c.system.K = unsigned_field<unsigned>(j, "K");
    c.system.mu = rational_field(j, "mu");
    c.system.N = unsigned_field<unsigned>(j, "N");
    c.system.m = unsigned_field<std::size_t>(j, "m");
    c.system.d = unsigned_field<unsigned>(j, "d");
    c.system.gamma = j.contains("gamma") ? rational_field(j, "gamma") : Rational(1);
    c.system.alpha = j.contains("alpha") ? rational_field(j, "alpha") : Rational(1);
    if (j.contains("scheme")) {
      const auto s = j.at("scheme").get<std::string>();
      if (s != "all") c.schemes = {parse_scheme(s)};
    }
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("prime")) c.prime = unsigned_field<std::uint64_t>(j, "prime");
    if (j.contains("seed")) c.seed = unsigned_field<std::uint64_t>(j, "seed");
    if (j.contains("trials")) c.trials = unsigned_field<std::uint64_t>(j, "trials");
    if (j.contains("q")) c.q = unsigned_field<unsigned>(j, "q");
    if (j.contains("r2")) c.r2 = unsigned_field<unsigned>(j, "r2");
    if (j.contains("b")) c.b = unsigned_field<std::size_t>(j, "b");
    if (j.contains("e2e_trials")) c.e2e_trials = unsigned_field<std::uint64_t>(j, "e2e_trials");
    if (j.contains("dim")) c.dim = unsigned_field<std::size_t>(j, "dim");
    if (j.contains("sweep") && !j.at("sweep").is_null()) {
      const auto& s = j.at("sweep");
      if (!s.is_object()) throw InvalidConfig("sweep must be an object");
      c.sweep.var = s.at("var").get<std::string>();
      if (c.sweep.var != "none") {
        c.sweep.from = rational_field(s, "from");
        c.sweep.to = rational_field(s, "to");
        c.sweep.step = s.contains("step") ? rational_field(s, "step") : Rational(1);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace codedmr

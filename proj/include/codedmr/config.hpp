#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codedmr/delay_model.hpp"
#include "codedmr/ff_poly.hpp"
#include "codedmr/placement.hpp"

namespace codedmr {

struct SweepSpec {
  std::string var = "none";  // q, d, alpha or none
  Rational from{0};
  Rational to{0};
  Rational step{1};

  std::vector<Rational> values() const;
};

/// Flat JSON run configuration. Rational-valued keys (mu, gamma, alpha,
/// sweep bounds) accept "p/q" strings, decimal strings, or JSON numbers.
struct RunConfig {
  SystemConfig system;
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  Mode mode = Mode::Analytic;
  std::uint64_t prime = PrimeField::kDefaultModulus;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  SweepSpec sweep;
  // Optional pins for simulate / sweep.
  std::optional<unsigned> q;
  std::optional<unsigned> r2;
  std::optional<std::size_t> b;
  std::uint64_t e2e_trials = 100;
  std::size_t dim = 1;

  /// Throws InvalidConfig on any violated invariant.
  void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace codedmr

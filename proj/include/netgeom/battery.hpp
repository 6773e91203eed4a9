#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netgeom/product.hpp"
#include "netgeom/random_expr.hpp"
#include "netgeom/sampling.hpp"

namespace netgeom {

/// One measured quantity with its threshold. `at_most` means the value
/// passes when <= threshold; otherwise it must exceed the threshold.
struct Measure {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_most = true;
  bool passes() const { return at_most ? value <= threshold : value > threshold; }
};

struct Check {
  std::string id;
  std::string title;
  std::vector<Measure> measures;
  Verdict verdict() const;
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;

Check check_derivatives(std::uint64_t seed);
Check check_levi_civita(std::uint64_t seed);
Check check_connection_identity(std::uint64_t seed);
Check check_round_trip(std::uint64_t seed);
Check check_conformal_invariance(std::uint64_t seed);
Check check_spherical_factor();
Check check_factorization();
Check check_codazzi_torus();
Check check_two_path();
Check check_h0_sum();

std::vector<Check> run_battery(std::uint64_t seed);

/// Random twisted-type spec on [-1, 1]^n with 2 or 3 blocks and n <= 4.
ProductSpec random_spec(ExprGenerator& gen, ProductKind kind);

/// Flags a coordinate-block net of a built spec must carry.
std::vector<std::string> expected_flags(ProductKind kind, int block_count);

}  // namespace netgeom

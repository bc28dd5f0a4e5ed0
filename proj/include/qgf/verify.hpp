// verify.hpp
// Seeded property battery: summation-by-parts identities, operator
// adjointness, SPD checks, energy dissipation accounting, structure
// preservation, Lipschitz sampling, solver cross-checks. Used by the
// `verify` subcommand and reused by the test suites.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qgf {

struct PropertyResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst observed error/ratio for the property
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  // Test hook: flips the sign of the alpha operator inside the
  // Lemma-4.3 adjointness property so mutation tests can confirm the
  // property would catch it.
  bool inject_alpha_sign_error = false;
  // Trials for the SBP-style identities (the acceptance suite raises it).
  int sbp_trials = 40;
};

std::vector<PropertyResult> run_verify_battery(const VerifyOptions& opts);

}  // namespace qgf

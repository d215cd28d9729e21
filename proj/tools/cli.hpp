#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "carleson/io.hpp"

namespace carleson::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;

inline constexpr const char* kOutputEnv = "CARLESON_OUT";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  int d = 1;
  int K = 10;
  std::string psi = "telescoping";  // or "narrow"
  double eps0 = 0.0;                // 0 means 1/(4d)
  double eps = 0.0;                 // 0 means 1/(8d)
  int mass_exponent = kMassExponent;
  double jn_constant = 10.0;
  double grid_radius = 402.1238596594935;  // 2 pi 64
  int grid_count = 0;                      // per coefficient; 0 means 129 for d = 1, 9 otherwise
  int kmin = 2;                            // scales kmin..K-5
  int modes = 8;
  double max_frequency = 64.0;
  std::uint64_t seed = 7;
  int trials = 10000;  // appendix suites
  int pairs = 200;     // Lemma 0 sweep
  int jobs = 1;
  std::filesystem::path output;

  // Fills the automatic defaults and checks the ranges; throws ConfigError.
  void validate();
  int kmax() const { return K - kResolveMargin; }
  std::vector<int> scales() const;
  Bump bump() const;
  json to_json() const;  // without the output path, so reports do not depend on it
  std::string hash() const;
};

// Entry point behind the carleson executable; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace carleson::cli

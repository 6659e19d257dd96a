#pragma once

// Numerical checks of the estimates the contraction argument rests on,
// plus the random fixtures they draw from.

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skewmix/transfer.hpp"

namespace skewmix {

struct LemmaCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string witness;
};

/// Observable/control pair meeting the dichotomy hypotheses by construction:
/// |phi| < Phi, |d phi| <= 0.9 C Phi, |d log Phi| <= C / 2, C delta = A.
struct DichotomyCase {
  Observable phi;
  Eigen::VectorXd control;
  double C = 0.0;
  double delta = 0.0;
  ConsistentPast past;
  double center = 0.0;
};

DichotomyCase random_dichotomy_case(std::mt19937_64& rng, const PeriodicGrid& grid, const ExpandingModel& model,
                                    int max_depth = 4);

/// Two vectors in C^dim whose normalised directions differ by at least eps.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> random_separated_pair(std::mt19937_64& rng, int dim, double eps);

/// Smooth test function on SU2 used for the Fourier decay check.
double su2_test_function(const GroupElement& g);

struct LemmaSuiteOptions {
  std::uint64_t seed = 1;
  int dichotomy_cases = 1000;
  int cancellation_pairs = 100000;
  int grid = 1024;
  double im_z = 10.0;
  int depth_cap = 8;
};

/// Dichotomy, Lipschitz propagation, cancellation bound and its erratum
/// witness, uniform-C budget, kernel integral, Fourier decay, mollification.
std::vector<LemmaCheck> run_lemma_suite(const ExpandingModel& model, const RoofFunction& roof,
                                        const HolonomyCocycle& cocycle, const Potential& potential,
                                        const LemmaSuiteOptions& opt);

}  // namespace skewmix

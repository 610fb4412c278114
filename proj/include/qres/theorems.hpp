#pragma once

#include <functional>
#include <map>

#include "qres/robustness.hpp"

namespace qres {

struct VerificationInstance {
    std::string description;
    double lhs = 0.0, rhs = 0.0, deviation = 0.0;
    std::string lhs_bound = "exact", rhs_bound = "exact";
    bool pass = false;
    bool applicable = true;
    std::map<std::string, double> details; // residuals, witness evidence, ...
};

struct VerificationReport {
    std::string result_id; // result1 | result2 | result3 | result4
    std::vector<VerificationInstance> instances;
    double tolerance = 1e-6;
    uint64_t seed = 0;

    bool all_pass() const;
    std::string text() const;
};

// Result 1: R_I(set) equals R_T of the phi_+ assemblage, both exact SDPs, and
// the optimal incompatibility decomposition maps to a feasible teleportation
// decomposition with the same robustness.
VerificationReport verify_result1(const StandardMeasurementSet& set, const RobustnessSettings& cfg = {});

// Result 2 at the maximising Bell POVM of Bob: forward solution map through
// the contraction identity (feasibility of the mapped Buscemi decomposition)
// and the lifted-witness certification of the same value.
VerificationReport verify_result2(const Povm& ma, const HermitianOperator& rho, const RobustnessSettings& cfg = {});

// Result 3 as the composition of Results 1 and 2.
VerificationReport verify_result3(const StandardMeasurementSet& set, const RobustnessSettings& cfg = {});

// Result 4: an incompatible set yields a certified strictly positive Buscemi
// nonlocality value equal to R_I; compatible sets report not-applicable.
VerificationReport verify_result4(const StandardMeasurementSet& set, const RobustnessSettings& cfg = {});

// Visibility threshold t* of a parametrised family, located by bisection on
// the exact incompatibility SDP; bracket width 1e-4.
double compatibility_threshold(const std::function<StandardMeasurementSet(double)>& family, double lo, double hi,
                               const RobustnessSettings& cfg = {});

// --- concrete instances used across tests, the CLI corpus and the paper's
// constructions -------------------------------------------------------------

StandardMeasurementSet xz_pair();
StandardMeasurementSet trine_set();
StandardMeasurementSet noisy_set(const StandardMeasurementSet& set, double visibility);
StandardMeasurementSet random_qubit_set(Rng& rng, int inputs, int outcomes);

// Bob's Heisenberg-Weyl Bell POVM {(1 x U_b) phi_+ (1 x U_b)^dag} on B x V'.
Povm bell_povm(int d);

} // namespace qres

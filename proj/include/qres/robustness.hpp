#pragma once

#include <optional>

#include "qres/conic.hpp"
#include "qres/models.hpp"
#include "qres/rng.hpp"

namespace qres {

enum class BoundKind { exact, lower, upper };
std::string to_string(BoundKind b);

enum class RelaxMode { ppt_lower, seesaw_upper };

struct RobustnessSettings {
    SolverSettings solver;
    ValidationTolerances validation;
    long long enumeration_cap = 4096; // deterministic-strategy cap o_A^{i_A}
    int lambda_cardinality = 0;       // 0: constraint-space dimension + 1
    int seesaw_restarts = 50;
    int seesaw_max_rounds = 80;
    double seesaw_improve_tol = 1e-9;
    uint64_t seed = 0;
    int witness_samples = 10000;
    bool behaviour_unconstrained_pmf = false; // quantum-input PMFs not tied to POVMs
};

// Dual-feasible operator collection certifying a robustness lower bound.
struct Witness {
    enum class Kind { teleportation, buscemi };
    Kind kind = Kind::teleportation;
    std::vector<int> dims;         // bipartite dims of each operator
    std::vector<Matrix> operators; // W_a, or W_ab flattened as a*outcomes_b + b
    int outcomes_a = 0;
    int outcomes_b = 0; // 0 for teleportation witnesses
    double certified_value = 0.0;
    // validity evidence
    double trace_bound = 0.0;       // o_A d or o_A o_B
    double trace_sum = 0.0;         // recomputed sum of traces
    double min_sampled_pairing = 0.0;
    int samples_checked = 0;

    bool trace_bound_ok(double tol = 1e-9) const { return trace_sum <= trace_bound + tol; }
};

// Free-model data returned with exact solves and see-saw upper bounds. The
// interpretation of the fields depends on the producing program and is
// documented there; `residual` is always the recomputed defining-constraint
// residual of the decomposition.
struct Decomposition {
    std::vector<double> weights;             // p(lambda) or absorbed scales
    std::vector<Matrix> g;                   // G_lambda / sigma_lambda (B-side)
    std::vector<std::vector<Matrix>> h;      // H_{a|lambda} (A-side POVMs), when applicable
    std::vector<std::vector<int>> strategies; // deterministic response functions, when applicable
    std::vector<Matrix> noise;               // eliminated noise blocks, flattened
    double residual = 0.0;
};

struct RobustnessResult {
    double value = 0.0;
    BoundKind bound = BoundKind::exact;
    std::string program;
    std::optional<Witness> witness;
    std::optional<Decomposition> decomposition;
    struct {
        double gap = 0.0;
        double max_residual = 0.0;
        double dual_pairing_value = 0.0; // certified value recomputed from dual data
        int restarts_used = 0;
        double restart_spread = 0.0;
        std::string note;
    } diagnostics;
};

// Deterministic response functions lambda: x -> a in lexicographic order.
std::vector<std::vector<int>> enumerate_strategies(int inputs, int outcomes, long long cap);

// --- exact SDPs -------------------------------------------------------------

// Generalised robustness of incompatibility of a standard set (exact SDP over
// deterministic response functions).
RobustnessResult rob_incompat_standard(const StandardMeasurementSet& set, const RobustnessSettings& cfg = {});

// Robustness of teleportation of a classical-input assemblage (steering-type
// exact SDP; the free side is pinned to Bob's marginal).
RobustnessResult rob_teleport_classical_inputs(const Assemblage& assemblage, const RobustnessSettings& cfg = {});

// --- Choi-level programs ----------------------------------------------------

// Robustness of teleportation from the Choi operators of (Ma, rho); PPT
// relaxation of the free cone (lower bound) or see-saw decomposition search
// (upper bound).
RobustnessResult rob_teleport_choi(const Povm& ma, const HermitianOperator& rho, RelaxMode mode,
                                   const RobustnessSettings& cfg = {});

// Robustness of Buscemi nonlocality of a distributed POVM.
RobustnessResult rob_buscemi(const DistributedPovm& mab, RelaxMode mode, const RobustnessSettings& cfg = {});

// Robustness of incompatibility of a generalised measurement set, through the
// parent-operator characterisation; PPT relaxation or see-saw.
RobustnessResult rob_incompat_generalised(const GeneralisedMeasurementSet& gset, RelaxMode mode,
                                          const RobustnessSettings& cfg = {});

// Robustness of nonlocality of a behaviour: exact LP for classical inputs on
// both sides, see-saw upper bound otherwise.
RobustnessResult rob_behaviour(const Behaviour& b, const RobustnessSettings& cfg = {});

// --- witnesses ----------------------------------------------------------

// Optimal teleportation witness for a classical-input instance, found by the
// dedicated witness SDP (dual-cone membership, noise-validity and the trace
// bound sum tr W_a <= o_A d are explicit constraints). J_a are the Choi
// operators the certified value pairs against.
Witness witness_teleport_classical(const Assemblage& assemblage, const std::vector<HermitianOperator>& j,
                                   const RobustnessSettings& cfg = {});

// Heisenberg-Weyl lift of a teleportation witness to a Buscemi witness,
// W_ab = (1/d^2) (1 x U_b^dag) W_a^T (1 x U_b).
Witness witness_lift(const Witness& wa, int d, const RobustnessSettings& cfg = {});

// -sum tr[W M] against the matching object (J_a's or a distributed POVM).
double certify(const Witness& w, const std::vector<HermitianOperator>& j);
double certify(const Witness& w, const DistributedPovm& mab);

// Sample extremal free operators and return the smallest pairing found;
// evidence of dual-cone membership, recorded on the witness.
double sample_dual_pairings(Witness& w, int samples, uint64_t seed);

// Clamp tiny negative robustness values (>= -1e-9) to zero.
double clamp_value(double v, std::string& note);

} // namespace qres

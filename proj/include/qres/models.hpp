#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qres/operators.hpp"

namespace qres {

// Validation thresholds; every structural check in this module reads from
// here so the knobs stay visible and configurable.
struct ValidationTolerances {
    double psd = 1e-10;
    double completeness = 1e-10;  // sum-to-identity / trace normalisation
    double no_signalling = 1e-10;
    double nonneg = 1e-12;        // behaviour entries
    double rank = 1e-8;           // tomographic-completeness numerical rank
};

struct Finding {
    std::string what;
    double magnitude = 0.0;
};

struct Validation {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
    std::string summary() const;
    void require(const std::string& context) const; // throws validation_error when not ok
};

// One POVM: positive elements summing to the identity.
struct Povm {
    int dim = 0;
    std::vector<HermitianOperator> elements;

    int outcomes() const { return static_cast<int>(elements.size()); }
    Validation validate(const ValidationTolerances& tol = {}) const;
};

// Finite family of POVMs indexed by a classical input x; elements[x][a].
struct StandardMeasurementSet {
    int dim = 0;
    std::vector<std::vector<HermitianOperator>> elements;

    int inputs() const { return static_cast<int>(elements.size()); }
    int outcomes() const { return elements.empty() ? 0 : static_cast<int>(elements.front().size()); }
    Validation validate(const ValidationTolerances& tol = {}) const;
};

// Set of quantum input states on the ancilla; the completeness flag records
// whether they span the full d^2 real dimension of Hermitian space.
struct QuantumInputSet {
    int dim = 0;
    std::vector<HermitianOperator> states;
    bool tomographically_complete = false;

    int count() const { return static_cast<int>(states.size()); }
    Validation validate(const ValidationTolerances& tol = {}) const;
    static QuantumInputSet make(int dim, std::vector<HermitianOperator> states, const ValidationTolerances& tol = {});
};

// Generalised measurement set: parent bipartite POVM N_a on (ancilla x system)
// applied to quantum inputs; derived elements M_{a|w_x} = tr_anc[N_a (w_x (x) 1)].
struct GeneralisedMeasurementSet {
    Povm parent;            // on ancilla (x) system, dims [d_anc, d_sys]
    QuantumInputSet inputs; // on the ancilla
    std::vector<std::vector<HermitianOperator>> effective; // [x][a], on the system

    int system_dim() const { return parent.elements.empty() ? 0 : parent.elements.front().dims()[1]; }
    int ancilla_dim() const { return inputs.dim; }
    int inputs_count() const { return inputs.count(); }
    int outcomes() const { return parent.outcomes(); }
    Validation validate(const ValidationTolerances& tol = {}) const;
    static GeneralisedMeasurementSet make(Povm parent, QuantumInputSet inputs, const ValidationTolerances& tol = {});

    // True when every input is |x><x| for an orthonormal basis ordering.
    bool classical_inputs(double tol = 1e-10) const;
};

// Unnormalised conditional states tau_{a|x} on Bob; members[x][a].
struct Assemblage {
    int dim_b = 0;
    std::vector<std::vector<HermitianOperator>> members;

    int inputs() const { return static_cast<int>(members.size()); }
    int outcomes() const { return members.empty() ? 0 : static_cast<int>(members.front().size()); }
    HermitianOperator bob_marginal() const; // averaged over x for solver use
    Validation validate(const ValidationTolerances& tol = {}) const;
};

// Joint conditional probabilities p(a,b|x,y); table[x][y][a][b].
struct Behaviour {
    std::vector<std::vector<std::vector<std::vector<double>>>> table;
    std::optional<QuantumInputSet> inputs_a; // absent = classical labels
    std::optional<QuantumInputSet> inputs_b;

    int inputs_a_count() const { return static_cast<int>(table.size()); }
    int inputs_b_count() const { return table.empty() ? 0 : static_cast<int>(table.front().size()); }
    int outcomes_a() const { return inputs_b_count() == 0 ? 0 : static_cast<int>(table.front().front().size()); }
    int outcomes_b() const { return outcomes_a() == 0 ? 0 : static_cast<int>(table.front().front().front().size()); }
    double p(int a, int b, int x, int y) const { return table[x][y][a][b]; }
    Validation validate(const ValidationTolerances& tol = {}) const;
};

// Bipartite joint POVM {M_ab} on V (x) V'.
struct DistributedPovm {
    int dim_v = 0, dim_vp = 0;
    std::vector<std::vector<HermitianOperator>> elements; // [a][b]

    int outcomes_a() const { return static_cast<int>(elements.size()); }
    int outcomes_b() const { return elements.empty() ? 0 : static_cast<int>(elements.front().size()); }
    Validation validate(const ValidationTolerances& tol = {}) const;
};

// Standard -> generalised embedding via the controlled measurement
// N_a = sum_x |x><x| (x) L_{a|x} with classical inputs w_x = |x><x|.
GeneralisedMeasurementSet embed_standard(const StandardMeasurementSet& set);

// tau_{a|w_x} = tr_A[(M_{a|w_x} (x) 1) rho].
Assemblage teleportation_assemblage(const GeneralisedMeasurementSet& gset, const HermitianOperator& rho);

// Steering-style assemblage of a standard set (the classical-input special case).
Assemblage assemblage_of_standard(const StandardMeasurementSet& set, const HermitianOperator& rho);

// p(a,b|w_x,z_y) = tr[(N_a^{A'A} (x) N_b^{B B'})(w_x (x) rho (x) z_y)]; Bob's
// parent is stored ancilla-first and reordered internally. The Eq.-style
// reduced computation tr[(M_{a|w_x} (x) M_{b|z_y}) rho] is evaluated as a
// consistency check.
Behaviour buscemi_behaviour(const GeneralisedMeasurementSet& gset_a, const GeneralisedMeasurementSet& gset_b,
                            const HermitianOperator& rho);

// M_ab = tr_AB[(M_a^{VA} (x) M_b^{BV'})(1_V (x) rho^{AB} (x) 1_V')].
DistributedPovm distributed_povm(const Povm& ma, const Povm& mb, const HermitianOperator& rho);

// d = 2: the six Pauli eigenstates. d > 2: {|i><i|} plus real and imaginary
// two-level superpositions, d^2 states in total.
QuantumInputSet default_tomographic_inputs(int d);

} // namespace qres

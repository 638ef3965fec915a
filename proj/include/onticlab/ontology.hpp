#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "onticlab/scenario.hpp"

namespace onticlab {

using OnticSet = std::set<std::string>;

struct OnticSpace {
    std::vector<std::string> states;
    int size() const { return static_cast<int>(states.size()); }
    bool contains(const std::string& label) const;
};

// Distribution over ontic states. The support is exact: a state belongs to
// it iff its stored probability is > 0, with no floating threshold.
struct EpistemicState {
    std::map<std::string, double> distribution;
    OnticSet support() const;
};

// Stochastic kernel, one row per ontic state. The possibilistic view of a
// row is the exact support of its distribution.
struct TransitionMap {
    std::map<std::string, std::map<std::string, double>> kernel;
    OnticSet successors(const std::string& label) const;
};

// xi(lambda, outcome); rows sum to one over outcomes.
struct ResponseFunction {
    std::map<std::string, std::map<std::string, double>> xi;
    OnticSet possible_outcomes(const std::string& label) const;
};

// A finite ontological model, optionally bound to a quantum scenario.
// Checks that compare against quantum predictions require the binding.
// Immutable after validate(); all predicates below are pure.
struct OntologicalModel {
    OnticSpace space;
    std::map<std::string, EpistemicState> preparations;
    std::map<std::string, TransitionMap> transitions;   // keyed by member id
    std::map<std::string, ResponseFunction> responses;  // keyed by measurement name
    std::shared_ptr<const QuantumScenario> scenario;    // may be null

    void validate(const Tolerances& tol = default_tolerances()) const;
    const EpistemicState& preparation(const std::string& name) const;
    const TransitionMap& transition(const std::string& member_id) const;
    const ResponseFunction& response(const std::string& measurement) const;
};

// Ontic states in the preparation's support with nonzero probability of
// producing `outcome` after the member transition. Exact set arithmetic.
OnticSet outcome_support(const OntologicalModel& m, const std::string& prep,
                         const std::string& member_id, const std::string& measurement,
                         const std::string& outcome);

OnticSet supports_overlap(const OntologicalModel& m, const std::string& prep_a,
                          const std::string& prep_b);

struct Classification {
    bool psi_epistemic = false;
    // Witness pair and its overlap; empty for psi-ontic models.
    std::string prep_a;
    std::string prep_b;
    OnticSet overlap;
};

// PsiEpistemic iff some pair of distinct preparations has overlapping
// support; the witness is the first such pair in name order.
Classification classify_model(const OntologicalModel& m);

struct CompletenessViolation {
    std::string prep;
    std::string member;
    std::string outcome;
    // True: the model deems possible an outcome quantum theory forbids.
    // False: the model forbids an outcome quantum theory allows.
    bool model_allows_quantum_forbids = false;
};

struct CompletenessReport {
    bool ok = true;
    std::vector<CompletenessViolation> violations;
};

// For every (prep, member, outcome) declared by the model: quantum
// probability zero iff the outcome support is empty. Requires a bound
// scenario.
CompletenessReport check_possibilistic_completeness(const OntologicalModel& m,
                                                    const Tolerances& tol = default_tolerances());

struct IndifferenceResult {
    bool ok = true;
    std::string moved_state;  // first ontic state moved, when !ok
};

// The member's unitary must leave the preparation's quantum state unchanged
// up to global phase (else PreconditionNotApplicable). Ok iff the kernel is
// the pointwise identity on the support; with set_preserving_only the weaker
// reading (kernel maps the support onto itself) is checked instead.
IndifferenceResult check_ontic_indifference(const OntologicalModel& m,
                                            const std::string& member_id,
                                            const std::string& prep,
                                            bool set_preserving_only = false,
                                            const Tolerances& tol = default_tolerances());

// Label of a product ontic state.
std::string product_label(const std::string& a, const std::string& b);

// Cartesian-product model: preparations pair up as "a*b" with product
// supports and distributions; transitions and responses compose
// independently for ids/names present in both factors. The result is
// unbound (no scenario).
OntologicalModel product_embed(const OntologicalModel& a, const OntologicalModel& b);

nlohmann::json model_to_json(const OntologicalModel& m);

// Accepts the on-disk schema; when a scenario is given the model is bound
// and names are resolved against it. A model file may also carry an inline
// "scenario" object, used when no explicit scenario is supplied.
OntologicalModel model_from_json(const nlohmann::json& j,
                                 std::shared_ptr<const QuantumScenario> scenario = nullptr,
                                 const Tolerances& tol = default_tolerances());
OntologicalModel load_model(const std::string& filename,
                            std::shared_ptr<const QuantumScenario> scenario = nullptr,
                            const Tolerances& tol = default_tolerances());

} // namespace onticlab

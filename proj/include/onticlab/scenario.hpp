#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "onticlab/numerics.hpp"

namespace onticlab {

// A projective measurement: one basis vector per outcome, labels carried
// alongside in the same order.
struct Measurement {
    std::vector<std::string> outcomes;
    std::vector<CVector> basis;
};

// A finite-dimensional quantum scenario: named preparations, families of
// unitary members (the "contexts"), and maximal projective measurements.
// Immutable after validate(); safe for shared concurrent reads.
//
// Member ids are unique across families and outcome labels unique across
// measurements, so (preparation, member, outcome) triples are unambiguous.
struct QuantumScenario {
    int dim = 0;
    std::map<std::string, CVector> preparations;
    std::map<std::string, std::map<std::string, CMatrix>> families;
    std::map<std::string, Measurement> measurements;

    // Throws with a path into the offending field on the first violation.
    void validate(const Tolerances& tol = default_tolerances()) const;

    const CVector& preparation(const std::string& name) const;
    const CMatrix& member(const std::string& member_id) const;
    const Measurement& measurement(const std::string& name) const;
    // Measurement owning the given outcome label.
    const std::string& measurement_of_outcome(const std::string& outcome) const;

    std::vector<std::string> member_ids() const;
    bool has_member(const std::string& member_id) const;
};

struct ZeroEntry {
    std::string prep;
    std::string member;
    std::string outcome;
    auto operator<=>(const ZeroEntry&) const = default;
};

// The possibilistic content of a scenario: all (prep, member, outcome)
// triples whose quantum probability is zero within tol.zero.
struct ZeroStructure {
    std::set<ZeroEntry> entries;
    bool contains(const std::string& prep, const std::string& member,
                  const std::string& outcome) const {
        return entries.count(ZeroEntry{prep, member, outcome}) > 0;
    }
};

// Outcome probabilities of preparing `prep`, applying the member unitary and
// measuring. Output order follows the measurement's outcome order.
std::vector<std::pair<std::string, double>> evaluate(const QuantumScenario& s,
                                                     const std::string& prep,
                                                     const std::string& member_id,
                                                     const std::string& measurement,
                                                     const Tolerances& tol = default_tolerances());

// True iff the triple's probability is <= tol.zero. Probabilities strictly
// inside (tol.zero, tol.zero_guard) raise AmbiguousZero.
bool is_quantum_zero(const QuantumScenario& s, const std::string& prep,
                     const std::string& member_id, const std::string& outcome,
                     const Tolerances& tol = default_tolerances());

// Full zero structure over all preparations, members and outcomes.
ZeroStructure zero_structure(const QuantumScenario& s,
                             const Tolerances& tol = default_tolerances());

nlohmann::json scenario_to_json(const QuantumScenario& s);
QuantumScenario scenario_from_json(const nlohmann::json& j,
                                   const Tolerances& tol = default_tolerances());
QuantumScenario load_scenario(const std::string& filename,
                              const Tolerances& tol = default_tolerances());

} // namespace onticlab

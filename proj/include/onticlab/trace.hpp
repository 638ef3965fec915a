#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "onticlab/construction.hpp"
#include "onticlab/scenario.hpp"

namespace onticlab {

// --- set expressions -------------------------------------------------------
//
// Assertions about lambda-sets use a small grammar over named supports:
//
//   assertion := expr ('=' | '<=') expr
//   expr      := iexpr ('|' iexpr)*            union
//   iexpr     := primary ('&' primary)*        intersection
//   primary   := atom | 'empty' | '(' expr ')'
//   atom      := 'L(' prep ')'                 ontic support of a preparation
//              | 'S(' prep ';' outcome ')'     context-free outcome support
//              | 'S(' prep ';' outcome '|' member ')'   under a given member
//
// Preparation, outcome and member names come from the scenario; they may
// not contain ';', '|', '(' or ')'.

struct SetAtom {
    std::string prep;
    std::string outcome;  // empty for L(...)
    std::string member;   // empty for L(...) and context-free S(...)
    bool is_support() const { return outcome.empty(); }
    bool contexted() const { return !member.empty(); }
    std::string str() const;
    auto operator<=>(const SetAtom&) const = default;
};

struct SetExpr {
    enum class Kind { Atom, Empty, Union, Intersect };
    Kind kind = Kind::Empty;
    SetAtom atom;                // Kind::Atom
    std::vector<SetExpr> kids;   // Kind::Union / Kind::Intersect
    std::string str() const;
};

enum class Relation { Equal, Subset };

struct SetAssertion {
    SetExpr lhs;
    Relation rel = Relation::Equal;
    SetExpr rhs;
    std::string str() const;
};

SetAssertion parse_assertion(const std::string& text);

// Does `conclusion` follow from `premises` plus the definitional
// containments S(p;o[|m]) <= L(p)? Decided pointwise by exhaustive boolean
// assignment over the atoms involved (guarded at 2^22 assignments).
bool set_entails(const std::vector<SetAssertion>& premises, const SetAssertion& conclusion);

// --- proof traces -----------------------------------------------------------

enum class Rule { OnticIndifference, PossibilisticCompleteness, OutcomeCoverage, SetAlgebra, QuantumZero };

std::string rule_name(Rule r);
Rule rule_from_name(const std::string& name);

struct TraceStep {
    SetAssertion assertion;
    Rule rule = Rule::SetAlgebra;
    std::vector<int> refs;  // indices of earlier steps
};

// Conjugated-protocol metadata for the restricted variant: member_map sends
// each pipeline member id to the id of its intermediate-time transformation,
// with w_member the change-of-frame unitary and zero_prep the distinguished
// state it maps phi onto.
struct RestrictedContext {
    std::string zero_prep;
    std::string w_member;
    std::map<std::string, std::string> member_map;
};

struct ProofTrace {
    std::string phi;
    std::string psi;
    std::string measurement;
    std::vector<std::string> members;
    std::optional<RestrictedContext> restricted;
    std::vector<TraceStep> steps;
    SetAssertion conclusion;  // L(phi) & L(psi) = empty
};

// Designates the players of a derivation within a scenario.
struct NogoInstance {
    std::string phi;
    std::string psi;
    std::string measurement;
    std::vector<std::string> members;
    std::optional<RestrictedContext> restricted;
};

NogoInstance mzi_instance();
NogoInstance instance_from_construction(const NogoConstruction& c);

// Scenario and instance for the conjugated protocol: preparations phi, psi
// and zero_state, families "U" (pipeline members m=k), "Ut" (intermediate
// members ut=k) and "Wf" (the frame change W).
std::pair<QuantumScenario, NogoInstance> restricted_instance(
    const NogoConstruction& c, const CVector& zero_state,
    const Tolerances& tol = default_tolerances());

// Derives the non-overlap trace: per-outcome either-or zeros, collapse of
// the member index, outcome coverage, and the distributing intersection.
// Throws ConditionNotMet when some outcome admits neither zero branch.
ProofTrace derive_nonoverlap(const QuantumScenario& s, const NogoInstance& instance,
                             const Tolerances& tol = default_tolerances());

struct TraceCheckResult {
    bool ok = true;
    // steps.size() designates the conclusion record
    int first_invalid_step = -1;
    std::string reason;
};

// Independent verifier: validates every step against its justification rule
// using only prior steps and the scenario, then matches the conclusion.
TraceCheckResult check_trace(const ProofTrace& trace, const QuantumScenario& s,
                             const Tolerances& tol = default_tolerances());

nlohmann::json trace_to_json(const ProofTrace& t);
ProofTrace trace_from_json(const nlohmann::json& j);

} // namespace onticlab

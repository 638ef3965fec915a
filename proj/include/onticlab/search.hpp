#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "onticlab/ontology.hpp"
#include "onticlab/scenario.hpp"

namespace onticlab {

enum class Axiom { OnticIndifference, PossibilisticCompleteness, OutcomeCoverage, ProductSeparability };

std::string axiom_name(Axiom a);
Axiom axiom_from_name(const std::string& name);

// Factored search space for ProductSeparability: ontic states are pairs
// over two factor spaces and every preparation's support is forced to be
// the cartesian product of per-factor supports.
struct ProductSpec {
    int size_a = 0;
    int size_b = 0;  // K must equal size_a * size_b
    // preparation name -> (factor-A key, factor-B key); preparations sharing
    // a factor key share that factor's support
    std::map<std::string, std::pair<std::string, std::string>> prep_factors;
};

// Exhaustive possibilistic feasibility problem: is there a model over K
// ontic states that matches the scenario's zero structure (possibilistic
// completeness), satisfies the listed axioms, and (optionally) overlaps
// the supports of phi and psi?
//
// Kernels are restricted to deterministic maps; for possibilistic claims a
// stochastic kernel is dominated by its support. This restriction is
// recorded in every refutation log.
struct FeasibilityProblem {
    std::shared_ptr<const QuantumScenario> scenario;
    std::string phi;
    std::string psi;
    std::string measurement;
    std::vector<std::string> members;
    std::set<Axiom> axioms;
    bool require_overlap = true;
    // weaker ontic-indifference reading: the kernel may permute the support
    bool set_preserving = false;
    int K = 4;
    long long budget = 10000000;
    std::optional<ProductSpec> product;
    int threads = 1;
};

struct SearchStats {
    long long branches = 0;
    std::vector<std::string> pruning_lemmas;
    std::string caveat;
};

struct SearchResult {
    bool sat = false;
    std::optional<OntologicalModel> witness;  // bound to the problem scenario
    SearchStats stats;
};

// Backtracking search over per-state support membership, per-state possible
// outcome sets and deterministic transition maps, with symmetry breaking by
// canonical column ordering. Throws BudgetExceeded past problem.budget
// explored branches.
SearchResult feasibility_search(const FeasibilityProblem& problem,
                                const Tolerances& tol = default_tolerances());

} // namespace onticlab

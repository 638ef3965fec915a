#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "onticlab/scenario.hpp"

namespace onticlab {

enum class Disjunct { First, Second, Both };

struct ConditionEntry {
    int n = 0;
    Disjunct disjunct = Disjunct::First;
    double a0_overlap = 0.0;  // |<d_n|a0>|
    double cn_overlap = 0.0;  // |<d_n|c[n]>|
};

// Per-index record of which branch of the either-or measurement condition
// holds. `note` carries feasibility metadata (see feasible_overlap_bound).
struct ConditionCertificate {
    std::vector<ConditionEntry> per_n;
    std::string note;
};

// The certified bundle behind the no-go derivation: a pair of states
// phi = a0 and psi = alpha*a0 + beta*a1, a family of unitaries U[m] fixing
// a0, and a measurement basis d_n such that for every n either a0 or
// c[n] = U[n]psi is orthogonal to d_n.
//
// Everything is expressed in the d-basis (the standard basis of the working
// coordinates). For m = 0 and m = M+1..N the family repeats U[1].
struct NogoConstruction {
    double alpha = 0.0;
    double beta = 0.0;
    int N = 0;  // Hilbert dimension is N+1
    int M = 0;  // smallest integer with M * beta^2 >= 1
    // c[m] has d_0 component gamma; b[m] has d_0 component delta = gamma/beta.
    double gamma = 0.0;
    double delta = 0.0;
    CVector a0;
    CVector a1;
    CVector psi;
    std::vector<CVector> d_basis;
    std::vector<CVector> b;
    std::vector<CVector> b_bar;  // empty in the degenerate M == 1 case
    std::vector<CVector> c;
    std::vector<CMatrix> U;
    ConditionCertificate certificate;
};

// ceil(1/beta^2), with an exact-integer guard: values within 1e-12 of an
// integer round to it.
int smallest_m(double beta);

// Builds and certifies the bundle. Throws Infeasible (with the minimal
// feasible N) when smallest_m(beta) > N. The degenerate beta == 1 case
// (orthogonal pair, M == 1) uses identity unitaries and skips b_bar.
NogoConstruction build_construction(double alpha, double beta, int N,
                                    const Tolerances& tol = default_tolerances());

// Checks the either-or condition index by index; throws ConditionViolated
// (with both overlap magnitudes) if some n satisfies neither branch.
ConditionCertificate verify_condition(const NogoConstruction& c,
                                      const Tolerances& tol = default_tolerances());

// Re-checks every bundle invariant (norms, unitarity, fixed columns,
// orthogonality, c = alpha*a0 + beta*b, certificate). For re-verifying
// deserialized bundles without rebuilding.
void verify_construction(const NogoConstruction& c,
                         const Tolerances& tol = default_tolerances());

// Supremum of alpha^2 = |<phi|psi>|^2 for which the construction is feasible
// at dimension N+1: (N-1)/N, from the M <= N constraint.
double feasible_overlap_bound(int N);

// The conjugated protocol: W maps phi to zero_state, each u_tilde[m] is
// W U[m] W^dagger, and the composite W^dagger u_tilde[m] W equals U[m].
// When U[m] fixes phi, u_tilde[m] fixes zero_state.
struct RestrictedProtocol {
    CMatrix W;
    std::vector<CMatrix> u_tilde;
};

RestrictedProtocol build_restricted_protocol(const CVector& phi, const CVector& zero_state,
                                             const NogoConstruction& c,
                                             const Tolerances& tol = default_tolerances());

// Tensor scenario with an ancilla prepared in a fixed basis state.
// `ancilla_state_name` must parse as a basis index of the ancilla space;
// preparations are renamed "<prep>*<ancilla_state_name>".
QuantumScenario ancilla_scenario(const QuantumScenario& a, int ancilla_dim,
                                 const std::string& ancilla_state_name,
                                 const Tolerances& tol = default_tolerances());

// Scenario view of a bundle: preparations "phi"/"psi", family "U" with
// members "m=0".."m=N", measurement "D" with outcomes "D_0".."D_N".
QuantumScenario scenario_from_construction(const NogoConstruction& c,
                                           const Tolerances& tol = default_tolerances());

nlohmann::json construction_to_json(const NogoConstruction& c);
NogoConstruction construction_from_json(const nlohmann::json& j);

} // namespace onticlab

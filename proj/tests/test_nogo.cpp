#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "onticlab/interfero.hpp"
#include "onticlab/json_io.hpp"
#include "onticlab/search.hpp"
#include "onticlab/toymodels.hpp"
#include "onticlab/trace.hpp"

using namespace onticlab;

namespace {

std::shared_ptr<const QuantumScenario> balanced_scenario() {
    static auto s = std::make_shared<const QuantumScenario>(build_mzi(MziConfig::balanced()));
    return s;
}

NogoConstruction overlap_half_n2() { return build_construction(std::sqrt(0.5), std::sqrt(0.5), 2); }

std::set<Axiom> full_axioms() {
    return {Axiom::OnticIndifference, Axiom::PossibilisticCompleteness, Axiom::OutcomeCoverage};
}

FeasibilityProblem mzi_problem(int k) {
    FeasibilityProblem p;
    p.scenario = balanced_scenario();
    p.phi = "phi";
    p.psi = "psi";
    p.measurement = "detectors";
    p.members = {"phi=0", "phi=pi"};
    p.axioms = full_axioms();
    p.require_overlap = true;
    p.K = k;
    return p;
}

} // namespace

// --- expression grammar ------------------------------------------------------

TEST_CASE("assertion parser round trips") {
    for (const char* text :
         {"L(phi) & L(psi) = empty", "S(phi;B_1|phi=0) = S(phi;B_1)",
          "L(phi) = S(phi;B_1) | S(phi;B_2)", "S(phi;B_2|phi=0) & L(psi) = empty",
          "S(phi;B_1|phi=0) <= L(phi)", "(L(a) | L(b)) & L(c) = empty"}) {
        SetAssertion a = parse_assertion(text);
        SetAssertion again = parse_assertion(a.str());
        CHECK(a.str() == again.str());
    }
    CHECK_THROWS_AS(parse_assertion("L(phi)"), ParseError);
    CHECK_THROWS_AS(parse_assertion("L() = empty"), ParseError);
    CHECK_THROWS_AS(parse_assertion("S(phi) = empty"), ParseError);
    CHECK_THROWS_AS(parse_assertion("L(phi = empty"), ParseError);
    CHECK_THROWS_AS(parse_assertion("L(phi) = empty extra"), ParseError);
}

TEST_CASE("member ids containing '=' parse inside atoms") {
    SetAssertion a = parse_assertion("S(phi;B_1|phi=pi) = S(phi;B_1)");
    REQUIRE(a.lhs.kind == SetExpr::Kind::Atom);
    CHECK(a.lhs.atom.member == "phi=pi");
    CHECK(a.lhs.atom.outcome == "B_1");
}

TEST_CASE("set_entails: positive and negative cases") {
    auto P = [](const char* s) { return parse_assertion(s); };
    // distribution of intersection over a covering union
    CHECK(set_entails({P("L(phi) = S(phi;o1) | S(phi;o2)"), P("S(phi;o1) & L(psi) = empty"),
                       P("S(phi;o2) & L(psi) = empty")},
                      P("L(phi) & L(psi) = empty")));
    // dropping one premise breaks it
    CHECK_FALSE(set_entails({P("L(phi) = S(phi;o1) | S(phi;o2)"),
                             P("S(phi;o1) & L(psi) = empty")},
                            P("L(phi) & L(psi) = empty")));
    // rewriting through an equality
    CHECK(set_entails({P("S(phi;o|m) = S(phi;o)"), P("S(phi;o|m) = empty")},
                      P("S(phi;o) & L(psi) = empty")));
    // definitional containment is built in
    CHECK(set_entails({}, P("S(phi;o|m) <= L(phi)")));
    CHECK_FALSE(set_entails({}, P("L(phi) <= S(phi;o|m)")));
    // no unsound collapse across contexts
    CHECK_FALSE(set_entails({P("S(phi;o|m) = empty")}, P("S(phi;o|m2) = empty")));
}

// --- derivation + checking ---------------------------------------------------

TEST_CASE("balanced-pair trace derives and checks") {
    ProofTrace t = derive_nonoverlap(*balanced_scenario(), mzi_instance());
    TraceCheckResult r = check_trace(t, *balanced_scenario());
    if (!r.ok) MESSAGE("step " << r.first_invalid_step << ": " << r.reason);
    CHECK(r.ok);
    CHECK(t.conclusion.str() == "L(phi) & L(psi) = empty");
    CHECK(t.steps.size() >= 7);
}

TEST_CASE("construction trace derives and checks, branch record matches certificate") {
    NogoConstruction c = overlap_half_n2();
    QuantumScenario s = scenario_from_construction(c);
    ProofTrace t = derive_nonoverlap(s, instance_from_construction(c));
    TraceCheckResult r = check_trace(t, s);
    if (!r.ok) MESSAGE("step " << r.first_invalid_step << ": " << r.reason);
    CHECK(r.ok);

    // certificate branches must be realized by the trace's rules: a second
    // disjunct at n shows up as a completeness step in context m=n
    for (const auto& e : c.certificate.per_n) {
        if (e.disjunct == Disjunct::Second) {
            std::string want = "S(phi;D_" + std::to_string(e.n) + "|m=" + std::to_string(e.n) +
                               ") & L(psi) = empty";
            bool found = false;
            for (const auto& st : t.steps)
                if (st.rule == Rule::PossibilisticCompleteness && st.assertion.str() == want)
                    found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("restricted trace contains the transport steps and checks") {
    NogoConstruction c = overlap_half_n2();
    auto [s, inst] = restricted_instance(c, CVector::basis(3, 0));
    ProofTrace t = derive_nonoverlap(s, inst);
    TraceCheckResult r = check_trace(t, s);
    if (!r.ok) MESSAGE("step " << r.first_invalid_step << ": " << r.reason);
    CHECK(r.ok);
    CHECK(t.restricted.has_value());
    // the collapse at the distinguished zero state is spelled out
    bool zero_level = false;
    for (const auto& st : t.steps)
        if (st.rule == Rule::OnticIndifference && st.assertion.str().find("S(zero;") == 0)
            zero_level = true;
    CHECK(zero_level);
    CHECK(t.conclusion.str() == "L(phi) & L(psi) = empty");
}

TEST_CASE("restricted context is actually verified") {
    NogoConstruction c = overlap_half_n2();
    auto [s, inst] = restricted_instance(c, CVector::basis(3, 0));
    ProofTrace t = derive_nonoverlap(s, inst);
    // corrupt the intermediate family: the conjugation identity breaks
    QuantumScenario corrupt = s;
    corrupt.families["Ut"]["ut=1"] = CMatrix::identity(3);
    corrupt.validate();
    TraceCheckResult r = check_trace(t, corrupt);
    CHECK_FALSE(r.ok);
}

TEST_CASE("derive_nonoverlap demands the either-or premise") {
    // a scenario whose zero structure has no branch for outcome o1
    QuantumScenario s;
    s.dim = 2;
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    s.preparations["phi"] = CVector::basis(2, 0);
    s.preparations["psi"] = CVector{{inv_sqrt2, 0.0}, {inv_sqrt2, 0.0}};
    s.families["f"]["id"] = CMatrix::identity(2);
    Measurement m;
    m.outcomes = {"o0", "o1"};
    double c = std::cos(0.3), d = std::sin(0.3);
    m.basis = {CVector{{c, 0.0}, {d, 0.0}}, CVector{{-d, 0.0}, {c, 0.0}}};
    s.measurements["m"] = m;
    s.validate();
    NogoInstance inst;
    inst.phi = "phi";
    inst.psi = "psi";
    inst.measurement = "m";
    inst.members = {"id"};
    CHECK_THROWS_AS(derive_nonoverlap(s, inst), ConditionNotMet);
}

TEST_CASE("check_trace rejects specific corruptions") {
    ProofTrace t = derive_nonoverlap(*balanced_scenario(), mzi_instance());
    const QuantumScenario& s = *balanced_scenario();

    SUBCASE("swapped justification tag") {
        for (size_t i = 0; i < t.steps.size(); ++i) {
            if (t.steps[i].rule == Rule::OnticIndifference) {
                ProofTrace bad = t;
                bad.steps[i].rule = Rule::SetAlgebra;
                TraceCheckResult r = check_trace(bad, s);
                CHECK_FALSE(r.ok);
                CHECK(r.first_invalid_step == static_cast<int>(i));
                break;
            }
        }
    }
    SUBCASE("conclusion altered to a nonempty claim") {
        ProofTrace bad = t;
        bad.conclusion = parse_assertion("L(phi) & L(psi) = L(phi)");
        TraceCheckResult r = check_trace(bad, s);
        CHECK_FALSE(r.ok);
        CHECK(r.first_invalid_step == static_cast<int>(bad.steps.size()));
    }
    SUBCASE("unknown name") {
        ProofTrace bad = t;
        bad.steps[0].assertion = parse_assertion("S(ghost;B_1|phi=0) <= L(ghost)");
        CHECK_FALSE(check_trace(bad, s).ok);
    }
    SUBCASE("dropped reference") {
        for (size_t i = 0; i < t.steps.size(); ++i) {
            if (t.steps[i].rule == Rule::SetAlgebra && !t.steps[i].refs.empty()) {
                ProofTrace bad = t;
                bad.steps[i].refs.clear();
                CHECK_FALSE(check_trace(bad, s).ok);
                break;
            }
        }
    }
    SUBCASE("forward reference") {
        ProofTrace bad = t;
        bad.steps.back().refs.push_back(static_cast<int>(bad.steps.size()) - 1);
        CHECK_FALSE(check_trace(bad, s).ok);
    }
}

TEST_CASE("derive + check round trips across random feasible constructions") {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> ua(0.15, 0.85);
    std::uniform_int_distribution<int> un(2, 7);
    for (int trial = 0; trial < 8; ++trial) {
        double alpha2;
        int n;
        do {
            alpha2 = ua(rng);
            n = un(rng);
        } while (smallest_m(std::sqrt(1.0 - alpha2)) > n);
        NogoConstruction c =
            build_construction(std::sqrt(alpha2), std::sqrt(1.0 - alpha2), n);
        QuantumScenario s = scenario_from_construction(c);
        ProofTrace t = derive_nonoverlap(s, instance_from_construction(c));
        TraceCheckResult r = check_trace(t, s);
        if (!r.ok)
            MESSAGE("alpha2=" << alpha2 << " N=" << n << " step " << r.first_invalid_step
                              << ": " << r.reason);
        CHECK(r.ok);

        auto [rs, ri] = restricted_instance(c, CVector::basis(n + 1, 0));
        CHECK(check_trace(derive_nonoverlap(rs, ri), rs).ok);
    }
}

TEST_CASE("checker accepts the contexted coverage and cross-member collapse forms") {
    // a stub trace whose steps are individually valid; the mismatching
    // conclusion pins the first failure to the conclusion record, proving
    // the steps themselves validated
    ProofTrace t;
    t.phi = "phi";
    t.psi = "psi";
    t.measurement = "detectors";
    t.members = {"phi=0", "phi=pi"};
    t.steps.push_back({parse_assertion("L(phi) = S(phi;B_1|phi=0) | S(phi;B_2|phi=0)"),
                       Rule::OutcomeCoverage,
                       {}});
    t.steps.push_back({parse_assertion("S(phi;B_1|phi=0) = S(phi;B_1|phi=pi)"),
                       Rule::OnticIndifference,
                       {}});
    t.conclusion = parse_assertion("L(phi) & L(psi) = empty");
    TraceCheckResult r = check_trace(t, *balanced_scenario());
    CHECK_FALSE(r.ok);
    CHECK(r.first_invalid_step == 2);  // both steps validated

    // the same forms are rejected when unlicensed
    ProofTrace bad = t;
    bad.steps[0].assertion = parse_assertion("L(phi) = S(phi;B_1|phi=0) | S(phi;B_2|phi=pi)");
    CHECK(check_trace(bad, *balanced_scenario()).first_invalid_step == 0);  // mixed contexts
    bad = t;
    bad.steps[1].assertion = parse_assertion("S(psi;B_1|phi=0) = S(psi;B_1|phi=pi)");
    CHECK(check_trace(bad, *balanced_scenario()).first_invalid_step == 1);  // psi not fixed
}

TEST_CASE("trace JSON round trip") {
    NogoConstruction c = overlap_half_n2();
    QuantumScenario s = scenario_from_construction(c);
    ProofTrace t = derive_nonoverlap(s, instance_from_construction(c));
    nlohmann::json j = trace_to_json(t);
    ProofTrace back = trace_from_json(j);
    CHECK(back.steps.size() == t.steps.size());
    CHECK(back.conclusion.str() == t.conclusion.str());
    CHECK(check_trace(back, s).ok);

    auto [rs, ri] = restricted_instance(c, CVector::basis(3, 0));
    ProofTrace rt = derive_nonoverlap(rs, ri);
    ProofTrace rback = trace_from_json(trace_to_json(rt));
    CHECK(rback.restricted.has_value());
    CHECK(check_trace(rback, rs).ok);
}

// --- feasibility search ------------------------------------------------------

TEST_CASE("balanced pair: full axioms with required overlap are unsatisfiable") {
    for (int k = 2; k <= 6; ++k) {
        SearchResult r = feasibility_search(mzi_problem(k));
        CHECK_FALSE(r.sat);
        CHECK(r.stats.branches > 0);
        CHECK_FALSE(r.stats.caveat.empty());
    }
}

TEST_CASE("dropping ontic indifference yields a validated epistemic witness") {
    FeasibilityProblem p = mzi_problem(4);
    p.axioms = {Axiom::PossibilisticCompleteness, Axiom::OutcomeCoverage};
    SearchResult r = feasibility_search(p);
    REQUIRE(r.sat);
    REQUIRE(r.witness.has_value());
    const OntologicalModel& w = *r.witness;
    CHECK(check_possibilistic_completeness(w).ok);
    Classification cls = classify_model(w);
    CHECK(cls.psi_epistemic);
    // the witness must violate pointwise indifference somewhere, like the
    // field-path model does
    bool violated = false;
    for (const auto& [member, tmap] : w.transitions)
        for (const auto& [prep, e] : w.preparations) {
            try {
                if (!check_ontic_indifference(w, member, prep).ok) violated = true;
            } catch (const PreconditionNotApplicable&) {
            }
        }
    CHECK(violated);
    // same possibilistic classification as the built-in field model
    CHECK(classify_model(field_path_mzi().model).psi_epistemic == cls.psi_epistemic);
}

TEST_CASE("without the overlap requirement a disjoint-support model exists") {
    FeasibilityProblem p = mzi_problem(3);
    p.require_overlap = false;
    SearchResult r = feasibility_search(p);
    REQUIRE(r.sat);
    const OntologicalModel& w = *r.witness;
    CHECK(check_possibilistic_completeness(w).ok);
    // with the indifference axiom in force, any found model is psi-ontic
    CHECK_FALSE(classify_model(w).psi_epistemic);
    // all axioms hold: pointwise indifference everywhere it applies
    for (const auto& [member, tmap] : w.transitions)
        for (const auto& [prep, e] : w.preparations) {
            try {
                IndifferenceResult res = check_ontic_indifference(w, member, prep);
                CHECK(res.ok);
            } catch (const PreconditionNotApplicable&) {
            }
        }
}

TEST_CASE("set-preserving indifference admits a small toy-style witness") {
    FeasibilityProblem p = mzi_problem(2);
    p.set_preserving = true;
    SearchResult r = feasibility_search(p);
    REQUIRE(r.sat);
    const OntologicalModel& w = *r.witness;
    CHECK(check_possibilistic_completeness(w).ok);
    CHECK(classify_model(w).psi_epistemic);
    // pointwise reading is violated, set-preserving reading holds
    bool pointwise_violated = false;
    for (const auto& [member, tmap] : w.transitions)
        for (const auto& [prep, e] : w.preparations) {
            try {
                if (!check_ontic_indifference(w, member, prep, false).ok) {
                    pointwise_violated = true;
                    CHECK(check_ontic_indifference(w, member, prep, true).ok);
                }
            } catch (const PreconditionNotApplicable&) {
            }
        }
    CHECK(pointwise_violated);
}

TEST_CASE("construction instance is unsatisfiable with full axioms") {
    NogoConstruction c = overlap_half_n2();
    auto scenario = std::make_shared<const QuantumScenario>(scenario_from_construction(c));
    FeasibilityProblem p;
    p.scenario = scenario;
    p.phi = "phi";
    p.psi = "psi";
    p.measurement = "D";
    p.members = {"m=0", "m=1", "m=2"};
    p.axioms = full_axioms();
    p.K = 4;
    SearchResult r = feasibility_search(p);
    CHECK_FALSE(r.sat);

    p.axioms = {Axiom::PossibilisticCompleteness, Axiom::OutcomeCoverage};
    SearchResult sat = feasibility_search(p);
    CHECK(sat.sat);
    CHECK(check_possibilistic_completeness(*sat.witness).ok);
}

TEST_CASE("monotonicity: adding axioms keeps Unsat, removing overlap gives Sat") {
    FeasibilityProblem base = mzi_problem(4);
    base.axioms = {Axiom::PossibilisticCompleteness, Axiom::OutcomeCoverage,
                   Axiom::OnticIndifference};
    CHECK_FALSE(feasibility_search(base).sat);
    // removing the overlap requirement flips any problem to Sat
    FeasibilityProblem relaxed = base;
    relaxed.require_overlap = false;
    CHECK(feasibility_search(relaxed).sat);
}

TEST_CASE("budget exhaustion raises with partial statistics") {
    FeasibilityProblem p = mzi_problem(6);
    p.axioms = {Axiom::PossibilisticCompleteness, Axiom::OutcomeCoverage};
    p.budget = 5;
    try {
        feasibility_search(p);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.branches_explored >= 5);
    }
}

TEST_CASE("parallel search agrees with the serial verdict") {
    FeasibilityProblem p = mzi_problem(5);
    p.threads = 4;
    CHECK_FALSE(feasibility_search(p).sat);
    p.axioms = {Axiom::PossibilisticCompleteness, Axiom::OutcomeCoverage};
    CHECK(feasibility_search(p).sat);
}

TEST_CASE("product separability constrains supports to factorized patterns") {
    // ancilla-extended pair: factorized supports, overlap required, no
    // indifference axiom: satisfiable with a factorized witness
    auto base = balanced_scenario();
    QuantumScenario prod_s = ancilla_scenario(*base, 2, "1");
    auto prod = std::make_shared<const QuantumScenario>(prod_s);
    FeasibilityProblem p;
    p.scenario = prod;
    p.phi = "phi*1";
    p.psi = "psi*1";
    p.measurement = "detectors";
    p.members = {"phi=0", "phi=pi"};
    p.axioms = {Axiom::PossibilisticCompleteness, Axiom::OutcomeCoverage,
                Axiom::ProductSeparability};
    ProductSpec spec;
    spec.size_a = 2;
    spec.size_b = 2;
    spec.prep_factors["phi*1"] = {"phiA", "oneB"};
    spec.prep_factors["psi*1"] = {"psiA", "oneB"};
    p.product = spec;
    p.K = 4;
    SearchResult r = feasibility_search(p, Tolerances{});
    REQUIRE(r.sat);
    // factorization: since both preparations share the B factor, their
    // supports are A-support x B-support with a common B side
    const OntologicalModel& w = *r.witness;
    auto split = [&](const std::string& label) {
        int idx = std::stoi(label.substr(1));
        return std::pair<int, int>{idx / 2, idx % 2};
    };
    std::set<int> a_phi, b_phi, a_psi, b_psi;
    for (const auto& l : w.preparation("phi*1").support()) {
        auto [i, j] = split(l);
        a_phi.insert(i);
        b_phi.insert(j);
    }
    for (const auto& l : w.preparation("psi*1").support()) {
        auto [i, j] = split(l);
        a_psi.insert(i);
        b_psi.insert(j);
    }
    CHECK(b_phi == b_psi);
    CHECK(w.preparation("phi*1").support().size() == a_phi.size() * b_phi.size());
    CHECK(w.preparation("psi*1").support().size() == a_psi.size() * b_psi.size());

    // a missing product spec is an error when the axiom is requested
    FeasibilityProblem bad = p;
    bad.product.reset();
    CHECK_THROWS_AS(feasibility_search(bad, Tolerances{}), Error);
}

TEST_CASE("derivation and search never disagree on shared instances") {
    // wherever the trace checks, the full-axiom overlap search must refuse
    struct Case {
        std::shared_ptr<const QuantumScenario> scenario;
        NogoInstance instance;
    };
    std::vector<Case> cases;
    cases.push_back({balanced_scenario(), mzi_instance()});
    cases.push_back({std::make_shared<const QuantumScenario>(build_mzi(MziConfig::tapped(0.2))),
                     mzi_instance()});
    NogoConstruction c = overlap_half_n2();
    cases.push_back({std::make_shared<const QuantumScenario>(scenario_from_construction(c)),
                     instance_from_construction(c)});
    for (const auto& cs : cases) {
        ProofTrace t = derive_nonoverlap(*cs.scenario, cs.instance);
        REQUIRE(check_trace(t, *cs.scenario).ok);
        for (int k = 2; k <= 4; ++k) {
            FeasibilityProblem p;
            p.scenario = cs.scenario;
            p.phi = cs.instance.phi;
            p.psi = cs.instance.psi;
            p.measurement = cs.instance.measurement;
            p.members = cs.instance.members;
            p.axioms = full_axioms();
            p.K = k;
            CHECK_FALSE(feasibility_search(p).sat);
        }
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "onticlab/interfero.hpp"
#include "onticlab/json_io.hpp"
#include "onticlab/ontology.hpp"

using namespace onticlab;

namespace {

// Two ontic states mirroring the balanced-interferometer zero table for psi
// only; phi gets its own pair of states so the model is psi-ontic.
OntologicalModel ray_model() {
    OntologicalModel m;
    m.scenario = std::make_shared<const QuantumScenario>(build_mzi(MziConfig::balanced()));
    m.space.states = {"p0", "s+", "s-", "junk"};
    m.preparations["phi"].distribution = {{"p0", 1.0}};
    m.preparations["psi"].distribution = {{"s+", 1.0}};
    for (const auto& l : m.space.states) m.transitions["phi=0"].kernel[l] = {{l, 1.0}};
    m.transitions["phi=pi"].kernel = {{"p0", {{"p0", 1.0}}},
                                      {"s+", {{"s-", 1.0}}},
                                      {"s-", {{"s+", 1.0}}},
                                      {"junk", {{"junk", 1.0}}}};
    m.responses["detectors"].xi = {{"p0", {{"B_1", 0.5}, {"B_2", 0.5}}},
                                   {"s+", {{"B_1", 1.0}}},
                                   {"s-", {{"B_2", 1.0}}},
                                   {"junk", {{"B_1", 1.0}}}};
    m.validate();
    return m;
}

} // namespace

TEST_CASE("outcome_support basics") {
    OntologicalModel m = ray_model();
    CHECK(outcome_support(m, "psi", "phi=0", "detectors", "B_1") == OnticSet{"s+"});
    CHECK(outcome_support(m, "psi", "phi=0", "detectors", "B_2").empty());
    CHECK(outcome_support(m, "psi", "phi=pi", "detectors", "B_2") == OnticSet{"s+"});
    CHECK(outcome_support(m, "phi", "phi=0", "detectors", "B_1") == OnticSet{"p0"});
    CHECK_THROWS_AS(outcome_support(m, "nope", "phi=0", "detectors", "B_1"), UnknownName);
}

TEST_CASE("outcome_support with an all-zero response column is empty") {
    OntologicalModel m = ray_model();
    // no ontic state responds to a label absent from every row
    CHECK(outcome_support(m, "psi", "phi=0", "detectors", "B_0").empty());
    CHECK(outcome_support(m, "phi", "phi=pi", "detectors", "B_0").empty());
}

TEST_CASE("outcome supports partition the preparation support") {
    OntologicalModel m = ray_model();
    for (const auto& [prep, e] : m.preparations) {
        for (const auto& member : {"phi=0", "phi=pi"}) {
            OnticSet u;
            for (const auto& o : {"B_1", "B_2"}) {
                OnticSet s = outcome_support(m, prep, member, "detectors", o);
                for (const auto& l : s) {
                    CHECK(e.support().count(l));
                    u.insert(l);
                }
            }
            CHECK(u == e.support());
        }
    }
}

TEST_CASE("supports_overlap is symmetric and idempotent") {
    OntologicalModel m = ray_model();
    CHECK(supports_overlap(m, "phi", "psi").empty());
    CHECK(supports_overlap(m, "psi", "phi").empty());
    CHECK(supports_overlap(m, "psi", "psi") == m.preparation("psi").support());
}

TEST_CASE("classify_model") {
    OntologicalModel m = ray_model();
    CHECK_FALSE(classify_model(m).psi_epistemic);

    m.preparations["psi"].distribution = {{"p0", 0.5}, {"s+", 0.5}};
    m.validate();
    Classification c = classify_model(m);
    CHECK(c.psi_epistemic);
    CHECK(c.overlap == OnticSet{"p0"});
    // exhaustive cross-check of the classification invariant
    bool any = false;
    for (auto it = m.preparations.begin(); it != m.preparations.end(); ++it)
        for (auto jt = std::next(it); jt != m.preparations.end(); ++jt)
            if (!supports_overlap(m, it->first, jt->first).empty()) any = true;
    CHECK(any == c.psi_epistemic);
}

TEST_CASE("possibilistic completeness of the ray model") {
    OntologicalModel m = ray_model();
    CompletenessReport r = check_possibilistic_completeness(m);
    CHECK(r.ok);
}

TEST_CASE("completeness over an empty declared fragment is vacuously ok") {
    OntologicalModel m;
    m.scenario = std::make_shared<const QuantumScenario>(build_mzi(MziConfig::balanced()));
    m.space.states = {"x"};
    m.validate();
    CHECK(check_possibilistic_completeness(m).ok);
}

TEST_CASE("completeness violations carry a direction") {
    OntologicalModel m = ray_model();
    // model allows B_2 from psi support at phi=0: quantum forbids it
    m.responses["detectors"].xi["s+"] = {{"B_1", 0.5}, {"B_2", 0.5}};
    m.validate();
    CompletenessReport r = check_possibilistic_completeness(m);
    REQUIRE_FALSE(r.ok);
    bool found = false;
    for (const auto& v : r.violations)
        if (v.prep == "psi" && v.member == "phi=0" && v.outcome == "B_2")
            found = v.model_allows_quantum_forbids;
    CHECK(found);

    OntologicalModel m2 = ray_model();
    // model forbids B_1 from phi support: quantum allows it
    m2.responses["detectors"].xi["p0"] = {{"B_2", 1.0}};
    m2.validate();
    r = check_possibilistic_completeness(m2);
    REQUIRE_FALSE(r.ok);
    found = false;
    for (const auto& v : r.violations)
        if (v.prep == "phi" && v.outcome == "B_1" && !v.model_allows_quantum_forbids) found = true;
    CHECK(found);
}

TEST_CASE("ontic indifference checks") {
    OntologicalModel m = ray_model();
    // identity member fixes every quantum state: pointwise identity kernel
    CHECK(check_ontic_indifference(m, "phi=0", "psi").ok);
    CHECK(check_ontic_indifference(m, "phi=0", "phi").ok);
    // the pi shifter fixes phi = a_0 and its kernel fixes p0
    CHECK(check_ontic_indifference(m, "phi=pi", "phi").ok);
    // but it does not fix psi quantum-side: precondition fails
    CHECK_THROWS_AS(check_ontic_indifference(m, "phi=pi", "psi"), PreconditionNotApplicable);

    // a kernel moving a support state violates the pointwise reading
    OntologicalModel m2 = ray_model();
    m2.transitions["phi=pi"].kernel["p0"] = {{"junk", 1.0}};
    m2.validate();
    IndifferenceResult r = check_ontic_indifference(m2, "phi=pi", "phi");
    CHECK_FALSE(r.ok);
    CHECK(r.moved_state == "p0");
}

TEST_CASE("set-preserving reading accepts permutations of the support") {
    OntologicalModel m = ray_model();
    m.preparations["phi"].distribution = {{"p0", 0.5}, {"junk", 0.5}};
    m.transitions["phi=pi"].kernel["p0"] = {{"junk", 1.0}};
    m.transitions["phi=pi"].kernel["junk"] = {{"p0", 1.0}};
    m.validate();
    CHECK_FALSE(check_ontic_indifference(m, "phi=pi", "phi").ok);
    CHECK(check_ontic_indifference(m, "phi=pi", "phi", true).ok);

    // escaping the support fails both readings
    m.transitions["phi=pi"].kernel["junk"] = {{"s+", 1.0}};
    m.validate();
    CHECK_FALSE(check_ontic_indifference(m, "phi=pi", "phi", true).ok);
}

TEST_CASE("global phase counts as leaving the state unchanged") {
    OntologicalModel m = ray_model();
    auto scenario = std::make_shared<QuantumScenario>(*m.scenario);
    CMatrix minus_eye = CMatrix::identity(2);
    minus_eye(0, 0) = Complex{-1.0, 0.0};
    minus_eye(1, 1) = Complex{-1.0, 0.0};
    scenario->families["phase"]["global"] = minus_eye;
    scenario->validate();
    m.scenario = scenario;
    for (const auto& l : m.space.states) m.transitions["global"].kernel[l] = {{l, 1.0}};
    m.validate();
    CHECK(check_ontic_indifference(m, "global", "psi").ok);
}

TEST_CASE("product embed sizes and supports") {
    OntologicalModel a;
    a.space.states = {"a1", "a2"};
    a.preparations["x"].distribution = {{"a1", 0.5}, {"a2", 0.5}};
    a.preparations["y"].distribution = {{"a2", 1.0}};
    for (const auto& l : a.space.states) a.transitions["t"].kernel[l] = {{l, 1.0}};
    a.responses["m"].xi = {{"a1", {{"o", 1.0}}}, {"a2", {{"o", 1.0}}}};
    a.validate();

    OntologicalModel b;
    b.space.states = {"b1", "b2", "b3"};
    b.preparations["one"].distribution = {{"b1", 1.0}};
    for (const auto& l : b.space.states) b.transitions["t"].kernel[l] = {{l, 1.0}};
    b.responses["m"].xi = {{"b1", {{"o", 1.0}}}, {"b2", {{"o", 1.0}}}, {"b3", {{"o", 1.0}}}};
    b.validate();

    OntologicalModel p = product_embed(a, b);
    p.validate();
    CHECK(p.space.size() == 6);
    CHECK(p.preparation("x*one").support() ==
          OnticSet{product_label("a1", "b1"), product_label("a2", "b1")});

    // projection of the product support onto factor A recovers the A support
    OnticSet proj;
    for (const auto& l : p.preparation("x*one").support())
        proj.insert(l.substr(1, l.find(',') - 1));
    CHECK(proj == a.preparation("x").support());

    // transitions compose independently
    CHECK(p.transition("t").successors(product_label("a1", "b2")) ==
          OnticSet{product_label("a1", "b2")});
}

TEST_CASE("disjointness transfer on an explicit 2x3 product") {
    OntologicalModel a;
    a.space.states = {"a1", "a2"};
    a.preparations["phiA"].distribution = {{"a1", 1.0}};
    a.preparations["psiA"].distribution = {{"a2", 1.0}};
    a.validate();
    OntologicalModel b;
    b.space.states = {"b1", "b2", "b3"};
    b.preparations["one"].distribution = {{"b1", 0.5}, {"b2", 0.5}};
    b.validate();

    OntologicalModel p = product_embed(a, b);
    // disjoint product supports + the product factorization force disjoint
    // factor-A supports: (X×B) ∩ (Y×B) = (X∩Y)×B, exactly
    OnticSet sx = p.preparation("phiA*one").support();
    OnticSet sy = p.preparation("psiA*one").support();
    OnticSet inter;
    std::set_intersection(sx.begin(), sx.end(), sy.begin(), sy.end(),
                          std::inserter(inter, inter.begin()));
    CHECK(inter.empty());
    OnticSet factor_inter;
    OnticSet fx = a.preparation("phiA").support();
    OnticSet fy = a.preparation("psiA").support();
    std::set_intersection(fx.begin(), fx.end(), fy.begin(), fy.end(),
                          std::inserter(factor_inter, factor_inter.begin()));
    CHECK(factor_inter.empty());

    // negative control: overlapping factor supports produce overlapping products
    OntologicalModel a2 = a;
    a2.preparations["phiA"].distribution = {{"a1", 0.5}, {"a2", 0.5}};
    a2.validate();
    OntologicalModel p2 = product_embed(a2, b);
    OnticSet sx2 = p2.preparation("phiA*one").support();
    OnticSet sy2 = p2.preparation("psiA*one").support();
    OnticSet inter2;
    std::set_intersection(sx2.begin(), sx2.end(), sy2.begin(), sy2.end(),
                          std::inserter(inter2, inter2.begin()));
    CHECK_FALSE(inter2.empty());
}

TEST_CASE("model JSON round trip") {
    OntologicalModel m = ray_model();
    nlohmann::json j = model_to_json(m);
    OntologicalModel back = model_from_json(j);
    CHECK(back.scenario != nullptr);  // inline scenario restored
    CHECK(back.space.states == m.space.states);
    CHECK(back.preparation("psi").support() == m.preparation("psi").support());
    CHECK(check_possibilistic_completeness(back).ok);

    // spec-shaped file without the scenario key loads unbound
    j.erase("scenario");
    OntologicalModel unbound = model_from_json(j);
    CHECK(unbound.scenario == nullptr);
    CHECK_THROWS_AS(check_possibilistic_completeness(unbound), Error);
}

TEST_CASE("model validation rejects malformed input") {
    OntologicalModel m = ray_model();
    m.preparations["phi"].distribution = {{"p0", 0.6}};
    CHECK_THROWS_AS(m.validate(), Error);

    OntologicalModel m2 = ray_model();
    m2.preparations["phi"].distribution = {{"ghost", 1.0}};
    CHECK_THROWS_AS(m2.validate(), UnknownName);

    OntologicalModel m3 = ray_model();
    m3.responses["detectors"].xi["p0"] = {{"B_1", 0.25}, {"B_2", 0.25}};
    CHECK_THROWS_AS(m3.validate(), Error);

    OntologicalModel m4 = ray_model();
    m4.preparations["ghost_prep"].distribution = {{"p0", 1.0}};
    CHECK_THROWS_AS(m4.validate(), UnknownName);
}

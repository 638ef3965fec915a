#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "onticlab/interfero.hpp"
#include "onticlab/json_io.hpp"

using namespace onticlab;

namespace {

double prob_of(const QuantumScenario& s, const std::string& prep, const std::string& member,
               const std::string& outcome) {
    for (const auto& [o, p] : evaluate(s, prep, member, "detectors"))
        if (o == outcome) return p;
    throw UnknownName(outcome);
}

} // namespace

TEST_CASE("balanced layout: bright and dark ports") {
    QuantumScenario s = build_mzi(MziConfig::balanced());
    CHECK(std::abs(prob_of(s, "psi", "phi=0", "B_1") - 1.0) <= 1e-12);
    CHECK(prob_of(s, "psi", "phi=0", "B_2") <= 1e-12);
    CHECK(std::abs(prob_of(s, "psi", "phi=pi", "B_2") - 1.0) <= 1e-12);
    CHECK(prob_of(s, "psi", "phi=pi", "B_1") <= 1e-12);
    // the a_0 source splits evenly under both settings
    for (const auto& m : {"phi=0", "phi=pi"}) {
        CHECK(prob_of(s, "phi", m, "B_1") == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(prob_of(s, "phi", m, "B_2") == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("tapped layout: equalization and dark detectors") {
    MziConfig config = MziConfig::tapped(0.2);
    CHECK(config.transmissivity == doctest::Approx(0.25).epsilon(1e-12));
    QuantumScenario s = build_mzi(config);

    // after the tap the a_0 and surviving a_1 amplitudes match for psi
    CVector after = apply_unitary(s.member("phi=0"), s.preparation("psi"));
    CHECK(std::abs(after[0] - after[1]) <= 1e-12);

    CHECK(prob_of(s, "psi", "phi=0", "B_2") <= 1e-12);
    CHECK(prob_of(s, "psi", "phi=pi", "B_1") <= 1e-12);
    CHECK(prob_of(s, "phi", "phi=0", "B_0") <= 1e-12);
    CHECK(prob_of(s, "phi", "phi=pi", "B_0") <= 1e-12);
    // the tap diverts beta^2 - alpha^2 of psi into B_0
    CHECK(prob_of(s, "psi", "phi=0", "B_0") == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("zero tables") {
    ZeroStructure z = mzi_zero_table(MziConfig::balanced());
    std::set<ZeroEntry> expect{{"psi", "phi=0", "B_2"}, {"psi", "phi=pi", "B_1"}};
    CHECK(z.entries == expect);

    z = mzi_zero_table(MziConfig::tapped(0.2));
    std::set<ZeroEntry> expect3{{"psi", "phi=0", "B_2"}, {"psi", "phi=pi", "B_1"},
                                {"phi", "phi=0", "B_0"}, {"phi", "phi=pi", "B_0"}};
    CHECK(z.entries == expect3);
}

TEST_CASE("transparent tap reduces to the balanced table") {
    // alpha^2 = 1/2 gives T = 1: no light reaches B_0 from either source
    ZeroStructure z = mzi_zero_table(MziConfig::tapped(0.5));
    std::set<ZeroEntry> expect{{"psi", "phi=0", "B_2"}, {"psi", "phi=pi", "B_1"},
                               {"psi", "phi=0", "B_0"}, {"psi", "phi=pi", "B_0"},
                               {"phi", "phi=0", "B_0"}, {"phi", "phi=pi", "B_0"}};
    CHECK(z.entries == expect);
}

TEST_CASE("pipelines are unitary end to end") {
    for (double a2 : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        QuantumScenario s = build_mzi(MziConfig::tapped(a2));
        for (const auto& [prep, v] : s.preparations)
            for (const auto& m : {"phi=0", "phi=pi"}) {
                double sum = 0.0;
                for (const auto& [o, p] : evaluate(s, prep, m, "detectors")) sum += p;
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            }
    }
}

TEST_CASE("phase settings differ only by the a_1 sign") {
    QuantumScenario s = build_mzi(MziConfig::balanced());
    const CMatrix& u0 = s.member("phi=0");
    const CMatrix& upi = s.member("phi=pi");
    CHECK(u0(0, 0) == upi(0, 0));
    CHECK(u0(1, 1) == -upi(1, 1));
    CHECK(u0(0, 1) == upi(0, 1));
}

TEST_CASE("builder-tagged scenario documents") {
    nlohmann::json j{{"builder", "mzi"}, {"figure", 3}, {"alpha2", 0.2}};
    QuantumScenario s = scenario_from_document(j);
    CHECK(s.dim == 3);
    CHECK(zero_structure(s).entries == mzi_zero_table(MziConfig::tapped(0.2)).entries);

    nlohmann::json balanced{{"builder", "mzi"}, {"figure", 1}};
    CHECK(scenario_from_document(balanced).dim == 2);

    CHECK_THROWS_AS(scenario_from_document(nlohmann::json{{"builder", "laser"}}),
                    InvalidConfig);
    CHECK_THROWS_AS(scenario_from_document(nlohmann::json{{"builder", "mzi"}, {"figure", 7}}),
                    InvalidConfig);

    // a plain document still routes through the explicit-schema loader
    QuantumScenario plain = scenario_from_document(scenario_to_json(s));
    CHECK(plain.dim == 3);
}

TEST_CASE("config validation") {
    MziConfig c;
    c.alpha = 0.8;
    c.beta = 0.8;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);

    CHECK_THROWS_AS(MziConfig::tapped(0.7), InvalidConfig);  // alpha > beta
    CHECK_THROWS_AS(MziConfig::tapped(0.0), InvalidConfig);

    MziConfig bad_tap = MziConfig::tapped(0.2);
    bad_tap.transmissivity = 0.5;  // breaks the equalization constraint
    CHECK_THROWS_AS(bad_tap.validate(), InvalidConfig);

    MziConfig bad_phase = MziConfig::balanced();
    bad_phase.phase = 1.0;
    CHECK_THROWS_AS(bad_phase.validate(), InvalidConfig);
}

#include "onticlab/toymodels.hpp"

#include <cmath>

#include "onticlab/interfero.hpp"

namespace onticlab {

namespace {

std::shared_ptr<const QuantumScenario> toy_bit_scenario() {
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    QuantumScenario s;
    s.dim = 2;
    s.preparations["zero"] = CVector::basis(2, 0);
    s.preparations["plus"] = CVector{{inv_sqrt2, 0.0}, {inv_sqrt2, 0.0}};
    s.preparations["minus"] = CVector{{inv_sqrt2, 0.0}, {-inv_sqrt2, 0.0}};

    CMatrix phase = CMatrix::identity(2);
    phase(1, 1) = Complex{-1.0, 0.0};
    s.families["gates"]["identity"] = CMatrix::identity(2);
    s.families["gates"]["swap"] = phase;

    Measurement z;
    z.outcomes = {"z0", "z1"};
    z.basis = {CVector::basis(2, 0), CVector::basis(2, 1)};
    s.measurements["Z"] = z;
    Measurement x;
    x.outcomes = {"x+", "x-"};
    x.basis = {CVector{{inv_sqrt2, 0.0}, {inv_sqrt2, 0.0}},
               CVector{{inv_sqrt2, 0.0}, {-inv_sqrt2, 0.0}}};
    s.measurements["X"] = x;
    s.validate();
    return std::make_shared<const QuantumScenario>(std::move(s));
}

std::map<std::string, std::map<std::string, double>> identity_kernel(
    const std::vector<std::string>& states) {
    std::map<std::string, std::map<std::string, double>> k;
    for (const auto& l : states) k[l][l] = 1.0;
    return k;
}

} // namespace

ToyBitModel toy_bit() {
    ToyBitModel out;
    OntologicalModel& m = out.model;
    m.scenario = toy_bit_scenario();
    m.space.states = {"λ1", "λ2", "λ3", "λ4"};

    m.preparations["zero"].distribution = {{"λ1", 0.5}, {"λ2", 0.5}};
    m.preparations["plus"].distribution = {{"λ2", 0.5}, {"λ3", 0.5}};
    m.preparations["minus"].distribution = {{"λ1", 0.5}, {"λ4", 0.5}};

    m.transitions["identity"].kernel = identity_kernel(m.space.states);
    // (λ1 λ2)(λ3 λ4): fixes the zero-analog distribution, maps plus to minus
    m.transitions["swap"].kernel = {{"λ1", {{"λ2", 1.0}}},
                                    {"λ2", {{"λ1", 1.0}}},
                                    {"λ3", {{"λ4", 1.0}}},
                                    {"λ4", {{"λ3", 1.0}}}};

    m.responses["Z"].xi = {{"λ1", {{"z0", 1.0}}},
                           {"λ2", {{"z0", 1.0}}},
                           {"λ3", {{"z1", 1.0}}},
                           {"λ4", {{"z1", 1.0}}}};
    m.responses["X"].xi = {{"λ1", {{"x-", 1.0}}},
                           {"λ2", {{"x+", 1.0}}},
                           {"λ3", {{"x+", 1.0}}},
                           {"λ4", {{"x-", 1.0}}}};
    m.validate();
    return out;
}

std::string field_label(PathState a0, PathState a1) {
    auto tok = [](PathState p) {
        return std::string(p.occupation ? "1" : "0") + (p.phase ? "-" : "+");
    };
    return tok(a0) + tok(a1);
}

std::pair<PathState, PathState> beamsplitter_update(PathState a0, PathState a1) {
    int rel = a0.phase ^ a1.phase;
    PathState out1;  // first output port
    PathState out2;  // second output port
    if (a0.occupation + a1.occupation == 1) {
        // single particle: in-phase exits port 1, out-of-phase port 2;
        // the idle output phase records which input carried the particle,
        // keeping the update invertible
        int source = a1.occupation;
        out1.occupation = rel == 0 ? 1 : 0;
        out2.occupation = rel == 0 ? 0 : 1;
        out1.phase = a0.phase;
        out2.phase = source;
    } else {
        // empty or doubly occupied: occupations pass through, phases mix
        out1.occupation = a0.occupation;
        out2.occupation = a1.occupation;
        out1.phase = rel;
        out2.phase = a0.phase;
    }
    return {out1, out2};
}

FieldPathModel field_path_mzi() {
    FieldPathModel out;
    OntologicalModel& m = out.model;
    m.scenario = std::make_shared<const QuantumScenario>(build_mzi(MziConfig::balanced()));

    std::vector<std::pair<PathState, PathState>> all;
    for (int o0 = 0; o0 < 2; ++o0)
        for (int p0 = 0; p0 < 2; ++p0)
            for (int o1 = 0; o1 < 2; ++o1)
                for (int p1 = 0; p1 < 2; ++p1)
                    all.push_back({{o0, p0}, {o1, p1}});
    for (const auto& [a0, a1] : all) m.space.states.push_back(field_label(a0, a1));

    // phi = |a_0>: particle in path a_0, both phase variables uniform
    for (int p0 = 0; p0 < 2; ++p0)
        for (int p1 = 0; p1 < 2; ++p1)
            m.preparations["phi"].distribution[field_label({1, p0}, {0, p1})] = 0.25;
    // psi = (|a_0>+|a_1>)/sqrt(2): either path occupied, phases correlated
    for (int p = 0; p < 2; ++p) {
        m.preparations["psi"].distribution[field_label({1, p}, {0, p})] = 0.25;
        m.preparations["psi"].distribution[field_label({0, p}, {1, p})] = 0.25;
    }

    m.transitions[kMziMemberPhi0].kernel = identity_kernel(m.space.states);
    for (const auto& [a0, a1] : all) {
        PathState flipped = a1;
        flipped.phase ^= 1;
        m.transitions[kMziMemberPhiPi].kernel[field_label(a0, a1)] = {
            {field_label(a0, flipped), 1.0}};
    }

    for (const auto& [a0, a1] : all) {
        auto& row = m.responses["detectors"].xi[field_label(a0, a1)];
        auto [b1, b2] = beamsplitter_update(a0, a1);
        if (b1.occupation + b2.occupation == 1) {
            row[b1.occupation ? "B_1" : "B_2"] = 1.0;
        } else {
            // outside the single-particle sector (never prepared here):
            // both detectors treated as possible
            row["B_1"] = 0.5;
            row["B_2"] = 0.5;
        }
    }
    m.validate();
    return out;
}

} // namespace onticlab

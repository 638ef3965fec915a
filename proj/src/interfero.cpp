#include "onticlab/interfero.hpp"

#include <cmath>

#include "onticlab/json_io.hpp"

namespace onticlab {

MziConfig MziConfig::balanced() {
    MziConfig c;
    c.alpha = 1.0 / std::sqrt(2.0);
    c.beta = 1.0 / std::sqrt(2.0);
    c.with_bs3 = false;
    return c;
}

MziConfig MziConfig::tapped(double alpha2) {
    MziConfig c;
    if (alpha2 <= 0.0 || alpha2 > 0.5)
        throw InvalidConfig("tapped layout requires 0 < alpha^2 <= 1/2");
    c.alpha = std::sqrt(alpha2);
    c.beta = std::sqrt(1.0 - alpha2);
    c.with_bs3 = true;
    c.transmissivity = alpha2 / (1.0 - alpha2);
    return c;
}

void MziConfig::validate(const Tolerances& tol) const {
    if (alpha <= 0.0 || beta <= 0.0)
        throw InvalidConfig("source amplitudes must be positive");
    if (std::abs(alpha * alpha + beta * beta - 1.0) > tol.norm)
        throw InvalidConfig("source amplitudes must satisfy alpha^2 + beta^2 = 1");
    if (phase && *phase != 0.0 && std::abs(*phase - M_PI) > 1e-12)
        throw InvalidConfig("phase must be 0 or pi");
    if (with_bs3) {
        if (alpha > beta + tol.norm) throw InvalidConfig("tapped layout requires alpha <= beta");
        if (transmissivity <= 0.0 || transmissivity > 1.0)
            throw InvalidConfig("transmissivity must lie in (0, 1]");
        if (std::abs(std::sqrt(transmissivity) * beta - alpha) > tol.norm)
            throw InvalidConfig("tap must equalize amplitudes: sqrt(T)*beta == alpha");
    }
}

QuantumScenario build_mzi(const MziConfig& config, const Tolerances& tol) {
    config.validate(tol);
    QuantumScenario s;
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    if (!config.with_bs3) {
        // Coordinates (a_0, a_1).
        s.dim = 2;
        s.preparations["psi"] = CVector{{config.alpha, 0.0}, {config.beta, 0.0}};
        s.preparations["phi"] = CVector::basis(2, 0);

        CMatrix shift0 = CMatrix::identity(2);
        CMatrix shiftPi = CMatrix::identity(2);
        shiftPi(1, 1) = Complex{-1.0, 0.0};
        s.families["phase"][kMziMemberPhi0] = shift0;
        s.families["phase"][kMziMemberPhiPi] = shiftPi;

        Measurement det;
        det.outcomes = {"B_1", "B_2"};
        det.basis = {CVector{{inv_sqrt2, 0.0}, {inv_sqrt2, 0.0}},
                     CVector{{inv_sqrt2, 0.0}, {-inv_sqrt2, 0.0}}};
        s.measurements["detectors"] = det;
    } else {
        // Coordinates (a_0, a_1, b_0).
        s.dim = 3;
        s.preparations["psi"] = CVector{{config.alpha, 0.0}, {config.beta, 0.0}, {0.0, 0.0}};
        s.preparations["phi"] = CVector::basis(3, 0);

        double t = std::sqrt(config.transmissivity);
        double r = std::sqrt(1.0 - config.transmissivity);
        // Tap beamsplitter: rotation on the (a_1, b_0) block.
        CMatrix bs3 = CMatrix::identity(3);
        bs3(1, 1) = Complex{t, 0.0};
        bs3(1, 2) = Complex{-r, 0.0};
        bs3(2, 1) = Complex{r, 0.0};
        bs3(2, 2) = Complex{t, 0.0};

        CMatrix shiftPi = CMatrix::identity(3);
        shiftPi(1, 1) = Complex{-1.0, 0.0};

        s.families["phase"][kMziMemberPhi0] = bs3;
        s.families["phase"][kMziMemberPhiPi] = bs3 * shiftPi;

        Measurement det;
        det.outcomes = {"B_0", "B_1", "B_2"};
        det.basis = {CVector::basis(3, 2),
                     CVector{{inv_sqrt2, 0.0}, {inv_sqrt2, 0.0}, {0.0, 0.0}},
                     CVector{{inv_sqrt2, 0.0}, {-inv_sqrt2, 0.0}, {0.0, 0.0}}};
        s.measurements["detectors"] = det;
    }
    s.validate(tol);
    return s;
}

ZeroStructure mzi_zero_table(const MziConfig& config, const Tolerances& tol) {
    return zero_structure(build_mzi(config, tol), tol);
}

QuantumScenario scenario_from_document(const nlohmann::json& j, const Tolerances& tol) {
    if (!j.is_object() || !j.contains("builder")) return scenario_from_json(j, tol);
    std::string builder = j["builder"].get<std::string>();
    if (builder != "mzi") throw InvalidConfig("unknown scenario builder: " + builder);
    MziConfig config;
    int figure = j.value("figure", 0);
    if (figure == 1 || figure == 2) {
        config = MziConfig::balanced();
    } else if (figure == 3 || figure == 4) {
        config = MziConfig::tapped(j.value("alpha2", 0.2));
    } else if (figure == 0) {
        if (j.value("with_bs3", false)) {
            config = MziConfig::tapped(j.value("alpha2", 0.2));
        } else if (j.contains("alpha2") && std::abs(j["alpha2"].get<double>() - 0.5) > 1e-12) {
            throw InvalidConfig("balanced layout requires alpha2 = 0.5; set with_bs3 for "
                                "unbalanced sources");
        } else {
            config = MziConfig::balanced();
        }
    } else {
        throw InvalidConfig("figure must be 1, 2, 3 or 4");
    }
    return build_mzi(config, tol);
}

QuantumScenario load_scenario_document(const std::string& filename, const Tolerances& tol) {
    return scenario_from_document(load_json_file(filename), tol);
}

} // namespace onticlab

#include "onticlab/construction.hpp"

#include <cmath>

#include "onticlab/json_io.hpp"

namespace onticlab {

int smallest_m(double beta) {
    if (!(beta > 0.0) || beta > 1.0 + 1e-12) throw OutOfRange("smallest_m: beta must be in (0, 1]");
    double x = 1.0 / (beta * beta);
    double k = std::round(x);
    if (std::abs(x - k) <= 1e-12) return std::max(1, static_cast<int>(k));
    return std::max(1, static_cast<int>(std::ceil(x)));
}

double feasible_overlap_bound(int N) {
    if (N < 1) throw OutOfRange("feasible_overlap_bound: N must be >= 1");
    return static_cast<double>(N - 1) / static_cast<double>(N);
}

namespace {

std::string bound_note(int N) {
    return "feasible iff overlap |<phi|psi>|^2 <= (N-1)/N = " +
           std::to_string(feasible_overlap_bound(N)) +
           " (equivalently ceil(1/beta^2) <= N); the boundary value is sometimes quoted "
           "with the reverse inequality direction - this certificate reports the region "
           "where the construction itself succeeds";
}

} // namespace

NogoConstruction build_construction(double alpha, double beta, int N, const Tolerances& tol) {
    if (alpha < 0.0 || beta <= 0.0) throw OutOfRange("build_construction: amplitudes must be positive");
    if (std::abs(alpha * alpha + beta * beta - 1.0) > tol.norm)
        throw OutOfRange("build_construction: alpha^2 + beta^2 must equal 1");
    if (N < 1) throw OutOfRange("build_construction: N must be >= 1");

    int M = smallest_m(beta);
    if (M > N)
        throw Infeasible(M, N, M,
                         "construction infeasible: M = " + std::to_string(M) + " exceeds N = " +
                             std::to_string(N) + "; minimal feasible N is " + std::to_string(M));

    const int dim = N + 1;
    NogoConstruction out;
    out.alpha = alpha;
    out.beta = beta;
    out.N = N;
    out.M = M;
    for (int n = 0; n < dim; ++n) out.d_basis.push_back(CVector::basis(dim, n));

    if (M == 1) {
        // beta == 1: the pair is orthogonal and a single measurement
        // containing a0 already separates it. Identity unitaries suffice.
        out.a0 = CVector::basis(dim, 1);
        out.a1 = CVector::basis(dim, 0);
        out.psi = out.a0 * Complex{alpha, 0.0} + out.a1 * Complex{beta, 0.0};
        out.gamma = 0.0;
        out.delta = 0.0;
        for (int m = 0; m <= N; ++m) {
            out.b.push_back(out.a1);
            out.c.push_back(out.psi);
            out.U.push_back(CMatrix::identity(dim));
        }
        out.certificate = verify_condition(out, tol);
        return out;
    }

    // a0 = (0, 1, ..., 1, 0, ..., 0)/sqrt(M), ones at positions 1..M.
    CVector a0(dim);
    double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(M));
    for (int n = 1; n <= M; ++n) a0[n] = Complex{inv_sqrt_m, 0.0};
    out.a0 = a0;

    // Canonical orthonormal frame with a0 first; its second column serves
    // as a1 (it comes out as d_0 since a0 has no d_0 component).
    CMatrix frame = complete_to_unitary(dim, {{0, a0}}, tol);
    out.a1 = frame.column(1);
    out.psi = a0 * Complex{alpha, 0.0} + out.a1 * Complex{beta, 0.0};

    // c[m] for m = 1..M: gamma at d_0, x at positions 1..M except a hole at
    // m. gamma^2 = beta^2 - alpha^2/(M-1) >= 0 holds by the choice of M.
    double gamma_sq = beta * beta - alpha * alpha / static_cast<double>(M - 1);
    if (gamma_sq < 0.0 && gamma_sq > -1e-12) gamma_sq = 0.0;
    if (gamma_sq < 0.0) throw Error("build_construction: negative gamma^2; M inconsistent");
    out.gamma = std::sqrt(gamma_sq);
    out.delta = out.gamma / beta;
    double x = alpha * std::sqrt(static_cast<double>(M)) / static_cast<double>(M - 1);

    std::vector<CVector> c_of(static_cast<size_t>(N + 1), CVector(dim));
    std::vector<CVector> b_of(static_cast<size_t>(N + 1), CVector(dim));
    std::vector<CVector> bbar_of(static_cast<size_t>(N + 1), CVector(dim));
    std::vector<CMatrix> u_of(static_cast<size_t>(N + 1));

    Complex inv_beta{1.0 / beta, 0.0};
    for (int m = 1; m <= M; ++m) {
        CVector cm(dim);
        cm[0] = Complex{out.gamma, 0.0};
        for (int n = 1; n <= M; ++n)
            if (n != m) cm[n] = Complex{x, 0.0};
        CVector bm = (cm - a0 * Complex{alpha, 0.0}) * inv_beta;
        c_of[static_cast<size_t>(m)] = cm;
        b_of[static_cast<size_t>(m)] = bm;
        // b[m] = (alpha / (beta sqrt(M-1))) b_bar[m] + delta d_0, b_bar unit.
        CVector rest = bm;
        rest[0] = Complex{0.0, 0.0};
        bbar_of[static_cast<size_t>(m)] =
            rest * Complex{beta * std::sqrt(static_cast<double>(M - 1)) / alpha, 0.0};
        u_of[static_cast<size_t>(m)] =
            complete_to_unitary(dim, {{0, a0}, {1, bm}}, tol) * frame.adjoint();
    }
    for (int m = 0; m <= N; ++m) {
        if (m >= 1 && m <= M) continue;
        c_of[static_cast<size_t>(m)] = c_of[1];
        b_of[static_cast<size_t>(m)] = b_of[1];
        bbar_of[static_cast<size_t>(m)] = bbar_of[1];
        u_of[static_cast<size_t>(m)] = u_of[1];
    }
    out.c = std::move(c_of);
    out.b = std::move(b_of);
    out.b_bar = std::move(bbar_of);
    out.U = std::move(u_of);
    out.certificate = verify_condition(out, tol);
    return out;
}

ConditionCertificate verify_condition(const NogoConstruction& c, const Tolerances& tol) {
    if (c.a0.dim() != c.N + 1 || static_cast<int>(c.c.size()) != c.N + 1)
        throw Error("verify_condition: construction fields not populated");
    ConditionCertificate cert;
    cert.note = bound_note(c.N);
    for (int n = 0; n <= c.N; ++n) {
        double a0_mag = std::abs(inner(c.d_basis[static_cast<size_t>(n)], c.a0));
        double cn_mag =
            std::abs(inner(c.d_basis[static_cast<size_t>(n)], c.c[static_cast<size_t>(n)]));
        bool first = a0_mag * a0_mag <= tol.zero;
        bool second = cn_mag * cn_mag <= tol.zero;
        if (!first && !second)
            throw ConditionViolated(n, a0_mag, cn_mag,
                                    "either-or condition fails at n = " + std::to_string(n) +
                                        ": |<d_n|a0>| = " + std::to_string(a0_mag) +
                                        ", |<d_n|c[n]>| = " + std::to_string(cn_mag));
        Disjunct d = first && second ? Disjunct::Both : (first ? Disjunct::First : Disjunct::Second);
        cert.per_n.push_back({n, d, a0_mag, cn_mag});
    }
    return cert;
}

void verify_construction(const NogoConstruction& c, const Tolerances& tol) {
    const int dim = c.N + 1;
    if (std::abs(c.alpha * c.alpha + c.beta * c.beta - 1.0) > tol.norm)
        throw Error("verify_construction: alpha^2 + beta^2 != 1");
    if (c.M != smallest_m(c.beta)) throw Error("verify_construction: M mismatch");
    if (c.M > c.N) throw Error("verify_construction: M > N");
    if (c.a0.dim() != dim || c.a1.dim() != dim || c.psi.dim() != dim)
        throw DimensionMismatch("verify_construction: state dimension");
    if (static_cast<int>(c.d_basis.size()) != dim ||
        static_cast<int>(c.b.size()) != dim || static_cast<int>(c.c.size()) != dim ||
        static_cast<int>(c.U.size()) != dim)
        throw DimensionMismatch("verify_construction: family sizes");
    if (!c.a0.is_normalized(tol.norm) || !c.psi.is_normalized(tol.norm))
        throw Error("verify_construction: states not normalized");
    if (std::abs(inner(c.a0, c.a1)) > tol.unitary)
        throw Error("verify_construction: a1 not orthogonal to a0");
    CVector psi_expect = c.a0 * Complex{c.alpha, 0.0} + c.a1 * Complex{c.beta, 0.0};
    if (max_abs_diff(psi_expect, c.psi) > tol.unitary)
        throw Error("verify_construction: psi != alpha a0 + beta a1");
    for (int m = 0; m <= c.N; ++m) {
        const auto mu = static_cast<size_t>(m);
        if (!c.U[mu].is_unitary(tol.unitary))
            throw NonUnitary("verify_construction: U[" + std::to_string(m) + "] not unitary");
        if (max_abs_diff(c.U[mu] * c.a0, c.a0) > tol.unitary)
            throw Error("verify_construction: U[" + std::to_string(m) + "] does not fix a0");
        if (std::abs(c.b[mu].norm() - 1.0) > tol.unitary)
            throw Error("verify_construction: b[" + std::to_string(m) + "] not normalized");
        if (std::abs(inner(c.a0, c.b[mu])) > tol.unitary)
            throw Error("verify_construction: <a0|b[" + std::to_string(m) + "]> != 0");
        CVector cm_expect = c.a0 * Complex{c.alpha, 0.0} + c.b[mu] * Complex{c.beta, 0.0};
        if (max_abs_diff(cm_expect, c.c[mu]) > 1e-12)
            throw Error("verify_construction: c[" + std::to_string(m) +
                        "] != alpha a0 + beta b[m]");
        if (max_abs_diff(c.U[mu] * c.psi, c.c[mu]) > tol.unitary)
            throw Error("verify_construction: U[" + std::to_string(m) + "] psi != c[m]");
    }
    verify_condition(c, tol);
}

RestrictedProtocol build_restricted_protocol(const CVector& phi, const CVector& zero_state,
                                             const NogoConstruction& c, const Tolerances& tol) {
    const int dim = c.N + 1;
    if (phi.dim() != dim || zero_state.dim() != dim)
        throw DimensionMismatch("build_restricted_protocol: state dimension");
    if (!phi.is_normalized(tol.norm) || !zero_state.is_normalized(tol.norm))
        throw Error("build_restricted_protocol: states must be normalized");
    CMatrix p = complete_to_unitary(dim, {{0, phi}}, tol);
    CMatrix z = complete_to_unitary(dim, {{0, zero_state}}, tol);
    RestrictedProtocol out;
    out.W = z * p.adjoint();
    CMatrix w_dag = out.W.adjoint();
    out.u_tilde.reserve(c.U.size());
    for (const auto& u : c.U) out.u_tilde.push_back(out.W * u * w_dag);
    return out;
}

QuantumScenario ancilla_scenario(const QuantumScenario& a, int ancilla_dim,
                                 const std::string& ancilla_state_name, const Tolerances& tol) {
    if (ancilla_dim < 1) throw InvalidConfig("ancilla_scenario: ancilla_dim must be >= 1");
    int idx = -1;
    try {
        idx = std::stoi(ancilla_state_name);
    } catch (...) {
        throw InvalidConfig("ancilla_scenario: ancilla state name must be a basis index");
    }
    if (idx < 0 || idx >= ancilla_dim)
        throw InvalidConfig("ancilla_scenario: ancilla basis index out of range");
    CVector anc = CVector::basis(ancilla_dim, idx);

    QuantumScenario s;
    s.dim = a.dim * ancilla_dim;
    for (const auto& [name, v] : a.preparations)
        s.preparations[name + "*" + ancilla_state_name] = tensor(v, anc);
    CMatrix eye = CMatrix::identity(ancilla_dim);
    for (const auto& [fam, members] : a.families)
        for (const auto& [id, u] : members) s.families[fam][id] = CMatrix::tensor(u, eye);
    for (const auto& [name, meas] : a.measurements) {
        Measurement pm;
        for (size_t i = 0; i < meas.outcomes.size(); ++i) {
            for (int k = 0; k < ancilla_dim; ++k) {
                pm.outcomes.push_back(meas.outcomes[i] + "*" + std::to_string(k));
                pm.basis.push_back(tensor(meas.basis[i], CVector::basis(ancilla_dim, k)));
            }
        }
        s.measurements[name] = pm;
    }
    s.validate(tol);
    return s;
}

QuantumScenario scenario_from_construction(const NogoConstruction& c, const Tolerances& tol) {
    QuantumScenario s;
    s.dim = c.N + 1;
    s.preparations["phi"] = c.a0;
    s.preparations["psi"] = c.psi;
    for (int m = 0; m <= c.N; ++m)
        s.families["U"]["m=" + std::to_string(m)] = c.U[static_cast<size_t>(m)];
    Measurement meas;
    for (int n = 0; n <= c.N; ++n) {
        meas.outcomes.push_back("D_" + std::to_string(n));
        meas.basis.push_back(c.d_basis[static_cast<size_t>(n)]);
    }
    s.measurements["D"] = meas;
    s.validate(tol);
    return s;
}

nlohmann::json construction_to_json(const NogoConstruction& c) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["N"] = c.N;
    j["M"] = c.M;
    j["gamma"] = c.gamma;
    j["delta"] = c.delta;
    j["a0"] = to_json(c.a0);
    j["a1"] = to_json(c.a1);
    j["psi"] = to_json(c.psi);
    auto vecs = [](const std::vector<CVector>& vs) {
        auto arr = nlohmann::json::array();
        for (const auto& v : vs) arr.push_back(to_json(v));
        return arr;
    };
    j["d_basis"] = vecs(c.d_basis);
    j["b"] = vecs(c.b);
    j["b_bar"] = vecs(c.b_bar);
    j["c"] = vecs(c.c);
    j["U"] = nlohmann::json::array();
    for (const auto& u : c.U) j["U"].push_back(to_json(u));
    nlohmann::json cert;
    cert["note"] = c.certificate.note;
    cert["per_n"] = nlohmann::json::array();
    for (const auto& e : c.certificate.per_n) {
        nlohmann::json ej;
        ej["n"] = e.n;
        ej["disjunct"] = e.disjunct == Disjunct::First
                             ? "first"
                             : (e.disjunct == Disjunct::Second ? "second" : "both");
        ej["a0_overlap"] = e.a0_overlap;
        ej["cn_overlap"] = e.cn_overlap;
        cert["per_n"].push_back(ej);
    }
    j["certificate"] = cert;
    return j;
}

NogoConstruction construction_from_json(const nlohmann::json& j) {
    NogoConstruction c;
    if (!j.is_object()) throw ParseError("construction: expected object");
    for (const char* key : {"alpha", "beta", "N", "M", "gamma", "delta"})
        if (!j.contains(key)) throw ParseError(std::string("construction.") + key + ": missing");
    c.alpha = j["alpha"].get<double>();
    c.beta = j["beta"].get<double>();
    c.N = j["N"].get<int>();
    c.M = j["M"].get<int>();
    c.gamma = j["gamma"].get<double>();
    c.delta = j["delta"].get<double>();
    c.a0 = cvector_from_json(j.at("a0"), "a0");
    c.a1 = cvector_from_json(j.at("a1"), "a1");
    c.psi = cvector_from_json(j.at("psi"), "psi");
    auto vecs = [](const nlohmann::json& arr, const std::string& path) {
        std::vector<CVector> out;
        for (size_t i = 0; i < arr.size(); ++i)
            out.push_back(cvector_from_json(arr[i], path + "[" + std::to_string(i) + "]"));
        return out;
    };
    c.d_basis = vecs(j.at("d_basis"), "d_basis");
    c.b = vecs(j.at("b"), "b");
    c.b_bar = vecs(j.at("b_bar"), "b_bar");
    c.c = vecs(j.at("c"), "c");
    for (size_t i = 0; i < j.at("U").size(); ++i)
        c.U.push_back(cmatrix_from_json(j["U"][i], "U[" + std::to_string(i) + "]"));
    if (j.contains("certificate")) {
        const auto& cert = j["certificate"];
        c.certificate.note = cert.value("note", "");
        for (const auto& e : cert.value("per_n", nlohmann::json::array())) {
            ConditionEntry entry;
            entry.n = e.at("n").get<int>();
            std::string d = e.at("disjunct").get<std::string>();
            entry.disjunct =
                d == "first" ? Disjunct::First : (d == "second" ? Disjunct::Second : Disjunct::Both);
            entry.a0_overlap = e.at("a0_overlap").get<double>();
            entry.cn_overlap = e.at("cn_overlap").get<double>();
            c.certificate.per_n.push_back(entry);
        }
    }
    return c;
}

} // namespace onticlab

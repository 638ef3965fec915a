#include "onticlab/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "onticlab/json_io.hpp"

namespace onticlab {

namespace {

// Names appear inside trace expressions, where these characters are structural.
void check_name(const std::string& name, const std::string& path) {
    if (name.empty()) throw Error(path + ": empty name");
    for (char ch : name) {
        if (ch == ';' || ch == '|' || ch == '(' || ch == ')')
            throw Error(path + ": name '" + name + "' contains a reserved character (;|())");
    }
}

} // namespace

void QuantumScenario::validate(const Tolerances& tol) const {
    if (dim <= 0) throw Error("dim: must be positive");
    for (const auto& [name, v] : preparations) {
        check_name(name, "preparations");
        if (v.dim() != dim)
            throw DimensionMismatch("preparations." + name + ": dimension " +
                                    std::to_string(v.dim()) + " != " + std::to_string(dim));
        if (!v.is_normalized(tol.norm))
            throw Error("preparations." + name + ": vector not normalized");
    }
    std::set<std::string> member_seen;
    for (const auto& [fam, members] : families) {
        check_name(fam, "families");
        for (const auto& [id, m] : members) {
            std::string path = "families." + fam + "." + id;
            check_name(id, path);
            if (!member_seen.insert(id).second)
                throw Error(path + ": member id reused in another family");
            if (m.rows() != dim || m.cols() != dim)
                throw DimensionMismatch(path + ": matrix is not " + std::to_string(dim) + "x" +
                                        std::to_string(dim));
            if (!m.is_unitary(tol.unitary)) throw NonUnitary(path + ": matrix not unitary");
        }
    }
    std::set<std::string> outcome_seen;
    for (const auto& [name, meas] : measurements) {
        std::string path = "measurements." + name;
        check_name(name, path);
        if (meas.outcomes.size() != meas.basis.size())
            throw Error(path + ": outcome and basis counts differ");
        if (static_cast<int>(meas.basis.size()) != dim)
            throw DimensionMismatch(path + ": basis incomplete for dimension");
        for (const auto& o : meas.outcomes) {
            check_name(o, path + ".outcomes");
            if (!outcome_seen.insert(o).second)
                throw Error(path + ": outcome label '" + o + "' reused");
        }
        for (size_t i = 0; i < meas.basis.size(); ++i) {
            if (meas.basis[i].dim() != dim)
                throw DimensionMismatch(path + ".basis[" + std::to_string(i) + "]: dimension");
            for (size_t j = i; j < meas.basis.size(); ++j) {
                Complex g = inner(meas.basis[i], meas.basis[j]);
                Complex expect = (i == j) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
                if (std::abs(g - expect) > tol.unitary)
                    throw NonOrthonormalBasis(path + ": basis not orthonormal (rows " +
                                              std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

const CVector& QuantumScenario::preparation(const std::string& name) const {
    auto it = preparations.find(name);
    if (it == preparations.end()) throw UnknownName("unknown preparation: " + name);
    return it->second;
}

const CMatrix& QuantumScenario::member(const std::string& member_id) const {
    for (const auto& [fam, members] : families) {
        auto it = members.find(member_id);
        if (it != members.end()) return it->second;
    }
    throw UnknownName("unknown family member: " + member_id);
}

const Measurement& QuantumScenario::measurement(const std::string& name) const {
    auto it = measurements.find(name);
    if (it == measurements.end()) throw UnknownName("unknown measurement: " + name);
    return it->second;
}

const std::string& QuantumScenario::measurement_of_outcome(const std::string& outcome) const {
    for (const auto& [name, meas] : measurements) {
        if (std::find(meas.outcomes.begin(), meas.outcomes.end(), outcome) != meas.outcomes.end())
            return name;
    }
    throw UnknownName("unknown outcome label: " + outcome);
}

std::vector<std::string> QuantumScenario::member_ids() const {
    std::vector<std::string> ids;
    for (const auto& [fam, members] : families)
        for (const auto& [id, m] : members) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

bool QuantumScenario::has_member(const std::string& member_id) const {
    for (const auto& [fam, members] : families)
        if (members.count(member_id)) return true;
    return false;
}

std::vector<std::pair<std::string, double>> evaluate(const QuantumScenario& s,
                                                     const std::string& prep,
                                                     const std::string& member_id,
                                                     const std::string& measurement,
                                                     const Tolerances& tol) {
    const CVector& v = s.preparation(prep);
    const CMatrix& u = s.member(member_id);
    const Measurement& meas = s.measurement(measurement);
    CVector evolved = apply_unitary(u, v, tol);
    std::vector<double> probs = born_probabilities(evolved, meas.basis, tol);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) out.emplace_back(meas.outcomes[i], probs[i]);
    return out;
}

bool is_quantum_zero(const QuantumScenario& s, const std::string& prep,
                     const std::string& member_id, const std::string& outcome,
                     const Tolerances& tol) {
    const std::string& meas_name = s.measurement_of_outcome(outcome);
    const Measurement& meas = s.measurement(meas_name);
    CVector evolved = apply_unitary(s.member(member_id), s.preparation(prep), tol);
    auto it = std::find(meas.outcomes.begin(), meas.outcomes.end(), outcome);
    size_t idx = static_cast<size_t>(it - meas.outcomes.begin());
    double p = std::norm(inner(meas.basis[idx], evolved));
    if (p > tol.zero && p < tol.zero_guard)
        throw AmbiguousZero("probability " + std::to_string(p) + " for (" + prep + ", " +
                            member_id + ", " + outcome + ") lies in the guard band");
    return p <= tol.zero;
}

ZeroStructure zero_structure(const QuantumScenario& s, const Tolerances& tol) {
    ZeroStructure z;
    for (const auto& [prep, v] : s.preparations) {
        for (const auto& [fam, members] : s.families) {
            for (const auto& [id, u] : members) {
                for (const auto& [mname, meas] : s.measurements) {
                    CVector evolved = apply_unitary(u, v, tol);
                    for (size_t i = 0; i < meas.outcomes.size(); ++i) {
                        double p = std::norm(inner(meas.basis[i], evolved));
                        if (p > tol.zero && p < tol.zero_guard)
                            throw AmbiguousZero("probability " + std::to_string(p) + " for (" +
                                                prep + ", " + id + ", " + meas.outcomes[i] +
                                                ") lies in the guard band");
                        if (p <= tol.zero) z.entries.insert({prep, id, meas.outcomes[i]});
                    }
                }
            }
        }
    }
    return z;
}

nlohmann::json scenario_to_json(const QuantumScenario& s) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["dim"] = s.dim;
    j["preparations"] = nlohmann::json::object();
    for (const auto& [name, v] : s.preparations) j["preparations"][name] = to_json(v);
    j["families"] = nlohmann::json::object();
    for (const auto& [fam, members] : s.families) {
        nlohmann::json fj = nlohmann::json::object();
        for (const auto& [id, m] : members) fj[id] = to_json(m);
        j["families"][fam] = fj;
    }
    j["measurements"] = nlohmann::json::object();
    for (const auto& [name, meas] : s.measurements) {
        nlohmann::json mj;
        mj["outcomes"] = meas.outcomes;
        mj["basis"] = nlohmann::json::array();
        for (const auto& b : meas.basis) mj["basis"].push_back(to_json(b));
        j["measurements"][name] = mj;
    }
    return j;
}

QuantumScenario scenario_from_json(const nlohmann::json& j, const Tolerances& tol) {
    QuantumScenario s;
    if (!j.is_object()) throw ParseError("scenario: expected object");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw ParseError("dim: expected integer");
    s.dim = j["dim"].get<int>();
    if (j.contains("preparations")) {
        if (!j["preparations"].is_object()) throw ParseError("preparations: expected object");
        for (const auto& [name, pv] : j["preparations"].items())
            s.preparations[name] = cvector_from_json(pv, "preparations." + name);
    }
    if (j.contains("families")) {
        if (!j["families"].is_object()) throw ParseError("families: expected object");
        for (const auto& [fam, members] : j["families"].items()) {
            if (!members.is_object()) throw ParseError("families." + fam + ": expected object");
            for (const auto& [id, mv] : members.items())
                s.families[fam][id] = cmatrix_from_json(mv, "families." + fam + "." + id);
        }
    }
    if (j.contains("measurements")) {
        if (!j["measurements"].is_object()) throw ParseError("measurements: expected object");
        for (const auto& [name, mj] : j["measurements"].items()) {
            std::string path = "measurements." + name;
            if (!mj.is_object() || !mj.contains("outcomes") || !mj.contains("basis"))
                throw ParseError(path + ": expected {outcomes, basis}");
            Measurement meas;
            for (const auto& o : mj["outcomes"]) {
                if (!o.is_string()) throw ParseError(path + ".outcomes: expected strings");
                meas.outcomes.push_back(o.get<std::string>());
            }
            const auto& basis = mj["basis"];
            if (!basis.is_array()) throw ParseError(path + ".basis: expected array");
            for (size_t i = 0; i < basis.size(); ++i)
                meas.basis.push_back(
                    cvector_from_json(basis[i], path + ".basis[" + std::to_string(i) + "]"));
            s.measurements[name] = meas;
        }
    }
    s.validate(tol);
    return s;
}

QuantumScenario load_scenario(const std::string& filename, const Tolerances& tol) {
    return scenario_from_json(load_json_file(filename), tol);
}

} // namespace onticlab

#include "onticlab/ontology.hpp"

#include <algorithm>
#include <cmath>

#include "onticlab/json_io.hpp"

namespace onticlab {

bool OnticSpace::contains(const std::string& label) const {
    return std::find(states.begin(), states.end(), label) != states.end();
}

OnticSet EpistemicState::support() const {
    OnticSet s;
    for (const auto& [l, p] : distribution)
        if (p > 0.0) s.insert(l);
    return s;
}

OnticSet TransitionMap::successors(const std::string& label) const {
    OnticSet s;
    auto it = kernel.find(label);
    if (it == kernel.end()) return s;
    for (const auto& [l, p] : it->second)
        if (p > 0.0) s.insert(l);
    return s;
}

OnticSet ResponseFunction::possible_outcomes(const std::string& label) const {
    OnticSet s;
    auto it = xi.find(label);
    if (it == xi.end()) return s;
    for (const auto& [o, p] : it->second)
        if (p > 0.0) s.insert(o);
    return s;
}

void OntologicalModel::validate(const Tolerances& tol) const {
    std::set<std::string> labels(space.states.begin(), space.states.end());
    if (labels.size() != space.states.size()) throw Error("ontic_states: labels not distinct");
    if (space.states.empty()) throw Error("ontic_states: empty");

    auto check_label = [&](const std::string& l, const std::string& path) {
        if (!labels.count(l)) throw UnknownName(path + ": unknown ontic state '" + l + "'");
    };

    for (const auto& [name, e] : preparations) {
        std::string path = "preparations." + name;
        double sum = 0.0;
        for (const auto& [l, p] : e.distribution) {
            check_label(l, path);
            if (p < 0.0) throw Error(path + ": negative probability at '" + l + "'");
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol.norm) throw Error(path + ": probabilities do not sum to 1");
        if (scenario) scenario->preparation(name);
    }
    for (const auto& [id, t] : transitions) {
        std::string path = "transitions." + id;
        for (const auto& [l, row] : t.kernel) {
            check_label(l, path);
            double sum = 0.0;
            for (const auto& [l2, p] : row) {
                check_label(l2, path + "." + l);
                if (p < 0.0) throw Error(path + "." + l + ": negative probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > tol.norm)
                throw Error(path + "." + l + ": row does not sum to 1");
        }
        for (const auto& l : space.states)
            if (!t.kernel.count(l)) throw Error(path + ": missing row for '" + l + "'");
        if (scenario && !scenario->has_member(id))
            throw UnknownName(path + ": no such member in the scenario");
    }
    for (const auto& [mname, r] : responses) {
        std::string path = "responses." + mname;
        const Measurement* meas = nullptr;
        if (scenario) meas = &scenario->measurement(mname);
        for (const auto& [l, row] : r.xi) {
            check_label(l, path);
            double sum = 0.0;
            for (const auto& [o, p] : row) {
                if (p < 0.0) throw Error(path + "." + l + ": negative probability");
                if (meas && std::find(meas->outcomes.begin(), meas->outcomes.end(), o) ==
                                meas->outcomes.end())
                    throw UnknownName(path + "." + l + ": unknown outcome '" + o + "'");
                sum += p;
            }
            if (std::abs(sum - 1.0) > tol.norm)
                throw Error(path + "." + l + ": outcome probabilities do not sum to 1");
        }
        for (const auto& l : space.states)
            if (!r.xi.count(l)) throw Error(path + ": missing row for '" + l + "'");
    }
}

const EpistemicState& OntologicalModel::preparation(const std::string& name) const {
    auto it = preparations.find(name);
    if (it == preparations.end()) throw UnknownName("unknown preparation: " + name);
    return it->second;
}

const TransitionMap& OntologicalModel::transition(const std::string& member_id) const {
    auto it = transitions.find(member_id);
    if (it == transitions.end()) throw UnknownName("unknown transition member: " + member_id);
    return it->second;
}

const ResponseFunction& OntologicalModel::response(const std::string& measurement) const {
    auto it = responses.find(measurement);
    if (it == responses.end()) throw UnknownName("unknown response measurement: " + measurement);
    return it->second;
}

OnticSet outcome_support(const OntologicalModel& m, const std::string& prep,
                         const std::string& member_id, const std::string& measurement,
                         const std::string& outcome) {
    const EpistemicState& e = m.preparation(prep);
    const TransitionMap& t = m.transition(member_id);
    const ResponseFunction& r = m.response(measurement);
    OnticSet result;
    for (const auto& l : e.support()) {
        for (const auto& l2 : t.successors(l)) {
            if (r.possible_outcomes(l2).count(outcome)) {
                result.insert(l);
                break;
            }
        }
    }
    return result;
}

OnticSet supports_overlap(const OntologicalModel& m, const std::string& prep_a,
                          const std::string& prep_b) {
    OnticSet a = m.preparation(prep_a).support();
    OnticSet b = m.preparation(prep_b).support();
    OnticSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.begin()));
    return out;
}

Classification classify_model(const OntologicalModel& m) {
    Classification c;
    for (auto it = m.preparations.begin(); it != m.preparations.end(); ++it) {
        for (auto jt = std::next(it); jt != m.preparations.end(); ++jt) {
            OnticSet overlap = supports_overlap(m, it->first, jt->first);
            if (!overlap.empty()) {
                c.psi_epistemic = true;
                c.prep_a = it->first;
                c.prep_b = jt->first;
                c.overlap = overlap;
                return c;
            }
        }
    }
    return c;
}

CompletenessReport check_possibilistic_completeness(const OntologicalModel& m,
                                                    const Tolerances& tol) {
    if (!m.scenario) throw Error("check_possibilistic_completeness: model not bound to a scenario");
    CompletenessReport report;
    for (const auto& [prep, e] : m.preparations) {
        for (const auto& [member, t] : m.transitions) {
            for (const auto& [mname, r] : m.responses) {
                for (const auto& outcome : m.scenario->measurement(mname).outcomes) {
                    bool qzero = is_quantum_zero(*m.scenario, prep, member, outcome, tol);
                    bool model_possible = !outcome_support(m, prep, member, mname, outcome).empty();
                    if (qzero && model_possible)
                        report.violations.push_back({prep, member, outcome, true});
                    else if (!qzero && !model_possible)
                        report.violations.push_back({prep, member, outcome, false});
                }
            }
        }
    }
    report.ok = report.violations.empty();
    return report;
}

IndifferenceResult check_ontic_indifference(const OntologicalModel& m,
                                            const std::string& member_id,
                                            const std::string& prep,
                                            bool set_preserving_only,
                                            const Tolerances& tol) {
    if (!m.scenario) throw Error("check_ontic_indifference: model not bound to a scenario");
    const CVector& v = m.scenario->preparation(prep);
    CVector moved = apply_unitary(m.scenario->member(member_id), v, tol);
    if (!equal_up_to_global_phase(v, moved, 1e-9))
        throw PreconditionNotApplicable("member '" + member_id +
                                        "' does not leave preparation '" + prep +
                                        "' invariant");
    const TransitionMap& t = m.transition(member_id);
    OnticSet support = m.preparation(prep).support();
    if (!set_preserving_only) {
        for (const auto& l : support) {
            OnticSet succ = t.successors(l);
            if (succ.size() != 1 || *succ.begin() != l) return {false, l};
        }
        return {true, {}};
    }
    // Weaker reading: the kernel maps the support onto itself.
    OnticSet image;
    for (const auto& l : support) {
        OnticSet succ = t.successors(l);
        for (const auto& l2 : succ) {
            if (!support.count(l2)) return {false, l};
            image.insert(l2);
        }
    }
    if (image != support) {
        // some support state unreachable: report the first one
        for (const auto& l : support)
            if (!image.count(l)) return {false, l};
    }
    return {true, {}};
}

std::string product_label(const std::string& a, const std::string& b) {
    return "(" + a + "," + b + ")";
}

OntologicalModel product_embed(const OntologicalModel& a, const OntologicalModel& b) {
    OntologicalModel p;
    for (const auto& la : a.space.states)
        for (const auto& lb : b.space.states) p.space.states.push_back(product_label(la, lb));

    for (const auto& [na, ea] : a.preparations) {
        for (const auto& [nb, eb] : b.preparations) {
            EpistemicState e;
            for (const auto& [la, pa] : ea.distribution)
                for (const auto& [lb, pb] : eb.distribution)
                    if (pa > 0.0 && pb > 0.0) e.distribution[product_label(la, lb)] = pa * pb;
            p.preparations[na + "*" + nb] = e;
        }
    }
    for (const auto& [id, ta] : a.transitions) {
        auto it = b.transitions.find(id);
        if (it == b.transitions.end()) continue;
        TransitionMap t;
        for (const auto& la : a.space.states) {
            for (const auto& lb : b.space.states) {
                auto& row = t.kernel[product_label(la, lb)];
                for (const auto& [la2, pa] : ta.kernel.at(la))
                    for (const auto& [lb2, pb] : it->second.kernel.at(lb))
                        if (pa > 0.0 && pb > 0.0) row[product_label(la2, lb2)] = pa * pb;
            }
        }
        p.transitions[id] = t;
    }
    for (const auto& [mn, ra] : a.responses) {
        auto it = b.responses.find(mn);
        if (it == b.responses.end()) continue;
        ResponseFunction r;
        for (const auto& la : a.space.states) {
            for (const auto& lb : b.space.states) {
                auto& row = r.xi[product_label(la, lb)];
                for (const auto& [oa, pa] : ra.xi.at(la))
                    for (const auto& [ob, pb] : it->second.xi.at(lb))
                        if (pa > 0.0 && pb > 0.0) row["(" + oa + "," + ob + ")"] = pa * pb;
            }
        }
        p.responses[mn] = r;
    }
    return p;
}

nlohmann::json model_to_json(const OntologicalModel& m) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["ontic_states"] = m.space.states;
    j["preparations"] = nlohmann::json::object();
    for (const auto& [name, e] : m.preparations) {
        nlohmann::json d = nlohmann::json::object();
        for (const auto& [l, p] : e.distribution)
            if (p > 0.0) d[l] = p;
        j["preparations"][name] = d;
    }
    j["transitions"] = nlohmann::json::object();
    for (const auto& [id, t] : m.transitions) {
        nlohmann::json tj = nlohmann::json::object();
        for (const auto& [l, row] : t.kernel) {
            nlohmann::json rj = nlohmann::json::object();
            for (const auto& [l2, p] : row)
                if (p > 0.0) rj[l2] = p;
            tj[l] = rj;
        }
        j["transitions"][id] = tj;
    }
    j["responses"] = nlohmann::json::object();
    for (const auto& [mn, r] : m.responses) {
        nlohmann::json rj = nlohmann::json::object();
        for (const auto& [l, row] : r.xi) {
            nlohmann::json oj = nlohmann::json::object();
            for (const auto& [o, p] : row)
                if (p > 0.0) oj[o] = p;
            rj[l] = oj;
        }
        j["responses"][mn] = rj;
    }
    if (m.scenario) j["scenario"] = scenario_to_json(*m.scenario);
    return j;
}

OntologicalModel model_from_json(const nlohmann::json& j,
                                 std::shared_ptr<const QuantumScenario> scenario,
                                 const Tolerances& tol) {
    if (!j.is_object()) throw ParseError("model: expected object");
    OntologicalModel m;
    if (!scenario && j.contains("scenario"))
        scenario = std::make_shared<QuantumScenario>(scenario_from_json(j["scenario"], tol));
    m.scenario = std::move(scenario);

    if (!j.contains("ontic_states") || !j["ontic_states"].is_array())
        throw ParseError("ontic_states: expected array of labels");
    for (const auto& l : j["ontic_states"]) {
        if (!l.is_string()) throw ParseError("ontic_states: expected strings");
        m.space.states.push_back(l.get<std::string>());
    }
    auto read_dist = [](const nlohmann::json& d, const std::string& path) {
        std::map<std::string, double> out;
        if (!d.is_object()) throw ParseError(path + ": expected object of probabilities");
        for (const auto& [l, p] : d.items()) {
            if (!p.is_number()) throw ParseError(path + "." + l + ": expected number");
            out[l] = p.get<double>();
        }
        return out;
    };
    if (j.contains("preparations"))
        for (const auto& [name, d] : j["preparations"].items())
            m.preparations[name].distribution = read_dist(d, "preparations." + name);
    if (j.contains("transitions"))
        for (const auto& [id, t] : j["transitions"].items()) {
            if (!t.is_object()) throw ParseError("transitions." + id + ": expected object");
            for (const auto& [l, row] : t.items())
                m.transitions[id].kernel[l] = read_dist(row, "transitions." + id + "." + l);
        }
    if (j.contains("responses"))
        for (const auto& [mn, r] : j["responses"].items()) {
            if (!r.is_object()) throw ParseError("responses." + mn + ": expected object");
            for (const auto& [l, row] : r.items())
                m.responses[mn].xi[l] = read_dist(row, "responses." + mn + "." + l);
        }
    m.validate(tol);
    return m;
}

OntologicalModel load_model(const std::string& filename,
                            std::shared_ptr<const QuantumScenario> scenario,
                            const Tolerances& tol) {
    return model_from_json(load_json_file(filename), std::move(scenario), tol);
}

} // namespace onticlab

// onticlab - build, certify and cross-check finite ontological-model
// scenarios: interferometer tables, certified unitary-family constructions,
// machine-checked non-overlap traces and exhaustive possibilistic search.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "onticlab/construction.hpp"
#include "onticlab/interfero.hpp"
#include "onticlab/json_io.hpp"
#include "onticlab/ontology.hpp"
#include "onticlab/scenario.hpp"
#include "onticlab/search.hpp"
#include "onticlab/toymodels.hpp"
#include "onticlab/trace.hpp"

using namespace onticlab;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitDisagreement = 4;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json tolerances_json(const Tolerances& tol) {
    return json{{"tol_unitary", tol.unitary},
                {"tol_norm", tol.norm},
                {"tol_zero", tol.zero},
                {"tol_zero_guard", tol.zero_guard}};
}

json make_report(const std::string& command, const json& inputs, const json& results,
                 const Tolerances& tol, double elapsed_ms) {
    json report;
    report["schema_version"] = 1;
    report["tool_version"] = kVersion;
    report["command"] = command;
    report["inputs"] = inputs;
    std::ostringstream digest;
    digest << std::hex << std::setw(16) << std::setfill('0') << fnv1a(inputs.dump());
    report["inputs_digest"] = digest.str();
    report["tolerances"] = tolerances_json(tol);
    report["results"] = results;
    report["timings"] = json{{"elapsed_ms", elapsed_ms}};
    return report;
}

void write_output(const std::string& text, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream out(out_file);
        if (!out) throw Error("cannot write " + out_file);
        out << text;
    }
}

Tolerances load_tolerances(const std::string& config_file) {
    Tolerances tol;
    if (config_file.empty()) return tol;
    std::ifstream in(config_file);
    if (!in) throw InvalidConfig("cannot open config file: " + config_file);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        double v = 0;
        try {
            v = std::stod(value);
        } catch (...) {
            throw InvalidConfig("config: bad value for " + key);
        }
        if (key == "tol_unitary") tol.unitary = v;
        else if (key == "tol_norm") tol.norm = v;
        else if (key == "tol_zero") tol.zero = v;
        else if (key == "tol_zero_guard") tol.zero_guard = v;
        else throw InvalidConfig("config: unknown key " + key);
    }
    return tol;
}

int env_threads() {
    const char* env = std::getenv("ONTICLAB_THREADS");
    if (!env) return static_cast<int>(std::thread::hardware_concurrency());
    int n = std::atoi(env);
    return n > 0 ? n : 1;
}

// ---------------------------------------------------------------------------

struct MziArgs {
    int figure = 1;
    double alpha2 = 0.2;
    std::string phase;  // "", "0" or "pi"
    std::string emit = "table";
    std::string out;
};

int cmd_mzi(const MziArgs& args, const Tolerances& tol) {
    Timer timer;
    MziConfig config;
    if (args.figure == 1 || args.figure == 2) {
        config = MziConfig::balanced();
    } else if (args.figure == 3 || args.figure == 4) {
        config = MziConfig::tapped(args.alpha2);
    } else {
        throw InvalidConfig("figure must be 1, 2, 3 or 4");
    }
    if (!args.phase.empty()) {
        if (args.phase != "0" && args.phase != "pi") throw InvalidConfig("phase must be 0 or pi");
        config.phase = args.phase == "0" ? 0.0 : M_PI;
    }
    QuantumScenario s = build_mzi(config, tol);
    ZeroStructure zeros = zero_structure(s, tol);

    std::vector<std::string> members;
    if (config.phase)
        members.push_back(*config.phase == 0.0 ? kMziMemberPhi0 : kMziMemberPhiPi);
    else
        members = {kMziMemberPhi0, kMziMemberPhiPi};

    json rows = json::array();
    std::ostringstream table;
    table << std::left << std::setw(6) << "prep" << std::setw(9) << "phase";
    for (const auto& o : s.measurement("detectors").outcomes)
        table << std::setw(12) << ("P(" + o + ")");
    table << "\n";
    for (const auto& [prep, v] : s.preparations) {
        for (const auto& m : members) {
            auto probs = evaluate(s, prep, m, "detectors", tol);
            table << std::setw(6) << prep << std::setw(9) << m;
            json row{{"prep", prep}, {"member", m}};
            for (const auto& [o, p] : probs) {
                table << std::setw(12) << std::setprecision(6) << p;
                row["p"][o] = p;
            }
            rows.push_back(row);
            table << "\n";
        }
    }
    table << "\nzero structure:\n";
    json zj = json::array();
    for (const auto& e : zeros.entries) {
        bool member_shown =
            std::find(members.begin(), members.end(), e.member) != members.end();
        if (member_shown)
            table << "  (" << e.prep << ", " << e.member << ", " << e.outcome << ")\n";
        zj.push_back(json{{"prep", e.prep}, {"member", e.member}, {"outcome", e.outcome}});
    }

    json inputs{{"figure", args.figure}, {"alpha2", args.alpha2}, {"phase", args.phase}};
    json results{{"table", rows}, {"zero_structure", zj}};
    if (args.emit == "json")
        write_output(make_report("mzi", inputs, results, tol, timer.ms()).dump(2), args.out);
    else
        write_output(table.str(), args.out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ConstructArgs {
    double alpha2 = 0.5;
    int N = 2;
    bool restricted = false;
    std::string emit = "table";
    std::string out;
};

int cmd_construct(const ConstructArgs& args, const Tolerances& tol) {
    Timer timer;
    if (args.alpha2 <= 0.0 || args.alpha2 >= 1.0)
        throw InvalidConfig("alpha2 must lie strictly between 0 and 1");
    if (args.N < 1) throw InvalidConfig("N must be >= 1");
    double alpha = std::sqrt(args.alpha2);
    double beta = std::sqrt(1.0 - args.alpha2);

    json inputs{{"alpha2", args.alpha2}, {"N", args.N}, {"restricted", args.restricted}};
    NogoConstruction c;
    try {
        c = build_construction(alpha, beta, args.N, tol);
    } catch (const Infeasible& e) {
        std::ostringstream msg;
        msg << "infeasible: M = " << e.M << " > N = " << e.N << "; minimal feasible N is "
            << e.minimal_feasible_n << "\n";
        if (args.emit == "json") {
            json results{{"feasible", false},
                         {"M", e.M},
                         {"N", e.N},
                         {"minimal_feasible_N", e.minimal_feasible_n}};
            write_output(make_report("construct", inputs, results, tol, timer.ms()).dump(2),
                         args.out);
        } else {
            write_output(msg.str(), args.out);
        }
        return kExitInfeasible;
    }

    verify_construction(c, tol);

    std::ostringstream table;
    table << "construction: alpha^2 = " << args.alpha2 << ", N = " << c.N << ", M = " << c.M
          << ", gamma = " << c.gamma << "\n";
    int first = 0, second = 0, both = 0;
    for (const auto& e : c.certificate.per_n) {
        if (e.disjunct == Disjunct::First) ++first;
        else if (e.disjunct == Disjunct::Second) ++second;
        else ++both;
    }
    table << "certificate: OK (" << c.certificate.per_n.size() << " indices: " << first
          << " first, " << second << " second, " << both << " both)\n";

    json results;
    results["feasible"] = true;
    results["M"] = c.M;
    results["gamma"] = c.gamma;
    results["certificate_ok"] = true;

    if (args.restricted) {
        CVector zero_state = CVector::basis(c.N + 1, 0);
        RestrictedProtocol proto = build_restricted_protocol(c.a0, zero_state, c, tol);
        double composite_dev = 0.0, fix_dev = 0.0;
        CMatrix w_dag = proto.W.adjoint();
        for (size_t m = 0; m < proto.u_tilde.size(); ++m) {
            composite_dev = std::max(
                composite_dev, max_abs_diff(w_dag * proto.u_tilde[m] * proto.W, c.U[m]));
            fix_dev = std::max(fix_dev, max_abs_diff(proto.u_tilde[m] * zero_state, zero_state));
        }
        table << "restricted protocol: max |W^t Ut W - U| = " << composite_dev
              << ", max |Ut zero - zero| = " << fix_dev << "\n";
        results["restricted"] =
            json{{"composite_deviation", composite_dev}, {"zero_fix_deviation", fix_dev}};
    }

    if (args.emit == "json") {
        results["bundle"] = construction_to_json(c);
        write_output(make_report("construct", inputs, results, tol, timer.ms()).dump(2),
                     args.out);
    } else {
        write_output(table.str(), args.out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScanArgs {
    int n_min = 2;
    int n_max = 12;
    double alpha2_step = 0.05;
    bool certify = false;
    std::string emit = "csv";
    std::string out;
};

int cmd_scan(const ScanArgs& args, const Tolerances& tol) {
    Timer timer;
    if (args.n_min < 1 || args.n_max < args.n_min) throw InvalidConfig("bad N range");
    if (args.alpha2_step <= 0.0 || args.alpha2_step >= 1.0) throw InvalidConfig("bad alpha2 step");

    struct Row {
        int N;
        double alpha2;
        int M;
        bool feasible;
        double bound;
    };
    std::vector<double> grid;
    for (double a2 = args.alpha2_step; a2 < 1.0 - args.alpha2_step / 2; a2 += args.alpha2_step)
        grid.push_back(a2);

    std::vector<Row> rows;
    for (int n = args.n_min; n <= args.n_max; ++n)
        for (double a2 : grid) {
            int m = smallest_m(std::sqrt(1.0 - a2));
            rows.push_back({n, a2, m, m <= n, feasible_overlap_bound(n)});
        }

    if (args.certify) {
        // build and re-verify every feasible grid point, in parallel
        int threads = std::max(1, env_threads());
        std::atomic<size_t> next{0};
        std::vector<std::future<void>> futures;
        for (int w = 0; w < threads; ++w)
            futures.push_back(std::async(std::launch::async, [&]() {
                for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
                    if (!rows[i].feasible) continue;
                    double alpha = std::sqrt(rows[i].alpha2);
                    double beta = std::sqrt(1.0 - rows[i].alpha2);
                    verify_construction(build_construction(alpha, beta, rows[i].N, tol), tol);
                }
            }));
        for (auto& f : futures) f.get();
    }

    std::ostringstream csv;
    csv << "N,alpha2,M,feasible,bound\n";
    json rj = json::array();
    for (const auto& r : rows) {
        csv << r.N << "," << r.alpha2 << "," << r.M << "," << (r.feasible ? 1 : 0) << ","
            << r.bound << "\n";
        rj.push_back(json{{"N", r.N},
                          {"alpha2", r.alpha2},
                          {"M", r.M},
                          {"feasible", r.feasible},
                          {"bound", r.bound}});
    }
    json inputs{{"n_min", args.n_min},
                {"n_max", args.n_max},
                {"alpha2_step", args.alpha2_step},
                {"certify", args.certify}};
    if (args.emit == "json")
        write_output(make_report("scan", inputs, json{{"rows", rj}}, tol, timer.ms()).dump(2),
                     args.out);
    else
        write_output(csv.str(), args.out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ProveArgs {
    std::string builder = "mzi-fig1";
    std::string scenario_file;
    double alpha2 = 0.5;
    int N = 2;
    std::string variant = "plain";
    std::string axioms = "indifference,completeness,coverage";
    int search_k = 0;
    bool set_preserving = false;
    bool show_trace = false;
    std::string phi = "phi";
    std::string psi = "psi";
    std::string emit = "table";
    std::string out;
};

int cmd_prove(const ProveArgs& args, const Tolerances& tol) {
    Timer timer;
    auto scenario = std::make_shared<QuantumScenario>();
    NogoInstance instance;

    bool restricted = args.variant == "restricted";
    if (!restricted && args.variant != "plain")
        throw InvalidConfig("variant must be plain or restricted");

    if (!args.scenario_file.empty()) {
        if (restricted) throw InvalidConfig("restricted variant needs the construct builder");
        *scenario = load_scenario_document(args.scenario_file, tol);
        instance.phi = args.phi;
        instance.psi = args.psi;
        if (scenario->measurements.size() != 1)
            throw InvalidConfig("scenario file must contain exactly one measurement");
        instance.measurement = scenario->measurements.begin()->first;
        instance.members = scenario->member_ids();
    } else if (args.builder == "mzi-fig1" || args.builder == "mzi-fig2" ||
               args.builder == "mzi") {
        if (restricted) throw InvalidConfig("restricted variant needs the construct builder");
        *scenario = build_mzi(MziConfig::balanced(), tol);
        instance = mzi_instance();
    } else if (args.builder == "mzi-fig3" || args.builder == "mzi-fig4") {
        if (restricted) throw InvalidConfig("restricted variant needs the construct builder");
        *scenario = build_mzi(MziConfig::tapped(args.alpha2), tol);
        instance = mzi_instance();
    } else if (args.builder == "construct") {
        if (args.alpha2 <= 0.0 || args.alpha2 >= 1.0)
            throw InvalidConfig("alpha2 must lie strictly between 0 and 1");
        NogoConstruction c = build_construction(std::sqrt(args.alpha2),
                                                std::sqrt(1.0 - args.alpha2), args.N, tol);
        if (restricted) {
            auto [rs, ri] = restricted_instance(c, CVector::basis(c.N + 1, 0), tol);
            *scenario = std::move(rs);
            instance = std::move(ri);
        } else {
            *scenario = scenario_from_construction(c, tol);
            instance = instance_from_construction(c);
        }
    } else {
        throw InvalidConfig("unknown builder: " + args.builder);
    }

    ProofTrace trace = derive_nonoverlap(*scenario, instance, tol);
    TraceCheckResult check = check_trace(trace, *scenario, tol);

    std::set<Axiom> axioms;
    {
        std::stringstream ss(args.axioms);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) axioms.insert(axiom_from_name(item));
    }
    bool full_axioms = axioms.count(Axiom::OnticIndifference) &&
                       axioms.count(Axiom::PossibilisticCompleteness) &&
                       axioms.count(Axiom::OutcomeCoverage);

    std::ostringstream table;
    table << "trace: " << trace.steps.size() << " steps, check "
          << (check.ok ? "OK" : ("FAILED at step " + std::to_string(check.first_invalid_step) +
                                 " (" + check.reason + ")"))
          << "\n";
    if (args.show_trace) {
        for (size_t i = 0; i < trace.steps.size(); ++i) {
            const TraceStep& st = trace.steps[i];
            table << "  " << std::setw(3) << i << ". [" << rule_name(st.rule) << "] "
                  << st.assertion.str();
            if (!st.refs.empty()) {
                table << "  <-";
                for (int r : st.refs) table << " " << r;
            }
            table << "\n";
        }
        table << "  conclusion: " << trace.conclusion.str() << "\n";
    }

    json results;
    results["trace"] = trace_to_json(trace);
    results["trace_check"] = json{{"ok", check.ok},
                                  {"first_invalid_step", check.first_invalid_step},
                                  {"reason", check.reason}};

    bool disagreement = !check.ok;
    if (args.search_k > 0) {
        json searches = json::array();
        for (int k = 2; k <= args.search_k; ++k) {
            FeasibilityProblem problem;
            problem.scenario = scenario;
            problem.phi = instance.phi;
            problem.psi = instance.psi;
            problem.measurement = instance.measurement;
            problem.members = instance.members;
            problem.axioms = axioms;
            problem.require_overlap = true;
            problem.set_preserving = args.set_preserving;
            problem.K = k;
            problem.threads = env_threads();
            SearchResult r = feasibility_search(problem, tol);
            table << "search K=" << k << ": " << (r.sat ? "Sat" : "Unsat") << " ("
                  << r.stats.branches << " branches)\n";
            json sj{{"K", k}, {"sat", r.sat}, {"branches", r.stats.branches}};
            if (r.sat && r.witness) sj["witness"] = model_to_json(*r.witness);
            if (!r.sat) {
                sj["pruning_lemmas"] = r.stats.pruning_lemmas;
                sj["caveat"] = r.stats.caveat;
            }
            searches.push_back(sj);
            // the trace rests on the pointwise indifference reading: a Sat
            // under the weakened reading is a demonstration, not a conflict
            if (r.sat && full_axioms && check.ok && !args.set_preserving) disagreement = true;
        }
        results["search"] = searches;
    }

    json inputs{{"builder", args.builder},   {"scenario_file", args.scenario_file},
                {"alpha2", args.alpha2},     {"N", args.N},
                {"variant", args.variant},   {"axioms", args.axioms},
                {"search_k", args.search_k}};
    if (args.emit == "json")
        write_output(make_report("prove", inputs, results, tol, timer.ms()).dump(2), args.out);
    else
        write_output(table.str(), args.out);
    return disagreement ? kExitDisagreement : kExitOk;
}

// ---------------------------------------------------------------------------

struct CheckModelArgs {
    std::string file;
    std::string builtin;
    std::string scenario_file;
    std::string export_file;
    std::string emit = "table";
    std::string out;
};

int cmd_check_model(const CheckModelArgs& args, const Tolerances& tol) {
    Timer timer;
    OntologicalModel model;
    if (!args.builtin.empty()) {
        if (args.builtin == "toybit") model = toy_bit().model;
        else if (args.builtin == "fieldmzi") model = field_path_mzi().model;
        else throw InvalidConfig("builtin must be toybit or fieldmzi");
    } else if (!args.file.empty()) {
        std::shared_ptr<const QuantumScenario> scenario;
        if (!args.scenario_file.empty())
            scenario = std::make_shared<const QuantumScenario>(
                load_scenario_document(args.scenario_file, tol));
        model = load_model(args.file, scenario, tol);
    } else {
        throw InvalidConfig("check-model needs a model file or --builtin");
    }
    if (!args.export_file.empty()) save_json_file(args.export_file, model_to_json(model));

    std::ostringstream table;
    json results;

    Classification cls = classify_model(model);
    table << "classification: " << (cls.psi_epistemic ? "PsiEpistemic" : "PsiOntic");
    results["classification"] = cls.psi_epistemic ? "PsiEpistemic" : "PsiOntic";
    if (cls.psi_epistemic) {
        table << "  witness (" << cls.prep_a << ", " << cls.prep_b << ") overlap {";
        json ov = json::array();
        bool comma = false;
        for (const auto& l : cls.overlap) {
            if (comma) table << ", ";
            table << l;
            ov.push_back(l);
            comma = true;
        }
        table << "}";
        results["witness"] = json{{"prep_a", cls.prep_a}, {"prep_b", cls.prep_b}, {"overlap", ov}};
    }
    table << "\n";

    if (model.scenario) {
        CompletenessReport comp = check_possibilistic_completeness(model, tol);
        table << "possibilistic completeness: " << (comp.ok ? "OK" : "VIOLATED") << "\n";
        json vj = json::array();
        for (const auto& v : comp.violations) {
            table << "  violation (" << v.prep << ", " << v.member << ", " << v.outcome << "): "
                  << (v.model_allows_quantum_forbids ? "model allows what quantum forbids"
                                                     : "model forbids what quantum allows")
                  << "\n";
            vj.push_back(json{{"prep", v.prep},
                              {"member", v.member},
                              {"outcome", v.outcome},
                              {"model_allows_quantum_forbids", v.model_allows_quantum_forbids}});
        }
        results["completeness"] = json{{"ok", comp.ok}, {"violations", vj}};

        json ij = json::array();
        for (const auto& [member, tmap] : model.transitions) {
            for (const auto& [prep, e] : model.preparations) {
                try {
                    IndifferenceResult r = check_ontic_indifference(model, member, prep, false, tol);
                    table << "indifference (" << member << " on " << prep << "): "
                          << (r.ok ? "OK" : "Violation at " + r.moved_state);
                    json entry{{"member", member},
                               {"prep", prep},
                               {"ok", r.ok},
                               {"moved_state", r.moved_state}};
                    if (!r.ok) {
                        IndifferenceResult sp =
                            check_ontic_indifference(model, member, prep, true, tol);
                        table << (sp.ok ? " (set-preserving: OK)"
                                        : " (set-preserving: Violation)");
                        entry["set_preserving_ok"] = sp.ok;
                    }
                    table << "\n";
                    ij.push_back(entry);
                } catch (const PreconditionNotApplicable&) {
                    // member does not fix this preparation; nothing to check
                }
            }
        }
        results["indifference"] = ij;
    } else {
        table << "(model not bound to a scenario: quantum-side checks skipped)\n";
    }

    json inputs{{"file", args.file}, {"builtin", args.builtin},
                {"scenario_file", args.scenario_file}};
    if (args.emit == "json")
        write_output(make_report("check-model", inputs, results, tol, timer.ms()).dump(2),
                     args.out);
    else
        write_output(table.str(), args.out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"onticlab - ontological-model verification toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "key=value tolerance configuration file");

    MziArgs mzi_args;
    auto* mzi = app.add_subcommand("mzi", "interferometer probability tables");
    mzi->add_option("--figure", mzi_args.figure, "layout preset 1-4")->required();
    mzi->add_option("--alpha2", mzi_args.alpha2, "source overlap alpha^2 (layouts 3/4)");
    mzi->add_option("--phase", mzi_args.phase, "restrict to shifter setting 0 or pi");
    mzi->add_option("--emit", mzi_args.emit, "table|json");
    mzi->add_option("--out", mzi_args.out, "output file");

    ConstructArgs con_args;
    auto* con = app.add_subcommand("construct", "build and certify the unitary-family bundle");
    con->add_option("--alpha2", con_args.alpha2, "overlap |<phi|psi>|^2")->required();
    con->add_option("--N", con_args.N, "Hilbert dimension minus one")->required();
    con->add_flag("--restricted", con_args.restricted, "wrap with the conjugated protocol");
    con->add_option("--emit", con_args.emit, "table|json");
    con->add_option("--out", con_args.out, "output file");

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "feasibility scan over (N, alpha^2)");
    scan->add_option("--n-min", scan_args.n_min, "smallest N");
    scan->add_option("--n-max", scan_args.n_max, "largest N");
    scan->add_option("--alpha2-step", scan_args.alpha2_step, "grid step");
    scan->add_flag("--certify", scan_args.certify, "build and verify each feasible point");
    scan->add_option("--emit", scan_args.emit, "csv|json");
    scan->add_option("--out", scan_args.out, "output file");

    ProveArgs prove_args;
    auto* prove = app.add_subcommand("prove", "derive and check the non-overlap trace");
    prove->add_option("--builder", prove_args.builder,
                      "mzi-fig1|mzi-fig2|mzi-fig3|mzi-fig4|construct");
    prove->add_option("--scenario", prove_args.scenario_file, "scenario JSON file");
    prove->add_option("--alpha2", prove_args.alpha2, "overlap for construct/tapped builders");
    prove->add_option("--N", prove_args.N, "dimension minus one for the construct builder");
    prove->add_option("--variant", prove_args.variant, "plain|restricted");
    prove->add_option("--axioms", prove_args.axioms,
                      "comma list: indifference,completeness,coverage");
    prove->add_option("--search", prove_args.search_k, "cross-check by search for K = 2..arg");
    prove->add_flag("--set-preserving", prove_args.set_preserving,
                    "weaken indifference in the search to the set-preserving reading");
    prove->add_flag("--show-trace", prove_args.show_trace, "print every trace step");
    prove->add_option("--phi", prove_args.phi, "phi preparation name (scenario files)");
    prove->add_option("--psi", prove_args.psi, "psi preparation name (scenario files)");
    prove->add_option("--emit", prove_args.emit, "table|json");
    prove->add_option("--out", prove_args.out, "output file");

    CheckModelArgs check_args;
    auto* check = app.add_subcommand("check-model", "classify and audit an ontological model");
    check->add_option("file", check_args.file, "model JSON file");
    check->add_option("--builtin", check_args.builtin, "toybit|fieldmzi");
    check->add_option("--scenario", check_args.scenario_file, "scenario JSON file");
    check->add_option("--export", check_args.export_file, "write the model JSON here");
    check->add_option("--emit", check_args.emit, "table|json");
    check->add_option("--out", check_args.out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return kExitConfig;
    }

    try {
        Tolerances tol = load_tolerances(config_file);
        if (mzi->parsed()) return cmd_mzi(mzi_args, tol);
        if (con->parsed()) return cmd_construct(con_args, tol);
        if (scan->parsed()) return cmd_scan(scan_args, tol);
        if (prove->parsed()) return cmd_prove(prove_args, tol);
        if (check->parsed()) return cmd_check_model(check_args, tol);
    } catch (const Infeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const OutOfRange& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}

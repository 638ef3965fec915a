#include "onticlab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace onticlab {

// --- expression text --------------------------------------------------------

std::string SetAtom::str() const {
    if (is_support()) return "L(" + prep + ")";
    if (contexted()) return "S(" + prep + ";" + outcome + "|" + member + ")";
    return "S(" + prep + ";" + outcome + ")";
}

std::string SetExpr::str() const {
    switch (kind) {
        case Kind::Atom: return atom.str();
        case Kind::Empty: return "empty";
        case Kind::Union: {
            std::string s;
            for (size_t i = 0; i < kids.size(); ++i) {
                if (i) s += " | ";
                s += kids[i].str();
            }
            return s;
        }
        case Kind::Intersect: {
            std::string s;
            for (size_t i = 0; i < kids.size(); ++i) {
                if (i) s += " & ";
                bool paren = kids[i].kind == Kind::Union;
                s += paren ? "(" + kids[i].str() + ")" : kids[i].str();
            }
            return s;
        }
    }
    return "";
}

std::string SetAssertion::str() const {
    return lhs.str() + (rel == Relation::Equal ? " = " : " <= ") + rhs.str();
}

// --- parser -----------------------------------------------------------------

namespace {

struct Lexer {
    std::string text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool consume(const std::string& tok) {
        skip_ws();
        if (text.compare(pos, tok.size(), tok) == 0) {
            pos += tok.size();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError("set expression: " + msg + " at position " + std::to_string(pos) +
                         " in '" + text + "'");
    }

    SetAtom atom() {
        skip_ws();
        if (consume("L(")) {
            size_t close = text.find(')', pos);
            if (close == std::string::npos) fail("unterminated L(");
            SetAtom a;
            a.prep = text.substr(pos, close - pos);
            pos = close + 1;
            if (a.prep.empty()) fail("empty preparation name");
            return a;
        }
        if (consume("S(")) {
            size_t close = text.find(')', pos);
            if (close == std::string::npos) fail("unterminated S(");
            std::string body = text.substr(pos, close - pos);
            pos = close + 1;
            size_t semi = body.find(';');
            if (semi == std::string::npos) fail("S(...) needs 'prep;outcome'");
            SetAtom a;
            a.prep = body.substr(0, semi);
            std::string rest = body.substr(semi + 1);
            size_t bar = rest.find('|');
            if (bar == std::string::npos) {
                a.outcome = rest;
            } else {
                a.outcome = rest.substr(0, bar);
                a.member = rest.substr(bar + 1);
                if (a.member.empty()) fail("empty member name");
            }
            if (a.prep.empty() || a.outcome.empty()) fail("empty name in S(...)");
            return a;
        }
        fail("expected atom");
    }

    SetExpr primary() {
        skip_ws();
        if (consume("empty")) {
            SetExpr e;
            e.kind = SetExpr::Kind::Empty;
            return e;
        }
        if (peek() == '(') {
            ++pos;
            SetExpr e = expr();
            if (!consume(")")) fail("expected ')'");
            return e;
        }
        SetExpr e;
        e.kind = SetExpr::Kind::Atom;
        e.atom = atom();
        return e;
    }

    SetExpr iexpr() {
        SetExpr first = primary();
        if (peek() != '&') return first;
        SetExpr e;
        e.kind = SetExpr::Kind::Intersect;
        e.kids.push_back(std::move(first));
        while (consume("&")) e.kids.push_back(primary());
        return e;
    }

    SetExpr expr() {
        SetExpr first = iexpr();
        if (peek() != '|') return first;
        SetExpr e;
        e.kind = SetExpr::Kind::Union;
        e.kids.push_back(std::move(first));
        while (consume("|")) e.kids.push_back(iexpr());
        return e;
    }
};

} // namespace

SetAssertion parse_assertion(const std::string& text) {
    Lexer lex{text};
    SetAssertion a;
    a.lhs = lex.expr();
    if (lex.consume("<=")) {
        a.rel = Relation::Subset;
    } else if (lex.consume("=")) {
        a.rel = Relation::Equal;
    } else {
        lex.fail("expected '=' or '<='");
    }
    a.rhs = lex.expr();
    if (!lex.eof()) lex.fail("trailing input");
    return a;
}

// --- pointwise entailment ---------------------------------------------------

namespace {

void collect_atoms(const SetExpr& e, std::set<SetAtom>& out) {
    if (e.kind == SetExpr::Kind::Atom) {
        out.insert(e.atom);
        if (!e.atom.is_support()) out.insert(SetAtom{e.atom.prep, "", ""});
    }
    for (const auto& k : e.kids) collect_atoms(k, out);
}

bool eval_expr(const SetExpr& e, const std::map<SetAtom, bool>& value) {
    switch (e.kind) {
        case SetExpr::Kind::Atom: return value.at(e.atom);
        case SetExpr::Kind::Empty: return false;
        case SetExpr::Kind::Union:
            for (const auto& k : e.kids)
                if (eval_expr(k, value)) return true;
            return false;
        case SetExpr::Kind::Intersect:
            for (const auto& k : e.kids)
                if (!eval_expr(k, value)) return false;
            return true;
    }
    return false;
}

bool eval_assertion(const SetAssertion& a, const std::map<SetAtom, bool>& value) {
    bool l = eval_expr(a.lhs, value);
    bool r = eval_expr(a.rhs, value);
    return a.rel == Relation::Equal ? l == r : (!l || r);
}

} // namespace

bool set_entails(const std::vector<SetAssertion>& premises, const SetAssertion& conclusion) {
    std::set<SetAtom> atom_set;
    for (const auto& p : premises) {
        collect_atoms(p.lhs, atom_set);
        collect_atoms(p.rhs, atom_set);
    }
    collect_atoms(conclusion.lhs, atom_set);
    collect_atoms(conclusion.rhs, atom_set);

    std::vector<SetAtom> atoms(atom_set.begin(), atom_set.end());
    if (atoms.size() > 22) throw Error("set_entails: too many atoms for exhaustive check");

    // Definitional containments S(p;o[|m]) <= L(p).
    std::vector<SetAssertion> defs;
    for (const auto& a : atoms) {
        if (a.is_support()) continue;
        SetAssertion d;
        d.lhs.kind = SetExpr::Kind::Atom;
        d.lhs.atom = a;
        d.rel = Relation::Subset;
        d.rhs.kind = SetExpr::Kind::Atom;
        d.rhs.atom = SetAtom{a.prep, "", ""};
        defs.push_back(d);
    }

    size_t n = atoms.size();
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        std::map<SetAtom, bool> value;
        for (size_t i = 0; i < n; ++i) value[atoms[i]] = (mask >> i) & 1;
        bool premises_hold = true;
        for (const auto& d : defs)
            if (!eval_assertion(d, value)) {
                premises_hold = false;
                break;
            }
        if (premises_hold)
            for (const auto& p : premises)
                if (!eval_assertion(p, value)) {
                    premises_hold = false;
                    break;
                }
        if (premises_hold && !eval_assertion(conclusion, value)) return false;
    }
    return true;
}

// --- rules ------------------------------------------------------------------

std::string rule_name(Rule r) {
    switch (r) {
        case Rule::OnticIndifference: return "OnticIndifference";
        case Rule::PossibilisticCompleteness: return "PossibilisticCompleteness";
        case Rule::OutcomeCoverage: return "OutcomeCoverage";
        case Rule::SetAlgebra: return "SetAlgebra";
        case Rule::QuantumZero: return "QuantumZero";
    }
    return "";
}

Rule rule_from_name(const std::string& name) {
    if (name == "OnticIndifference") return Rule::OnticIndifference;
    if (name == "PossibilisticCompleteness") return Rule::PossibilisticCompleteness;
    if (name == "OutcomeCoverage") return Rule::OutcomeCoverage;
    if (name == "SetAlgebra") return Rule::SetAlgebra;
    if (name == "QuantumZero") return Rule::QuantumZero;
    throw ParseError("unknown rule: " + name);
}

namespace {

SetExpr atom_expr(SetAtom a) {
    SetExpr e;
    e.kind = SetExpr::Kind::Atom;
    e.atom = std::move(a);
    return e;
}

SetExpr empty_expr() {
    SetExpr e;
    e.kind = SetExpr::Kind::Empty;
    return e;
}

SetAtom support_atom(const std::string& prep) { return SetAtom{prep, "", ""}; }
SetAtom outcome_atom(const std::string& prep, const std::string& outcome,
                     const std::string& member = "") {
    return SetAtom{prep, outcome, member};
}

SetAssertion make_assertion(SetExpr lhs, Relation rel, SetExpr rhs) {
    return SetAssertion{std::move(lhs), rel, std::move(rhs)};
}

const SetAtom* single_atom(const SetExpr& e) {
    return e.kind == SetExpr::Kind::Atom ? &e.atom : nullptr;
}

// Quantum license for the ontic-indifference collapse at (prep, member).
bool member_fixes_prep(const QuantumScenario& s, const std::string& member,
                       const std::string& prep, const Tolerances& tol) {
    const CVector& v = s.preparation(prep);
    CVector moved = apply_unitary(s.member(member), v, tol);
    return equal_up_to_global_phase(v, moved, 1e-9);
}

struct VerifiedContext {
    // member ids whose collapse at trace.phi is licensed via the conjugated
    // protocol rather than a direct fix check
    std::set<std::string> mapped_members;
    std::string zero_prep;
};

// Verifies the conjugated-protocol metadata: W phi = zero, each mapped
// member equals W^dagger Ut W, and Ut fixes the zero state.
VerifiedContext verify_restricted_context(const ProofTrace& t, const QuantumScenario& s) {
    const RestrictedContext& rc = *t.restricted;
    VerifiedContext out;
    out.zero_prep = rc.zero_prep;
    const CVector& phi = s.preparation(t.phi);
    const CVector& zero = s.preparation(rc.zero_prep);
    const CMatrix& w = s.member(rc.w_member);
    if (!equal_up_to_global_phase(zero, w * phi, 1e-9))
        throw Error("restricted context: W does not map phi to the zero state");
    CMatrix w_dag = w.adjoint();
    for (const auto& [m, ut] : rc.member_map) {
        const CMatrix& um = s.member(m);
        const CMatrix& ut_m = s.member(ut);
        if (max_abs_diff(um, w_dag * ut_m * w) > 1e-9)
            throw Error("restricted context: member '" + m +
                        "' is not the conjugate of '" + ut + "'");
        if (!equal_up_to_global_phase(zero, ut_m * zero, 1e-9))
            throw Error("restricted context: '" + ut + "' does not fix the zero state");
        out.mapped_members.insert(m);
    }
    for (const auto& m : t.members)
        if (!out.mapped_members.count(m))
            throw Error("restricted context: member '" + m + "' missing from member_map");
    return out;
}

void check_names(const SetAssertion& a, const QuantumScenario& s) {
    std::set<SetAtom> atoms;
    collect_atoms(a.lhs, atoms);
    collect_atoms(a.rhs, atoms);
    for (const auto& atom : atoms) {
        s.preparation(atom.prep);
        if (!atom.outcome.empty()) s.measurement_of_outcome(atom.outcome);
        if (!atom.member.empty()) s.member(atom.member);
    }
}

} // namespace

// --- derivation -------------------------------------------------------------

NogoInstance mzi_instance() {
    NogoInstance inst;
    inst.phi = "phi";
    inst.psi = "psi";
    inst.measurement = "detectors";
    inst.members = {"phi=0", "phi=pi"};
    return inst;
}

NogoInstance instance_from_construction(const NogoConstruction& c) {
    NogoInstance inst;
    inst.phi = "phi";
    inst.psi = "psi";
    inst.measurement = "D";
    for (int m = 0; m <= c.N; ++m) inst.members.push_back("m=" + std::to_string(m));
    return inst;
}

std::pair<QuantumScenario, NogoInstance> restricted_instance(const NogoConstruction& c,
                                                             const CVector& zero_state,
                                                             const Tolerances& tol) {
    RestrictedProtocol proto = build_restricted_protocol(c.a0, zero_state, c, tol);
    QuantumScenario s = scenario_from_construction(c, tol);
    s.preparations["zero"] = zero_state;
    s.families["Wf"]["W"] = proto.W;
    RestrictedContext rc;
    rc.zero_prep = "zero";
    rc.w_member = "W";
    for (int m = 0; m <= c.N; ++m) {
        std::string u_id = "m=" + std::to_string(m);
        std::string ut_id = "ut=" + std::to_string(m);
        s.families["Ut"][ut_id] = proto.u_tilde[static_cast<size_t>(m)];
        rc.member_map[u_id] = ut_id;
    }
    s.validate(tol);

    NogoInstance inst = instance_from_construction(c);
    inst.restricted = rc;
    return {std::move(s), std::move(inst)};
}

ProofTrace derive_nonoverlap(const QuantumScenario& s, const NogoInstance& instance,
                             const Tolerances& tol) {
    ProofTrace t;
    t.phi = instance.phi;
    t.psi = instance.psi;
    t.measurement = instance.measurement;
    t.members = instance.members;
    t.restricted = instance.restricted;
    if (t.members.empty()) throw Error("derive_nonoverlap: no members given");

    const Measurement& meas = s.measurement(t.measurement);
    const std::string& mc = t.members.front();  // coverage context

    // Either-or analysis per outcome: either phi itself never triggers the
    // outcome (in any context), or some context forbids it for psi.
    struct Branch {
        bool first = false;     // phi-side zero in every context
        std::string member;     // psi-side zero context (second branch)
    };
    std::map<std::string, Branch> branch;
    for (size_t oi = 0; oi < meas.outcomes.size(); ++oi) {
        const std::string& o = meas.outcomes[oi];
        bool first = true;
        for (const auto& m : t.members)
            if (!is_quantum_zero(s, t.phi, m, o, tol)) {
                first = false;
                break;
            }
        if (first) {
            branch[o] = {true, ""};
            continue;
        }
        // prefer the member paired with this outcome index, if present
        std::string preferred = "m=" + std::to_string(oi);
        std::vector<std::string> order;
        if (std::find(t.members.begin(), t.members.end(), preferred) != t.members.end())
            order.push_back(preferred);
        for (const auto& m : t.members)
            if (m != preferred) order.push_back(m);
        std::string found;
        for (const auto& m : order)
            if (is_quantum_zero(s, t.psi, m, o, tol)) {
                found = m;
                break;
            }
        if (found.empty())
            throw ConditionNotMet("derive_nonoverlap: outcome '" + o +
                                  "' admits neither zero branch");
        branch[o] = {false, found};
    }

    auto push = [&t](SetAssertion a, Rule r, std::vector<int> refs = {}) {
        t.steps.push_back({std::move(a), r, std::move(refs)});
        return static_cast<int>(t.steps.size()) - 1;
    };

    // Conjugated-protocol variant: record the collapse at the zero state,
    // the route that licenses the phi-level collapses below.
    if (t.restricted) {
        const std::string& zp = t.restricted->zero_prep;
        for (const auto& o : meas.outcomes)
            for (const auto& [m, ut] : t.restricted->member_map) {
                (void)m;
                push(make_assertion(atom_expr(outcome_atom(zp, o, ut)), Relation::Equal,
                                    atom_expr(outcome_atom(zp, o))),
                     Rule::OnticIndifference);
            }
    }

    // Definitional containments.
    for (const auto& o : meas.outcomes)
        push(make_assertion(atom_expr(outcome_atom(t.phi, o, mc)), Relation::Subset,
                            atom_expr(support_atom(t.phi))),
             Rule::SetAlgebra);

    // Collapse of the member index.
    std::map<std::pair<std::string, std::string>, int> collapse;
    auto ensure_collapse = [&](const std::string& o, const std::string& m) {
        auto key = std::make_pair(o, m);
        auto it = collapse.find(key);
        if (it != collapse.end()) return it->second;
        int idx = push(make_assertion(atom_expr(outcome_atom(t.phi, o, m)), Relation::Equal,
                                      atom_expr(outcome_atom(t.phi, o))),
                       Rule::OnticIndifference);
        collapse[key] = idx;
        return idx;
    };
    for (const auto& o : meas.outcomes) ensure_collapse(o, mc);
    for (const auto& o : meas.outcomes)
        if (!branch[o].first && branch[o].member != mc) ensure_collapse(o, branch[o].member);

    // Coverage: some outcome must occur, stated context-free via the
    // collapses at the common context.
    SetExpr cover_union;
    cover_union.kind = SetExpr::Kind::Union;
    std::vector<int> cover_refs;
    for (const auto& o : meas.outcomes) {
        cover_union.kids.push_back(atom_expr(outcome_atom(t.phi, o)));
        cover_refs.push_back(collapse.at({o, mc}));
    }
    int coverage_idx = push(make_assertion(atom_expr(support_atom(t.phi)), Relation::Equal,
                                           std::move(cover_union)),
                            Rule::OutcomeCoverage, std::move(cover_refs));

    // Per-outcome emptiness of the intersection with L(psi).
    std::vector<int> empt_idx;
    for (const auto& o : meas.outcomes) {
        const Branch& br = branch[o];
        SetExpr target_lhs;
        target_lhs.kind = SetExpr::Kind::Intersect;
        target_lhs.kids.push_back(atom_expr(outcome_atom(t.phi, o)));
        target_lhs.kids.push_back(atom_expr(support_atom(t.psi)));
        if (br.first) {
            int qz = push(make_assertion(atom_expr(outcome_atom(t.phi, o, mc)), Relation::Equal,
                                         empty_expr()),
                          Rule::QuantumZero);
            empt_idx.push_back(push(
                make_assertion(std::move(target_lhs), Relation::Equal, empty_expr()),
                Rule::SetAlgebra, {collapse.at({o, mc}), qz}));
        } else {
            SetExpr pc_lhs;
            pc_lhs.kind = SetExpr::Kind::Intersect;
            pc_lhs.kids.push_back(atom_expr(outcome_atom(t.phi, o, br.member)));
            pc_lhs.kids.push_back(atom_expr(support_atom(t.psi)));
            int pc = push(make_assertion(std::move(pc_lhs), Relation::Equal, empty_expr()),
                          Rule::PossibilisticCompleteness);
            empt_idx.push_back(push(
                make_assertion(std::move(target_lhs), Relation::Equal, empty_expr()),
                Rule::SetAlgebra, {collapse.at({o, br.member}), pc}));
        }
    }

    // Distribute the intersection over the coverage union.
    SetExpr conclusion_lhs;
    conclusion_lhs.kind = SetExpr::Kind::Intersect;
    conclusion_lhs.kids.push_back(atom_expr(support_atom(t.phi)));
    conclusion_lhs.kids.push_back(atom_expr(support_atom(t.psi)));
    std::vector<int> final_refs{coverage_idx};
    final_refs.insert(final_refs.end(), empt_idx.begin(), empt_idx.end());
    push(make_assertion(conclusion_lhs, Relation::Equal, empty_expr()), Rule::SetAlgebra,
         std::move(final_refs));
    t.conclusion = t.steps.back().assertion;
    return t;
}

// --- checking ---------------------------------------------------------------

namespace {

// OnticIndifference shape: S(p;o|m) = S(p;o) or S(p;o|m) = S(p;o|m').
struct CollapseShape {
    std::string prep;
    std::string outcome;
    std::vector<std::string> members;  // one or two context ids
    bool context_free_rhs = false;
};

std::optional<CollapseShape> match_collapse(const SetAssertion& a) {
    if (a.rel != Relation::Equal) return std::nullopt;
    const SetAtom* l = single_atom(a.lhs);
    const SetAtom* r = single_atom(a.rhs);
    if (!l || !r) return std::nullopt;
    if (l->is_support() || r->is_support()) return std::nullopt;
    if (l->prep != r->prep || l->outcome != r->outcome) return std::nullopt;
    if (!l->contexted()) return std::nullopt;
    CollapseShape sh;
    sh.prep = l->prep;
    sh.outcome = l->outcome;
    sh.members.push_back(l->member);
    if (r->contexted()) {
        if (r->member == l->member) return std::nullopt;
        sh.members.push_back(r->member);
    } else {
        sh.context_free_rhs = true;
    }
    return sh;
}

std::string validate_step(const ProofTrace& t, const QuantumScenario& s, size_t idx,
                          const std::optional<VerifiedContext>& vctx, const Tolerances& tol) {
    const TraceStep& step = t.steps[idx];
    for (int r : step.refs)
        if (r < 0 || static_cast<size_t>(r) >= idx) return "reference to a non-prior step";
    check_names(step.assertion, s);

    switch (step.rule) {
        case Rule::OnticIndifference: {
            auto sh = match_collapse(step.assertion);
            if (!sh) return "assertion does not have the collapse shape S(p;o|m) = S(p;o[|m'])";
            for (const auto& m : sh->members) {
                bool licensed = false;
                if (vctx && sh->prep == t.phi) {
                    licensed = vctx->mapped_members.count(m) > 0;
                } else {
                    licensed = member_fixes_prep(s, m, sh->prep, tol);
                }
                if (!licensed)
                    return "member '" + m + "' does not leave preparation '" + sh->prep +
                           "' unchanged";
            }
            return "";
        }
        case Rule::QuantumZero: {
            if (step.assertion.rel != Relation::Equal) return "expected an equality";
            const SetAtom* l = single_atom(step.assertion.lhs);
            if (!l || l->is_support() || !l->contexted() ||
                step.assertion.rhs.kind != SetExpr::Kind::Empty)
                return "assertion does not have the shape S(p;o|m) = empty";
            if (!is_quantum_zero(s, l->prep, l->member, l->outcome, tol))
                return "no quantum zero for (" + l->prep + ", " + l->member + ", " + l->outcome +
                       ")";
            return "";
        }
        case Rule::PossibilisticCompleteness: {
            if (step.assertion.rel != Relation::Equal) return "expected an equality";
            if (step.assertion.rhs.kind != SetExpr::Kind::Empty) return "expected empty rhs";
            const SetExpr& lhs = step.assertion.lhs;
            if (lhs.kind != SetExpr::Kind::Intersect || lhs.kids.size() != 2)
                return "expected a two-term intersection";
            const SetAtom* a = single_atom(lhs.kids[0]);
            const SetAtom* b = single_atom(lhs.kids[1]);
            if (!a || !b) return "expected atomic intersection operands";
            const SetAtom* ctx = nullptr;
            const SetAtom* sup = nullptr;
            if (!a->is_support() && a->contexted() && b->is_support()) {
                ctx = a;
                sup = b;
            } else if (!b->is_support() && b->contexted() && a->is_support()) {
                ctx = b;
                sup = a;
            } else {
                return "expected S(p';o|m) & L(p)";
            }
            if (!is_quantum_zero(s, sup->prep, ctx->member, ctx->outcome, tol))
                return "no quantum zero for (" + sup->prep + ", " + ctx->member + ", " +
                       ctx->outcome + ")";
            return "";
        }
        case Rule::OutcomeCoverage: {
            if (step.assertion.rel != Relation::Equal) return "expected an equality";
            const SetAtom* l = single_atom(step.assertion.lhs);
            if (!l || !l->is_support()) return "expected L(p) on the left";
            const SetExpr& rhs = step.assertion.rhs;
            std::vector<const SetAtom*> terms;
            if (rhs.kind == SetExpr::Kind::Union) {
                for (const auto& k : rhs.kids) {
                    const SetAtom* atm = single_atom(k);
                    if (!atm) return "expected a union of atoms";
                    terms.push_back(atm);
                }
            } else if (const SetAtom* atm = single_atom(rhs)) {
                terms.push_back(atm);
            } else {
                return "expected a union of outcome supports";
            }
            const Measurement& meas = s.measurement(t.measurement);
            std::set<std::string> want(meas.outcomes.begin(), meas.outcomes.end());
            std::set<std::string> got;
            bool context_free = false;
            std::string common_member;
            for (const SetAtom* atm : terms) {
                if (atm->is_support() || atm->prep != l->prep)
                    return "union terms must be outcome supports of the same preparation";
                got.insert(atm->outcome);
                if (!atm->contexted()) {
                    context_free = true;
                } else if (common_member.empty()) {
                    common_member = atm->member;
                } else if (common_member != atm->member) {
                    return "mixed contexts in coverage";
                }
            }
            if (got != want) return "union does not cover exactly the measurement outcomes";
            if (!context_free) return "";
            if (!common_member.empty()) return "mixed context-free and contexted terms";
            // Context-free coverage must be backed by collapse steps at one
            // common member for every outcome.
            std::map<std::string, std::set<std::string>> member_to_outcomes;
            for (int r : step.refs) {
                const TraceStep& ref = t.steps[static_cast<size_t>(r)];
                if (ref.rule != Rule::OnticIndifference) continue;
                auto sh = match_collapse(ref.assertion);
                if (!sh || !sh->context_free_rhs || sh->prep != l->prep) continue;
                member_to_outcomes[sh->members[0]].insert(sh->outcome);
            }
            for (const auto& [m, outs] : member_to_outcomes)
                if (outs == want) return "";
            return "context-free coverage lacks collapse references at a common member";
        }
        case Rule::SetAlgebra: {
            std::vector<SetAssertion> premises;
            for (int r : step.refs) premises.push_back(t.steps[static_cast<size_t>(r)].assertion);
            if (!set_entails(premises, step.assertion))
                return "assertion is not entailed by its references";
            return "";
        }
    }
    return "unknown rule";
}

} // namespace

TraceCheckResult check_trace(const ProofTrace& t, const QuantumScenario& s,
                             const Tolerances& tol) {
    std::optional<VerifiedContext> vctx;
    if (t.restricted) {
        try {
            vctx = verify_restricted_context(t, s);
        } catch (const std::exception& e) {
            return {false, 0, std::string("restricted context: ") + e.what()};
        }
    }
    for (size_t i = 0; i < t.steps.size(); ++i) {
        std::string reason;
        try {
            reason = validate_step(t, s, i, vctx, tol);
        } catch (const std::exception& e) {
            reason = e.what();
        }
        if (!reason.empty()) return {false, static_cast<int>(i), reason};
    }
    int conclusion_idx = static_cast<int>(t.steps.size());
    // The conclusion must be the final step's assertion and state
    // L(phi) & L(psi) = empty (in either operand order).
    if (t.steps.empty()) return {false, conclusion_idx, "empty trace"};
    if (t.conclusion.str() != t.steps.back().assertion.str())
        return {false, conclusion_idx, "conclusion does not match the final step"};
    const SetAssertion& c = t.conclusion;
    bool shape_ok = false;
    if (c.rel == Relation::Equal && c.rhs.kind == SetExpr::Kind::Empty &&
        c.lhs.kind == SetExpr::Kind::Intersect && c.lhs.kids.size() == 2) {
        const SetAtom* a = single_atom(c.lhs.kids[0]);
        const SetAtom* b = single_atom(c.lhs.kids[1]);
        if (a && b && a->is_support() && b->is_support()) {
            shape_ok = (a->prep == t.phi && b->prep == t.psi) ||
                       (a->prep == t.psi && b->prep == t.phi);
        }
    }
    if (!shape_ok)
        return {false, conclusion_idx, "conclusion is not L(phi) & L(psi) = empty"};
    return {true, -1, ""};
}

// --- serialization ----------------------------------------------------------

nlohmann::json trace_to_json(const ProofTrace& t) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["variant"] = t.restricted ? "restricted" : "plain";
    j["phi"] = t.phi;
    j["psi"] = t.psi;
    j["measurement"] = t.measurement;
    j["members"] = t.members;
    if (t.restricted) {
        nlohmann::json rc;
        rc["zero_prep"] = t.restricted->zero_prep;
        rc["w_member"] = t.restricted->w_member;
        rc["member_map"] = t.restricted->member_map;
        j["restricted"] = rc;
    }
    j["steps"] = nlohmann::json::array();
    for (const auto& st : t.steps) {
        nlohmann::json sj;
        sj["assert"] = st.assertion.str();
        sj["rule"] = rule_name(st.rule);
        sj["refs"] = st.refs;
        j["steps"].push_back(sj);
    }
    j["conclusion"] = t.conclusion.str();
    return j;
}

ProofTrace trace_from_json(const nlohmann::json& j) {
    ProofTrace t;
    if (!j.is_object()) throw ParseError("trace: expected object");
    t.phi = j.at("phi").get<std::string>();
    t.psi = j.at("psi").get<std::string>();
    t.measurement = j.at("measurement").get<std::string>();
    for (const auto& m : j.value("members", nlohmann::json::array()))
        t.members.push_back(m.get<std::string>());
    if (j.contains("restricted") && !j["restricted"].is_null()) {
        RestrictedContext rc;
        rc.zero_prep = j["restricted"].at("zero_prep").get<std::string>();
        rc.w_member = j["restricted"].at("w_member").get<std::string>();
        for (const auto& [k, v] : j["restricted"].at("member_map").items())
            rc.member_map[k] = v.get<std::string>();
        t.restricted = rc;
    }
    for (const auto& sj : j.at("steps")) {
        TraceStep st;
        st.assertion = parse_assertion(sj.at("assert").get<std::string>());
        st.rule = rule_from_name(sj.at("rule").get<std::string>());
        for (const auto& r : sj.value("refs", nlohmann::json::array()))
            st.refs.push_back(r.get<int>());
        t.steps.push_back(std::move(st));
    }
    t.conclusion = parse_assertion(j.at("conclusion").get<std::string>());
    return t;
}

} // namespace onticlab

#include "onticlab/search.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <future>
#include <mutex>
#include <thread>

namespace onticlab {

std::string axiom_name(Axiom a) {
    switch (a) {
        case Axiom::OnticIndifference: return "OnticIndifference";
        case Axiom::PossibilisticCompleteness: return "PossibilisticCompleteness";
        case Axiom::OutcomeCoverage: return "OutcomeCoverage";
        case Axiom::ProductSeparability: return "ProductSeparability";
    }
    return "";
}

Axiom axiom_from_name(const std::string& name) {
    if (name == "OnticIndifference" || name == "indifference") return Axiom::OnticIndifference;
    if (name == "PossibilisticCompleteness" || name == "completeness")
        return Axiom::PossibilisticCompleteness;
    if (name == "OutcomeCoverage" || name == "coverage") return Axiom::OutcomeCoverage;
    if (name == "ProductSeparability" || name == "separability")
        return Axiom::ProductSeparability;
    throw ParseError("unknown axiom: " + name);
}

namespace {

// For a fixed choice of supports and transition maps, the per-state
// possible-outcome sets can be taken maximal: every outcome not ruled out by
// a quantum zero flowing into the state. Positivity and coverage are
// monotone in these sets, so only memberships and transitions are searched;
// `forbidden` accumulates the ruled-out outcomes per state.

struct Tables {
    std::vector<std::string> preps;
    std::vector<std::string> outcomes;
    std::vector<std::string> members;
    int phi_idx = -1;
    int psi_idx = -1;
    std::vector<std::vector<uint32_t>> zero_mask;  // [prep][member] -> outcome bits
    std::vector<std::vector<bool>> fixes;          // [member][prep]
    bool oi = false;
    bool pc = false;
    bool cov = false;
    bool set_preserving = false;
    bool require_overlap = false;
    int K = 0;
    int P = 0;
    int O = 0;
    int Mn = 0;

    uint32_t full_outcomes() const { return (1u << O) - 1; }

    // outcomes forbidden at the image of a state with membership `mem`
    // under member m
    uint32_t flow_mask(int m, uint32_t mem) const {
        if (!pc) return 0;
        uint32_t out = 0;
        for (int p = 0; p < P; ++p)
            if ((mem >> p) & 1) out |= zero_mask[static_cast<size_t>(p)][static_cast<size_t>(m)];
        return out;
    }

    bool forced_identity(int m, uint32_t mem) const {
        if (!oi || set_preserving) return false;
        for (int p = 0; p < P; ++p)
            if (((mem >> p) & 1) && fixes[static_cast<size_t>(m)][static_cast<size_t>(p)])
                return true;
        return false;
    }
};

struct Assignment {
    std::vector<uint32_t> mem;
    std::vector<uint32_t> forbidden;
    std::vector<std::vector<int>> f;  // f[member][state], -1 = unassigned
};

struct Shared {
    std::atomic<long long> branches{0};
    std::atomic<bool> sat{false};
    std::atomic<bool> budget_hit{false};
    long long budget = 0;
    std::mutex witness_mutex;
    std::optional<Assignment> witness;
};

class Solver {
public:
    Solver(const Tables& t, Shared& shared) : t_(t), shared_(shared) {
        a_.mem.assign(static_cast<size_t>(t.K), 0);
        a_.forbidden.assign(static_cast<size_t>(t.K), 0);
        a_.f.assign(static_cast<size_t>(t.Mn), std::vector<int>(static_cast<size_t>(t.K), -1));
    }

    bool tick() {
        long long n = shared_.branches.fetch_add(1) + 1;
        if (n > shared_.budget) {
            shared_.budget_hit.store(true);
            return false;
        }
        return !shared_.sat.load(std::memory_order_relaxed);
    }

    bool stopped() const { return shared_.sat.load() || shared_.budget_hit.load(); }

    bool column_allowed(int lambda, uint32_t mem) const {
        if (t_.require_overlap && lambda == 0) {
            uint32_t need = (1u << t_.phi_idx) | (1u << t_.psi_idx);
            if ((mem & need) != need) return false;
        }
        return true;
    }

    // forced-identity members pin their zero flow onto the state itself
    uint32_t forced_flow(int lambda, uint32_t mem) const {
        (void)lambda;
        uint32_t out = 0;
        for (int m = 0; m < t_.Mn; ++m)
            if (t_.forced_identity(m, mem)) out |= t_.flow_mask(m, mem);
        return out;
    }

    bool search_columns(int lambda) {
        if (lambda == t_.K) return begin_free_search();
        int chain_start = t_.require_overlap ? 1 : 0;
        for (int mem = (1 << t_.P) - 1; mem >= 0; --mem) {
            if (!tick()) return false;
            if (lambda > chain_start &&
                static_cast<uint32_t>(mem) > a_.mem[static_cast<size_t>(lambda - 1)])
                continue;
            if (!column_allowed(lambda, static_cast<uint32_t>(mem))) continue;
            uint32_t flow = forced_flow(lambda, static_cast<uint32_t>(mem));
            if (t_.cov && flow == t_.full_outcomes()) continue;  // no outcome survives
            a_.mem[static_cast<size_t>(lambda)] = static_cast<uint32_t>(mem);
            if (search_columns(lambda + 1)) return true;
            if (stopped()) return false;
        }
        return false;
    }

    // entry point once memberships are fixed (column search or product mode)
    bool begin_free_search() {
        for (int p = 0; p < t_.P; ++p) {
            bool nonempty = false;
            for (int l = 0; l < t_.K; ++l)
                if ((a_.mem[static_cast<size_t>(l)] >> p) & 1) nonempty = true;
            if (!nonempty) return false;  // realism
        }
        // seed forbidden sets with the forced-identity flow
        for (int l = 0; l < t_.K; ++l) {
            a_.forbidden[static_cast<size_t>(l)] =
                forced_flow(l, a_.mem[static_cast<size_t>(l)]);
            if (t_.cov && a_.mem[static_cast<size_t>(l)] != 0 &&
                a_.forbidden[static_cast<size_t>(l)] == t_.full_outcomes())
                return false;
        }
        free_list_.clear();
        for (int m = 0; m < t_.Mn; ++m)
            for (int l = 0; l < t_.K; ++l) {
                if (a_.mem[static_cast<size_t>(l)] == 0) {
                    a_.f[static_cast<size_t>(m)][static_cast<size_t>(l)] = l;
                } else if (t_.forced_identity(m, a_.mem[static_cast<size_t>(l)])) {
                    a_.f[static_cast<size_t>(m)][static_cast<size_t>(l)] = l;
                } else {
                    a_.f[static_cast<size_t>(m)][static_cast<size_t>(l)] = -1;
                    free_list_.push_back({m, l});
                }
            }
        return search_free(0);
    }

    bool search_free(size_t idx) {
        if (idx == free_list_.size()) return leaf();
        auto [m, l] = free_list_[idx];
        uint32_t mem = a_.mem[static_cast<size_t>(l)];
        uint32_t flow = t_.flow_mask(m, mem);
        for (int target = 0; target < t_.K; ++target) {
            if (!tick()) return false;
            if (t_.oi && t_.set_preserving) {
                bool ok = true;
                for (int p = 0; p < t_.P && ok; ++p) {
                    if (!((mem >> p) & 1)) continue;
                    if (t_.fixes[static_cast<size_t>(m)][static_cast<size_t>(p)] &&
                        !((a_.mem[static_cast<size_t>(target)] >> p) & 1))
                        ok = false;
                }
                if (!ok) continue;
            }
            uint32_t before = a_.forbidden[static_cast<size_t>(target)];
            uint32_t after = before | flow;
            if (t_.cov && after == t_.full_outcomes()) continue;
            a_.forbidden[static_cast<size_t>(target)] = after;
            a_.f[static_cast<size_t>(m)][static_cast<size_t>(l)] = target;
            if (search_free(idx + 1)) return true;
            a_.forbidden[static_cast<size_t>(target)] = before;
            a_.f[static_cast<size_t>(m)][static_cast<size_t>(l)] = -1;
            if (stopped()) return false;
        }
        return false;
    }

    bool leaf() {
        if (t_.pc) {
            for (int p = 0; p < t_.P; ++p) {
                for (int m = 0; m < t_.Mn; ++m) {
                    uint32_t possible = 0;
                    for (int l = 0; l < t_.K; ++l)
                        if ((a_.mem[static_cast<size_t>(l)] >> p) & 1) {
                            int img = a_.f[static_cast<size_t>(m)][static_cast<size_t>(l)];
                            possible |= t_.full_outcomes() &
                                        ~a_.forbidden[static_cast<size_t>(img)];
                        }
                    uint32_t want = t_.full_outcomes() &
                                    ~t_.zero_mask[static_cast<size_t>(p)][static_cast<size_t>(m)];
                    if ((possible & want) != want) return false;
                }
            }
        }
        if (t_.oi && t_.set_preserving) {
            for (int m = 0; m < t_.Mn; ++m) {
                for (int p = 0; p < t_.P; ++p) {
                    if (!t_.fixes[static_cast<size_t>(m)][static_cast<size_t>(p)]) continue;
                    std::set<int> support, image;
                    for (int l = 0; l < t_.K; ++l)
                        if ((a_.mem[static_cast<size_t>(l)] >> p) & 1) {
                            support.insert(l);
                            image.insert(a_.f[static_cast<size_t>(m)][static_cast<size_t>(l)]);
                        }
                    if (support != image) return false;
                }
            }
        }
        if (!tick()) return false;
        std::lock_guard<std::mutex> lock(shared_.witness_mutex);
        if (!shared_.sat.exchange(true)) shared_.witness = a_;
        return true;
    }

    Assignment a_;
    std::vector<std::pair<int, int>> free_list_;
    const Tables& t_;
    Shared& shared_;
};

// Product mode: per-factor supports are enumerated and memberships derived,
// forcing every preparation's support into cartesian-product shape.
class ProductDriver {
public:
    ProductDriver(const Tables& t, Shared& shared, const ProductSpec& spec)
        : t_(t), shared_(shared), spec_(spec) {
        for (const auto& [prep, keys] : spec_.prep_factors) {
            if (std::find(t_.preps.begin(), t_.preps.end(), prep) == t_.preps.end())
                throw UnknownName("product spec: unknown preparation " + prep);
            if (std::find(a_keys_.begin(), a_keys_.end(), keys.first) == a_keys_.end())
                a_keys_.push_back(keys.first);
            if (std::find(b_keys_.begin(), b_keys_.end(), keys.second) == b_keys_.end())
                b_keys_.push_back(keys.second);
        }
        for (const auto& p : t_.preps)
            if (!spec_.prep_factors.count(p))
                throw Error("product spec: preparation " + p + " lacks factor keys");
        a_sup_.assign(a_keys_.size(), 0);
        b_sup_.assign(b_keys_.size(), 0);
    }

    bool run() { return enumerate_factor(0); }

private:
    size_t key_index(const std::vector<std::string>& keys, const std::string& k) const {
        return static_cast<size_t>(std::find(keys.begin(), keys.end(), k) - keys.begin());
    }

    bool factor_pinned(bool is_a, const std::string& key) const {
        if (!t_.require_overlap) return false;
        for (const auto& prep : {t_.preps[static_cast<size_t>(t_.phi_idx)],
                                 t_.preps[static_cast<size_t>(t_.psi_idx)]}) {
            const auto& keys = spec_.prep_factors.at(prep);
            if ((is_a ? keys.first : keys.second) == key) return true;
        }
        return false;
    }

    bool tick() {
        long long n = shared_.branches.fetch_add(1) + 1;
        if (n > shared_.budget) {
            shared_.budget_hit.store(true);
            return false;
        }
        return !shared_.sat.load(std::memory_order_relaxed);
    }

    bool enumerate_factor(size_t idx) {
        size_t na = a_keys_.size();
        if (idx == na + b_keys_.size()) return dispatch();
        bool is_a = idx < na;
        const std::string& key = is_a ? a_keys_[idx] : b_keys_[idx - na];
        int size = is_a ? spec_.size_a : spec_.size_b;
        uint32_t full = (1u << size) - 1;
        bool pinned = factor_pinned(is_a, key);
        for (uint32_t sup = 1; sup <= full; ++sup) {
            if (!tick()) return false;
            if (pinned && !(sup & 1)) continue;  // overlap witness at factor state 0
            (is_a ? a_sup_[idx] : b_sup_[idx - na]) = sup;
            if (enumerate_factor(idx + 1)) return true;
            if (shared_.sat.load() || shared_.budget_hit.load()) return false;
        }
        return false;
    }

    bool dispatch() {
        Solver solver(t_, shared_);
        for (int p = 0; p < t_.P; ++p) {
            const auto& keys = spec_.prep_factors.at(t_.preps[static_cast<size_t>(p)]);
            uint32_t asup = a_sup_[key_index(a_keys_, keys.first)];
            uint32_t bsup = b_sup_[key_index(b_keys_, keys.second)];
            for (int i = 0; i < spec_.size_a; ++i)
                for (int j = 0; j < spec_.size_b; ++j) {
                    int l = i * spec_.size_b + j;
                    if (((asup >> i) & 1) && ((bsup >> j) & 1))
                        solver.a_.mem[static_cast<size_t>(l)] |= (1u << p);
                }
        }
        return solver.begin_free_search();
    }

    const Tables& t_;
    Shared& shared_;
    const ProductSpec& spec_;
    std::vector<std::string> a_keys_, b_keys_;
    std::vector<uint32_t> a_sup_, b_sup_;
};

OntologicalModel witness_model(const Tables& t, const Assignment& a,
                               std::shared_ptr<const QuantumScenario> scenario,
                               const std::string& measurement) {
    OntologicalModel m;
    m.scenario = std::move(scenario);
    for (int l = 0; l < t.K; ++l) m.space.states.push_back("l" + std::to_string(l));

    for (int p = 0; p < t.P; ++p) {
        std::vector<int> support;
        for (int l = 0; l < t.K; ++l)
            if ((a.mem[static_cast<size_t>(l)] >> p) & 1) support.push_back(l);
        EpistemicState e;
        for (int l : support)
            e.distribution["l" + std::to_string(l)] = 1.0 / static_cast<double>(support.size());
        m.preparations[t.preps[static_cast<size_t>(p)]] = e;
    }
    for (int mi = 0; mi < t.Mn; ++mi) {
        TransitionMap tm;
        for (int l = 0; l < t.K; ++l) {
            int target = a.f[static_cast<size_t>(mi)][static_cast<size_t>(l)];
            if (target < 0) target = l;
            tm.kernel["l" + std::to_string(l)] = {{"l" + std::to_string(target), 1.0}};
        }
        m.transitions[t.members[static_cast<size_t>(mi)]] = tm;
    }
    ResponseFunction rf;
    for (int l = 0; l < t.K; ++l) {
        uint32_t oset = t.full_outcomes() & ~a.forbidden[static_cast<size_t>(l)];
        if (oset == 0)
            throw Error("witness conversion: state with no possible outcome "
                        "(outcome coverage was not among the axioms)");
        int bits = 0;
        for (int o = 0; o < t.O; ++o)
            if ((oset >> o) & 1) ++bits;
        auto& row = rf.xi["l" + std::to_string(l)];
        for (int o = 0; o < t.O; ++o)
            if ((oset >> o) & 1)
                row[t.outcomes[static_cast<size_t>(o)]] = 1.0 / static_cast<double>(bits);
    }
    m.responses[measurement] = rf;
    m.validate();
    return m;
}

} // namespace

SearchResult feasibility_search(const FeasibilityProblem& problem, const Tolerances& tol) {
    if (!problem.scenario) throw Error("feasibility_search: no scenario");
    if (problem.K < 1) throw OutOfRange("feasibility_search: K must be >= 1");
    const QuantumScenario& s = *problem.scenario;

    Tables t;
    for (const auto& [name, v] : s.preparations) t.preps.push_back(name);
    t.P = static_cast<int>(t.preps.size());
    if (t.P > 8) throw Error("feasibility_search: too many preparations");
    const Measurement& meas = s.measurement(problem.measurement);
    t.outcomes = meas.outcomes;
    t.O = static_cast<int>(t.outcomes.size());
    if (t.O > 20) throw Error("feasibility_search: too many outcomes");
    t.members = problem.members;
    t.Mn = static_cast<int>(t.members.size());
    t.K = problem.K;
    t.oi = problem.axioms.count(Axiom::OnticIndifference) > 0;
    t.pc = problem.axioms.count(Axiom::PossibilisticCompleteness) > 0;
    t.cov = problem.axioms.count(Axiom::OutcomeCoverage) > 0;
    t.set_preserving = problem.set_preserving;
    t.require_overlap = problem.require_overlap;
    t.phi_idx = static_cast<int>(
        std::find(t.preps.begin(), t.preps.end(), problem.phi) - t.preps.begin());
    t.psi_idx = static_cast<int>(
        std::find(t.preps.begin(), t.preps.end(), problem.psi) - t.preps.begin());
    if (t.phi_idx >= t.P) throw UnknownName("feasibility_search: unknown phi " + problem.phi);
    if (t.psi_idx >= t.P) throw UnknownName("feasibility_search: unknown psi " + problem.psi);

    t.zero_mask.assign(static_cast<size_t>(t.P),
                       std::vector<uint32_t>(static_cast<size_t>(t.Mn), 0));
    t.fixes.assign(static_cast<size_t>(t.Mn), std::vector<bool>(static_cast<size_t>(t.P), false));
    for (int p = 0; p < t.P; ++p)
        for (int m = 0; m < t.Mn; ++m)
            for (int o = 0; o < t.O; ++o)
                if (is_quantum_zero(s, t.preps[static_cast<size_t>(p)],
                                    t.members[static_cast<size_t>(m)],
                                    t.outcomes[static_cast<size_t>(o)], tol))
                    t.zero_mask[static_cast<size_t>(p)][static_cast<size_t>(m)] |= (1u << o);
    for (int m = 0; m < t.Mn; ++m) {
        const CMatrix& u = s.member(t.members[static_cast<size_t>(m)]);
        for (int p = 0; p < t.P; ++p) {
            const CVector& v = s.preparation(t.preps[static_cast<size_t>(p)]);
            t.fixes[static_cast<size_t>(m)][static_cast<size_t>(p)] =
                equal_up_to_global_phase(v, u * v, 1e-9);
        }
    }

    Shared shared;
    shared.budget = problem.budget;

    bool use_product = problem.axioms.count(Axiom::ProductSeparability) > 0 && problem.product;
    if (problem.axioms.count(Axiom::ProductSeparability) > 0 && !problem.product)
        throw Error("feasibility_search: ProductSeparability needs a product spec");

    if (use_product) {
        if (problem.product->size_a * problem.product->size_b != t.K)
            throw Error("feasibility_search: K must equal size_a * size_b");
        ProductDriver driver(t, shared, *problem.product);
        driver.run();
    } else {
        int threads = std::max(1, problem.threads);
        if (threads == 1 || t.K < 2) {
            Solver solver(t, shared);
            solver.search_columns(0);
        } else {
            // partition the first column's membership choices across workers
            Solver proto(t, shared);
            std::vector<uint32_t> firsts;
            for (int mem = (1 << t.P) - 1; mem >= 0; --mem) {
                proto.tick();
                if (proto.column_allowed(0, static_cast<uint32_t>(mem)) &&
                    !(t.cov &&
                      proto.forced_flow(0, static_cast<uint32_t>(mem)) == t.full_outcomes()))
                    firsts.push_back(static_cast<uint32_t>(mem));
            }
            threads = std::min<int>(threads, std::max<int>(1, static_cast<int>(firsts.size())));
            std::vector<std::future<void>> futures;
            for (int w = 0; w < threads; ++w) {
                futures.push_back(std::async(std::launch::async, [&, w]() {
                    Solver solver(t, shared);
                    for (size_t i = static_cast<size_t>(w); i < firsts.size();
                         i += static_cast<size_t>(threads)) {
                        if (solver.stopped()) return;
                        solver.a_.mem[0] = firsts[i];
                        if (!solver.tick()) return;
                        solver.search_columns(1);
                    }
                }));
            }
            for (auto& f : futures) f.get();
        }
    }

    if (shared.budget_hit.load() && !shared.sat.load())
        throw BudgetExceeded(shared.branches.load(),
                             "feasibility_search: branch budget exceeded after " +
                                 std::to_string(shared.branches.load()) + " branches");

    SearchResult result;
    result.stats.branches = shared.branches.load();
    result.stats.caveat =
        "Unsat at ontic budget K=" + std::to_string(t.K) +
        " does not by itself rule out larger ontic spaces; the trace derivation carries the "
        "size-independent argument. Transition kernels restricted to deterministic maps.";
    result.stats.pruning_lemmas.push_back("deterministic-kernels");
    result.stats.pruning_lemmas.push_back("realism-nonempty-supports");
    result.stats.pruning_lemmas.push_back("maximal-outcome-sets");
    if (!use_product) result.stats.pruning_lemmas.push_back("canonical-column-order");
    if (t.require_overlap) result.stats.pruning_lemmas.push_back("overlap-witness-pinned-at-l0");
    if (t.oi && !t.set_preserving)
        result.stats.pruning_lemmas.push_back("identity-forced-on-indifferent-supports");
    if (use_product) result.stats.pruning_lemmas.push_back("factorized-supports");

    if (shared.sat.load()) {
        result.sat = true;
        result.witness =
            witness_model(t, *shared.witness, problem.scenario, problem.measurement);
    }
    return result;
}

} // namespace onticlab

#include "enumerate.hpp"

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <thread>
#include <utility>

#include "search.hpp"
#include "surface.hpp"

namespace ifc {

namespace {

// transient instrumentation toggles, read once per sweep
bool env_flag(const char* name) { return std::getenv(name) != nullptr; }

constexpr int kMaxEnumSize = 8;

// Stored closed tiers stop here; the top sizes are streamed so the biggest
// tiers are never materialized.
constexpr int kStoreCap = 6;

std::string var_name(int depth) { return "x" + std::to_string(depth); }

// The universe outlives every node built from it, so children and
// annotations are referenced without ownership. Millions of nodes share a
// handful of very hot subterms; owning pointers would make every worker
// fight over those reference counts.
template <class T>
std::shared_ptr<const T> borrow(const std::shared_ptr<const T>& p) {
    return std::shared_ptr<const T>(std::shared_ptr<const T>(), p.get());
}

long long range_at(const std::vector<long long>& v, int i) {
    return (i >= 1 && i < (int)v.size()) ? v[i] : 0;
}

// ---- fine-grained universe ----

struct FGUniverse {
    LatticeP lat = lattice_two_point();
    Label lo = lat->bot(), hi = lat->top();
    int maxSize;
    std::vector<std::vector<FGTypeP>> ty;                // by node count
    std::vector<std::vector<std::vector<FGExprP>>> tab;  // [binder depth][size]

    explicit FGUniverse(int ms) : maxSize(ms) {
        build_types();
        build_tables();
    }

    int max_depth() const { return (maxSize - 1) / 2; }
    int depth_cap(int d) const {
        return d == 0 ? std::min(maxSize - 1, kStoreCap) : maxSize - 2 * d;
    }

    const std::vector<FGTypeP>& types(int s) const {
        static const std::vector<FGTypeP> none;
        return (s >= 1 && s < (int)ty.size()) ? ty[s] : none;
    }
    const std::vector<FGExprP>& terms(int d, int s) const {
        static const std::vector<FGExprP> none;
        if (d < 0 || d >= (int)tab.size()) return none;
        if (s < 1 || s >= (int)tab[d].size()) return none;
        return tab[d][s];
    }

    void build_types() {
        int cap = std::max(0, maxSize - 2);
        ty.assign(cap + 1, {});
        if (cap >= 1)
            for (Label l : {lo, hi}) {
                ty[1].push_back(fg_bool(l));
                ty[1].push_back(fg_unit(l));
            }
        for (int s = 2; s <= cap; s++) {
            auto& out = ty[s];
            for (const auto& c : ty[s - 1])
                for (Label l : {lo, hi}) out.push_back(fg_ref(c, l));
            for (int i = 1; i <= s - 2; i++)
                for (const auto& a : ty[i])
                    for (const auto& b : ty[s - 1 - i])
                        for (Label l : {lo, hi}) {
                            out.push_back(fg_prod(a, b, l));
                            out.push_back(fg_sum(a, b, l));
                            out.push_back(fg_fun(a, lo, b, l));
                            out.push_back(fg_fun(a, hi, b, l));
                        }
        }
    }

    void build_tables() {
        tab.assign(max_depth() + 1, {});
        for (int d = max_depth(); d >= 0; d--) {
            int cap = std::max(depth_cap(d), 0);
            tab[d].assign(cap + 1, {});
            for (int s = 1; s <= cap; s++) {
                uint64_t ctr = 0;
                emit(d, s, ctr, 1, 0, [&](FGExprP e) { tab[d][s].push_back(std::move(e)); });
            }
        }
    }

    // Every production of the given size and binder depth, in one fixed
    // order. `ctr` strides the alternatives across workers: a worker sinks
    // the alternatives whose running index falls in its residue class.
    template <class Sink>
    void emit(int d, int s, uint64_t& ctr, uint64_t stride, uint64_t phase, const Sink& sink) const {
        auto take = [&] { return ctr++ % stride == phase; };
        if (s == 1) {
            if (take()) sink(fgb::tru());
            if (take()) sink(fgb::fls());
            if (take()) sink(fgb::unit());
            for (int v = 0; v < d; v++)
                if (take()) sink(fgb::var(var_name(v)));
            return;
        }
        for (const auto& c : terms(d, s - 1)) {
            if (take()) sink(fgb::bnot(borrow(c)));
            if (take()) sink(fgb::fst(borrow(c)));
            if (take()) sink(fgb::snd(borrow(c)));
            if (take()) sink(fgb::deref(borrow(c)));
            if (take()) sink(fgb::newe(borrow(c), nullptr));
        }
        for (int i = 1; i <= s - 2; i++)
            for (const auto& a : terms(d, i))
                for (const auto& b : terms(d, s - 1 - i)) {
                    if (take()) sink(fgb::band(borrow(a), borrow(b)));
                    if (take()) sink(fgb::bor(borrow(a), borrow(b)));
                    if (take()) sink(fgb::app(borrow(a), borrow(b)));
                    if (take()) sink(fgb::pair(borrow(a), borrow(b)));
                    if (take()) sink(fgb::assign(borrow(a), borrow(b)));
                }
        for (int i = 1; i <= s - 3; i++)
            for (int j = 1; j <= s - 2 - i; j++)
                for (const auto& c : terms(d, i))
                    for (const auto& t : terms(d, j))
                        for (const auto& e : terms(d, s - 1 - i - j))
                            if (take()) sink(fgb::ife(borrow(c), borrow(t), borrow(e)));
        for (int ts = 1; ts <= s - 2; ts++)
            for (const auto& T : types(ts))
                for (Label lt : {lo, hi})
                    for (const auto& b : terms(d + 1, s - 1 - ts))
                        if (take()) sink(fgb::lam(var_name(d), borrow(T), lt, borrow(b)));
        for (int i = 1; i <= s - 3; i++)
            for (int j = 1; j <= s - 2 - i; j++)
                for (const auto& sc : terms(d, i))
                    for (const auto& l : terms(d + 1, j))
                        for (const auto& r : terms(d + 1, s - 1 - i - j))
                            if (take())
                                sink(fgb::cse(borrow(sc), var_name(d), borrow(l), var_name(d),
                                              borrow(r)));
        for (int i = 1; i <= s - 3; i++)
            for (int t1 = 1; t1 <= s - 2 - i; t1++)
                for (const auto& p : terms(d, i))
                    for (const auto& A : types(t1))
                        for (const auto& B : types(s - 1 - i - t1)) {
                            if (take()) sink(fgb::inl(borrow(p), borrow(A), borrow(B)));
                            if (take()) sink(fgb::inr(borrow(p), borrow(A), borrow(B)));
                        }
        for (int i = 1; i <= s - 2; i++)
            for (const auto& p : terms(d, i))
                for (const auto& T : types(s - 1 - i))
                    if (take()) sink(fgb::newe(borrow(p), borrow(T)));
    }
};

// Millions of terms share a handful of distinct candidate sets, so sets are
// interned once and everything downstream works with their ids.
struct SetVault {
    struct Hash {
        size_t operator()(const TypeSet& s) const {
            size_t h = 1469598103934665603ull;
            for (int v : s) h = (h ^ (size_t)(uint32_t)v) * 1099511628211ull;
            return h;
        }
    };
    std::unordered_map<TypeSet, int, Hash> ids;
    std::vector<const TypeSet*> refs;  // map keys are address-stable

    int put(TypeSet s) {
        auto [it, fresh] = ids.emplace(std::move(s), (int)refs.size());
        if (fresh) refs.push_back(&it->first);
        return it->second;
    }
    const TypeSet& at(int i) const { return *refs[i]; }
};

// One rule application keyed by its operand ids; op packs the rule tag and,
// when the rule consults it, the program counter.
using OpKey = std::array<int, 4>;
struct OpKeyHash {
    size_t operator()(const OpKey& k) const {
        size_t h = 1469598103934665603ull;
        for (int v : k) h = (h ^ (size_t)(uint32_t)v) * 1099511628211ull;
        return h;
    }
};

enum : int {
    kOpNot, kOpFst, kOpSnd, kOpDeref, kOpNew, kOpBoolop, kOpApp, kOpPair,
    kOpAssign, kOpIfOne, kOpInj, kOpLabel, kOpUnlabel, kOpToLabeled, kOpRet,
    kOpIf, kOpPcBit = 1 << 8
};

struct FGCheckState {
    const FGUniverse& U;
    FGSearch S;
    EnumReport r;
    std::string error;
    bool crossCheck = false;
    // set ids for the stored-table terms this worker has visited, one per
    // program counter; parents compose from these instead of re-walking
    std::unordered_map<const FGExpr*, std::array<int, 2>> memo;
    SetVault vault;
    std::unordered_map<OpKey, int, OpKeyHash> ops;
    // membership-and-minimality verdict per (checker type, candidate set)
    std::unordered_map<uint64_t, uint8_t> verdicts;

    explicit FGCheckState(const FGUniverse& u) : U(u), S(u.lat) {
        r.per_size.assign(u.maxSize + 1, 0);
    }
    int pcix(Label pc) const { return U.lat->leq(pc, U.lo) ? 0 : 1; }
    Label pcat(int i) const { return i == 0 ? U.lo : U.hi; }
};

void fg_note(FGCheckState& st, const FGExprP& e, Label pc, const char* what) {
    if (!st.r.witness.empty()) return;
    st.r.witness =
        std::string(what) + ": " + fg_expr_str(e) + "  [pc " + st.U.lat->print(pc) + "]";
}

const std::array<int, 2>* fg_find(FGCheckState& st, const FGExprP& c, const FGExpr* subFor,
                                  const std::array<int, 2>* sub) {
    if (sub && c.get() == subFor) return sub;
    auto it = st.memo.find(c.get());
    return it != st.memo.end() ? &it->second : nullptr;
}

int fg_cached(FGCheckState& st, int op, int a, int b, int c, auto make) {
    auto [it, fresh] = st.ops.try_emplace(OpKey{op, a, b, c}, -1);
    if (fresh) it->second = st.vault.put(make());
    return it->second;
}

// The search result for one term at both program counters, built from the
// children's already-computed sets through the per-rule combinators, with
// each distinct rule application computed once. `sub` carries the set ids
// of e->e1 when the parent was grown around a term that is in no table.
// Bodies under a binder are the one place a real sub-walk remains; any
// child this worker has not seen falls back to the full walk.
std::array<int, 2> fg_decl_sets(FGCheckState& st, const FGExprP& e,
                                const std::array<int, 2>* sub) {
    FGSearch& S = st.S;
    SetVault& V = st.vault;
    const FGExpr* subFor = sub ? e->e1.get() : nullptr;
    std::array<int, 2> out;
    switch (e->k) {
        case FGEx::BTrue:
        case FGEx::BFalse:
            out[0] = out[1] = V.put(S.r_lit_bool());
            return out;
        case FGEx::UnitE:
            out[0] = out[1] = V.put(S.r_lit_unit());
            return out;
        case FGEx::Var:
            out[0] = out[1] = V.put({});  // closed terms only: nothing to look up
            return out;
        case FGEx::Not:
        case FGEx::Fst:
        case FGEx::Snd:
        case FGEx::Deref:
        case FGEx::New: {
            auto* c1 = fg_find(st, e->e1, subFor, sub);
            if (!c1) break;
            int ann = e->k == FGEx::New && e->tyA ? S.id(e->tyA) : -1;
            for (int i = 0; i < 2; i++) {
                int a = (*c1)[i];
                switch (e->k) {
                    case FGEx::Not:
                        out[i] = fg_cached(st, kOpNot, a, 0, 0, [&] { return S.r_not(V.at(a)); });
                        break;
                    case FGEx::Fst:
                        out[i] = fg_cached(st, kOpFst, a, 0, 0, [&] { return S.r_fst(V.at(a)); });
                        break;
                    case FGEx::Snd:
                        out[i] = fg_cached(st, kOpSnd, a, 0, 0, [&] { return S.r_snd(V.at(a)); });
                        break;
                    case FGEx::Deref:
                        out[i] = fg_cached(st, kOpDeref, a, 0, 0,
                                           [&] { return S.r_deref(V.at(a)); });
                        break;
                    default:
                        out[i] = fg_cached(st, kOpNew | (i ? kOpPcBit : 0), a, ann, 0, [&] {
                            return S.r_new(V.at(a), ann, st.pcat(i));
                        });
                }
            }
            return out;
        }
        case FGEx::And:
        case FGEx::Or:
        case FGEx::App:
        case FGEx::Pair:
        case FGEx::Assign: {
            auto* c1 = fg_find(st, e->e1, subFor, sub);
            auto* c2 = fg_find(st, e->e2, subFor, sub);
            if (!c1 || !c2) break;
            for (int i = 0; i < 2; i++) {
                int a = (*c1)[i], b = (*c2)[i];
                switch (e->k) {
                    case FGEx::And:
                    case FGEx::Or:
                        out[i] = fg_cached(st, kOpBoolop, a, b, 0,
                                           [&] { return S.r_boolop(V.at(a), V.at(b)); });
                        break;
                    case FGEx::App:
                        out[i] = fg_cached(st, kOpApp | (i ? kOpPcBit : 0), a, b, 0, [&] {
                            return S.r_app(V.at(a), V.at(b), st.pcat(i));
                        });
                        break;
                    case FGEx::Pair:
                        out[i] = fg_cached(st, kOpPair, a, b, 0,
                                           [&] { return S.r_pair(V.at(a), V.at(b)); });
                        break;
                    default:
                        out[i] = fg_cached(st, kOpAssign | (i ? kOpPcBit : 0), a, b, 0, [&] {
                            return S.r_assign(V.at(a), V.at(b), st.pcat(i));
                        });
                }
            }
            return out;
        }
        case FGEx::If: {
            auto* c1 = fg_find(st, e->e1, subFor, sub);
            auto* c2 = fg_find(st, e->e2, subFor, sub);
            auto* c3 = fg_find(st, e->e3, subFor, sub);
            if (!c1 || !c2 || !c3) break;
            for (int i = 0; i < 2; i++) {
                TypeSet acc;
                for (int c : V.at((*c1)[i])) {
                    if (S.at(c)->k != FGTy::Bool) continue;
                    int j = st.pcix(st.U.lat->join(st.pcat(i), S.at(c)->lab));
                    int b1 = (*c2)[j], b2 = (*c3)[j];
                    int one = fg_cached(st, kOpIfOne, c, b1, b2,
                                        [&] { return S.r_if_one(c, V.at(b1), V.at(b2)); });
                    acc = set_union(acc, V.at(one));
                }
                out[i] = V.put(std::move(acc));
            }
            return out;
        }
        case FGEx::Inl:
        case FGEx::Inr: {
            auto* c1 = fg_find(st, e->e1, subFor, sub);
            if (!c1) break;
            int a = S.id(e->tyA), b = S.id(e->tyB);
            bool left = e->k == FGEx::Inl;
            for (int i = 0; i < 2; i++) {
                int v = (*c1)[i];
                out[i] = fg_cached(st, kOpInj | (left ? kOpPcBit : 0), a, b, v,
                                   [&] { return S.r_inj(left, a, b, V.at(v)); });
            }
            return out;
        }
        case FGEx::Lam: {
            // the body ignores the outer program counter: it runs at the latent one
            FGCtx c2;
            c2.emplace_back(e->name, e->tyA);
            TypeSet body = S.decl(c2, e->latent, e->e1);
            out[0] = out[1] = V.put(S.r_lam(S.id(e->tyA), e->latent, body));
            return out;
        }
        case FGEx::Case: {
            auto* c1 = fg_find(st, e->e1, subFor, sub);
            if (!c1) break;
            for (int i = 0; i < 2; i++) {
                TypeSet sums;
                for (int c : V.at((*c1)[i]))
                    if (S.at(c)->k == FGTy::Sum) set_insert(sums, c);
                int least = S.min_of(sums);
                if (least >= 0) sums = TypeSet{least};
                TypeSet acc;
                for (int c : sums) {
                    FGTypeP s = S.at(c);
                    Label pc2 = st.U.lat->join(st.pcat(i), s->lab);
                    FGCtx cl, cr;
                    cl.emplace_back(e->name, s->a);
                    cr.emplace_back(e->name2, s->b);
                    acc = set_union(acc, S.r_case_one(c, S.decl(cl, pc2, e->e2),
                                                      S.decl(cr, pc2, e->e3)));
                }
                out[i] = V.put(std::move(acc));
            }
            return out;
        }
    }
    for (int i = 0; i < 2; i++) out[i] = V.put(S.decl({}, st.pcat(i), e));
    return out;
}

std::array<int, 2> fg_check_one(FGCheckState& st, const FGExprP& e, int size,
                                const std::array<int, 2>* sub = nullptr) {
    st.r.terms++;
    st.r.per_size[size]++;
    static const bool skipAlg = env_flag("IFC_ENUM_SKIP_ALG");
    static const bool skipSearch = env_flag("IFC_ENUM_SKIP_SEARCH");
    std::array<int, 2> sets{0, 0};
    if (!skipSearch) sets = fg_decl_sets(st, e, sub);
    for (int i = 0; i < 2; i++) {
        Label pc = st.pcat(i);
        st.r.checks++;
        if (skipAlg || skipSearch) {
            if (!skipAlg) { try { (void)fg_typecheck({}, pc, e); } catch (const TypeError&) {} }
            continue;
        }
        const TypeSet& ds = st.vault.at(sets[i]);
        if (st.crossCheck && ds != st.S.decl({}, pc, e)) {
            st.r.mismatches++;
            fg_note(st, e, pc, "composed search set diverges from the direct walk");
            continue;
        }
        FGTypeP alg;
        bool algOk = true;
        try {
            alg = fg_typecheck({}, pc, e);
        } catch (const TypeError&) {
            algOk = false;
        }
        if (algOk != !ds.empty()) {
            st.r.mismatches++;
            fg_note(st, e, pc,
                    algOk ? "checker accepts but no derivation found"
                          : "derivation exists but checker rejects");
            continue;
        }
        if (!algOk) continue;
        st.r.typable++;
        // the verdict depends only on the checker's type and the set
        int algId = st.S.id(alg);
        uint64_t key = ((uint64_t)(uint32_t)algId << 32) | (uint32_t)sets[i];
        auto [it, fresh] = st.verdicts.try_emplace(key, 0);
        if (fresh) {
            uint8_t v = set_contains(ds, algId) ? 1 : 0;
            if (v) {
                v |= 2;
                for (int t : ds)
                    if (!fg_subtype(alg, st.S.at(t))) {
                        v &= ~2;
                        break;
                    }
            }
            it->second = v;
        }
        if (!(it->second & 1)) {
            st.r.mismatches++;
            fg_note(st, e, pc, "checker result is not a derivable type");
        } else if (!(it->second & 2)) {
            st.r.nonminimal++;
            fg_note(st, e, pc, "checker result not below a derivable type");
        }
    }
    return sets;
}

// A streamed term is in no table, so parents whose single child it is are
// reachable only from here; grow them on the spot, threading the term's
// just-computed sets into each parent.
void fg_check_chain(FGCheckState& st, const FGExprP& e, int size,
                    const std::array<int, 2>* sub = nullptr) {
    std::array<int, 2> sets = fg_check_one(st, e, size, sub);
    if (size + 1 > st.U.maxSize) return;
    fg_check_chain(st, fgb::bnot(borrow(e)), size + 1, &sets);
    fg_check_chain(st, fgb::fst(borrow(e)), size + 1, &sets);
    fg_check_chain(st, fgb::snd(borrow(e)), size + 1, &sets);
    fg_check_chain(st, fgb::deref(borrow(e)), size + 1, &sets);
    fg_check_chain(st, fgb::newe(borrow(e), nullptr), size + 1, &sets);
}

// ---- coarse-grained universe ----

struct CGUniverse {
    LatticeP lat = lattice_two_point();
    Label lo = lat->bot(), hi = lat->top();
    int maxSize;
    std::vector<std::vector<CGTypeP>> ty;
    std::vector<std::vector<std::vector<CGExprP>>> tab;

    explicit CGUniverse(int ms) : maxSize(ms) {
        build_types();
        build_tables();
    }

    int max_depth() const { return (maxSize - 1) / 2; }
    int depth_cap(int d) const {
        return d == 0 ? std::min(maxSize - 1, kStoreCap) : maxSize - 2 * d;
    }

    const std::vector<CGTypeP>& types(int s) const {
        static const std::vector<CGTypeP> none;
        return (s >= 1 && s < (int)ty.size()) ? ty[s] : none;
    }
    const std::vector<CGExprP>& terms(int d, int s) const {
        static const std::vector<CGExprP> none;
        if (d < 0 || d >= (int)tab.size()) return none;
        if (s < 1 || s >= (int)tab[d].size()) return none;
        return tab[d][s];
    }

    void build_types() {
        int cap = std::max(0, maxSize - 2);
        ty.assign(cap + 1, {});
        if (cap >= 1) {
            ty[1].push_back(cg_bool());
            ty[1].push_back(cg_unit());
        }
        for (int s = 2; s <= cap; s++) {
            auto& out = ty[s];
            for (const auto& c : ty[s - 1]) {
                for (Label l : {lo, hi}) {
                    out.push_back(cg_labeled(l, c));
                    out.push_back(cg_ref(l, c));
                }
                for (Label l1 : {lo, hi})
                    for (Label l2 : {lo, hi}) out.push_back(cg_slio(l1, l2, c));
            }
            for (int i = 1; i <= s - 2; i++)
                for (const auto& a : ty[i])
                    for (const auto& b : ty[s - 1 - i]) {
                        out.push_back(cg_prod(a, b));
                        out.push_back(cg_sum(a, b));
                        out.push_back(cg_fun(a, b));
                    }
        }
    }

    void build_tables() {
        tab.assign(max_depth() + 1, {});
        for (int d = max_depth(); d >= 0; d--) {
            int cap = std::max(depth_cap(d), 0);
            tab[d].assign(cap + 1, {});
            for (int s = 1; s <= cap; s++) {
                uint64_t ctr = 0;
                emit(d, s, ctr, 1, 0, [&](CGExprP e) { tab[d][s].push_back(std::move(e)); });
            }
        }
    }

    template <class Sink>
    void emit(int d, int s, uint64_t& ctr, uint64_t stride, uint64_t phase, const Sink& sink) const {
        auto take = [&] { return ctr++ % stride == phase; };
        if (s == 1) {
            if (take()) sink(cgb::tru());
            if (take()) sink(cgb::fls());
            if (take()) sink(cgb::unit());
            for (int v = 0; v < d; v++)
                if (take()) sink(cgb::var(var_name(v)));
            return;
        }
        for (const auto& c : terms(d, s - 1)) {
            if (take()) sink(cgb::fst(borrow(c)));
            if (take()) sink(cgb::snd(borrow(c)));
            if (take()) sink(cgb::deref(borrow(c)));
            if (take()) sink(cgb::unlabel(borrow(c)));
            if (take()) sink(cgb::toLabeled(borrow(c)));
            if (take()) sink(cgb::ret(borrow(c)));
            if (take()) sink(cgb::newe(borrow(c), nullptr));
            if (take()) sink(cgb::label(lo, borrow(c)));
            if (take()) sink(cgb::label(hi, borrow(c)));
        }
        for (int i = 1; i <= s - 2; i++)
            for (const auto& a : terms(d, i))
                for (const auto& b : terms(d, s - 1 - i)) {
                    if (take()) sink(cgb::app(borrow(a), borrow(b)));
                    if (take()) sink(cgb::pair(borrow(a), borrow(b)));
                    if (take()) sink(cgb::assign(borrow(a), borrow(b)));
                }
        for (int i = 1; i <= s - 3; i++)
            for (int j = 1; j <= s - 2 - i; j++)
                for (const auto& c : terms(d, i))
                    for (const auto& t : terms(d, j))
                        for (const auto& e : terms(d, s - 1 - i - j))
                            if (take()) sink(cgb::ife(borrow(c), borrow(t), borrow(e)));
        for (int ts = 1; ts <= s - 2; ts++)
            for (const auto& T : types(ts))
                for (const auto& b : terms(d + 1, s - 1 - ts))
                    if (take()) sink(cgb::lam(var_name(d), borrow(T), borrow(b)));
        for (int i = 1; i <= s - 2; i++)
            for (const auto& m : terms(d, i))
                for (const auto& b : terms(d + 1, s - 1 - i))
                    if (take()) sink(cgb::bind(borrow(m), var_name(d), borrow(b)));
        for (int i = 1; i <= s - 3; i++)
            for (int j = 1; j <= s - 2 - i; j++)
                for (const auto& sc : terms(d, i))
                    for (const auto& l : terms(d + 1, j))
                        for (const auto& r : terms(d + 1, s - 1 - i - j))
                            if (take())
                                sink(cgb::cse(borrow(sc), var_name(d), borrow(l), var_name(d),
                                              borrow(r)));
        for (int i = 1; i <= s - 3; i++)
            for (int t1 = 1; t1 <= s - 2 - i; t1++)
                for (const auto& p : terms(d, i))
                    for (const auto& A : types(t1))
                        for (const auto& B : types(s - 1 - i - t1)) {
                            if (take()) sink(cgb::inl(borrow(p), borrow(A), borrow(B)));
                            if (take()) sink(cgb::inr(borrow(p), borrow(A), borrow(B)));
                        }
        for (int i = 1; i <= s - 2; i++)
            for (const auto& p : terms(d, i))
                for (const auto& T : types(s - 1 - i))
                    if (take()) sink(cgb::newe(borrow(p), borrow(T)));
    }
};

struct CGCheckState {
    const CGUniverse& U;
    CGSearch S;
    EnumReport r;
    std::string error;
    bool crossCheck = false;
    std::unordered_map<const CGExpr*, int> memo;
    SetVault vault;
    std::unordered_map<OpKey, int, OpKeyHash> ops;
    std::unordered_map<uint64_t, uint8_t> verdicts;

    explicit CGCheckState(const CGUniverse& u) : U(u), S(u.lat) {
        r.per_size.assign(u.maxSize + 1, 0);
    }
};

void cg_note(CGCheckState& st, const CGExprP& e, const char* what) {
    if (!st.r.witness.empty()) return;
    st.r.witness = std::string(what) + ": " + cg_expr_str(e);
}

int cg_find(CGCheckState& st, const CGExprP& c, const CGExpr* subFor, const int* sub) {
    if (sub && c.get() == subFor) return *sub;
    auto it = st.memo.find(c.get());
    return it != st.memo.end() ? it->second : -1;
}

int cg_cached(CGCheckState& st, int op, int a, int b, int c, auto make) {
    auto [it, fresh] = st.ops.try_emplace(OpKey{op, a, b, c}, -1);
    if (fresh) it->second = st.vault.put(make());
    return it->second;
}

// Mirror of fg_decl_sets for the coarse-grained language; there is no
// program counter in the judgment, so one set per term suffices.
int cg_decl_set(CGCheckState& st, const CGExprP& e, const int* sub) {
    CGSearch& S = st.S;
    SetVault& V = st.vault;
    const CGExpr* subFor = sub ? e->e1.get() : nullptr;
    switch (e->k) {
        case CGEx::BTrue:
        case CGEx::BFalse:
            return V.put(S.r_lit_bool());
        case CGEx::UnitE:
            return V.put(S.r_lit_unit());
        case CGEx::Var:
            return V.put({});  // closed terms only
        case CGEx::Fst:
        case CGEx::Snd:
        case CGEx::Deref:
        case CGEx::Unlabel:
        case CGEx::ToLabeled:
        case CGEx::Ret:
        case CGEx::LabelE:
        case CGEx::New: {
            int a = cg_find(st, e->e1, subFor, sub);
            if (a < 0) break;
            switch (e->k) {
                case CGEx::Fst:
                    return cg_cached(st, kOpFst, a, 0, 0, [&] { return S.r_fst(V.at(a)); });
                case CGEx::Snd:
                    return cg_cached(st, kOpSnd, a, 0, 0, [&] { return S.r_snd(V.at(a)); });
                case CGEx::Deref:
                    return cg_cached(st, kOpDeref, a, 0, 0, [&] { return S.r_deref(V.at(a)); });
                case CGEx::Unlabel:
                    return cg_cached(st, kOpUnlabel, a, 0, 0,
                                     [&] { return S.r_unlabel(V.at(a)); });
                case CGEx::ToLabeled:
                    return cg_cached(st, kOpToLabeled, a, 0, 0,
                                     [&] { return S.r_tolabeled(V.at(a)); });
                case CGEx::Ret:
                    return cg_cached(st, kOpRet, a, 0, 0, [&] { return S.r_ret(V.at(a)); });
                case CGEx::LabelE: {
                    int hi = st.U.lat->leq(e->lab, st.U.lo) ? 0 : 1;
                    return cg_cached(st, kOpLabel | (hi ? kOpPcBit : 0), a, 0, 0,
                                     [&] { return S.r_label(e->lab, V.at(a)); });
                }
                default: {
                    int ann = e->tyA ? S.id(e->tyA) : -1;
                    return cg_cached(st, kOpNew, a, ann, 0,
                                     [&] { return S.r_new(V.at(a), ann); });
                }
            }
        }
        case CGEx::App:
        case CGEx::Pair:
        case CGEx::Assign: {
            int a = cg_find(st, e->e1, subFor, sub);
            int b = cg_find(st, e->e2, subFor, sub);
            if (a < 0 || b < 0) break;
            if (e->k == CGEx::App)
                return cg_cached(st, kOpApp, a, b, 0, [&] { return S.r_app(V.at(a), V.at(b)); });
            if (e->k == CGEx::Pair)
                return cg_cached(st, kOpPair, a, b, 0,
                                 [&] { return S.r_pair(V.at(a), V.at(b)); });
            return cg_cached(st, kOpAssign, a, b, 0,
                             [&] { return S.r_assign(V.at(a), V.at(b)); });
        }
        case CGEx::If: {
            int a = cg_find(st, e->e1, subFor, sub);
            int b = cg_find(st, e->e2, subFor, sub);
            int c = cg_find(st, e->e3, subFor, sub);
            if (a < 0 || b < 0 || c < 0) break;
            return cg_cached(st, kOpIf, a, b, c,
                             [&] { return S.r_if(V.at(a), V.at(b), V.at(c)); });
        }
        case CGEx::Inl:
        case CGEx::Inr: {
            int v = cg_find(st, e->e1, subFor, sub);
            if (v < 0) break;
            int a = S.id(e->tyA), b = S.id(e->tyB);
            bool left = e->k == CGEx::Inl;
            return cg_cached(st, kOpInj | (left ? kOpPcBit : 0), a, b, v,
                             [&] { return S.r_inj(left, a, b, V.at(v)); });
        }
        case CGEx::Lam: {
            CGCtx c2;
            c2.emplace_back(e->name, e->tyA);
            return V.put(S.r_lam(S.id(e->tyA), S.decl(c2, e->e1)));
        }
        case CGEx::Bind: {
            int a = cg_find(st, e->e1, subFor, sub);
            if (a < 0) break;
            TypeSet ms;
            for (int c : V.at(a))
                if (S.at(c)->k == CGTy::Slio) set_insert(ms, c);
            int least = S.min_of(ms);
            if (least >= 0) ms = TypeSet{least};
            TypeSet out;
            for (int c : ms) {
                CGTypeP t = S.at(c);
                CGCtx c2;
                c2.emplace_back(e->name, t->a);
                out = set_union(out, S.r_bind_one(c, S.decl(c2, e->e2)));
            }
            return V.put(std::move(out));
        }
        case CGEx::Case: {
            int a = cg_find(st, e->e1, subFor, sub);
            if (a < 0) break;
            TypeSet sums;
            for (int c : V.at(a))
                if (S.at(c)->k == CGTy::Sum) set_insert(sums, c);
            int least = S.min_of(sums);
            if (least >= 0) sums = TypeSet{least};
            TypeSet out;
            for (int c : sums) {
                CGTypeP s = S.at(c);
                CGCtx cl, cr;
                cl.emplace_back(e->name, s->a);
                cr.emplace_back(e->name2, s->b);
                out = set_union(out, S.r_case_one(c, S.decl(cl, e->e2), S.decl(cr, e->e3)));
            }
            return V.put(std::move(out));
        }
    }
    return V.put(S.decl({}, e));
}

int cg_check_one(CGCheckState& st, const CGExprP& e, int size, const int* sub = nullptr) {
    st.r.terms++;
    st.r.per_size[size]++;
    st.r.checks++;
    static const bool skipAlg = env_flag("IFC_ENUM_SKIP_ALG");
    static const bool skipSearch = env_flag("IFC_ENUM_SKIP_SEARCH");
    int sid = 0;
    if (!skipSearch) sid = cg_decl_set(st, e, sub);
    if (skipAlg || skipSearch) {
        if (!skipAlg) { try { (void)cg_typecheck({}, st.U.lat, e); } catch (const TypeError&) {} }
        return sid;
    }
    const TypeSet& ds = st.vault.at(sid);
    if (st.crossCheck && ds != st.S.decl({}, e)) {
        st.r.mismatches++;
        cg_note(st, e, "composed search set diverges from the direct walk");
        return sid;
    }
    CGTypeP alg;
    bool algOk = true;
    try {
        alg = cg_typecheck({}, st.U.lat, e);
    } catch (const TypeError&) {
        algOk = false;
    }
    if (algOk != !ds.empty()) {
        st.r.mismatches++;
        cg_note(st, e,
                algOk ? "checker accepts but no derivation found"
                      : "derivation exists but checker rejects");
        return sid;
    }
    if (!algOk) return sid;
    st.r.typable++;
    int algId = st.S.id(alg);
    uint64_t key = ((uint64_t)(uint32_t)algId << 32) | (uint32_t)sid;
    auto [it, fresh] = st.verdicts.try_emplace(key, 0);
    if (fresh) {
        uint8_t v = set_contains(ds, algId) ? 1 : 0;
        if (v) {
            v |= 2;
            for (int t : ds)
                if (!cg_subtype(alg, st.S.at(t))) {
                    v &= ~2;
                    break;
                }
        }
        it->second = v;
    }
    if (!(it->second & 1)) {
        st.r.mismatches++;
        cg_note(st, e, "checker result is not a derivable type");
    } else if (!(it->second & 2)) {
        st.r.nonminimal++;
        cg_note(st, e, "checker result not below a derivable type");
    }
    return sid;
}

void cg_check_chain(CGCheckState& st, const CGExprP& e, int size, const int* sub = nullptr) {
    int sid = cg_check_one(st, e, size, sub);
    if (size + 1 > st.U.maxSize) return;
    cg_check_chain(st, cgb::fst(borrow(e)), size + 1, &sid);
    cg_check_chain(st, cgb::snd(borrow(e)), size + 1, &sid);
    cg_check_chain(st, cgb::deref(borrow(e)), size + 1, &sid);
    cg_check_chain(st, cgb::unlabel(borrow(e)), size + 1, &sid);
    cg_check_chain(st, cgb::toLabeled(borrow(e)), size + 1, &sid);
    cg_check_chain(st, cgb::ret(borrow(e)), size + 1, &sid);
    cg_check_chain(st, cgb::newe(borrow(e), nullptr), size + 1, &sid);
    cg_check_chain(st, cgb::label(st.U.lo, borrow(e)), size + 1, &sid);
    cg_check_chain(st, cgb::label(st.U.hi, borrow(e)), size + 1, &sid);
}

void merge_into(EnumReport& out, const EnumReport& part) {
    out.terms += part.terms;
    out.checks += part.checks;
    out.typable += part.typable;
    out.mismatches += part.mismatches;
    out.nonminimal += part.nonminimal;
    for (size_t i = 0; i < part.per_size.size() && i < out.per_size.size(); i++)
        out.per_size[i] += part.per_size[i];
    if (out.witness.empty()) out.witness = part.witness;
}

int clamp_threads(int threads) { return std::clamp(threads, 1, 32); }

void guard_size(int maxSize) {
    if (maxSize > kMaxEnumSize) throw IfcError("term enumeration is capped at size 8");
}

} // namespace

EnumReport enum_check_fg(int maxSize, int threads, bool crossCheck) {
    guard_size(maxSize);
    EnumReport out;
    out.per_size.assign(std::max(maxSize, 0) + 1, 0);
    if (maxSize < 1) return out;
    FGUniverse U(maxSize);
    int nt = clamp_threads(threads);
    std::vector<std::unique_ptr<FGCheckState>> states;
    for (int i = 0; i < nt; i++) {
        states.push_back(std::make_unique<FGCheckState>(U));
        states.back()->crossCheck = crossCheck;
    }
    auto work = [&](int tid) {
        FGCheckState& st = *states[tid];
        try {
            // stored tiers first: every table term this worker checks leaves
            // its sets behind for parents to compose from. With several
            // workers the memo is partial and misses fall back to the walk.
            for (int s = 1; s <= U.depth_cap(0); s++) {
                const auto& v = U.terms(0, s);
                for (size_t i = tid; i < v.size(); i += (size_t)nt)
                    st.memo.emplace(v[i].get(), fg_check_one(st, v[i], s));
            }
            for (int s = U.depth_cap(0) + 1; s <= maxSize; s++) {
                uint64_t ctr = 0;
                U.emit(0, s, ctr, (uint64_t)nt, (uint64_t)tid,
                       [&](FGExprP e) { fg_check_chain(st, e, s); });
            }
        } catch (const std::exception& ex) {
            st.error = ex.what();
        }
    };
    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; i++) pool.emplace_back(work, i);
        for (auto& t : pool) t.join();
    }
    for (auto& st : states) {
        if (!st->error.empty()) throw IfcError("enumeration worker failed: " + st->error);
        merge_into(out, st->r);
    }
    return out;
}

EnumReport enum_check_cg(int maxSize, int threads, bool crossCheck) {
    guard_size(maxSize);
    EnumReport out;
    out.per_size.assign(std::max(maxSize, 0) + 1, 0);
    if (maxSize < 1) return out;
    CGUniverse U(maxSize);
    int nt = clamp_threads(threads);
    std::vector<std::unique_ptr<CGCheckState>> states;
    for (int i = 0; i < nt; i++) {
        states.push_back(std::make_unique<CGCheckState>(U));
        states.back()->crossCheck = crossCheck;
    }
    auto work = [&](int tid) {
        CGCheckState& st = *states[tid];
        try {
            for (int s = 1; s <= U.depth_cap(0); s++) {
                const auto& v = U.terms(0, s);
                for (size_t i = tid; i < v.size(); i += (size_t)nt)
                    st.memo.emplace(v[i].get(), cg_check_one(st, v[i], s));
            }
            for (int s = U.depth_cap(0) + 1; s <= maxSize; s++) {
                uint64_t ctr = 0;
                U.emit(0, s, ctr, (uint64_t)nt, (uint64_t)tid,
                       [&](CGExprP e) { cg_check_chain(st, e, s); });
            }
        } catch (const std::exception& ex) {
            st.error = ex.what();
        }
    };
    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; i++) pool.emplace_back(work, i);
        for (auto& t : pool) t.join();
    }
    for (auto& st : states) {
        if (!st->error.empty()) throw IfcError("enumeration worker failed: " + st->error);
        merge_into(out, st->r);
    }
    return out;
}

// ---- counting recurrences ----
// These mirror the emitters production for production; tests hold the two
// sides to each other so neither can silently drop a case.

namespace {

std::vector<long long> fg_type_counts(int cap) {
    std::vector<long long> T(std::max(cap, 0) + 1, 0);
    if (cap >= 1) T[1] = 4;
    for (int s = 2; s <= cap; s++) {
        long long v = 2 * T[s - 1];  // ref (2 labels)
        for (int i = 1; i <= s - 2; i++)
            v += T[i] * T[s - 1 - i] * 8;  // prod/sum (2 labels), fun (2 latent x 2 labels)
        T[s] = v;
    }
    return T;
}

std::vector<long long> cg_type_counts(int cap) {
    std::vector<long long> T(std::max(cap, 0) + 1, 0);
    if (cap >= 1) T[1] = 2;
    for (int s = 2; s <= cap; s++) {
        long long v = 8 * T[s - 1];  // labeled (2), ref (2), slio (4)
        for (int i = 1; i <= s - 2; i++)
            v += T[i] * T[s - 1 - i] * 3;  // prod, sum, fun
        T[s] = v;
    }
    return T;
}

} // namespace

long long enum_count_fg(int size) {
    guard_size(size);
    if (size < 1) return 0;
    std::vector<long long> T = fg_type_counts(size - 2);
    int maxD = (size - 1) / 2;
    std::vector<std::vector<long long>> C(maxD + 2);
    for (int d = maxD; d >= 0; d--) {
        int cap = size - 2 * d;
        C[d].assign(cap + 1, 0);
        C[d][1] = 3 + d;
        for (int s = 2; s <= cap; s++) {
            long long v = 5 * C[d][s - 1];  // not, fst, snd, deref, bare new
            for (int i = 1; i <= s - 2; i++)
                v += 5 * C[d][i] * C[d][s - 1 - i];  // and, or, app, pair, assign
            for (int i = 1; i <= s - 3; i++)
                for (int j = 1; j <= s - 2 - i; j++)
                    v += C[d][i] * C[d][j] * C[d][s - 1 - i - j];  // if
            for (int ts = 1; ts <= s - 2; ts++)
                v += 2 * T[ts] * range_at(C[d + 1], s - 1 - ts);  // lam (2 latent)
            for (int i = 1; i <= s - 3; i++)
                for (int j = 1; j <= s - 2 - i; j++)
                    v += C[d][i] * range_at(C[d + 1], j) *
                         range_at(C[d + 1], s - 1 - i - j);  // case
            for (int i = 1; i <= s - 3; i++)
                for (int t1 = 1; t1 <= s - 2 - i; t1++)
                    v += 2 * C[d][i] * T[t1] * T[s - 1 - i - t1];  // inl, inr
            for (int i = 1; i <= s - 2; i++)
                v += C[d][i] * range_at(T, s - 1 - i);  // annotated new
            C[d][s] = v;
        }
    }
    return C[0][size];
}

long long enum_count_cg(int size) {
    guard_size(size);
    if (size < 1) return 0;
    std::vector<long long> T = cg_type_counts(size - 2);
    int maxD = (size - 1) / 2;
    std::vector<std::vector<long long>> C(maxD + 2);
    for (int d = maxD; d >= 0; d--) {
        int cap = size - 2 * d;
        C[d].assign(cap + 1, 0);
        C[d][1] = 3 + d;
        for (int s = 2; s <= cap; s++) {
            // fst, snd, deref, unlabel, toLabeled, ret, bare new, label (2)
            long long v = 9 * C[d][s - 1];
            for (int i = 1; i <= s - 2; i++)
                v += 3 * C[d][i] * C[d][s - 1 - i];  // app, pair, assign
            for (int i = 1; i <= s - 3; i++)
                for (int j = 1; j <= s - 2 - i; j++)
                    v += C[d][i] * C[d][j] * C[d][s - 1 - i - j];  // if
            for (int ts = 1; ts <= s - 2; ts++)
                v += T[ts] * range_at(C[d + 1], s - 1 - ts);  // lam
            for (int i = 1; i <= s - 2; i++)
                v += C[d][i] * range_at(C[d + 1], s - 1 - i);  // bind
            for (int i = 1; i <= s - 3; i++)
                for (int j = 1; j <= s - 2 - i; j++)
                    v += C[d][i] * range_at(C[d + 1], j) *
                         range_at(C[d + 1], s - 1 - i - j);  // case
            for (int i = 1; i <= s - 3; i++)
                for (int t1 = 1; t1 <= s - 2 - i; t1++)
                    v += 2 * C[d][i] * T[t1] * T[s - 1 - i - t1];  // inl, inr
            for (int i = 1; i <= s - 2; i++)
                v += C[d][i] * range_at(T, s - 1 - i);  // annotated new
            C[d][s] = v;
        }
    }
    return C[0][size];
}

} // namespace ifc

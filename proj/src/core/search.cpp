#include "search.hpp"

#include <algorithm>

namespace ifc {

bool set_contains(const TypeSet& s, int v) {
    return std::binary_search(s.begin(), s.end(), v);
}

void set_insert(TypeSet& s, int v) {
    auto it = std::lower_bound(s.begin(), s.end(), v);
    if (it == s.end() || *it != v) s.insert(it, v);
}

TypeSet set_union(const TypeSet& a, const TypeSet& b) {
    TypeSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

TypeSet set_intersect(const TypeSet& a, const TypeSet& b) {
    TypeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

namespace {

uint64_t key_hash(const TypeNodeKey& n) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(n.k);
    mix(n.lab);
    mix(n.latent);
    mix(static_cast<uint32_t>(n.a));
    mix(static_cast<uint32_t>(n.b));
    return h;
}

// Label positions that the subtype order can move. Enumerating closures is
// exponential in this count, so it is capped; the cap is what makes the
// search "bounded" (it throws rather than silently truncating).
constexpr uint64_t kMaxVariants = 1u << 20;

int fg_positions(const FGTypeP& t) {
    switch (t->k) {
        case FGTy::Bool:
        case FGTy::Unit:
        case FGTy::Ref: // the cell is rigid, only the outer label moves
            return 1;
        case FGTy::Fun:
            return 2 + fg_positions(t->a) + fg_positions(t->b);
        case FGTy::Prod:
        case FGTy::Sum:
            return 1 + fg_positions(t->a) + fg_positions(t->b);
    }
    return 0;
}

void check_variant_budget(size_t labels, int positions) {
    uint64_t n = 1;
    for (int i = 0; i < positions; i++) {
        n *= labels;
        if (n > kMaxVariants)
            throw IfcError("derivation search: type has too many label positions to enumerate");
    }
}

void fg_variants(const std::vector<Label>& ls, const FGTypeP& t, std::vector<FGTypeP>& out) {
    switch (t->k) {
        case FGTy::Bool:
            for (Label l : ls) out.push_back(fg_bool(l));
            return;
        case FGTy::Unit:
            for (Label l : ls) out.push_back(fg_unit(l));
            return;
        case FGTy::Ref:
            for (Label l : ls) out.push_back(fg_ref(t->a, l));
            return;
        case FGTy::Fun: {
            std::vector<FGTypeP> as, bs;
            fg_variants(ls, t->a, as);
            fg_variants(ls, t->b, bs);
            for (const auto& a : as)
                for (Label le : ls)
                    for (const auto& b : bs)
                        for (Label l : ls) out.push_back(fg_fun(a, le, b, l));
            return;
        }
        case FGTy::Prod:
        case FGTy::Sum: {
            std::vector<FGTypeP> as, bs;
            fg_variants(ls, t->a, as);
            fg_variants(ls, t->b, bs);
            for (const auto& a : as)
                for (const auto& b : bs)
                    for (Label l : ls)
                        out.push_back(t->k == FGTy::Prod ? fg_prod(a, b, l) : fg_sum(a, b, l));
            return;
        }
    }
}

int cg_positions(const CGTypeP& t) {
    switch (t->k) {
        case CGTy::Bool:
        case CGTy::Unit:
        case CGTy::Ref: // invariant in both the label and the payload
            return 0;
        case CGTy::Fun:
        case CGTy::Prod:
        case CGTy::Sum:
            return cg_positions(t->a) + cg_positions(t->b);
        case CGTy::Labeled:
            return 1 + cg_positions(t->a);
        case CGTy::Slio:
            return 2 + cg_positions(t->a);
    }
    return 0;
}

void cg_variants(const std::vector<Label>& ls, const CGTypeP& t, std::vector<CGTypeP>& out) {
    switch (t->k) {
        case CGTy::Bool:
        case CGTy::Unit:
        case CGTy::Ref:
            out.push_back(t);
            return;
        case CGTy::Fun:
        case CGTy::Prod:
        case CGTy::Sum: {
            std::vector<CGTypeP> as, bs;
            cg_variants(ls, t->a, as);
            cg_variants(ls, t->b, bs);
            for (const auto& a : as)
                for (const auto& b : bs) {
                    if (t->k == CGTy::Fun) out.push_back(cg_fun(a, b));
                    else if (t->k == CGTy::Prod) out.push_back(cg_prod(a, b));
                    else out.push_back(cg_sum(a, b));
                }
            return;
        }
        case CGTy::Labeled: {
            std::vector<CGTypeP> as;
            cg_variants(ls, t->a, as);
            for (const auto& a : as)
                for (Label l : ls) out.push_back(cg_labeled(l, a));
            return;
        }
        case CGTy::Slio: {
            std::vector<CGTypeP> as;
            cg_variants(ls, t->a, as);
            for (const auto& a : as)
                for (Label pc : ls)
                    for (Label taint : ls) out.push_back(cg_slio(pc, taint, a));
            return;
        }
    }
}

} // namespace

// ---- fine-grained ----

FGSearch::FGSearch(LatticeP lat) : lat_(std::move(lat)) {}

int FGSearch::id(const FGTypeP& t) {
    TypeNodeKey k;
    k.k = static_cast<uint8_t>(t->k);
    k.lab = t->lab.bits;
    if (t->k == FGTy::Fun) k.latent = t->latent.bits;
    if (t->a) k.a = id(t->a);
    if (t->b) k.b = id(t->b);
    auto& bucket = index_[key_hash(k)];
    for (int i : bucket)
        if (keys_[static_cast<size_t>(i)] == k) return i;
    int i = static_cast<int>(types_.size());
    types_.push_back(t);
    keys_.push_back(k);
    bucket.push_back(i);
    return i;
}

FGTypeP FGSearch::at(int i) const { return types_[static_cast<size_t>(i)]; }

const TypeSet& FGSearch::close(int t) {
    auto it = closed_.find(t);
    if (it != closed_.end()) return it->second;
    const FGTypeP& base = at(t);
    std::vector<Label> ls = lat_->all();
    check_variant_budget(ls.size(), fg_positions(base));
    std::vector<FGTypeP> vs;
    fg_variants(ls, base, vs);
    TypeSet out;
    for (const auto& v : vs)
        if (fg_subtype(base, v)) set_insert(out, id(v));
    return closed_.emplace(t, std::move(out)).first->second;
}

TypeSet FGSearch::close_set(const TypeSet& s) {
    TypeSet out;
    for (int t : s) out = set_union(out, close(t));
    return out;
}

int FGSearch::min_of(const TypeSet& s) const {
    for (int m : s) {
        bool least = true;
        for (int x : s)
            if (!fg_subtype(at(m), at(x))) {
                least = false;
                break;
            }
        if (least) return m;
    }
    return -1;
}

TypeSet FGSearch::r_lit_bool() { return close(id(fg_bool(lat_->bot()))); }
TypeSet FGSearch::r_lit_unit() { return close(id(fg_unit(lat_->bot()))); }
TypeSet FGSearch::r_var(int declared) { return close(declared); }

TypeSet FGSearch::r_lam(int param, Label latent, const TypeSet& body) {
    TypeSet direct;
    for (int tb : body) set_insert(direct, id(fg_fun(at(param), latent, at(tb), lat_->bot())));
    return close_set(direct);
}

TypeSet FGSearch::r_app(const TypeSet& fn, const TypeSet& arg, Label pc) {
    // closed: the fn set supplies every raised result covariantly
    TypeSet out;
    for (int f : fn) {
        const FGTypeP& t = at(f);
        if (t->k != FGTy::Fun) continue;
        if (!lat_->leq(lat_->join(pc, t->lab), t->latent)) continue;
        if (!fg_protected_at(t->b, t->lab)) continue;
        if (!set_contains(arg, id(t->a))) continue;
        set_insert(out, id(t->b));
    }
    return out;
}

TypeSet FGSearch::r_pair(const TypeSet& a, const TypeSet& b) {
    TypeSet direct;
    for (int x : a)
        for (int y : b) set_insert(direct, id(fg_prod(at(x), at(y), lat_->bot())));
    return close_set(direct);
}

TypeSet FGSearch::r_fst(const TypeSet& p) {
    TypeSet out;
    for (int c : p) {
        const FGTypeP& t = at(c);
        if (t->k == FGTy::Prod && fg_protected_at(t->a, t->lab)) set_insert(out, id(t->a));
    }
    return out;
}

TypeSet FGSearch::r_snd(const TypeSet& p) {
    TypeSet out;
    for (int c : p) {
        const FGTypeP& t = at(c);
        if (t->k == FGTy::Prod && fg_protected_at(t->b, t->lab)) set_insert(out, id(t->b));
    }
    return out;
}

TypeSet FGSearch::r_inj(bool left, int sumA, int sumB, const TypeSet& v) {
    if (!set_contains(v, left ? sumA : sumB)) return {};
    return close(id(fg_sum(at(sumA), at(sumB), lat_->bot())));
}

TypeSet FGSearch::r_case_one(int scrut, const TypeSet& b1, const TypeSet& b2) {
    const FGTypeP& s = at(scrut);
    TypeSet out;
    for (int t : set_intersect(b1, b2))
        if (fg_protected_at(at(t), s->lab)) set_insert(out, t);
    return out;
}

TypeSet FGSearch::r_if_one(int cond, const TypeSet& b1, const TypeSet& b2) {
    const FGTypeP& c = at(cond);
    TypeSet out;
    for (int t : set_intersect(b1, b2))
        if (fg_protected_at(at(t), c->lab)) set_insert(out, t);
    return out;
}

TypeSet FGSearch::r_new(const TypeSet& v, int ann, Label pc) {
    // without an annotation the cell is the least derivable type, mirroring
    // what elaboration would insert; any other choice would either lose
    // principality or accept programs the checker rejects
    int cell = ann >= 0 ? (set_contains(v, ann) ? ann : -1) : min_of(v);
    if (cell < 0) return {};
    if (!lat_->leq(pc, at(cell)->lab)) return {};
    return close(id(fg_ref(at(cell), lat_->bot())));
}

TypeSet FGSearch::r_deref(const TypeSet& r) {
    TypeSet out;
    for (int c : r) {
        const FGTypeP& t = at(c);
        if (t->k == FGTy::Ref) out = set_union(out, close(id(fg_raise(t->a, t->lab))));
    }
    return out;
}

TypeSet FGSearch::r_assign(const TypeSet& r, const TypeSet& v, Label pc) {
    for (int c : r) {
        const FGTypeP& t = at(c);
        if (t->k != FGTy::Ref) continue;
        if (!lat_->leq(lat_->join(pc, t->lab), t->a->lab)) continue;
        if (!set_contains(v, id(t->a))) continue;
        return close(id(fg_unit(lat_->bot())));
    }
    return {};
}

TypeSet FGSearch::r_boolop(const TypeSet& a, const TypeSet& b) {
    TypeSet out;
    for (int x : a) {
        if (at(x)->k != FGTy::Bool) continue;
        for (int y : b) {
            if (at(y)->k != FGTy::Bool) continue;
            set_insert(out, id(fg_bool(lat_->join(at(x)->lab, at(y)->lab))));
        }
    }
    return out;
}

TypeSet FGSearch::r_not(const TypeSet& a) {
    TypeSet out;
    for (int x : a)
        if (at(x)->k == FGTy::Bool) set_insert(out, x);
    return out;
}

TypeSet FGSearch::decl(const FGCtx& ctx, Label pc, const FGExprP& e) {
    FGCtx scoped = ctx;
    return decl_in(scoped, pc, e);
}

TypeSet FGSearch::decl_in(FGCtx& ctx, Label pc, const FGExprP& e) {
    switch (e->k) {
        case FGEx::Var:
            for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
                if (it->first == e->name) return r_var(id(it->second));
            return {};
        case FGEx::BTrue:
        case FGEx::BFalse:
            return r_lit_bool();
        case FGEx::UnitE:
            return r_lit_unit();
        case FGEx::Lam: {
            ctx.emplace_back(e->name, e->tyA);
            TypeSet body = decl_in(ctx, e->latent, e->e1);
            ctx.pop_back();
            return r_lam(id(e->tyA), e->latent, body);
        }
        case FGEx::App: {
            TypeSet fn = decl_in(ctx, pc, e->e1);
            return r_app(fn, decl_in(ctx, pc, e->e2), pc);
        }
        case FGEx::Pair: {
            TypeSet a = decl_in(ctx, pc, e->e1);
            return r_pair(a, decl_in(ctx, pc, e->e2));
        }
        case FGEx::Fst:
            return r_fst(decl_in(ctx, pc, e->e1));
        case FGEx::Snd:
            return r_snd(decl_in(ctx, pc, e->e1));
        case FGEx::Inl:
            return r_inj(true, id(e->tyA), id(e->tyB), decl_in(ctx, pc, e->e1));
        case FGEx::Inr:
            return r_inj(false, id(e->tyA), id(e->tyB), decl_in(ctx, pc, e->e1));
        case FGEx::Case: {
            TypeSet ds = decl_in(ctx, pc, e->e1);
            TypeSet sums;
            for (int c : ds)
                if (at(c)->k == FGTy::Sum) set_insert(sums, c);
            // the binders see one canonical scrutinee: the least derivable
            // sum, the one elaboration would pick. Raised variants only move
            // labels the result's closure covers anyway, except through
            // invariant cells, which a binder must not smuggle past r_new.
            int least = min_of(sums);
            if (least >= 0) sums = TypeSet{least};
            TypeSet out;
            for (int c : sums) {
                const FGTypeP& s = at(c);
                Label pc2 = lat_->join(pc, s->lab);
                ctx.emplace_back(e->name, s->a);
                TypeSet b1 = decl_in(ctx, pc2, e->e2);
                ctx.pop_back();
                ctx.emplace_back(e->name2, s->b);
                TypeSet b2 = decl_in(ctx, pc2, e->e3);
                ctx.pop_back();
                out = set_union(out, r_case_one(c, b1, b2));
            }
            return out;
        }
        case FGEx::If: {
            TypeSet ds = decl_in(ctx, pc, e->e1);
            TypeSet out;
            for (int c : ds) {
                if (at(c)->k != FGTy::Bool) continue;
                Label pc2 = lat_->join(pc, at(c)->lab);
                TypeSet b1 = decl_in(ctx, pc2, e->e2);
                TypeSet b2 = decl_in(ctx, pc2, e->e3);
                out = set_union(out, r_if_one(c, b1, b2));
            }
            return out;
        }
        case FGEx::New:
            return r_new(decl_in(ctx, pc, e->e1), e->tyA ? id(e->tyA) : -1, pc);
        case FGEx::Deref:
            return r_deref(decl_in(ctx, pc, e->e1));
        case FGEx::Assign: {
            TypeSet r = decl_in(ctx, pc, e->e1);
            return r_assign(r, decl_in(ctx, pc, e->e2), pc);
        }
        case FGEx::And:
        case FGEx::Or: {
            TypeSet a = decl_in(ctx, pc, e->e1);
            return r_boolop(a, decl_in(ctx, pc, e->e2));
        }
        case FGEx::Not:
            return r_not(decl_in(ctx, pc, e->e1));
    }
    return {};
}

// ---- coarse-grained ----

CGSearch::CGSearch(LatticeP lat) : lat_(std::move(lat)) {}

int CGSearch::id(const CGTypeP& t) {
    TypeNodeKey k;
    k.k = static_cast<uint8_t>(t->k);
    k.lab = t->l1.bits;
    k.latent = t->l2.bits;
    if (t->a) k.a = id(t->a);
    if (t->b) k.b = id(t->b);
    auto& bucket = index_[key_hash(k)];
    for (int i : bucket)
        if (keys_[static_cast<size_t>(i)] == k) return i;
    int i = static_cast<int>(types_.size());
    types_.push_back(t);
    keys_.push_back(k);
    bucket.push_back(i);
    return i;
}

CGTypeP CGSearch::at(int i) const { return types_[static_cast<size_t>(i)]; }

const TypeSet& CGSearch::close(int t) {
    auto it = closed_.find(t);
    if (it != closed_.end()) return it->second;
    const CGTypeP& base = at(t);
    std::vector<Label> ls = lat_->all();
    check_variant_budget(ls.size(), cg_positions(base));
    std::vector<CGTypeP> vs;
    cg_variants(ls, base, vs);
    TypeSet out;
    for (const auto& v : vs)
        if (cg_subtype(base, v)) set_insert(out, id(v));
    return closed_.emplace(t, std::move(out)).first->second;
}

TypeSet CGSearch::close_set(const TypeSet& s) {
    TypeSet out;
    for (int t : s) out = set_union(out, close(t));
    return out;
}

int CGSearch::min_of(const TypeSet& s) const {
    for (int m : s) {
        bool least = true;
        for (int x : s)
            if (!cg_subtype(at(m), at(x))) {
                least = false;
                break;
            }
        if (least) return m;
    }
    return -1;
}

TypeSet CGSearch::r_lit_bool() { return close(id(cg_bool())); }
TypeSet CGSearch::r_lit_unit() { return close(id(cg_unit())); }
TypeSet CGSearch::r_var(int declared) { return close(declared); }

TypeSet CGSearch::r_lam(int param, const TypeSet& body) {
    TypeSet direct;
    for (int tb : body) set_insert(direct, id(cg_fun(at(param), at(tb))));
    return close_set(direct);
}

TypeSet CGSearch::r_app(const TypeSet& fn, const TypeSet& arg) {
    TypeSet out;
    for (int f : fn) {
        const CGTypeP& t = at(f);
        if (t->k == CGTy::Fun && set_contains(arg, id(t->a))) set_insert(out, id(t->b));
    }
    return out;
}

TypeSet CGSearch::r_pair(const TypeSet& a, const TypeSet& b) {
    // closed already: products have no label of their own
    TypeSet out;
    for (int x : a)
        for (int y : b) set_insert(out, id(cg_prod(at(x), at(y))));
    return out;
}

TypeSet CGSearch::r_fst(const TypeSet& p) {
    TypeSet out;
    for (int c : p)
        if (at(c)->k == CGTy::Prod) set_insert(out, id(at(c)->a));
    return out;
}

TypeSet CGSearch::r_snd(const TypeSet& p) {
    TypeSet out;
    for (int c : p)
        if (at(c)->k == CGTy::Prod) set_insert(out, id(at(c)->b));
    return out;
}

TypeSet CGSearch::r_inj(bool left, int sumA, int sumB, const TypeSet& v) {
    if (!set_contains(v, left ? sumA : sumB)) return {};
    return close(id(cg_sum(at(sumA), at(sumB))));
}

TypeSet CGSearch::r_case_one(int scrut, const TypeSet& b1, const TypeSet& b2) {
    (void)scrut;
    return set_intersect(b1, b2);
}

TypeSet CGSearch::r_if(const TypeSet& cond, const TypeSet& b1, const TypeSet& b2) {
    if (!set_contains(cond, id(cg_bool()))) return {};
    return set_intersect(b1, b2);
}

TypeSet CGSearch::r_label(Label l, const TypeSet& v) {
    TypeSet direct;
    for (int tv : v) set_insert(direct, id(cg_labeled(l, at(tv))));
    return close_set(direct);
}

TypeSet CGSearch::r_unlabel(const TypeSet& v) {
    TypeSet direct;
    for (int c : v) {
        const CGTypeP& t = at(c);
        if (t->k == CGTy::Labeled) set_insert(direct, id(cg_slio(lat_->top(), t->l1, t->a)));
    }
    return close_set(direct);
}

TypeSet CGSearch::r_tolabeled(const TypeSet& m) {
    TypeSet direct;
    for (int c : m) {
        const CGTypeP& t = at(c);
        if (t->k == CGTy::Slio)
            set_insert(direct, id(cg_slio(t->l1, lat_->bot(), cg_labeled(t->l2, t->a))));
    }
    return close_set(direct);
}

TypeSet CGSearch::r_ret(const TypeSet& v) {
    TypeSet direct;
    for (int tv : v) set_insert(direct, id(cg_slio(lat_->top(), lat_->bot(), at(tv))));
    return close_set(direct);
}

TypeSet CGSearch::r_bind_one(int m, const TypeSet& body) {
    const CGTypeP& t = at(m);
    TypeSet direct;
    for (int nb : body) {
        const CGTypeP& n = at(nb);
        if (n->k != CGTy::Slio) continue;
        if (!lat_->leq(t->l2, n->l1)) continue; // the first taint bounds later writes
        if (!lat_->leq(t->l2, n->l2)) continue; // and survives into the final taint
        set_insert(direct, id(cg_slio(lat_->meet(t->l1, n->l1), n->l2, n->a)));
    }
    return close_set(direct);
}

TypeSet CGSearch::r_new(const TypeSet& v, int ann) {
    int cell = ann >= 0 ? (set_contains(v, ann) ? ann : -1) : min_of(v);
    if (cell < 0 || at(cell)->k != CGTy::Labeled) return {};
    const CGTypeP& c = at(cell);
    return close(id(cg_slio(c->l1, lat_->bot(), cg_ref(c->l1, c->a))));
}

TypeSet CGSearch::r_deref(const TypeSet& r) {
    TypeSet direct;
    for (int c : r) {
        const CGTypeP& t = at(c);
        if (t->k == CGTy::Ref)
            set_insert(direct, id(cg_slio(lat_->top(), lat_->bot(), cg_labeled(t->l1, t->a))));
    }
    return close_set(direct);
}

TypeSet CGSearch::r_assign(const TypeSet& r, const TypeSet& v) {
    TypeSet direct;
    for (int c : r) {
        const CGTypeP& t = at(c);
        if (t->k != CGTy::Ref) continue;
        if (!set_contains(v, id(cg_labeled(t->l1, t->a)))) continue;
        set_insert(direct, id(cg_slio(t->l1, lat_->bot(), cg_unit())));
    }
    return close_set(direct);
}

TypeSet CGSearch::decl(const CGCtx& ctx, const CGExprP& e) {
    CGCtx scoped = ctx;
    return decl_in(scoped, e);
}

TypeSet CGSearch::decl_in(CGCtx& ctx, const CGExprP& e) {
    switch (e->k) {
        case CGEx::Var:
            for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
                if (it->first == e->name) return r_var(id(it->second));
            return {};
        case CGEx::BTrue:
        case CGEx::BFalse:
            return r_lit_bool();
        case CGEx::UnitE:
            return r_lit_unit();
        case CGEx::Lam: {
            ctx.emplace_back(e->name, e->tyA);
            TypeSet body = decl_in(ctx, e->e1);
            ctx.pop_back();
            return r_lam(id(e->tyA), body);
        }
        case CGEx::App: {
            TypeSet fn = decl_in(ctx, e->e1);
            return r_app(fn, decl_in(ctx, e->e2));
        }
        case CGEx::Pair: {
            TypeSet a = decl_in(ctx, e->e1);
            return r_pair(a, decl_in(ctx, e->e2));
        }
        case CGEx::Fst:
            return r_fst(decl_in(ctx, e->e1));
        case CGEx::Snd:
            return r_snd(decl_in(ctx, e->e1));
        case CGEx::Inl:
            return r_inj(true, id(e->tyA), id(e->tyB), decl_in(ctx, e->e1));
        case CGEx::Inr:
            return r_inj(false, id(e->tyA), id(e->tyB), decl_in(ctx, e->e1));
        case CGEx::Case: {
            TypeSet ds = decl_in(ctx, e->e1);
            TypeSet sums;
            for (int c : ds)
                if (at(c)->k == CGTy::Sum) set_insert(sums, c);
            // canonical scrutinee, as in the fine-grained case rule: bind the
            // least derivable sum so invariant cells built from the binder
            // cannot fork the result set into incomparable families
            int least = min_of(sums);
            if (least >= 0) sums = TypeSet{least};
            TypeSet out;
            for (int c : sums) {
                const CGTypeP& s = at(c);
                ctx.emplace_back(e->name, s->a);
                TypeSet b1 = decl_in(ctx, e->e2);
                ctx.pop_back();
                ctx.emplace_back(e->name2, s->b);
                TypeSet b2 = decl_in(ctx, e->e3);
                ctx.pop_back();
                out = set_union(out, r_case_one(c, b1, b2));
            }
            return out;
        }
        case CGEx::If: {
            TypeSet cond = decl_in(ctx, e->e1);
            TypeSet b1 = decl_in(ctx, e->e2);
            TypeSet b2 = decl_in(ctx, e->e3);
            return r_if(cond, b1, b2);
        }
        case CGEx::LabelE:
            return r_label(e->lab, decl_in(ctx, e->e1));
        case CGEx::Unlabel:
            return r_unlabel(decl_in(ctx, e->e1));
        case CGEx::ToLabeled:
            return r_tolabeled(decl_in(ctx, e->e1));
        case CGEx::Ret:
            return r_ret(decl_in(ctx, e->e1));
        case CGEx::Bind: {
            TypeSet ds = decl_in(ctx, e->e1);
            TypeSet ms;
            for (int c : ds)
                if (at(c)->k == CGTy::Slio) set_insert(ms, c);
            // the continuation is typed against the least derivable
            // computation when one exists, the same canonical-binder rule the
            // case forms use; raised variants reappear through the closure
            int least = min_of(ms);
            if (least >= 0) ms = TypeSet{least};
            // the continuation's set depends only on the payload type the
            // binder receives, so compute it once per distinct payload
            TypeSet out;
            std::unordered_map<int, TypeSet> bodies;
            for (int c : ms) {
                const CGTypeP& t = at(c);
                int payload = id(t->a);
                auto it = bodies.find(payload);
                if (it == bodies.end()) {
                    ctx.emplace_back(e->name, t->a);
                    it = bodies.emplace(payload, decl_in(ctx, e->e2)).first;
                    ctx.pop_back();
                }
                out = set_union(out, r_bind_one(c, it->second));
            }
            return out;
        }
        case CGEx::New:
            return r_new(decl_in(ctx, e->e1), e->tyA ? id(e->tyA) : -1);
        case CGEx::Deref:
            return r_deref(decl_in(ctx, e->e1));
        case CGEx::Assign: {
            TypeSet r = decl_in(ctx, e->e1);
            return r_assign(r, decl_in(ctx, e->e2));
        }
    }
    return {};
}

} // namespace ifc

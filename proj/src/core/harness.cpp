#include "harness.hpp"

#include <functional>

#include "cg2fg.hpp"
#include "fg2cg.hpp"
#include "surface.hpp"

namespace ifc {

Label Rng::pick_label(const LatticeP& lat) {
    std::vector<Label> ls = lat->all();
    return ls[below(ls.size())];
}

size_t fg_expr_size(const FGExprP& e) {
    if (!e) return 0;
    return 1 + fg_expr_size(e->e1) + fg_expr_size(e->e2) + fg_expr_size(e->e3);
}

size_t cg_expr_size(const CGExprP& e) {
    if (!e) return 0;
    return 1 + cg_expr_size(e->e1) + cg_expr_size(e->e2) + cg_expr_size(e->e3);
}

FGExprP flip_first_bool_fg(const FGExprP& e) {
    if (!e) return nullptr;
    if (e->k == FGEx::BTrue || e->k == FGEx::BFalse) {
        auto c = std::make_shared<FGExpr>(*e);
        c->k = e->k == FGEx::BTrue ? FGEx::BFalse : FGEx::BTrue;
        return c;
    }
    if (auto f = flip_first_bool_fg(e->e1)) {
        auto c = std::make_shared<FGExpr>(*e);
        c->e1 = f;
        return c;
    }
    if (auto f = flip_first_bool_fg(e->e2)) {
        auto c = std::make_shared<FGExpr>(*e);
        c->e2 = f;
        return c;
    }
    if (auto f = flip_first_bool_fg(e->e3)) {
        auto c = std::make_shared<FGExpr>(*e);
        c->e3 = f;
        return c;
    }
    return nullptr;
}

CGExprP flip_first_bool_cg(const CGExprP& e) {
    if (!e) return nullptr;
    if (e->k == CGEx::BTrue || e->k == CGEx::BFalse) {
        auto c = std::make_shared<CGExpr>(*e);
        c->k = e->k == CGEx::BTrue ? CGEx::BFalse : CGEx::BTrue;
        return c;
    }
    if (auto f = flip_first_bool_cg(e->e1)) {
        auto c = std::make_shared<CGExpr>(*e);
        c->e1 = f;
        return c;
    }
    if (auto f = flip_first_bool_cg(e->e2)) {
        auto c = std::make_shared<CGExpr>(*e);
        c->e2 = f;
        return c;
    }
    if (auto f = flip_first_bool_cg(e->e3)) {
        auto c = std::make_shared<CGExpr>(*e);
        c->e3 = f;
        return c;
    }
    return nullptr;
}

namespace {

constexpr int kGenMaxDepth = 12;

bool lab_leq(Label a, Label b) { return a.lat->leq(a, b); }

size_t pick_weighted(Rng& rng, const std::vector<int>& ws) {
    long total = 0;
    for (int w : ws) total += w;
    long r = static_cast<long>(rng.below(static_cast<size_t>(total)));
    for (size_t i = 0; i < ws.size(); ++i) {
        r -= ws[i];
        if (r < 0) return i;
    }
    return ws.size() - 1;
}

struct DepthGuard {
    int& d;
    explicit DepthGuard(int& dd) : d(dd) { ++d; }
    ~DepthGuard() { --d; }
};

bool fg_type_has_ref(const FGTypeP& t) {
    if (!t) return false;
    if (t->k == FGTy::Ref) return true;
    return fg_type_has_ref(t->a) || fg_type_has_ref(t->b);
}

bool cg_type_has_ref(const CGTypeP& t) {
    if (!t) return false;
    if (t->k == CGTy::Ref) return true;
    return cg_type_has_ref(t->a) || cg_type_has_ref(t->b);
}

// Node count of the smallest closed inhabitant buildable at pc, or -1.
// Reference cells are the one obstruction: allocation writes, so the cell
// label must sit at or above pc.
long fg_cost(const FGTypeP& t, Label pc) {
    switch (t->k) {
    case FGTy::Bool:
    case FGTy::Unit: return 1;
    case FGTy::Fun: {
        long b = fg_cost(t->b, t->latent);
        return b < 0 ? -1 : 1 + b;
    }
    case FGTy::Prod: {
        long a = fg_cost(t->a, pc), b = fg_cost(t->b, pc);
        return a < 0 || b < 0 ? -1 : 1 + a + b;
    }
    case FGTy::Sum: {
        long a = fg_cost(t->a, pc), b = fg_cost(t->b, pc);
        if (a < 0 && b < 0) return -1;
        if (a < 0) return 1 + b;
        if (b < 0) return 1 + a;
        return 1 + (a < b ? a : b);
    }
    case FGTy::Ref: {
        if (!lab_leq(pc, t->a->lab)) return -1;
        long c = fg_cost(t->a, pc);
        return c < 0 ? -1 : 1 + c;
    }
    }
    return -1;
}

// The inhabitant fg_cost prices: deterministic, literals all `true`,
// sums taking the cheaper side (left on ties).
FGExprP fg_canon(const FGTypeP& t, Label pc) {
    switch (t->k) {
    case FGTy::Bool: return fgb::tru();
    case FGTy::Unit: return fgb::unit();
    case FGTy::Fun: return fgb::lam("w", t->a, t->latent, fg_canon(t->b, t->latent));
    case FGTy::Prod: return fgb::pair(fg_canon(t->a, pc), fg_canon(t->b, pc));
    case FGTy::Sum: {
        long a = fg_cost(t->a, pc), b = fg_cost(t->b, pc);
        if (a < 0 && b < 0) throw IfcError("no inhabitant for " + fg_type_str(t));
        bool left = b < 0 || (a >= 0 && a <= b);
        return left ? fgb::inl(fg_canon(t->a, pc), t->a, t->b)
                    : fgb::inr(fg_canon(t->b, pc), t->a, t->b);
    }
    case FGTy::Ref:
        if (!lab_leq(pc, t->a->lab))
            throw IfcError("no inhabitant for " + fg_type_str(t) + " at this program counter");
        return fgb::newe(fg_canon(t->a, pc), t->a);
    }
    throw IfcError("malformed type");
}

long cg_cost(const CGTypeP& t) {
    switch (t->k) {
    case CGTy::Bool:
    case CGTy::Unit: return 1;
    case CGTy::Fun: {
        long b = cg_cost(t->b);
        return b < 0 ? -1 : 1 + b;
    }
    case CGTy::Prod: {
        long a = cg_cost(t->a), b = cg_cost(t->b);
        return a < 0 || b < 0 ? -1 : 1 + a + b;
    }
    case CGTy::Sum: {
        long a = cg_cost(t->a), b = cg_cost(t->b);
        if (a < 0 && b < 0) return -1;
        if (a < 0) return 1 + b;
        if (b < 0) return 1 + a;
        return 1 + (a < b ? a : b);
    }
    case CGTy::Labeled: {
        long c = cg_cost(t->a);
        return c < 0 ? -1 : 1 + c;
    }
    case CGTy::Ref: return -1; // locations only come out of the monad
    case CGTy::Slio: {
        if (t->a->k == CGTy::Ref) {
            // allocate-and-return; the pc bound must permit the write
            if (!lab_leq(t->l1, t->a->l1)) return -1;
            long c = cg_cost(t->a->a);
            return c < 0 ? -1 : 5 + c;
        }
        long c = cg_cost(t->a);
        return c < 0 ? -1 : 1 + c;
    }
    }
    return -1;
}

CGExprP cg_canon(const CGTypeP& t) {
    switch (t->k) {
    case CGTy::Bool: return cgb::tru();
    case CGTy::Unit: return cgb::unit();
    case CGTy::Fun: return cgb::lam("w", t->a, cg_canon(t->b));
    case CGTy::Prod: return cgb::pair(cg_canon(t->a), cg_canon(t->b));
    case CGTy::Sum: {
        long a = cg_cost(t->a), b = cg_cost(t->b);
        if (a < 0 && b < 0) throw IfcError("no inhabitant for " + cg_type_str(t));
        bool left = b < 0 || (a >= 0 && a <= b);
        return left ? cgb::inl(cg_canon(t->a), t->a, t->b)
                    : cgb::inr(cg_canon(t->b), t->a, t->b);
    }
    case CGTy::Labeled: return cgb::label(t->l1, cg_canon(t->a));
    case CGTy::Ref: throw IfcError("no closed term denotes a location");
    case CGTy::Slio:
        if (t->a->k == CGTy::Ref) {
            if (!lab_leq(t->l1, t->a->l1))
                throw IfcError("no inhabitant for " + cg_type_str(t));
            CGTypeP cell = cg_labeled(t->a->l1, t->a->a);
            return cgb::bind(cgb::newe(cgb::label(t->a->l1, cg_canon(t->a->a)), cell), "w",
                             cgb::ret(cgb::var("w")));
        }
        return cgb::ret(cg_canon(t->a));
    }
    throw IfcError("malformed type");
}

// Coin-flipped variant of the canonical inhabitant, for secret values.
// Callers have already ruled out reference types, so every sum side is
// available and no allocation is ever needed.
FGExprP fg_value_expr(Rng& rng, const FGTypeP& t) {
    switch (t->k) {
    case FGTy::Bool: return rng.coin() ? fgb::tru() : fgb::fls();
    case FGTy::Unit: return fgb::unit();
    case FGTy::Fun: return fgb::lam("w", t->a, t->latent, fg_value_expr(rng, t->b));
    case FGTy::Prod: return fgb::pair(fg_value_expr(rng, t->a), fg_value_expr(rng, t->b));
    case FGTy::Sum:
        return rng.coin() ? fgb::inl(fg_value_expr(rng, t->a), t->a, t->b)
                          : fgb::inr(fg_value_expr(rng, t->b), t->a, t->b);
    default: throw IfcError("secret values cannot involve the heap");
    }
}

CGExprP cg_value_expr(Rng& rng, const CGTypeP& t) {
    switch (t->k) {
    case CGTy::Bool: return rng.coin() ? cgb::tru() : cgb::fls();
    case CGTy::Unit: return cgb::unit();
    case CGTy::Fun: return cgb::lam("w", t->a, cg_value_expr(rng, t->b));
    case CGTy::Prod: return cgb::pair(cg_value_expr(rng, t->a), cg_value_expr(rng, t->b));
    case CGTy::Sum:
        return rng.coin() ? cgb::inl(cg_value_expr(rng, t->a), t->a, t->b)
                          : cgb::inr(cg_value_expr(rng, t->b), t->a, t->b);
    case CGTy::Labeled: return cgb::label(t->l1, cg_value_expr(rng, t->a));
    case CGTy::Slio: return cgb::ret(cg_value_expr(rng, t->a));
    default: throw IfcError("secret values cannot involve the heap");
    }
}

// ---- fine-grained program generator ----
// Goal-directed: every production reserves the smallest completion of
// each subgoal before spending slack, so the result never exceeds the
// budget (unless the budget is below the goal's own floor, in which case
// the minimal inhabitant is emitted). Every emitted term synthesizes a
// subtype of its goal, which the narrowing argument keeps true under
// binders: annotations pin the invariant positions (cells, sum
// components), and everything else only ever gets lower.

struct FGGen {
    const LatticeP& lat;
    Rng& rng;
    FGCtx ctx;
    int fresh = 0;
    int depth = 0;

    std::string freshName() { return "%g" + std::to_string(++fresh); }
    Label lab() { return rng.pick_label(lat); }
    Label labAtMost(Label m) { return lat->meet(lab(), m); }
    Label labAtLeast(Label m) { return lat->join(lab(), m); }

    long minsize(const FGTypeP& t, Label pc) {
        for (auto& b : ctx)
            if (fg_subtype(b.second, t)) return 1;
        return fg_cost(t, pc);
    }

    // Types for argument/component positions: reuse a variable's type
    // (this is what routes secrets into generated programs), else draw.
    FGTypeP helperType(Label pc) {
        if (!ctx.empty() && rng.below(3) == 0) return ctx[rng.below(ctx.size())].second;
        return gen_fg_type(rng, lat, pc, 1, true, true);
    }

    FGExprP leaf(const FGTypeP& g, Label pc) {
        std::vector<std::string> vars;
        for (auto& b : ctx)
            if (fg_subtype(b.second, g)) vars.push_back(b.first);
        long c = fg_cost(g, pc);
        if (!vars.empty() && (c < 0 || rng.coin())) return fgb::var(vars[rng.below(vars.size())]);
        if (c >= 0) return fg_canon(g, pc);
        if (!vars.empty()) return fgb::var(vars[rng.below(vars.size())]);
        throw IfcError("no inhabitant for " + fg_type_str(g) + " in this context");
    }

    FGExprP gen(const FGTypeP& g, Label pc, long budget) {
        DepthGuard dg(depth);
        long base = minsize(g, pc);
        if (base < 0) return leaf(g, pc);
        if (budget < base) {
            // below the floor: the budget caps elective structure only
            long c = fg_cost(g, pc);
            if (c >= 0) return fg_canon(g, pc);
            return leaf(g, pc);
        }

        std::vector<int> ws;
        std::vector<std::function<FGExprP()>> mk;
        auto add = [&](int w, std::function<FGExprP()> f) {
            ws.push_back(w);
            mk.push_back(std::move(f));
        };

        {
            std::vector<std::string> vars;
            for (auto& b : ctx)
                if (fg_subtype(b.second, g)) vars.push_back(b.first);
            if (!vars.empty())
                add(5, [this, vars] { return fgb::var(vars[rng.below(vars.size())]); });
        }
        {
            long c = fg_cost(g, pc);
            if (c >= 0 && c <= budget) add(1, [this, g, pc] { return fg_canon(g, pc); });
        }

        bool deep = depth < kGenMaxDepth;

        if (deep) switch (g->k) {
        case FGTy::Bool: {
            add(2, [this] { return rng.coin() ? fgb::tru() : fgb::fls(); });
            FGTypeP og = fg_bool(g->lab);
            if (budget >= 2)
                add(4, [this, og, pc, budget] { return fgb::bnot(gen(og, pc, budget - 1)); });
            if (budget >= 3)
                add(4, [this, og, pc, budget] {
                    long slack = budget - 3;
                    long b1 = 1 + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                    FGExprP a = gen(og, pc, b1);
                    FGExprP b = gen(og, pc, budget - 1 - static_cast<long>(fg_expr_size(a)));
                    return rng.coin() ? fgb::band(a, b) : fgb::bor(a, b);
                });
            break;
        }
        case FGTy::Unit: break; // literal comes in as the canonical leaf
        case FGTy::Fun: {
            long mb = minsize(g->b, g->latent);
            if (mb >= 0 && budget >= 1 + mb)
                add(5, [this, g, budget] {
                    std::string x = freshName();
                    ctx.push_back({x, g->a});
                    FGExprP body = gen(g->b, g->latent, budget - 1);
                    ctx.pop_back();
                    return fgb::lam(x, g->a, g->latent, body);
                });
            break;
        }
        case FGTy::Prod: {
            long ma = minsize(g->a, pc), mb = minsize(g->b, pc);
            if (ma >= 0 && mb >= 0 && budget >= 1 + ma + mb)
                add(5, [this, g, pc, budget, ma, mb] {
                    long slack = budget - 1 - ma - mb;
                    long b1 = ma + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                    FGExprP a = gen(g->a, pc, b1);
                    FGExprP b = gen(g->b, pc, budget - 1 - static_cast<long>(fg_expr_size(a)));
                    return fgb::pair(a, b);
                });
            break;
        }
        case FGTy::Sum: {
            long ma = minsize(g->a, pc), mb = minsize(g->b, pc);
            if (ma >= 0 && budget >= 1 + ma)
                add(3, [this, g, pc, budget] {
                    return fgb::inl(gen(g->a, pc, budget - 1), g->a, g->b);
                });
            if (mb >= 0 && budget >= 1 + mb)
                add(3, [this, g, pc, budget] {
                    return fgb::inr(gen(g->b, pc, budget - 1), g->a, g->b);
                });
            break;
        }
        case FGTy::Ref: {
            long mc = minsize(g->a, pc);
            if (lat->leq(pc, g->a->lab) && mc >= 0 && budget >= 1 + mc)
                add(5, [this, g, pc, budget] {
                    return fgb::newe(gen(g->a, pc, budget - 1), g->a);
                });
            break;
        }
        }

        if (deep) {
            // branch on a boolean no more secret than the goal allows
            {
                Label lc = labAtMost(g->lab);
                Label pc2 = lat->join(pc, lc);
                long mg = minsize(g, pc2);
                if (mg >= 0 && budget >= 2 + 2 * mg)
                    add(4, [this, g, pc, pc2, lc, budget, mg] {
                        long slack = budget - 2 - 2 * mg;
                        long bc = 1 + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                        FGExprP c = gen(fg_bool(lc), pc, bc);
                        long rest = budget - 1 - static_cast<long>(fg_expr_size(c));
                        long b1 = mg + static_cast<long>(
                                           rng.below(static_cast<size_t>(rest - 2 * mg) + 1));
                        FGExprP t = gen(g, pc2, b1);
                        FGExprP e = gen(g, pc2, rest - static_cast<long>(fg_expr_size(t)));
                        return fgb::ife(c, t, e);
                    });
            }
            // split a sum
            {
                Label lc = labAtMost(g->lab);
                Label pc2 = lat->join(pc, lc);
                FGTypeP A = helperType(pc), B = helperType(pc);
                FGTypeP sg = fg_sum(A, B, lc);
                long ms = minsize(sg, pc), mg = minsize(g, pc2);
                if (ms >= 0 && mg >= 0 && budget >= 1 + ms + 2 * mg)
                    add(4, [this, A, B, sg, g, pc, pc2, budget, ms, mg] {
                        long slack = budget - 1 - ms - 2 * mg;
                        long bs = ms + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                        FGExprP s = gen(sg, pc, bs);
                        long rest = budget - 1 - static_cast<long>(fg_expr_size(s));
                        std::string x = freshName(), y = freshName();
                        long b1 = mg + static_cast<long>(
                                           rng.below(static_cast<size_t>(rest - 2 * mg) + 1));
                        ctx.push_back({x, A});
                        FGExprP bl = gen(g, pc2, b1);
                        ctx.pop_back();
                        ctx.push_back({y, B});
                        FGExprP br = gen(g, pc2, rest - static_cast<long>(fg_expr_size(bl)));
                        ctx.pop_back();
                        return fgb::cse(s, x, bl, y, br);
                    });
            }
            // apply a function landing on the goal
            {
                FGTypeP A = helperType(pc);
                Label le = labAtLeast(pc);
                FGTypeP fgoal = fg_fun(A, le, g, lat->bot());
                long mf = minsize(fgoal, pc), ma = minsize(A, pc);
                if (mf >= 0 && ma >= 0 && budget >= 1 + mf + ma)
                    add(4, [this, fgoal, A, pc, budget, mf, ma] {
                        long slack = budget - 1 - mf - ma;
                        long b1 = mf + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                        FGExprP f = gen(fgoal, pc, b1);
                        FGExprP a = gen(A, pc, budget - 1 - static_cast<long>(fg_expr_size(f)));
                        return fgb::app(f, a);
                    });
            }
            // project from a pair
            {
                Label lp = labAtMost(g->lab);
                FGTypeP R = helperType(pc);
                FGTypeP p1 = fg_prod(g, R, lp), p2 = fg_prod(R, g, lp);
                long m1 = minsize(p1, pc);
                if (m1 >= 0 && budget >= 1 + m1)
                    add(3, [this, p1, pc, budget] { return fgb::fst(gen(p1, pc, budget - 1)); });
                long m2 = minsize(p2, pc);
                if (m2 >= 0 && budget >= 1 + m2)
                    add(3, [this, p2, pc, budget] { return fgb::snd(gen(p2, pc, budget - 1)); });
            }
            // load through a reference
            {
                Label lr = labAtMost(g->lab);
                FGTypeP rg = fg_ref(g, lr);
                long mr = minsize(rg, pc);
                if (mr >= 0 && budget >= 1 + mr)
                    add(3, [this, rg, pc, budget] { return fgb::deref(gen(rg, pc, budget - 1)); });
            }
            // stores: the unit-typed effects
            if (g->k == FGTy::Unit) {
                std::vector<size_t> refs;
                for (size_t i = 0; i < ctx.size(); ++i) {
                    const FGTypeP& t = ctx[i].second;
                    if (t->k == FGTy::Ref && lat->leq(lat->join(pc, t->lab), t->a->lab)) {
                        long mv = minsize(t->a, pc);
                        if (mv >= 0 && budget >= 2 + mv) refs.push_back(i);
                    }
                }
                if (!refs.empty())
                    add(4, [this, refs, pc, budget] {
                        // copy out: the recursive call reshapes ctx
                        size_t idx = refs[rng.below(refs.size())];
                        std::string nm = ctx[idx].first;
                        FGTypeP cell = ctx[idx].second->a;
                        return fgb::assign(fgb::var(nm), gen(cell, pc, budget - 2));
                    });
                FGTypeP C = fg_raise(gen_fg_type(rng, lat, pc, 1, false, true), pc);
                long mc = fg_cost(C, pc);
                if (mc >= 0 && budget >= 3 + 2 * mc)
                    add(2, [this, C, pc, budget, mc] {
                        long slack = budget - 3 - 2 * mc;
                        long b1 = mc + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                        FGExprP v = gen(C, pc, b1);
                        FGExprP w2 = gen(C, pc, budget - 2 - static_cast<long>(fg_expr_size(v)));
                        return fgb::assign(fgb::newe(v, C), w2);
                    });
            }
        }

        if (ws.empty()) return leaf(g, pc);
        return mk[pick_weighted(rng, ws)]();
    }
};

// ---- coarse-grained program generator ----

struct CGGen {
    const LatticeP& lat;
    Rng& rng;
    CGCtx ctx;
    int fresh = 0;
    int depth = 0;

    std::string freshName() { return "%g" + std::to_string(++fresh); }
    Label lab() { return rng.pick_label(lat); }
    Label labAtMost(Label m) { return lat->meet(lab(), m); }

    long minsize(const CGTypeP& t) {
        for (auto& b : ctx)
            if (cg_subtype(b.second, t)) return 1;
        return cg_cost(t);
    }

    // refLower: when a reference type is drawn for a computation's
    // intermediate value, its cell must absorb writes at that bound.
    CGTypeP helperType(bool allowRefHere, Label refLower) {
        if (!ctx.empty() && rng.below(3) == 0) return ctx[rng.below(ctx.size())].second;
        if (allowRefHere && rng.below(4) == 0)
            return cg_ref(lat->join(refLower, lab()), gen_cg_type(rng, lat, 1, false, true, false));
        return gen_cg_type(rng, lat, 1, false, true, true);
    }

    CGExprP leaf(const CGTypeP& g) {
        std::vector<std::string> vars;
        for (auto& b : ctx)
            if (cg_subtype(b.second, g)) vars.push_back(b.first);
        long c = cg_cost(g);
        if (!vars.empty() && (c < 0 || rng.coin())) return cgb::var(vars[rng.below(vars.size())]);
        if (c >= 0) return cg_canon(g);
        if (!vars.empty()) return cgb::var(vars[rng.below(vars.size())]);
        throw IfcError("no inhabitant for " + cg_type_str(g) + " in this context");
    }

    CGExprP gen(const CGTypeP& g, long budget) {
        DepthGuard dg(depth);
        long base = minsize(g);
        if (base < 0) return leaf(g);
        if (budget < base) {
            long c = cg_cost(g);
            if (c >= 0) return cg_canon(g);
            return leaf(g);
        }

        std::vector<int> ws;
        std::vector<std::function<CGExprP()>> mk;
        auto add = [&](int w, std::function<CGExprP()> f) {
            ws.push_back(w);
            mk.push_back(std::move(f));
        };

        {
            std::vector<std::string> vars;
            for (auto& b : ctx)
                if (cg_subtype(b.second, g)) vars.push_back(b.first);
            if (!vars.empty())
                add(5, [this, vars] { return cgb::var(vars[rng.below(vars.size())]); });
        }
        {
            long c = cg_cost(g);
            if (c >= 0 && c <= budget) add(1, [this, g] { return cg_canon(g); });
        }

        bool deep = depth < kGenMaxDepth;

        if (deep) switch (g->k) {
        case CGTy::Bool:
            add(2, [this] { return rng.coin() ? cgb::tru() : cgb::fls(); });
            break;
        case CGTy::Unit: break;
        case CGTy::Fun: {
            long mb = minsize(g->b);
            if (mb >= 0 && budget >= 1 + mb)
                add(5, [this, g, budget] {
                    std::string x = freshName();
                    ctx.push_back({x, g->a});
                    CGExprP body = gen(g->b, budget - 1);
                    ctx.pop_back();
                    return cgb::lam(x, g->a, body);
                });
            break;
        }
        case CGTy::Prod: {
            long ma = minsize(g->a), mb = minsize(g->b);
            if (ma >= 0 && mb >= 0 && budget >= 1 + ma + mb)
                add(5, [this, g, budget, ma, mb] {
                    long slack = budget - 1 - ma - mb;
                    long b1 = ma + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                    CGExprP a = gen(g->a, b1);
                    CGExprP b = gen(g->b, budget - 1 - static_cast<long>(cg_expr_size(a)));
                    return cgb::pair(a, b);
                });
            break;
        }
        case CGTy::Sum: {
            long ma = minsize(g->a), mb = minsize(g->b);
            if (ma >= 0 && budget >= 1 + ma)
                add(3, [this, g, budget] { return cgb::inl(gen(g->a, budget - 1), g->a, g->b); });
            if (mb >= 0 && budget >= 1 + mb)
                add(3, [this, g, budget] { return cgb::inr(gen(g->b, budget - 1), g->a, g->b); });
            break;
        }
        case CGTy::Labeled: {
            long mp = minsize(g->a);
            if (mp >= 0 && budget >= 1 + mp)
                add(5, [this, g, budget] {
                    return cgb::label(labAtMost(g->l1), gen(g->a, budget - 1));
                });
            break;
        }
        case CGTy::Ref: break; // only variables and eliminations reach these
        case CGTy::Slio: {
            Label l1 = g->l1, l2 = g->l2;
            CGTypeP tau = g->a;
            long mp = minsize(tau);
            if (mp >= 0 && budget >= 1 + mp)
                add(3, [this, tau, budget] { return cgb::ret(gen(tau, budget - 1)); });
            {
                CGTypeP lg = cg_labeled(labAtMost(l2), tau);
                long ml = minsize(lg);
                if (ml >= 0 && budget >= 1 + ml)
                    add(3, [this, lg, budget] { return cgb::unlabel(gen(lg, budget - 1)); });
            }
            {
                Label tm = labAtMost(l2);
                CGTypeP A = helperType(true, l1);
                CGTypeP mgl = cg_slio(l1, tm, A);
                CGTypeP ngl = cg_slio(lat->join(l1, tm), l2, tau);
                long mm = minsize(mgl), mn = minsize(ngl);
                if (mm >= 0 && mn >= 0 && budget >= 1 + mm + mn)
                    add(6, [this, mgl, ngl, A, budget, mm, mn] {
                        long slack = budget - 1 - mm - mn;
                        long b1 = mm + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                        CGExprP m = gen(mgl, b1);
                        std::string x = freshName();
                        ctx.push_back({x, A});
                        CGExprP n = gen(ngl, budget - 1 - static_cast<long>(cg_expr_size(m)));
                        ctx.pop_back();
                        return cgb::bind(m, x, n);
                    });
            }
            if (tau->k == CGTy::Labeled) {
                CGTypeP mgl = cg_slio(l1, tau->l1, tau->a);
                long mm = minsize(mgl);
                if (mm >= 0 && budget >= 1 + mm)
                    add(6, [this, mgl, budget] { return cgb::toLabeled(gen(mgl, budget - 1)); });
            }
            if (tau->k == CGTy::Ref && lat->leq(l1, tau->l1)) {
                CGTypeP cell = cg_labeled(tau->l1, tau->a);
                long mc = minsize(cell);
                if (mc >= 0 && budget >= 1 + mc)
                    add(4, [this, cell, budget] {
                        return cgb::newe(gen(cell, budget - 1), cell);
                    });
            }
            if (tau->k == CGTy::Labeled) {
                std::vector<size_t> refs;
                for (size_t i = 0; i < ctx.size(); ++i) {
                    const CGTypeP& t = ctx[i].second;
                    if (t->k == CGTy::Ref && lat->leq(t->l1, tau->l1) && cg_type_eq(t->a, tau->a))
                        refs.push_back(i);
                }
                if (!refs.empty() && budget >= 2)
                    add(4, [this, refs] {
                        return cgb::deref(cgb::var(ctx[refs[rng.below(refs.size())]].first));
                    });
            }
            if (tau->k == CGTy::Unit) {
                std::vector<size_t> refs;
                for (size_t i = 0; i < ctx.size(); ++i) {
                    const CGTypeP& t = ctx[i].second;
                    if (t->k == CGTy::Ref && lat->leq(l1, t->l1)) {
                        long mv = minsize(cg_labeled(t->l1, t->a));
                        if (mv >= 0 && budget >= 2 + mv) refs.push_back(i);
                    }
                }
                if (!refs.empty())
                    add(4, [this, refs, budget] {
                        // copy out: the recursive call reshapes ctx
                        size_t idx = refs[rng.below(refs.size())];
                        std::string nm = ctx[idx].first;
                        CGTypeP cell = cg_labeled(ctx[idx].second->l1, ctx[idx].second->a);
                        return cgb::assign(cgb::var(nm), gen(cell, budget - 2));
                    });
            }
            break;
        }
        }

        if (deep) {
            {
                CGTypeP A = helperType(false, lat->bot());
                CGTypeP fgoal = cg_fun(A, g);
                long mf = minsize(fgoal), ma = minsize(A);
                if (mf >= 0 && ma >= 0 && budget >= 1 + mf + ma)
                    add(3, [this, fgoal, A, budget, mf, ma] {
                        long slack = budget - 1 - mf - ma;
                        long b1 = mf + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                        CGExprP f = gen(fgoal, b1);
                        CGExprP a = gen(A, budget - 1 - static_cast<long>(cg_expr_size(f)));
                        return cgb::app(f, a);
                    });
            }
            if (budget >= 2 + 2 * base)
                add(3, [this, g, budget, base] {
                    long slack = budget - 2 - 2 * base;
                    long bc = 1 + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                    CGExprP c = gen(cg_bool(), bc);
                    long rest = budget - 1 - static_cast<long>(cg_expr_size(c));
                    long b1 = base + static_cast<long>(
                                         rng.below(static_cast<size_t>(rest - 2 * base) + 1));
                    CGExprP t = gen(g, b1);
                    CGExprP e = gen(g, rest - static_cast<long>(cg_expr_size(t)));
                    return cgb::ife(c, t, e);
                });
            {
                CGTypeP A = helperType(false, lat->bot()), B = helperType(false, lat->bot());
                CGTypeP sg = cg_sum(A, B);
                long ms = minsize(sg);
                if (ms >= 0 && budget >= 1 + ms + 2 * base)
                    add(3, [this, A, B, sg, g, budget, ms, base] {
                        long slack = budget - 1 - ms - 2 * base;
                        long bs = ms + static_cast<long>(rng.below(static_cast<size_t>(slack) + 1));
                        CGExprP s = gen(sg, bs);
                        long rest = budget - 1 - static_cast<long>(cg_expr_size(s));
                        std::string x = freshName(), y = freshName();
                        long b1 = base + static_cast<long>(
                                             rng.below(static_cast<size_t>(rest - 2 * base) + 1));
                        ctx.push_back({x, A});
                        CGExprP bl = gen(g, b1);
                        ctx.pop_back();
                        ctx.push_back({y, B});
                        CGExprP br = gen(g, rest - static_cast<long>(cg_expr_size(bl)));
                        ctx.pop_back();
                        return cgb::cse(s, x, bl, y, br);
                    });
            }
            {
                CGTypeP R = helperType(false, lat->bot());
                CGTypeP p1 = cg_prod(g, R), p2 = cg_prod(R, g);
                long m1 = minsize(p1);
                if (m1 >= 0 && budget >= 1 + m1)
                    add(3, [this, p1, budget] { return cgb::fst(gen(p1, budget - 1)); });
                long m2 = minsize(p2);
                if (m2 >= 0 && budget >= 1 + m2)
                    add(3, [this, p2, budget] { return cgb::snd(gen(p2, budget - 1)); });
            }
        }

        if (ws.empty()) return leaf(g);
        return mk[pick_weighted(rng, ws)]();
    }
};

} // namespace

FGTypeP gen_fg_type(Rng& rng, const LatticeP& lat, Label pc, int depth, bool allowRef,
                    bool allowFun) {
    Label l = rng.pick_label(lat);
    std::vector<int> kinds = {0, 1}, ws = {3, 1};
    if (depth > 0) {
        kinds.push_back(2); ws.push_back(2);
        kinds.push_back(3); ws.push_back(2);
        if (allowFun) { kinds.push_back(4); ws.push_back(2); }
        if (allowRef) { kinds.push_back(5); ws.push_back(2); }
    }
    switch (kinds[pick_weighted(rng, ws)]) {
    case 0: return fg_bool(l);
    case 1: return fg_unit(l);
    case 2:
        return fg_prod(gen_fg_type(rng, lat, pc, depth - 1, allowRef, allowFun),
                       gen_fg_type(rng, lat, pc, depth - 1, allowRef, allowFun), l);
    case 3:
        return fg_sum(gen_fg_type(rng, lat, pc, depth - 1, allowRef, allowFun),
                      gen_fg_type(rng, lat, pc, depth - 1, allowRef, allowFun), l);
    case 4: {
        Label le = rng.pick_label(lat);
        FGTypeP a = gen_fg_type(rng, lat, pc, depth - 1, allowRef, allowFun);
        FGTypeP b = gen_fg_type(rng, lat, le, depth - 1, allowRef, allowFun);
        return fg_fun(a, le, b, l);
    }
    default: {
        // the cell must absorb writes made at pc, or nothing could build it
        FGTypeP cell = fg_raise(gen_fg_type(rng, lat, pc, depth - 1, false, allowFun), pc);
        return fg_ref(cell, l);
    }
    }
}

CGTypeP gen_cg_type(Rng& rng, const LatticeP& lat, int depth, bool allowRef, bool allowFun,
                    bool allowMonad) {
    std::vector<int> kinds = {0, 1}, ws = {3, 1};
    if (depth > 0) {
        kinds.push_back(2); ws.push_back(2);
        kinds.push_back(3); ws.push_back(2);
        kinds.push_back(4); ws.push_back(3);
        if (allowFun) { kinds.push_back(5); ws.push_back(2); }
        if (allowMonad) { kinds.push_back(6); ws.push_back(4); }
    }
    switch (kinds[pick_weighted(rng, ws)]) {
    case 0: return cg_bool();
    case 1: return cg_unit();
    case 2:
        return cg_prod(gen_cg_type(rng, lat, depth - 1, false, allowFun, allowMonad),
                       gen_cg_type(rng, lat, depth - 1, false, allowFun, allowMonad));
    case 3:
        return cg_sum(gen_cg_type(rng, lat, depth - 1, false, allowFun, allowMonad),
                      gen_cg_type(rng, lat, depth - 1, false, allowFun, allowMonad));
    case 4:
        return cg_labeled(rng.pick_label(lat),
                          gen_cg_type(rng, lat, depth - 1, false, allowFun, false));
    case 5:
        return cg_fun(gen_cg_type(rng, lat, depth - 1, false, allowFun, allowMonad),
                      gen_cg_type(rng, lat, depth - 1, false, allowFun, allowMonad));
    default: {
        Label l1 = rng.pick_label(lat), l2 = rng.pick_label(lat);
        CGTypeP pay;
        if (allowRef && rng.below(4) == 0)
            pay = cg_ref(lat->join(l1, rng.pick_label(lat)),
                         gen_cg_type(rng, lat, depth - 1, false, allowFun, false));
        else
            pay = gen_cg_type(rng, lat, depth - 1, false, allowFun, allowMonad);
        return cg_slio(l1, l2, pay);
    }
    }
}

FGExprP gen_fg_value_expr(Rng& rng, const FGTypeP& t) {
    if (fg_type_has_ref(t)) throw IfcError("secret values cannot involve the heap");
    return fg_value_expr(rng, t);
}

CGExprP gen_cg_value_expr(Rng& rng, const CGTypeP& t) {
    if (cg_type_has_ref(t)) throw IfcError("secret values cannot involve the heap");
    return cg_value_expr(rng, t);
}

FGExprP gen_fg_program(const LatticeP& lat, const FGCtx& ctx, Label pc, FGTypeP goal, int size,
                       uint64_t seed) {
    Rng rng(seed);
    FGGen g{lat, rng, ctx};
    if (size < 1) size = 1;
    if (!goal) {
        for (int tries = 0;; ++tries) {
            FGTypeP cand = gen_fg_type(rng, lat, pc, 2, true, true);
            long m = g.minsize(cand, pc);
            if (m >= 0 && m <= size) { goal = cand; break; }
            if (tries > 200) { goal = fg_bool(lat->bot()); break; }
        }
    } else {
        long m = g.minsize(goal, pc);
        if (m < 0)
            throw IfcError("goal type " + fg_type_str(goal) + " has no inhabitant here");
    }
    return g.gen(goal, pc, size);
}

CGExprP gen_cg_program(const LatticeP& lat, const CGCtx& ctx, CGTypeP goal, int size,
                       uint64_t seed) {
    Rng rng(seed);
    CGGen g{lat, rng, ctx};
    if (size < 1) size = 1;
    if (!goal) {
        for (int tries = 0;; ++tries) {
            CGTypeP cand;
            if (rng.below(4) != 0) {
                Label l1 = rng.pick_label(lat), l2 = rng.pick_label(lat);
                CGTypeP pay;
                size_t kind = rng.below(4);
                if (kind == 0)
                    pay = cg_ref(lat->join(l1, rng.pick_label(lat)),
                                 gen_cg_type(rng, lat, 1, false, true, false));
                else if (kind == 1)
                    pay = cg_labeled(rng.pick_label(lat),
                                     gen_cg_type(rng, lat, 1, false, true, false));
                else
                    pay = gen_cg_type(rng, lat, 1, false, true, false);
                cand = cg_slio(l1, l2, pay);
            } else {
                cand = gen_cg_type(rng, lat, 2, false, true, true);
            }
            long m = g.minsize(cand);
            if (m >= 0 && m <= size) { goal = cand; break; }
            if (tries > 200) { goal = cg_slio(lat->top(), lat->bot(), cg_bool()); break; }
        }
    } else {
        long m = g.minsize(goal);
        if (m < 0)
            throw IfcError("goal type " + cg_type_str(goal) + " has no inhabitant here");
    }
    return g.gen(goal, size);
}

FGTypeP gen_fg_secret_type(Rng& rng, const LatticeP& lat, Label li) {
    std::function<FGTypeP(int)> go = [&](int d) -> FGTypeP {
        Label l = rng.pick_label(lat);
        size_t pick = rng.below(d > 0 ? 8 : 4);
        switch (pick) {
        case 0:
        case 1:
        case 2: return fg_bool(l);
        case 3: return fg_unit(l);
        case 4: return fg_prod(go(d - 1), go(d - 1), l);
        case 5: return fg_sum(go(d - 1), go(d - 1), l);
        default: return fg_fun(go(d - 1), rng.pick_label(lat), go(d - 1), l);
        }
    };
    return fg_relabel(go(2), li);
}

CGTypeP gen_cg_secret_type(Rng& rng, const LatticeP& lat, Label li) {
    std::function<CGTypeP(int)> go = [&](int d) -> CGTypeP {
        size_t pick = rng.below(d > 0 ? 8 : 4);
        switch (pick) {
        case 0:
        case 1:
        case 2: return cg_bool();
        case 3: return cg_unit();
        case 4: return cg_prod(go(d - 1), go(d - 1));
        case 5: return cg_sum(go(d - 1), go(d - 1));
        case 6: return cg_labeled(rng.pick_label(lat), go(d - 1));
        default: return cg_fun(go(d - 1), go(d - 1));
        }
    };
    return cg_labeled(li, go(2));
}

std::vector<std::pair<FGExprP, FGExprP>> gen_fg_secret_exprs(const FGTypeP& t, int n,
                                                             uint64_t seed) {
    if (fg_type_has_ref(t)) throw IfcError("secret values cannot involve the heap");
    Rng rng(seed);
    std::vector<std::pair<FGExprP, FGExprP>> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        FGExprP a = fg_value_expr(rng, t);
        FGExprP b = fg_value_expr(rng, t);
        if (fg_expr_eq(a, b))
            if (FGExprP f = flip_first_bool_fg(b)) b = f;
        out.push_back({a, b});
    }
    return out;
}

std::vector<std::pair<CGExprP, CGExprP>> gen_cg_secret_exprs(const CGTypeP& t, int n,
                                                             uint64_t seed) {
    if (cg_type_has_ref(t)) throw IfcError("secret values cannot involve the heap");
    Rng rng(seed);
    std::vector<std::pair<CGExprP, CGExprP>> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        CGExprP a = cg_value_expr(rng, t);
        CGExprP b = cg_value_expr(rng, t);
        if (cg_expr_eq(a, b))
            if (CGExprP f = flip_first_bool_cg(b)) b = f;
        out.push_back({a, b});
    }
    return out;
}

// ---- noninterference ----

Verdict ni_run_fg(const FGExprP& e, const std::string& var,
                  const std::vector<std::pair<FGValueP, FGValueP>>& pairs, long fuel) {
    Verdict v;
    for (size_t i = 0; i < pairs.size(); ++i) {
        FGValueP r1, r2;
        bool ok1 = false, ok2 = false;
        {
            FGHeap h;
            try {
                r1 = fg_run(h, fg_env_extend(nullptr, var, pairs[i].first), e, fuel).v;
                ok1 = true;
            } catch (const EvalTimeout&) {}
        }
        {
            FGHeap h;
            try {
                r2 = fg_run(h, fg_env_extend(nullptr, var, pairs[i].second), e, fuel).v;
                ok2 = true;
            } catch (const EvalTimeout&) {}
        }
        if (ok1 && ok2) {
            v.conclusive++;
            if (!fg_value_eq(r1, r2)) {
                v.kind = Verdict::Kind::Counterexample;
                v.fail_index = static_cast<int>(i);
                v.v1 = fg_value_str(pairs[i].first);
                v.v2 = fg_value_str(pairs[i].second);
                v.r1 = fg_value_str(r1);
                v.r2 = fg_value_str(r2);
                v.detail = "two secrets produce different observations";
                return v;
            }
        } else {
            v.timeouts++;
        }
    }
    if (v.conclusive == 0 && !pairs.empty()) {
        v.kind = Verdict::Kind::Inconclusive;
        v.detail = "every trial timed out";
    }
    return v;
}

Verdict ni_run_cg(const CGExprP& e, const std::string& var,
                  const std::vector<std::pair<CGValueP, CGValueP>>& pairs, long fuel) {
    Verdict v;
    for (size_t i = 0; i < pairs.size(); ++i) {
        CGValueP r1, r2;
        bool ok1 = false, ok2 = false;
        {
            CGHeap h;
            try {
                r1 = cg_run_forced(h, cg_env_extend(nullptr, var, pairs[i].first), e, fuel).v;
                ok1 = true;
            } catch (const EvalTimeout&) {}
        }
        {
            CGHeap h;
            try {
                r2 = cg_run_forced(h, cg_env_extend(nullptr, var, pairs[i].second), e, fuel).v;
                ok2 = true;
            } catch (const EvalTimeout&) {}
        }
        if (ok1 && ok2) {
            v.conclusive++;
            if (!cg_value_eq(r1, r2)) {
                v.kind = Verdict::Kind::Counterexample;
                v.fail_index = static_cast<int>(i);
                v.v1 = cg_value_str(pairs[i].first);
                v.v2 = cg_value_str(pairs[i].second);
                v.r1 = cg_value_str(r1);
                v.r2 = cg_value_str(r2);
                v.detail = "two secrets produce different observations";
                return v;
            }
        } else {
            v.timeouts++;
        }
    }
    if (v.conclusive == 0 && !pairs.empty()) {
        v.kind = Verdict::Kind::Inconclusive;
        v.detail = "every trial timed out";
    }
    return v;
}

Verdict ni_check_fg(const LatticeP& lat, const std::string& var, const FGTypeP& secretType,
                    Label pc, const FGExprP& e, const NIConfig& cfg) {
    if (lat->leq(cfg.secret_label, cfg.observer))
        throw IfcError("precondition violated: the secret label flows to the observer");
    if (secretType->lab != cfg.secret_label)
        throw IfcError("the secret's type must carry the secret label on top");
    FGTypeP ty;
    try {
        ty = fg_typecheck(FGCtx{{var, secretType}}, pc, e);
    } catch (const TypeError& te) {
        Verdict v;
        v.kind = Verdict::Kind::TypeRejected;
        v.detail = te.rule;
        return v;
    }
    if (!fg_subtype(ty, fg_bool(cfg.observer))) {
        Verdict v;
        v.kind = Verdict::Kind::TypeRejected;
        v.detail = "result type " + fg_type_str(ty) + " is not a boolean visible at " +
                   lat->print(cfg.observer);
        return v;
    }
    auto exprs = gen_fg_secret_exprs(secretType, cfg.samples, cfg.seed);
    std::vector<std::pair<FGValueP, FGValueP>> pairs;
    pairs.reserve(exprs.size());
    for (auto& pr : exprs) {
        FGHeap h1, h2;
        pairs.push_back({fg_run(h1, nullptr, pr.first).v, fg_run(h2, nullptr, pr.second).v});
    }
    Verdict v = ni_run_fg(e, var, pairs, cfg.fuel);
    if (v.kind == Verdict::Kind::Counterexample && v.fail_index >= 0) {
        v.v1 = fg_expr_str(exprs[static_cast<size_t>(v.fail_index)].first);
        v.v2 = fg_expr_str(exprs[static_cast<size_t>(v.fail_index)].second);
    }
    return v;
}

Verdict ni_check_cg(const LatticeP& lat, const std::string& var, const CGTypeP& secretType,
                    const CGExprP& e, const NIConfig& cfg) {
    if (lat->leq(cfg.secret_label, cfg.observer))
        throw IfcError("precondition violated: the secret label flows to the observer");
    if (secretType->k != CGTy::Labeled || secretType->l1 != cfg.secret_label)
        throw IfcError("the secret's type must be labeled with the secret label");
    CGTypeP ty;
    try {
        ty = cg_typecheck(CGCtx{{var, secretType}}, lat, e);
    } catch (const TypeError& te) {
        Verdict v;
        v.kind = Verdict::Kind::TypeRejected;
        v.detail = te.rule;
        return v;
    }
    if (!cg_subtype(ty, cg_slio(lat->bot(), cfg.observer, cg_bool()))) {
        Verdict v;
        v.kind = Verdict::Kind::TypeRejected;
        v.detail = "result type " + cg_type_str(ty) + " is not a boolean computation at " +
                   lat->print(cfg.observer);
        return v;
    }
    auto exprs = gen_cg_secret_exprs(secretType, cfg.samples, cfg.seed);
    std::vector<std::pair<CGValueP, CGValueP>> pairs;
    pairs.reserve(exprs.size());
    for (auto& pr : exprs)
        pairs.push_back({cg_run_pure(nullptr, pr.first).v, cg_run_pure(nullptr, pr.second).v});
    Verdict v = ni_run_cg(e, var, pairs, cfg.fuel);
    if (v.kind == Verdict::Kind::Counterexample && v.fail_index >= 0) {
        v.v1 = cg_expr_str(exprs[static_cast<size_t>(v.fail_index)].first);
        v.v2 = cg_expr_str(exprs[static_cast<size_t>(v.fail_index)].second);
    }
    return v;
}

// ---- translation agreement ----

Verdict equiv_check_fg2cg(const LatticeP& lat, Label pc, const FGExprP& e, long fuel) {
    Verdict v;
    FGTypeP ty;
    try {
        ty = fg_typecheck(FGCtx{}, pc, e);
    } catch (const TypeError& te) {
        v.kind = Verdict::Kind::TypeRejected;
        v.detail = te.rule;
        return v;
    }
    if (ty->k != FGTy::Bool) {
        v.kind = Verdict::Kind::TypeRejected;
        v.detail = "result type " + fg_type_str(ty) + " is not boolean";
        return v;
    }
    FG2CGResult tr;
    try {
        tr = fg2cg_expr(FGCtx{}, lat, pc, e);
    } catch (const TranslateError& ex) {
        v.kind = Verdict::Kind::Counterexample;
        v.detail = ex.what();
        return v;
    }
    FGValueP r1;
    CGValueP r2;
    bool ok1 = false, ok2 = false;
    {
        FGHeap h;
        try {
            r1 = fg_run(h, nullptr, e, fuel).v;
            ok1 = true;
        } catch (const EvalTimeout&) {}
    }
    {
        CGHeap h;
        try {
            r2 = cg_run_forced(h, nullptr, tr.target, fuel).v;
            ok2 = true;
        } catch (const EvalTimeout&) {}
    }
    if (!ok1 && !ok2) {
        v.timeouts = 1;
        return v; // agreeing on divergence is agreement
    }
    if (ok1 != ok2) {
        v.kind = Verdict::Kind::Inconclusive;
        v.timeouts = 1;
        v.detail = ok1 ? "only the translated program timed out" : "only the source timed out";
        return v;
    }
    v.conclusive = 1;
    CGValueP p = r2;
    while (p && p->k == CGVal::Labeled) p = p->v1;
    v.r1 = fg_value_str(r1);
    v.r2 = cg_value_str(r2);
    if (r1->k != FGVal::Bool || !p || p->k != CGVal::Bool) {
        v.kind = Verdict::Kind::Counterexample;
        v.detail = "a run produced a non-boolean observation";
        return v;
    }
    if (r1->b != p->b) {
        v.kind = Verdict::Kind::Counterexample;
        v.detail = "source and translation disagree";
    }
    return v;
}

Verdict equiv_check_cg2fg(const LatticeP& lat, const CGExprP& e, long fuel) {
    Verdict v;
    CGTypeP ty;
    try {
        ty = cg_typecheck(CGCtx{}, lat, e);
    } catch (const TypeError& te) {
        v.kind = Verdict::Kind::TypeRejected;
        v.detail = te.rule;
        return v;
    }
    if (ty->k != CGTy::Slio || ty->a->k != CGTy::Bool) {
        v.kind = Verdict::Kind::TypeRejected;
        v.detail = "result type " + cg_type_str(ty) + " is not a boolean computation";
        return v;
    }
    CG2FGResult tr;
    try {
        tr = cg2fg_expr(CGCtx{}, lat, e);
    } catch (const TranslateError& ex) {
        v.kind = Verdict::Kind::Counterexample;
        v.detail = ex.what();
        return v;
    }
    CGValueP r1;
    FGValueP r2;
    bool ok1 = false, ok2 = false;
    {
        CGHeap h;
        try {
            r1 = cg_run_forced(h, nullptr, e, fuel).v;
            ok1 = true;
        } catch (const EvalTimeout&) {}
    }
    {
        FGHeap h;
        try {
            r2 = fg_run(h, nullptr, fgb::app(tr.target, fgb::unit()), fuel).v;
            ok2 = true;
        } catch (const EvalTimeout&) {}
    }
    if (!ok1 && !ok2) {
        v.timeouts = 1;
        return v;
    }
    if (ok1 != ok2) {
        v.kind = Verdict::Kind::Inconclusive;
        v.timeouts = 1;
        v.detail = ok1 ? "only the translated program timed out" : "only the source timed out";
        return v;
    }
    v.conclusive = 1;
    v.r1 = cg_value_str(r1);
    v.r2 = fg_value_str(r2);
    if (r2->k == FGVal::Inr) {
        v.kind = Verdict::Kind::Counterexample;
        v.detail = "the translated program surfaced a dead branch";
        return v;
    }
    if (r1->k != CGVal::Bool || r2->k != FGVal::Inl || !r2->v1 || r2->v1->k != FGVal::Bool) {
        v.kind = Verdict::Kind::Counterexample;
        v.detail = "a run produced a non-boolean observation";
        return v;
    }
    if (r1->b != r2->v1->b) {
        v.kind = Verdict::Kind::Counterexample;
        v.detail = "source and translation disagree";
    }
    return v;
}

// ---- noninterference transfer ----

CGExprP ni_wrap_fg2cg(const CGExprP& target) {
    return cgb::bind(target, "%w1", cgb::unlabel(cgb::var("%w1")));
}

FGExprP ni_wrap_cg2fg(const FGExprP& target) {
    return fgb::cse(fgb::app(target, fgb::unit()), "%w1", fgb::var("%w1"), "%w2", fgb::fls());
}

CGValueP transport_secret_fg2cg(const LatticeP& lat, const FGExprP& valueExpr) {
    FG2CGResult r = fg2cg_expr(FGCtx{}, lat, lat->bot(), valueExpr);
    CGHeap h;
    return cg_run_forced(h, nullptr, r.target).v;
}

FGValueP transport_secret_cg2fg(const LatticeP& lat, const CGExprP& valueExpr) {
    CG2FGResult r = cg2fg_expr(CGCtx{}, lat, valueExpr);
    FGHeap h;
    return fg_run(h, nullptr, r.target).v;
}

} // namespace ifc

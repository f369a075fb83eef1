#include "fg.hpp"

#include <algorithm>

namespace ifc {

// ---- subtype order ----

bool fg_protected_at(const FGTypeP& t, Label l) { return l.lat->leq(l, t->lab); }

bool fg_subtype(const FGTypeP& a, const FGTypeP& b) {
    if (a->k != b->k) return false;
    const Lattice* lat = a->lab.lat;
    if (!lat->leq(a->lab, b->lab)) return false;
    switch (a->k) {
        case FGTy::Bool:
        case FGTy::Unit: return true;
        case FGTy::Prod:
        case FGTy::Sum: return fg_subtype(a->a, b->a) && fg_subtype(a->b, b->b);
        case FGTy::Ref: return fg_type_eq(a->a, b->a);
        case FGTy::Fun:
            // The latent label lower-bounds the body's write effects, so a
            // supertype may only lower it.
            return fg_subtype(b->a, a->a) && lat->leq(b->latent, a->latent) &&
                   fg_subtype(a->b, b->b);
    }
    return false;
}

FGTypeP fg_join_type(const FGTypeP& a, const FGTypeP& b) {
    if (a->k != b->k) return nullptr;
    const Lattice* lat = a->lab.lat;
    Label l = lat->join(a->lab, b->lab);
    switch (a->k) {
        case FGTy::Bool: return fg_bool(l);
        case FGTy::Unit: return fg_unit(l);
        case FGTy::Prod:
        case FGTy::Sum: {
            FGTypeP x = fg_join_type(a->a, b->a);
            FGTypeP y = fg_join_type(a->b, b->b);
            if (!x || !y) return nullptr;
            return a->k == FGTy::Prod ? fg_prod(x, y, l) : fg_sum(x, y, l);
        }
        case FGTy::Ref:
            if (!fg_type_eq(a->a, b->a)) return nullptr;
            return fg_ref(a->a, l);
        case FGTy::Fun: {
            FGTypeP arg = fg_meet_type(a->a, b->a);
            FGTypeP res = fg_join_type(a->b, b->b);
            if (!arg || !res) return nullptr;
            return fg_fun(arg, lat->meet(a->latent, b->latent), res, l);
        }
    }
    return nullptr;
}

FGTypeP fg_meet_type(const FGTypeP& a, const FGTypeP& b) {
    if (a->k != b->k) return nullptr;
    const Lattice* lat = a->lab.lat;
    Label l = lat->meet(a->lab, b->lab);
    switch (a->k) {
        case FGTy::Bool: return fg_bool(l);
        case FGTy::Unit: return fg_unit(l);
        case FGTy::Prod:
        case FGTy::Sum: {
            FGTypeP x = fg_meet_type(a->a, b->a);
            FGTypeP y = fg_meet_type(a->b, b->b);
            if (!x || !y) return nullptr;
            return a->k == FGTy::Prod ? fg_prod(x, y, l) : fg_sum(x, y, l);
        }
        case FGTy::Ref:
            if (!fg_type_eq(a->a, b->a)) return nullptr;
            return fg_ref(a->a, l);
        case FGTy::Fun: {
            FGTypeP arg = fg_join_type(a->a, b->a);
            FGTypeP res = fg_meet_type(a->b, b->b);
            if (!arg || !res) return nullptr;
            return fg_fun(arg, lat->join(a->latent, b->latent), res, l);
        }
    }
    return nullptr;
}

// ---- typechecker ----

namespace {

const char* fg_kind_name(FGTy k) {
    switch (k) {
        case FGTy::Bool: return "bool";
        case FGTy::Unit: return "unit";
        case FGTy::Fun: return "a function";
        case FGTy::Prod: return "a pair";
        case FGTy::Sum: return "a sum";
        case FGTy::Ref: return "a reference";
    }
    return "?";
}

struct FGChecker {
    const Lattice* lat;

    FGTypeP check(FGCtx& ctx, Label pc, const FGExprP& e) {
        switch (e->k) {
            case FGEx::Var: {
                for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
                    if (it->first == e->name) return it->second;
                throw TypeError("FG-VAR-UNBOUND", e->pos, "variable '" + e->name + "' is not in scope");
            }
            case FGEx::BTrue:
            case FGEx::BFalse: return fg_bool(lat->bot());
            case FGEx::UnitE: return fg_unit(lat->bot());
            case FGEx::Lam: {
                ctx.emplace_back(e->name, e->tyA);
                FGTypeP body = check(ctx, e->latent, e->e1);
                ctx.pop_back();
                return fg_fun(e->tyA, e->latent, body, lat->bot());
            }
            case FGEx::App: {
                FGTypeP f = check(ctx, pc, e->e1);
                if (f->k != FGTy::Fun)
                    throw TypeError("FG-APP-FUN", e->pos,
                                    "cannot apply " + std::string(fg_kind_name(f->k)));
                FGTypeP arg = check(ctx, pc, e->e2);
                if (!fg_subtype(arg, f->a))
                    throw TypeError("FG-APP-ARG", e->pos, "argument type does not fit the parameter");
                if (!lat->leq(lat->join(pc, f->lab), f->latent))
                    throw TypeError("FG-APP-LATENT", e->pos,
                                    "the function's effects are not permitted here: pc joined "
                                    "with the function label must flow to the latent label");
                return fg_raise(f->b, f->lab);
            }
            case FGEx::Pair: {
                FGTypeP a = check(ctx, pc, e->e1);
                FGTypeP b = check(ctx, pc, e->e2);
                return fg_prod(a, b, lat->bot());
            }
            case FGEx::Fst:
            case FGEx::Snd: {
                FGTypeP p = check(ctx, pc, e->e1);
                if (p->k != FGTy::Prod)
                    throw TypeError(e->k == FGEx::Fst ? "FG-FST-PROD" : "FG-SND-PROD", e->pos,
                                    "projection from " + std::string(fg_kind_name(p->k)));
                return fg_raise(e->k == FGEx::Fst ? p->a : p->b, p->lab);
            }
            case FGEx::Inl:
            case FGEx::Inr: {
                FGTypeP v = check(ctx, pc, e->e1);
                const FGTypeP& want = e->k == FGEx::Inl ? e->tyA : e->tyB;
                if (!fg_subtype(v, want))
                    throw TypeError(e->k == FGEx::Inl ? "FG-INL-ANN" : "FG-INR-ANN", e->pos,
                                    "injected value does not fit the annotated component");
                return fg_sum(e->tyA, e->tyB, lat->bot());
            }
            case FGEx::Case: {
                FGTypeP s = check(ctx, pc, e->e1);
                if (s->k != FGTy::Sum)
                    throw TypeError("FG-CASE-SUM", e->pos,
                                    "case on " + std::string(fg_kind_name(s->k)));
                Label pc2 = lat->join(pc, s->lab);
                ctx.emplace_back(e->name, s->a);
                FGTypeP t1 = check(ctx, pc2, e->e2);
                ctx.pop_back();
                ctx.emplace_back(e->name2, s->b);
                FGTypeP t2 = check(ctx, pc2, e->e3);
                ctx.pop_back();
                FGTypeP j = fg_join_type(t1, t2);
                if (!j)
                    throw TypeError("FG-CASE-JOIN", e->pos, "branch types have no common supertype");
                return fg_raise(j, s->lab);
            }
            case FGEx::If: {
                FGTypeP c = check(ctx, pc, e->e1);
                if (c->k != FGTy::Bool)
                    throw TypeError("FG-IF-BOOL", e->pos,
                                    "condition is " + std::string(fg_kind_name(c->k)));
                Label pc2 = lat->join(pc, c->lab);
                FGTypeP t1 = check(ctx, pc2, e->e2);
                FGTypeP t2 = check(ctx, pc2, e->e3);
                FGTypeP j = fg_join_type(t1, t2);
                if (!j)
                    throw TypeError("FG-IF-JOIN", e->pos, "branch types have no common supertype");
                return fg_raise(j, c->lab);
            }
            case FGEx::New: {
                FGTypeP v = check(ctx, pc, e->e1);
                FGTypeP cell = e->tyA ? e->tyA : v;
                if (e->tyA && !fg_subtype(v, cell))
                    throw TypeError("FG-NEW-ANN", e->pos,
                                    "initial value does not fit the annotated cell type");
                // Allocation is a write observable at the cell's label.
                if (!lat->leq(pc, cell->lab))
                    throw TypeError("FG-NEW-PC", e->pos, "allocation below the current pc");
                return fg_ref(cell, lat->bot());
            }
            case FGEx::Deref: {
                FGTypeP r = check(ctx, pc, e->e1);
                if (r->k != FGTy::Ref)
                    throw TypeError("FG-DEREF-REF", e->pos,
                                    "dereference of " + std::string(fg_kind_name(r->k)));
                return fg_raise(r->a, r->lab);
            }
            case FGEx::Assign: {
                FGTypeP r = check(ctx, pc, e->e1);
                if (r->k != FGTy::Ref)
                    throw TypeError("FG-ASSIGN-REF", e->pos,
                                    "assignment to " + std::string(fg_kind_name(r->k)));
                FGTypeP v = check(ctx, pc, e->e2);
                if (!fg_subtype(v, r->a))
                    throw TypeError("FG-ASSIGN-VAL", e->pos,
                                    "stored value does not fit the cell type");
                if (!lat->leq(lat->join(pc, r->lab), r->a->lab))
                    throw TypeError("FG-ASSIGN-PC", e->pos,
                                    "write to a cell whose label does not protect pc joined "
                                    "with the reference label");
                return fg_unit(lat->bot());
            }
            case FGEx::And:
            case FGEx::Or: {
                // Strict on both operands, so neither raises the other's pc.
                FGTypeP a = check(ctx, pc, e->e1);
                FGTypeP b = check(ctx, pc, e->e2);
                if (a->k != FGTy::Bool || b->k != FGTy::Bool)
                    throw TypeError("FG-BOOL-OP", e->pos, "boolean operator on non-booleans");
                return fg_bool(lat->join(a->lab, b->lab));
            }
            case FGEx::Not: {
                FGTypeP a = check(ctx, pc, e->e1);
                if (a->k != FGTy::Bool)
                    throw TypeError("FG-BOOL-OP", e->pos, "boolean operator on non-booleans");
                return fg_bool(a->lab);
            }
        }
        throw TypeError("FG-INTERNAL", e->pos, "unhandled expression form");
    }
};

} // namespace

FGTypeP fg_typecheck(const FGCtx& ctx, Label pc, const FGExprP& e) {
    FGChecker c{pc.lat};
    FGCtx scoped = ctx;
    return c.check(scoped, pc, e);
}

// ---- values and environments ----

FGEnvP fg_env_extend(const FGEnvP& env, const std::string& name, FGValueP v) {
    return std::make_shared<FGEnvNode>(FGEnvNode{name, std::move(v), env});
}

FGValueP fg_env_lookup(const FGEnvP& env, const std::string& name) {
    for (const FGEnvNode* n = env.get(); n; n = n->next.get())
        if (n->name == name) return n->v;
    return nullptr;
}

namespace {
FGValueP mkv(FGVal k) {
    auto v = std::make_shared<FGValue>();
    v->k = k;
    return v;
}
} // namespace

FGValueP fg_vunit() {
    static FGValueP u = mkv(FGVal::Unit);
    return u;
}
FGValueP fg_vbool(bool b) {
    static FGValueP t = [] { auto v = std::make_shared<FGValue>(); v->k = FGVal::Bool; v->b = true; return FGValueP(v); }();
    static FGValueP f = [] { auto v = std::make_shared<FGValue>(); v->k = FGVal::Bool; v->b = false; return FGValueP(v); }();
    return b ? t : f;
}
FGValueP fg_vpair(FGValueP a, FGValueP b) {
    auto v = std::make_shared<FGValue>();
    v->k = FGVal::Pair;
    v->v1 = std::move(a);
    v->v2 = std::move(b);
    return v;
}
FGValueP fg_vinl(FGValueP x) {
    auto v = std::make_shared<FGValue>();
    v->k = FGVal::Inl;
    v->v1 = std::move(x);
    return v;
}
FGValueP fg_vinr(FGValueP x) {
    auto v = std::make_shared<FGValue>();
    v->k = FGVal::Inr;
    v->v1 = std::move(x);
    return v;
}
FGValueP fg_vloc(size_t loc) {
    auto v = std::make_shared<FGValue>();
    v->k = FGVal::Loc;
    v->loc = loc;
    return v;
}

// ---- evaluator ----

namespace {

long g_dead_hits = 0;

struct FGEvaluator {
    FGHeap& heap;
    long& fuel;
    long& steps;

    void cost() {
        if (--fuel < 0) throw EvalTimeout();
        steps++;
    }

    FGValueP need(const FGValueP& v, FGVal k, const char* what) {
        if (v->k != k) throw EvalStuck(std::string("expected ") + what);
        return v;
    }

    FGValueP eval(const FGEnvP& env, const FGExprP& e) {
        if (e->synthetic_dead) g_dead_hits++;
        switch (e->k) {
            case FGEx::Var: {
                FGValueP v = fg_env_lookup(env, e->name);
                if (!v) throw EvalStuck("unbound variable '" + e->name + "'");
                return v;
            }
            case FGEx::BTrue: return fg_vbool(true);
            case FGEx::BFalse: return fg_vbool(false);
            case FGEx::UnitE: return fg_vunit();
            case FGEx::Lam: {
                cost();
                auto v = std::make_shared<FGValue>();
                v->k = FGVal::Closure;
                v->env = env;
                v->param = e->name;
                v->body = e->e1;
                return v;
            }
            case FGEx::App: {
                cost();
                FGValueP f = eval(env, e->e1);
                FGValueP a = eval(env, e->e2);
                need(f, FGVal::Closure, "a function");
                return eval(fg_env_extend(f->env, f->param, a), f->body);
            }
            case FGEx::Pair: {
                cost();
                FGValueP a = eval(env, e->e1);
                FGValueP b = eval(env, e->e2);
                return fg_vpair(a, b);
            }
            case FGEx::Fst:
            case FGEx::Snd: {
                cost();
                FGValueP p = need(eval(env, e->e1), FGVal::Pair, "a pair");
                return e->k == FGEx::Fst ? p->v1 : p->v2;
            }
            case FGEx::Inl: {
                cost();
                return fg_vinl(eval(env, e->e1));
            }
            case FGEx::Inr: {
                cost();
                return fg_vinr(eval(env, e->e1));
            }
            case FGEx::Case: {
                cost();
                FGValueP s = eval(env, e->e1);
                if (s->k == FGVal::Inl) return eval(fg_env_extend(env, e->name, s->v1), e->e2);
                if (s->k == FGVal::Inr) return eval(fg_env_extend(env, e->name2, s->v1), e->e3);
                throw EvalStuck("case on a non-sum value");
            }
            case FGEx::If: {
                cost();
                FGValueP c = need(eval(env, e->e1), FGVal::Bool, "a boolean");
                return eval(env, c->b ? e->e2 : e->e3);
            }
            case FGEx::New: {
                cost();
                FGValueP v = eval(env, e->e1);
                heap.cells.push_back(v);
                return fg_vloc(heap.cells.size() - 1);
            }
            case FGEx::Deref: {
                cost();
                FGValueP r = need(eval(env, e->e1), FGVal::Loc, "a location");
                if (r->loc >= heap.cells.size()) throw EvalStuck("dangling location");
                return heap.cells[r->loc];
            }
            case FGEx::Assign: {
                cost();
                FGValueP r = need(eval(env, e->e1), FGVal::Loc, "a location");
                FGValueP v = eval(env, e->e2);
                if (r->loc >= heap.cells.size()) throw EvalStuck("dangling location");
                heap.cells[r->loc] = v;
                return fg_vunit();
            }
            case FGEx::And:
            case FGEx::Or: {
                cost();
                FGValueP a = need(eval(env, e->e1), FGVal::Bool, "a boolean");
                FGValueP b = need(eval(env, e->e2), FGVal::Bool, "a boolean");
                return fg_vbool(e->k == FGEx::And ? (a->b && b->b) : (a->b || b->b));
            }
            case FGEx::Not: {
                cost();
                FGValueP a = need(eval(env, e->e1), FGVal::Bool, "a boolean");
                return fg_vbool(!a->b);
            }
        }
        throw EvalStuck("unhandled expression form");
    }
};

} // namespace

FGValueP fg_eval(FGHeap& heap, const FGEnvP& env, const FGExprP& e, long& fuel, long& steps) {
    FGEvaluator ev{heap, fuel, steps};
    return ev.eval(env, e);
}

FGRun fg_run(FGHeap& heap, const FGEnvP& env, const FGExprP& e, long fuel) {
    FGRun r;
    long f = fuel;
    r.v = fg_eval(heap, env, e, f, r.steps);
    return r;
}

long fg_dead_hits() { return g_dead_hits; }
void fg_dead_reset() { g_dead_hits = 0; }

std::string fg_value_str(const FGValueP& v) {
    switch (v->k) {
        case FGVal::Unit: return "()";
        case FGVal::Bool: return v->b ? "true" : "false";
        case FGVal::Closure: return "<closure>";
        case FGVal::Pair: return "(pair " + fg_value_str(v->v1) + " " + fg_value_str(v->v2) + ")";
        case FGVal::Inl: return "(inl " + fg_value_str(v->v1) + ")";
        case FGVal::Inr: return "(inr " + fg_value_str(v->v1) + ")";
        case FGVal::Loc: return "loc#" + std::to_string(v->loc);
    }
    return "?";
}

bool fg_value_eq(const FGValueP& a, const FGValueP& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->k != b->k) return false;
    switch (a->k) {
        case FGVal::Unit: return true;
        case FGVal::Bool: return a->b == b->b;
        case FGVal::Closure: return false; // identity handled above
        case FGVal::Pair: return fg_value_eq(a->v1, b->v1) && fg_value_eq(a->v2, b->v2);
        case FGVal::Inl:
        case FGVal::Inr: return fg_value_eq(a->v1, b->v1);
        case FGVal::Loc: return a->loc == b->loc;
    }
    return false;
}

} // namespace ifc

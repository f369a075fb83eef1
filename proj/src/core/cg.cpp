#include "cg.hpp"

namespace ifc {

// ---- subtype order ----

bool cg_subtype(const CGTypeP& a, const CGTypeP& b) {
    if (a->k != b->k) return false;
    switch (a->k) {
        case CGTy::Bool:
        case CGTy::Unit: return true;
        case CGTy::Fun: return cg_subtype(b->a, a->a) && cg_subtype(a->b, b->b);
        case CGTy::Prod:
        case CGTy::Sum: return cg_subtype(a->a, b->a) && cg_subtype(a->b, b->b);
        case CGTy::Ref: return a->l1 == b->l1 && cg_type_eq(a->a, b->a);
        case CGTy::Labeled: return a->l1.lat->leq(a->l1, b->l1) && cg_subtype(a->a, b->a);
        case CGTy::Slio:
            return a->l1.lat->leq(b->l1, a->l1) && a->l2.lat->leq(a->l2, b->l2) &&
                   cg_subtype(a->a, b->a);
    }
    return false;
}

CGTypeP cg_join_type(const CGTypeP& a, const CGTypeP& b) {
    if (a->k != b->k) return nullptr;
    switch (a->k) {
        case CGTy::Bool:
        case CGTy::Unit: return a;
        case CGTy::Prod:
        case CGTy::Sum: {
            CGTypeP x = cg_join_type(a->a, b->a);
            CGTypeP y = cg_join_type(a->b, b->b);
            if (!x || !y) return nullptr;
            return a->k == CGTy::Prod ? cg_prod(x, y) : cg_sum(x, y);
        }
        case CGTy::Ref:
            if (a->l1 != b->l1 || !cg_type_eq(a->a, b->a)) return nullptr;
            return a;
        case CGTy::Labeled: {
            CGTypeP p = cg_join_type(a->a, b->a);
            if (!p) return nullptr;
            return cg_labeled(a->l1.lat->join(a->l1, b->l1), p);
        }
        case CGTy::Slio: {
            CGTypeP p = cg_join_type(a->a, b->a);
            if (!p) return nullptr;
            return cg_slio(a->l1.lat->meet(a->l1, b->l1), a->l2.lat->join(a->l2, b->l2), p);
        }
        case CGTy::Fun: {
            CGTypeP arg = cg_meet_type(a->a, b->a);
            CGTypeP res = cg_join_type(a->b, b->b);
            if (!arg || !res) return nullptr;
            return cg_fun(arg, res);
        }
    }
    return nullptr;
}

CGTypeP cg_meet_type(const CGTypeP& a, const CGTypeP& b) {
    if (a->k != b->k) return nullptr;
    switch (a->k) {
        case CGTy::Bool:
        case CGTy::Unit: return a;
        case CGTy::Prod:
        case CGTy::Sum: {
            CGTypeP x = cg_meet_type(a->a, b->a);
            CGTypeP y = cg_meet_type(a->b, b->b);
            if (!x || !y) return nullptr;
            return a->k == CGTy::Prod ? cg_prod(x, y) : cg_sum(x, y);
        }
        case CGTy::Ref:
            if (a->l1 != b->l1 || !cg_type_eq(a->a, b->a)) return nullptr;
            return a;
        case CGTy::Labeled: {
            CGTypeP p = cg_meet_type(a->a, b->a);
            if (!p) return nullptr;
            return cg_labeled(a->l1.lat->meet(a->l1, b->l1), p);
        }
        case CGTy::Slio: {
            CGTypeP p = cg_meet_type(a->a, b->a);
            if (!p) return nullptr;
            return cg_slio(a->l1.lat->join(a->l1, b->l1), a->l2.lat->meet(a->l2, b->l2), p);
        }
        case CGTy::Fun: {
            CGTypeP arg = cg_join_type(a->a, b->a);
            CGTypeP res = cg_meet_type(a->b, b->b);
            if (!arg || !res) return nullptr;
            return cg_fun(arg, res);
        }
    }
    return nullptr;
}

// ---- typechecker ----

namespace {

const char* cg_kind_name(CGTy k) {
    switch (k) {
        case CGTy::Bool: return "bool";
        case CGTy::Unit: return "unit";
        case CGTy::Fun: return "a function";
        case CGTy::Prod: return "a pair";
        case CGTy::Sum: return "a sum";
        case CGTy::Ref: return "a reference";
        case CGTy::Labeled: return "a labeled value";
        case CGTy::Slio: return "a computation";
    }
    return "?";
}

struct CGChecker {
    const Lattice* lat;

    CGTypeP check(CGCtx& ctx, const CGExprP& e) {
        switch (e->k) {
            case CGEx::Var: {
                for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
                    if (it->first == e->name) return it->second;
                throw TypeError("CG-VAR-UNBOUND", e->pos,
                                "variable '" + e->name + "' is not in scope");
            }
            case CGEx::BTrue:
            case CGEx::BFalse: return cg_bool();
            case CGEx::UnitE: return cg_unit();
            case CGEx::Lam: {
                ctx.emplace_back(e->name, e->tyA);
                CGTypeP body = check(ctx, e->e1);
                ctx.pop_back();
                return cg_fun(e->tyA, body);
            }
            case CGEx::App: {
                CGTypeP f = check(ctx, e->e1);
                if (f->k != CGTy::Fun)
                    throw TypeError("CG-APP-FUN", e->pos,
                                    "cannot apply " + std::string(cg_kind_name(f->k)));
                CGTypeP arg = check(ctx, e->e2);
                if (!cg_subtype(arg, f->a))
                    throw TypeError("CG-APP-ARG", e->pos,
                                    "argument type does not fit the parameter");
                return f->b;
            }
            case CGEx::Pair: {
                CGTypeP a = check(ctx, e->e1);
                CGTypeP b = check(ctx, e->e2);
                return cg_prod(a, b);
            }
            case CGEx::Fst:
            case CGEx::Snd: {
                CGTypeP p = check(ctx, e->e1);
                if (p->k != CGTy::Prod)
                    throw TypeError(e->k == CGEx::Fst ? "CG-FST-PROD" : "CG-SND-PROD", e->pos,
                                    "projection from " + std::string(cg_kind_name(p->k)));
                return e->k == CGEx::Fst ? p->a : p->b;
            }
            case CGEx::Inl:
            case CGEx::Inr: {
                CGTypeP v = check(ctx, e->e1);
                const CGTypeP& want = e->k == CGEx::Inl ? e->tyA : e->tyB;
                if (!cg_subtype(v, want))
                    throw TypeError(e->k == CGEx::Inl ? "CG-INL-ANN" : "CG-INR-ANN", e->pos,
                                    "injected value does not fit the annotated component");
                return cg_sum(e->tyA, e->tyB);
            }
            case CGEx::Case: {
                CGTypeP s = check(ctx, e->e1);
                if (s->k != CGTy::Sum)
                    throw TypeError("CG-CASE-SUM", e->pos,
                                    "case on " + std::string(cg_kind_name(s->k)));
                ctx.emplace_back(e->name, s->a);
                CGTypeP t1 = check(ctx, e->e2);
                ctx.pop_back();
                ctx.emplace_back(e->name2, s->b);
                CGTypeP t2 = check(ctx, e->e3);
                ctx.pop_back();
                CGTypeP j = cg_join_type(t1, t2);
                if (!j)
                    throw TypeError("CG-CASE-JOIN", e->pos,
                                    "branch types have no common supertype");
                return j;
            }
            case CGEx::If: {
                CGTypeP c = check(ctx, e->e1);
                if (c->k != CGTy::Bool)
                    throw TypeError("CG-IF-BOOL", e->pos,
                                    "condition is " + std::string(cg_kind_name(c->k)));
                CGTypeP t1 = check(ctx, e->e2);
                CGTypeP t2 = check(ctx, e->e3);
                CGTypeP j = cg_join_type(t1, t2);
                if (!j)
                    throw TypeError("CG-IF-JOIN", e->pos,
                                    "branch types have no common supertype");
                return j;
            }
            case CGEx::LabelE: {
                CGTypeP v = check(ctx, e->e1);
                return cg_labeled(e->lab, v);
            }
            case CGEx::Unlabel: {
                CGTypeP v = check(ctx, e->e1);
                if (v->k != CGTy::Labeled)
                    throw TypeError("CG-UNLABEL-LABELED", e->pos,
                                    "unlabel of " + std::string(cg_kind_name(v->k)));
                // reading taints the computation with the value's label
                return cg_slio(lat->top(), v->l1, v->a);
            }
            case CGEx::ToLabeled: {
                CGTypeP m = check(ctx, e->e1);
                if (m->k != CGTy::Slio)
                    throw TypeError("CG-TOLABELED-SLIO", e->pos,
                                    "toLabeled of " + std::string(cg_kind_name(m->k)));
                // the taint moves into the label of the result; the
                // enclosing computation becomes taint-free
                return cg_slio(m->l1, lat->bot(), cg_labeled(m->l2, m->a));
            }
            case CGEx::Ret: {
                CGTypeP v = check(ctx, e->e1);
                return cg_slio(lat->top(), lat->bot(), v);
            }
            case CGEx::Bind: {
                CGTypeP m = check(ctx, e->e1);
                if (m->k != CGTy::Slio)
                    throw TypeError("CG-BIND-LEFT", e->pos,
                                    "bind of " + std::string(cg_kind_name(m->k)));
                ctx.emplace_back(e->name, m->a);
                CGTypeP n = check(ctx, e->e2);
                ctx.pop_back();
                if (n->k != CGTy::Slio)
                    throw TypeError("CG-BIND-RIGHT", e->pos,
                                    "bind continuation is " + std::string(cg_kind_name(n->k)));
                // the taint of the first computation flows into everything
                // the continuation might write
                if (!lat->leq(m->l2, n->l1))
                    throw TypeError("CG-BIND-TAINT", e->pos,
                                    "the first computation's taint does not flow to the "
                                    "continuation's pc bound");
                return cg_slio(lat->meet(m->l1, n->l1), lat->join(m->l2, n->l2), n->a);
            }
            case CGEx::New: {
                CGTypeP v = check(ctx, e->e1);
                CGTypeP cell = e->tyA ? e->tyA : v;
                if (cell->k != CGTy::Labeled)
                    throw TypeError("CG-NEW-LABELED", e->pos,
                                    "allocation of " + std::string(cg_kind_name(v->k)) +
                                        " (a labeled value is required)");
                if (e->tyA && !cg_subtype(v, cell))
                    throw TypeError("CG-NEW-ANN", e->pos,
                                    "initial value does not fit the annotated cell type");
                return cg_slio(cell->l1, lat->bot(), cg_ref(cell->l1, cell->a));
            }
            case CGEx::Deref: {
                CGTypeP r = check(ctx, e->e1);
                if (r->k != CGTy::Ref)
                    throw TypeError("CG-DEREF-REF", e->pos,
                                    "dereference of " + std::string(cg_kind_name(r->k)));
                return cg_slio(lat->top(), lat->bot(), cg_labeled(r->l1, r->a));
            }
            case CGEx::Assign: {
                CGTypeP r = check(ctx, e->e1);
                if (r->k != CGTy::Ref)
                    throw TypeError("CG-ASSIGN-REF", e->pos,
                                    "assignment to " + std::string(cg_kind_name(r->k)));
                CGTypeP v = check(ctx, e->e2);
                if (!cg_subtype(v, cg_labeled(r->l1, r->a)))
                    throw TypeError("CG-ASSIGN-VAL", e->pos,
                                    "stored value does not fit the cell type");
                return cg_slio(r->l1, lat->bot(), cg_unit());
            }
        }
        throw TypeError("CG-INTERNAL", e->pos, "unhandled expression form");
    }
};

} // namespace

CGTypeP cg_typecheck(const CGCtx& ctx, const LatticeP& lat, const CGExprP& e) {
    CGChecker c{lat.get()};
    CGCtx scoped = ctx;
    return c.check(scoped, e);
}

// ---- values and environments ----

CGEnvP cg_env_extend(const CGEnvP& env, const std::string& name, CGValueP v) {
    return std::make_shared<CGEnvNode>(CGEnvNode{name, std::move(v), env});
}

CGValueP cg_env_lookup(const CGEnvP& env, const std::string& name) {
    for (const CGEnvNode* n = env.get(); n; n = n->next.get())
        if (n->name == name) return n->v;
    return nullptr;
}

bool cg_is_thunk(CGVal k) {
    switch (k) {
        case CGVal::RetT:
        case CGVal::BindT:
        case CGVal::UnlabelT:
        case CGVal::ToLabeledT:
        case CGVal::NewT:
        case CGVal::DerefT:
        case CGVal::AssignT: return true;
        default: return false;
    }
}

namespace {
std::shared_ptr<CGValue> mkv(CGVal k) {
    auto v = std::make_shared<CGValue>();
    v->k = k;
    return v;
}
std::shared_ptr<CGValue> mkv1(CGVal k, CGValueP a) {
    auto v = mkv(k);
    v->v1 = std::move(a);
    return v;
}
} // namespace

CGValueP cg_vunit() {
    static CGValueP u = mkv(CGVal::Unit);
    return u;
}
CGValueP cg_vbool(bool b) {
    static CGValueP t = [] { auto v = mkv(CGVal::Bool); v->b = true; return CGValueP(v); }();
    static CGValueP f = [] { auto v = mkv(CGVal::Bool); v->b = false; return CGValueP(v); }();
    return b ? t : f;
}
CGValueP cg_vpair(CGValueP a, CGValueP b) {
    auto v = mkv(CGVal::Pair);
    v->v1 = std::move(a);
    v->v2 = std::move(b);
    return v;
}
CGValueP cg_vinl(CGValueP x) { return mkv1(CGVal::Inl, std::move(x)); }
CGValueP cg_vinr(CGValueP x) { return mkv1(CGVal::Inr, std::move(x)); }
CGValueP cg_vloc(size_t loc) {
    auto v = mkv(CGVal::Loc);
    v->loc = loc;
    return v;
}
CGValueP cg_vlabeled(CGValueP payload) { return mkv1(CGVal::Labeled, std::move(payload)); }

// ---- pure evaluation ----

namespace {

struct CGEvaluator {
    long& fuel;
    long& steps;

    void cost() {
        if (--fuel < 0) throw EvalTimeout();
        steps++;
    }

    CGValueP need(const CGValueP& v, CGVal k, const char* what) {
        if (v->k != k) throw EvalStuck(std::string("expected ") + what);
        return v;
    }

    CGValueP eval(const CGEnvP& env, const CGExprP& e) {
        switch (e->k) {
            case CGEx::Var: {
                CGValueP v = cg_env_lookup(env, e->name);
                if (!v) throw EvalStuck("unbound variable '" + e->name + "'");
                return v;
            }
            case CGEx::BTrue: return cg_vbool(true);
            case CGEx::BFalse: return cg_vbool(false);
            case CGEx::UnitE: return cg_vunit();
            case CGEx::Lam: {
                cost();
                auto v = mkv(CGVal::Closure);
                v->env = env;
                v->param = e->name;
                v->body = e->e1;
                return v;
            }
            case CGEx::App: {
                cost();
                CGValueP f = eval(env, e->e1);
                CGValueP a = eval(env, e->e2);
                need(f, CGVal::Closure, "a function");
                return eval(cg_env_extend(f->env, f->param, a), f->body);
            }
            case CGEx::Pair: {
                cost();
                CGValueP a = eval(env, e->e1);
                CGValueP b = eval(env, e->e2);
                return cg_vpair(a, b);
            }
            case CGEx::Fst:
            case CGEx::Snd: {
                cost();
                CGValueP p = need(eval(env, e->e1), CGVal::Pair, "a pair");
                return e->k == CGEx::Fst ? p->v1 : p->v2;
            }
            case CGEx::Inl: {
                cost();
                return cg_vinl(eval(env, e->e1));
            }
            case CGEx::Inr: {
                cost();
                return cg_vinr(eval(env, e->e1));
            }
            case CGEx::Case: {
                cost();
                CGValueP s = eval(env, e->e1);
                if (s->k == CGVal::Inl) return eval(cg_env_extend(env, e->name, s->v1), e->e2);
                if (s->k == CGVal::Inr) return eval(cg_env_extend(env, e->name2, s->v1), e->e3);
                throw EvalStuck("case on a non-sum value");
            }
            case CGEx::If: {
                cost();
                CGValueP c = need(eval(env, e->e1), CGVal::Bool, "a boolean");
                return eval(env, c->b ? e->e2 : e->e3);
            }
            case CGEx::LabelE: {
                cost();
                return cg_vlabeled(eval(env, e->e1));
            }
            case CGEx::Unlabel: {
                cost();
                return mkv1(CGVal::UnlabelT, eval(env, e->e1));
            }
            case CGEx::ToLabeled: {
                cost();
                return mkv1(CGVal::ToLabeledT, eval(env, e->e1));
            }
            case CGEx::Ret: {
                cost();
                return mkv1(CGVal::RetT, eval(env, e->e1));
            }
            case CGEx::Bind: {
                cost();
                auto v = mkv1(CGVal::BindT, eval(env, e->e1));
                v->env = env;
                v->param = e->name;
                v->body = e->e2;
                return v;
            }
            case CGEx::New: {
                cost();
                return mkv1(CGVal::NewT, eval(env, e->e1));
            }
            case CGEx::Deref: {
                cost();
                return mkv1(CGVal::DerefT, eval(env, e->e1));
            }
            case CGEx::Assign: {
                cost();
                CGValueP r = eval(env, e->e1);
                auto v = mkv1(CGVal::AssignT, r);
                v->v2 = eval(env, e->e2);
                return v;
            }
        }
        throw EvalStuck("unhandled expression form");
    }
};

struct CGForcer {
    CGHeap& heap;
    long& fuel;
    long& steps;

    void cost() {
        if (--fuel < 0) throw EvalTimeout();
        steps++;
    }

    CGValueP force(const CGValueP& m) {
        switch (m->k) {
            case CGVal::RetT:
                cost();
                return m->v1;
            case CGVal::BindT: {
                cost();
                CGValueP v = force(m->v1);
                CGEvaluator ev{fuel, steps};
                CGValueP next = ev.eval(cg_env_extend(m->env, m->param, v), m->body);
                return force(next);
            }
            case CGVal::UnlabelT: {
                cost();
                if (m->v1->k != CGVal::Labeled) throw EvalStuck("unlabel of an unlabeled value");
                return m->v1->v1;
            }
            case CGVal::ToLabeledT: {
                cost();
                return cg_vlabeled(force(m->v1));
            }
            case CGVal::NewT: {
                cost();
                if (m->v1->k != CGVal::Labeled)
                    throw EvalStuck("allocation of an unlabeled value");
                heap.cells.push_back(m->v1);
                return cg_vloc(heap.cells.size() - 1);
            }
            case CGVal::DerefT: {
                cost();
                if (m->v1->k != CGVal::Loc) throw EvalStuck("load from a non-location");
                if (m->v1->loc >= heap.cells.size()) throw EvalStuck("dangling location");
                return heap.cells[m->v1->loc];
            }
            case CGVal::AssignT: {
                cost();
                if (m->v1->k != CGVal::Loc) throw EvalStuck("store to a non-location");
                if (m->v1->loc >= heap.cells.size()) throw EvalStuck("dangling location");
                if (m->v2->k != CGVal::Labeled)
                    throw EvalStuck("store of an unlabeled value");
                heap.cells[m->v1->loc] = m->v2;
                return cg_vunit();
            }
            default: throw EvalStuck("forcing a value that is not a computation");
        }
    }
};

} // namespace

CGValueP cg_eval_pure(const CGEnvP& env, const CGExprP& e, long& fuel, long& steps) {
    CGEvaluator ev{fuel, steps};
    return ev.eval(env, e);
}

CGValueP cg_force(CGHeap& heap, const CGValueP& m, long& fuel, long& steps) {
    CGForcer f{heap, fuel, steps};
    return f.force(m);
}

CGRun cg_run_pure(const CGEnvP& env, const CGExprP& e, long fuel) {
    CGRun r;
    long f = fuel;
    r.v = cg_eval_pure(env, e, f, r.steps);
    return r;
}

CGRun cg_run_forced(CGHeap& heap, const CGEnvP& env, const CGExprP& e, long fuel) {
    CGRun r;
    long f = fuel;
    r.v = cg_eval_pure(env, e, f, r.steps);
    if (cg_is_thunk(r.v->k)) r.v = cg_force(heap, r.v, f, r.steps);
    return r;
}

std::string cg_value_str(const CGValueP& v) {
    switch (v->k) {
        case CGVal::Unit: return "()";
        case CGVal::Bool: return v->b ? "true" : "false";
        case CGVal::Closure: return "<closure>";
        case CGVal::Pair: return "(pair " + cg_value_str(v->v1) + " " + cg_value_str(v->v2) + ")";
        case CGVal::Inl: return "(inl " + cg_value_str(v->v1) + ")";
        case CGVal::Inr: return "(inr " + cg_value_str(v->v1) + ")";
        case CGVal::Loc: return "loc#" + std::to_string(v->loc);
        case CGVal::Labeled: return "(labeled " + cg_value_str(v->v1) + ")";
        default: return "<computation>";
    }
}

bool cg_value_eq(const CGValueP& a, const CGValueP& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->k != b->k) return false;
    switch (a->k) {
        case CGVal::Unit: return true;
        case CGVal::Bool: return a->b == b->b;
        case CGVal::Pair: return cg_value_eq(a->v1, b->v1) && cg_value_eq(a->v2, b->v2);
        case CGVal::Inl:
        case CGVal::Inr:
        case CGVal::Labeled: return cg_value_eq(a->v1, b->v1);
        case CGVal::Loc: return a->loc == b->loc;
        default: return false; // closures and thunks compare by identity above
    }
}

} // namespace ifc

#include "cg2fg.hpp"

namespace ifc {

namespace {
std::string g_fault; // set only by the harness and CLI fault-injection paths
} // namespace

void cg2fg_set_fault(const std::string& mode) { g_fault = mode; }
std::string cg2fg_fault() { return g_fault; }

FGTypeP cg2fg_type(const CGTypeP& t, const LatticeP& lat) {
    Label bot = lat->bot();
    switch (t->k) {
        case CGTy::Bool:
            return fg_bool(bot);
        case CGTy::Unit:
            return fg_unit(bot);
        case CGTy::Fun:
            return fg_fun(cg2fg_type(t->a, lat), lat->top(), cg2fg_type(t->b, lat), bot);
        case CGTy::Prod:
            return fg_prod(cg2fg_type(t->a, lat), cg2fg_type(t->b, lat), bot);
        case CGTy::Sum:
            return fg_sum(cg2fg_type(t->a, lat), cg2fg_type(t->b, lat), bot);
        case CGTy::Labeled:
            return fg_sum(cg2fg_type(t->a, lat), fg_unit(bot), t->l1);
        case CGTy::Slio:
            return fg_fun(fg_unit(bot), t->l1,
                          fg_sum(cg2fg_type(t->a, lat), fg_unit(bot), t->l2), bot);
        case CGTy::Ref:
            return fg_ref(fg_sum(cg2fg_type(t->a, lat), fg_unit(bot), t->l1), bot);
    }
    throw TranslateError("unhandled type form");
}

FGCtx cg2fg_ctx(const CGCtx& ctx, const LatticeP& lat) {
    FGCtx out;
    out.reserve(ctx.size());
    for (const auto& [x, t] : ctx) out.emplace_back(x, cg2fg_type(t, lat));
    return out;
}

namespace {

FGExprP mark_dead(const FGExprP& e) {
    auto n = std::make_shared<FGExpr>(*e);
    n->synthetic_dead = true;
    return n;
}

struct Translator {
    const LatticeP& lat;
    int counter = 0;

    std::string fresh() { return "%d" + std::to_string(++counter); }
    Label bot() const { return lat->bot(); }
    Label top() const { return lat->top(); }
    FGTypeP img(const CGTypeP& t) const { return cg2fg_type(t, lat); }

    struct Res {
        FGExprP t;
        CGTypeP ty;
    };

    // A computation becomes a lambda over unit whose latent label is the
    // computation's pc bound; that is the only latent the contract admits,
    // since the body's own effects force it from below and the image type
    // from above.
    FGExprP thunk(Label latent, const FGExprP& body) {
        return fgb::lam(fresh(), fg_unit(bot()), latent, body);
    }

    // Forcing is application to ().
    static FGExprP force(const FGExprP& m) { return fgb::app(m, fgb::unit()); }

    // Completed computations carry their payload in the left summand.
    FGExprP present(const FGExprP& v, const CGTypeP& payload) {
        return fgb::inl(v, img(payload), fg_unit(bot()));
    }

    CGTypeP lookup(const CGCtx& ctx, const std::string& name, const SrcPos& pos) {
        for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
            if (it->first == name) return it->second;
        throw TypeError("CG-VAR-UNBOUND", pos, "unbound variable " + name);
    }

    Res go(CGCtx& ctx, const CGExprP& e) {
        switch (e->k) {
            case CGEx::Var:
                return {fgb::var(e->name), lookup(ctx, e->name, e->pos)};
            case CGEx::BTrue:
                return {fgb::tru(), cg_bool()};
            case CGEx::BFalse:
                return {fgb::fls(), cg_bool()};
            case CGEx::UnitE:
                return {fgb::unit(), cg_unit()};
            case CGEx::Lam: {
                ctx.emplace_back(e->name, e->tyA);
                Res body = go(ctx, e->e1);
                ctx.pop_back();
                return {fgb::lam(e->name, img(e->tyA), top(), body.t),
                        cg_fun(e->tyA, body.ty)};
            }
            case CGEx::App: {
                Res f = go(ctx, e->e1);
                Res v = go(ctx, e->e2);
                if (f.ty->k != CGTy::Fun) throw TranslateError("application head is not a function");
                return {fgb::app(f.t, v.t), f.ty->b};
            }
            case CGEx::Pair: {
                Res a = go(ctx, e->e1);
                Res b = go(ctx, e->e2);
                return {fgb::pair(a.t, b.t), cg_prod(a.ty, b.ty)};
            }
            case CGEx::Fst:
            case CGEx::Snd: {
                Res p = go(ctx, e->e1);
                if (p.ty->k != CGTy::Prod) throw TranslateError("projection from a non-product");
                bool first = e->k == CGEx::Fst;
                return {first ? fgb::fst(p.t) : fgb::snd(p.t), first ? p.ty->a : p.ty->b};
            }
            case CGEx::Inl:
            case CGEx::Inr: {
                Res v = go(ctx, e->e1);
                bool left = e->k == CGEx::Inl;
                FGTypeP ia = img(e->tyA), ib = img(e->tyB);
                return {left ? fgb::inl(v.t, ia, ib) : fgb::inr(v.t, ia, ib),
                        cg_sum(e->tyA, e->tyB)};
            }
            case CGEx::Case: {
                Res s = go(ctx, e->e1);
                if (s.ty->k != CGTy::Sum) throw TranslateError("case of a non-sum");
                ctx.emplace_back(e->name, s.ty->a);
                Res b1 = go(ctx, e->e2);
                ctx.pop_back();
                ctx.emplace_back(e->name2, s.ty->b);
                Res b2 = go(ctx, e->e3);
                ctx.pop_back();
                CGTypeP joined = cg_join_type(b1.ty, b2.ty);
                if (!joined) throw TranslateError("case branches have no common supertype");
                return {fgb::cse(s.t, e->name, b1.t, e->name2, b2.t), joined};
            }
            case CGEx::If: {
                Res c = go(ctx, e->e1);
                if (c.ty->k != CGTy::Bool) throw TranslateError("if of a non-boolean");
                Res b1 = go(ctx, e->e2);
                Res b2 = go(ctx, e->e3);
                CGTypeP joined = cg_join_type(b1.ty, b2.ty);
                if (!joined) throw TranslateError("if branches have no common supertype");
                FGExprP arms = g_fault == "swap-if-branches" ? fgb::ife(c.t, b2.t, b1.t)
                                                             : fgb::ife(c.t, b1.t, b2.t);
                return {arms, joined};
            }
            case CGEx::LabelE: {
                Res v = go(ctx, e->e1);
                return {present(v.t, v.ty), cg_labeled(e->lab, v.ty)};
            }
            case CGEx::Unlabel: {
                Res v = go(ctx, e->e1);
                if (v.ty->k != CGTy::Labeled) throw TranslateError("unlabel of an unlabeled value");
                return {thunk(top(), v.t), cg_slio(top(), v.ty->l1, v.ty->a)};
            }
            case CGEx::ToLabeled: {
                Res m = go(ctx, e->e1);
                if (m.ty->k != CGTy::Slio) throw TranslateError("toLabeled of a non-computation");
                CGTypeP out = cg_labeled(m.ty->l2, m.ty->a);
                return {thunk(m.ty->l1, present(force(m.t), out)),
                        cg_slio(m.ty->l1, bot(), out)};
            }
            case CGEx::Ret: {
                Res v = go(ctx, e->e1);
                Label latent = g_fault == "ret-latent-bot" ? bot() : top();
                return {thunk(latent, present(v.t, v.ty)), cg_slio(top(), bot(), v.ty)};
            }
            case CGEx::Bind: {
                Res m = go(ctx, e->e1);
                if (m.ty->k != CGTy::Slio) throw TranslateError("bind of a non-computation");
                ctx.emplace_back(e->name, m.ty->a);
                Res n = go(ctx, e->e2);
                ctx.pop_back();
                if (n.ty->k != CGTy::Slio)
                    throw TranslateError("bind body is not a computation");
                Label pc = lat->meet(m.ty->l1, n.ty->l1);
                Label taint = lat->join(m.ty->l2, n.ty->l2);
                // The right branch can never run: translated computations
                // complete through the left summand only. It still has to
                // exist (and typecheck) for the coding to give the taint a
                // home, so it is marked for the dead-branch counter.
                FGExprP dead = mark_dead(fgb::inr(fgb::unit(), img(n.ty->a), fg_unit(bot())));
                FGExprP body = fgb::cse(force(m.t), e->name, force(n.t), fresh(), dead);
                return {thunk(pc, body), cg_slio(pc, taint, n.ty->a)};
            }
            case CGEx::New: {
                Res v = go(ctx, e->e1);
                if (v.ty->k != CGTy::Labeled) throw TranslateError("allocation of an unlabeled value");
                CGTypeP cell = e->tyA ? e->tyA : v.ty;
                if (cell->k != CGTy::Labeled) throw TranslateError("cell annotation is not labeled");
                CGTypeP out = cg_ref(cell->l1, cell->a);
                return {thunk(cell->l1, present(fgb::newe(v.t, img(cell)), out)),
                        cg_slio(cell->l1, bot(), out)};
            }
            case CGEx::Deref: {
                Res r = go(ctx, e->e1);
                if (r.ty->k != CGTy::Ref) throw TranslateError("load from a non-reference");
                CGTypeP out = cg_labeled(r.ty->l1, r.ty->a);
                return {thunk(top(), present(fgb::deref(r.t), out)),
                        cg_slio(top(), bot(), out)};
            }
            case CGEx::Assign: {
                Res r = go(ctx, e->e1);
                Res v = go(ctx, e->e2);
                if (r.ty->k != CGTy::Ref) throw TranslateError("store to a non-reference");
                return {thunk(r.ty->l1, present(fgb::assign(r.t, v.t), cg_unit())),
                        cg_slio(r.ty->l1, bot(), cg_unit())};
            }
        }
        throw TranslateError("unhandled expression form");
    }
};

} // namespace

CG2FGResult cg2fg_expr(const CGCtx& ctx, const LatticeP& lat, const CGExprP& e) {
    CGTypeP checked = cg_typecheck(ctx, lat, e);
    Translator tr{lat};
    CGCtx scoped = ctx;
    Translator::Res r = tr.go(scoped, e);
    if (!cg_type_eq(r.ty, checked))
        throw TranslateError("translation-time synthesis diverged from the checker");
    FGTypeP contract = cg2fg_type(checked, lat);
    FGTypeP actual;
    try {
        actual = fg_typecheck(cg2fg_ctx(ctx, lat), lat->top(), r.t);
    } catch (const TypeError& te) {
        throw TranslateError(std::string("emitted term does not typecheck: ") + te.what());
    }
    if (!fg_subtype(actual, contract))
        throw TranslateError("emitted term does not meet its contract type");
    return {r.t, checked, contract};
}

} // namespace ifc

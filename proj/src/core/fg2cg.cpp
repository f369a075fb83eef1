#include "fg2cg.hpp"

namespace ifc {

namespace {
std::string g_fault; // set only by the harness and CLI fault-injection paths
} // namespace

void fg2cg_set_fault(const std::string& mode) { g_fault = mode; }
std::string fg2cg_fault() { return g_fault; }

CGTypeP fg2cg_type_raw(const FGTypeP& t) {
    switch (t->k) {
        case FGTy::Bool:
            return cg_bool();
        case FGTy::Unit:
            return cg_unit();
        case FGTy::Fun: {
            Label bot = t->lab.lat->bot();
            return cg_fun(fg2cg_type(t->a), cg_slio(t->latent, bot, fg2cg_type(t->b)));
        }
        case FGTy::Prod:
            return cg_prod(fg2cg_type(t->a), fg2cg_type(t->b));
        case FGTy::Sum:
            return cg_sum(fg2cg_type(t->a), fg2cg_type(t->b));
        case FGTy::Ref:
            return cg_ref(t->a->lab, fg2cg_type_raw(t->a));
    }
    throw TranslateError("unhandled type form");
}

CGTypeP fg2cg_type(const FGTypeP& t) { return cg_labeled(t->lab, fg2cg_type_raw(t)); }

CGCtx fg2cg_ctx(const FGCtx& ctx) {
    CGCtx out;
    out.reserve(ctx.size());
    for (const auto& [x, t] : ctx) out.emplace_back(x, fg2cg_type(t));
    return out;
}

namespace {

struct Translator {
    const LatticeP& lat;
    int counter = 0;

    std::string fresh() { return "%a" + std::to_string(++counter); }
    Label bot() const { return lat->bot(); }

    struct Res {
        CGExprP t;
        FGTypeP ty;
    };

    // The taint-to-label mover: applyable because every elimination's
    // result type is protected at the label being eliminated, so the taint
    // always fits under the payload's label. The lambda's parameter
    // annotation is where the payload gets subsumed up to the raised
    // result type.
    CGExprP coerce(const CGExprP& m, Label pc, Label taint, const FGTypeP& raisedResult) {
        CGTypeP payload = fg2cg_type(raisedResult);
        if (!lat->leq(taint, payload->l1))
            throw TranslateError("taint coercion applied below the taint label");
        std::string x = fresh(), y = fresh();
        return cgb::app(
            cgb::lam(x, cg_slio(pc, taint, payload),
                     cgb::toLabeled(cgb::bind(cgb::var(x), y, cgb::unlabel(cgb::var(y))))),
            m);
    }

    FGTypeP lookup(const FGCtx& ctx, const std::string& name, const SrcPos& pos) {
        for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
            if (it->first == name) return it->second;
        throw TypeError("FG-VAR-UNBOUND", pos, "unbound variable " + name);
    }

    Res go(FGCtx& ctx, Label pc, const FGExprP& e) {
        switch (e->k) {
            case FGEx::Var:
                return {cgb::ret(cgb::var(e->name)), lookup(ctx, e->name, e->pos)};
            case FGEx::BTrue:
                return {cgb::ret(cgb::label(bot(), cgb::tru())), fg_bool(bot())};
            case FGEx::BFalse:
                return {cgb::ret(cgb::label(bot(), cgb::fls())), fg_bool(bot())};
            case FGEx::UnitE:
                return {cgb::ret(cgb::label(bot(), cgb::unit())), fg_unit(bot())};
            case FGEx::Lam: {
                ctx.emplace_back(e->name, e->tyA);
                Res body = go(ctx, e->latent, e->e1);
                ctx.pop_back();
                Label wrap = g_fault == "lam-label-latent" ? e->latent : bot();
                CGExprP lam = cgb::lam(e->name, fg2cg_type(e->tyA), body.t);
                return {cgb::ret(cgb::label(wrap, lam)),
                        fg_fun(e->tyA, e->latent, body.ty, bot())};
            }
            case FGEx::App: {
                Res f = go(ctx, pc, e->e1);
                Res v = go(ctx, pc, e->e2);
                if (f.ty->k != FGTy::Fun) throw TranslateError("application head is not a function");
                Label l = f.ty->lab;
                FGTypeP res = fg_raise(f.ty->b, l);
                std::string a = fresh(), b = fresh(), c = fresh();
                CGExprP inner = cgb::bind(
                    f.t, a,
                    cgb::bind(v.t, b,
                              cgb::bind(cgb::unlabel(cgb::var(a)), c,
                                        cgb::app(cgb::var(c), cgb::var(b)))));
                return {coerce(inner, pc, l, res), res};
            }
            case FGEx::Pair: {
                Res x = go(ctx, pc, e->e1);
                Res y = go(ctx, pc, e->e2);
                std::string a = fresh(), b = fresh();
                CGExprP t = cgb::bind(
                    x.t, a,
                    cgb::bind(y.t, b,
                              cgb::ret(cgb::label(bot(), cgb::pair(cgb::var(a), cgb::var(b))))));
                return {t, fg_prod(x.ty, y.ty, bot())};
            }
            case FGEx::Fst:
            case FGEx::Snd: {
                Res p = go(ctx, pc, e->e1);
                if (p.ty->k != FGTy::Prod) throw TranslateError("projection from a non-product");
                Label l = p.ty->lab;
                bool first = e->k == FGEx::Fst;
                FGTypeP res = fg_raise(first ? p.ty->a : p.ty->b, l);
                std::string a = fresh(), b = fresh();
                CGExprP proj = first ? cgb::fst(cgb::var(b)) : cgb::snd(cgb::var(b));
                CGExprP inner = cgb::bind(
                    p.t, a, cgb::bind(cgb::unlabel(cgb::var(a)), b, cgb::ret(proj)));
                return {coerce(inner, pc, l, res), res};
            }
            case FGEx::Inl:
            case FGEx::Inr: {
                Res v = go(ctx, pc, e->e1);
                bool left = e->k == FGEx::Inl;
                std::string a = fresh();
                CGTypeP ca = fg2cg_type(e->tyA), cb = fg2cg_type(e->tyB);
                CGExprP inj = left ? cgb::inl(cgb::var(a), ca, cb) : cgb::inr(cgb::var(a), ca, cb);
                CGExprP t = cgb::bind(v.t, a, cgb::ret(cgb::label(bot(), inj)));
                return {t, fg_sum(e->tyA, e->tyB, bot())};
            }
            case FGEx::Case: {
                Res s = go(ctx, pc, e->e1);
                if (s.ty->k != FGTy::Sum) throw TranslateError("case of a non-sum");
                Label l = s.ty->lab;
                Label pc2 = lat->join(pc, l);
                ctx.emplace_back(e->name, s.ty->a);
                Res b1 = go(ctx, pc2, e->e2);
                ctx.pop_back();
                ctx.emplace_back(e->name2, s.ty->b);
                Res b2 = go(ctx, pc2, e->e3);
                ctx.pop_back();
                FGTypeP joined = fg_join_type(b1.ty, b2.ty);
                if (!joined) throw TranslateError("case branches have no common supertype");
                FGTypeP res = fg_raise(joined, l);
                std::string a = fresh(), b = fresh();
                CGExprP arms = g_fault == "swap-case-branches"
                                   ? cgb::cse(cgb::var(b), e->name2, b2.t, e->name, b1.t)
                                   : cgb::cse(cgb::var(b), e->name, b1.t, e->name2, b2.t);
                CGExprP inner =
                    cgb::bind(s.t, a, cgb::bind(cgb::unlabel(cgb::var(a)), b, arms));
                return {coerce(inner, pc, l, res), res};
            }
            case FGEx::If: {
                Res c = go(ctx, pc, e->e1);
                if (c.ty->k != FGTy::Bool) throw TranslateError("if of a non-boolean");
                Label l = c.ty->lab;
                Label pc2 = lat->join(pc, l);
                Res b1 = go(ctx, pc2, e->e2);
                Res b2 = go(ctx, pc2, e->e3);
                FGTypeP joined = fg_join_type(b1.ty, b2.ty);
                if (!joined) throw TranslateError("if branches have no common supertype");
                FGTypeP res = fg_raise(joined, l);
                std::string a = fresh(), b = fresh();
                CGExprP inner = cgb::bind(
                    c.t, a,
                    cgb::bind(cgb::unlabel(cgb::var(a)), b, cgb::ife(cgb::var(b), b1.t, b2.t)));
                return {coerce(inner, pc, l, res), res};
            }
            case FGEx::New: {
                Res v = go(ctx, pc, e->e1);
                FGTypeP cell = e->tyA ? e->tyA : v.ty;
                std::string a = fresh(), r = fresh();
                CGTypeP cgCell = cg_labeled(cell->lab, fg2cg_type_raw(cell));
                CGExprP t = cgb::bind(
                    v.t, a,
                    cgb::bind(cgb::newe(cgb::var(a), cgCell), r,
                              cgb::ret(cgb::label(bot(), cgb::var(r)))));
                return {t, fg_ref(cell, bot())};
            }
            case FGEx::Deref: {
                Res r = go(ctx, pc, e->e1);
                if (r.ty->k != FGTy::Ref) throw TranslateError("load from a non-reference");
                Label l = r.ty->lab;
                FGTypeP res = fg_raise(r.ty->a, l);
                std::string a = fresh(), b = fresh();
                CGExprP inner = cgb::bind(
                    r.t, a, cgb::bind(cgb::unlabel(cgb::var(a)), b, cgb::deref(cgb::var(b))));
                return {coerce(inner, pc, l, res), res};
            }
            case FGEx::Assign: {
                Res r = go(ctx, pc, e->e1);
                Res v = go(ctx, pc, e->e2);
                if (r.ty->k != FGTy::Ref) throw TranslateError("store to a non-reference");
                std::string a = fresh(), b = fresh(), c = fresh(), d = fresh();
                CGExprP eff = cgb::toLabeled(cgb::bind(
                    r.t, a,
                    cgb::bind(v.t, b,
                              cgb::bind(cgb::unlabel(cgb::var(a)), c,
                                        cgb::assign(cgb::var(c), cgb::var(b))))));
                CGExprP t = cgb::bind(eff, d, cgb::ret(cgb::label(bot(), cgb::unit())));
                return {t, fg_unit(bot())};
            }
            case FGEx::And:
            case FGEx::Or: {
                Res x = go(ctx, pc, e->e1);
                Res y = go(ctx, pc, e->e2);
                if (x.ty->k != FGTy::Bool || y.ty->k != FGTy::Bool)
                    throw TranslateError("boolean operator on a non-boolean");
                std::string a = fresh(), b = fresh(), c = fresh(), d = fresh();
                CGExprP gate = e->k == FGEx::And
                                   ? cgb::ife(cgb::var(c), cgb::var(d), cgb::fls())
                                   : cgb::ife(cgb::var(c), cgb::tru(), cgb::var(d));
                CGExprP t = cgb::toLabeled(cgb::bind(
                    x.t, a,
                    cgb::bind(y.t, b,
                              cgb::bind(cgb::unlabel(cgb::var(a)), c,
                                        cgb::bind(cgb::unlabel(cgb::var(b)), d,
                                                  cgb::ret(gate))))));
                return {t, fg_bool(lat->join(x.ty->lab, y.ty->lab))};
            }
            case FGEx::Not: {
                Res x = go(ctx, pc, e->e1);
                if (x.ty->k != FGTy::Bool) throw TranslateError("negation of a non-boolean");
                std::string a = fresh(), b = fresh();
                CGExprP flip = g_fault == "drop-not"
                                   ? cgb::ife(cgb::var(b), cgb::tru(), cgb::fls())
                                   : cgb::ife(cgb::var(b), cgb::fls(), cgb::tru());
                CGExprP t = cgb::toLabeled(cgb::bind(
                    x.t, a, cgb::bind(cgb::unlabel(cgb::var(a)), b, cgb::ret(flip))));
                return {t, x.ty};
            }
        }
        throw TranslateError("unhandled expression form");
    }
};

} // namespace

FG2CGResult fg2cg_expr(const FGCtx& ctx, const LatticeP& lat, Label pc, const FGExprP& e) {
    FGTypeP checked = fg_typecheck(ctx, pc, e);
    Translator tr{lat};
    FGCtx scoped = ctx;
    Translator::Res r = tr.go(scoped, pc, e);
    if (!fg_type_eq(r.ty, checked))
        throw TranslateError("translation-time synthesis diverged from the checker");
    CGTypeP contract = cg_slio(pc, lat->bot(), fg2cg_type(checked));
    CGTypeP actual;
    try {
        actual = cg_typecheck(fg2cg_ctx(ctx), lat, r.t);
    } catch (const TypeError& te) {
        throw TranslateError(std::string("emitted term does not typecheck: ") + te.what());
    }
    if (!cg_subtype(actual, contract))
        throw TranslateError("emitted term does not meet its contract type");
    return {r.t, checked, contract};
}

} // namespace ifc

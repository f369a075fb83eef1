#include "ast.hpp"

namespace ifc {

// ---- FG type constructors ----

static FGTypeP mkty(FGTy k, Label lab, FGTypeP a = nullptr, FGTypeP b = nullptr,
                    Label latent = {}) {
    auto t = std::make_shared<FGType>();
    t->k = k;
    t->lab = lab;
    t->a = std::move(a);
    t->b = std::move(b);
    t->latent = latent;
    return t;
}

FGTypeP fg_bool(Label l) { return mkty(FGTy::Bool, l); }
FGTypeP fg_unit(Label l) { return mkty(FGTy::Unit, l); }
FGTypeP fg_fun(FGTypeP arg, Label latent, FGTypeP res, Label l) {
    return mkty(FGTy::Fun, l, std::move(arg), std::move(res), latent);
}
FGTypeP fg_prod(FGTypeP a, FGTypeP b, Label l) {
    return mkty(FGTy::Prod, l, std::move(a), std::move(b));
}
FGTypeP fg_sum(FGTypeP a, FGTypeP b, Label l) {
    return mkty(FGTy::Sum, l, std::move(a), std::move(b));
}
FGTypeP fg_ref(FGTypeP cell, Label l) { return mkty(FGTy::Ref, l, std::move(cell)); }

FGTypeP fg_relabel(const FGTypeP& t, Label l) {
    return mkty(t->k, l, t->a, t->b, t->latent);
}

FGTypeP fg_raise(const FGTypeP& t, Label l) {
    Label j = t->lab.lat->join(t->lab, l);
    if (j == t->lab) return t;
    return fg_relabel(t, j);
}

bool fg_type_eq(const FGTypeP& x, const FGTypeP& y) {
    if (x.get() == y.get()) return true;
    if (!x || !y) return false;
    if (x->k != y->k || x->lab != y->lab) return false;
    switch (x->k) {
        case FGTy::Bool:
        case FGTy::Unit: return true;
        case FGTy::Fun:
            return x->latent == y->latent && fg_type_eq(x->a, y->a) && fg_type_eq(x->b, y->b);
        case FGTy::Prod:
        case FGTy::Sum: return fg_type_eq(x->a, y->a) && fg_type_eq(x->b, y->b);
        case FGTy::Ref: return fg_type_eq(x->a, y->a);
    }
    return false;
}

// ---- FG expression builders ----

namespace fgb {

static std::shared_ptr<FGExpr> mk(FGEx k, SrcPos pos) {
    auto e = std::make_shared<FGExpr>();
    e->k = k;
    e->pos = pos;
    return e;
}

FGExprP var(const std::string& n, SrcPos pos) {
    auto e = mk(FGEx::Var, pos);
    e->name = n;
    return e;
}
FGExprP tru(SrcPos pos) { return mk(FGEx::BTrue, pos); }
FGExprP fls(SrcPos pos) { return mk(FGEx::BFalse, pos); }
FGExprP unit(SrcPos pos) { return mk(FGEx::UnitE, pos); }

FGExprP lam(const std::string& x, FGTypeP ty, Label latent, FGExprP body, SrcPos pos) {
    auto e = mk(FGEx::Lam, pos);
    e->name = x;
    e->tyA = std::move(ty);
    e->latent = latent;
    e->e1 = std::move(body);
    return e;
}
FGExprP app(FGExprP f, FGExprP a, SrcPos pos) {
    auto e = mk(FGEx::App, pos);
    e->e1 = std::move(f);
    e->e2 = std::move(a);
    return e;
}
FGExprP pair(FGExprP a, FGExprP b, SrcPos pos) {
    auto e = mk(FGEx::Pair, pos);
    e->e1 = std::move(a);
    e->e2 = std::move(b);
    return e;
}
FGExprP fst(FGExprP x, SrcPos pos) {
    auto e = mk(FGEx::Fst, pos);
    e->e1 = std::move(x);
    return e;
}
FGExprP snd(FGExprP x, SrcPos pos) {
    auto e = mk(FGEx::Snd, pos);
    e->e1 = std::move(x);
    return e;
}
FGExprP inl(FGExprP x, FGTypeP sumA, FGTypeP sumB, SrcPos pos) {
    auto e = mk(FGEx::Inl, pos);
    e->e1 = std::move(x);
    e->tyA = std::move(sumA);
    e->tyB = std::move(sumB);
    return e;
}
FGExprP inr(FGExprP x, FGTypeP sumA, FGTypeP sumB, SrcPos pos) {
    auto e = mk(FGEx::Inr, pos);
    e->e1 = std::move(x);
    e->tyA = std::move(sumA);
    e->tyB = std::move(sumB);
    return e;
}
FGExprP cse(FGExprP s, const std::string& x, FGExprP l, const std::string& y, FGExprP r,
            SrcPos pos) {
    auto e = mk(FGEx::Case, pos);
    e->e1 = std::move(s);
    e->name = x;
    e->e2 = std::move(l);
    e->name2 = y;
    e->e3 = std::move(r);
    return e;
}
FGExprP ife(FGExprP c, FGExprP t, FGExprP f, SrcPos pos) {
    auto e = mk(FGEx::If, pos);
    e->e1 = std::move(c);
    e->e2 = std::move(t);
    e->e3 = std::move(f);
    return e;
}
FGExprP newe(FGExprP x, FGTypeP ann, SrcPos pos) {
    auto e = mk(FGEx::New, pos);
    e->e1 = std::move(x);
    e->tyA = std::move(ann);
    return e;
}
FGExprP deref(FGExprP x, SrcPos pos) {
    auto e = mk(FGEx::Deref, pos);
    e->e1 = std::move(x);
    return e;
}
FGExprP assign(FGExprP r, FGExprP v, SrcPos pos) {
    auto e = mk(FGEx::Assign, pos);
    e->e1 = std::move(r);
    e->e2 = std::move(v);
    return e;
}
FGExprP band(FGExprP a, FGExprP b, SrcPos pos) {
    auto e = mk(FGEx::And, pos);
    e->e1 = std::move(a);
    e->e2 = std::move(b);
    return e;
}
FGExprP bor(FGExprP a, FGExprP b, SrcPos pos) {
    auto e = mk(FGEx::Or, pos);
    e->e1 = std::move(a);
    e->e2 = std::move(b);
    return e;
}
FGExprP bnot(FGExprP x, SrcPos pos) {
    auto e = mk(FGEx::Not, pos);
    e->e1 = std::move(x);
    return e;
}

} // namespace fgb

// ---- CG type constructors ----

static CGTypeP mkcty(CGTy k, CGTypeP a = nullptr, CGTypeP b = nullptr, Label l1 = {},
                     Label l2 = {}) {
    auto t = std::make_shared<CGType>();
    t->k = k;
    t->a = std::move(a);
    t->b = std::move(b);
    t->l1 = l1;
    t->l2 = l2;
    return t;
}

CGTypeP cg_bool() {
    static CGTypeP t = mkcty(CGTy::Bool);
    return t;
}
CGTypeP cg_unit() {
    static CGTypeP t = mkcty(CGTy::Unit);
    return t;
}
CGTypeP cg_fun(CGTypeP a, CGTypeP b) { return mkcty(CGTy::Fun, std::move(a), std::move(b)); }
CGTypeP cg_prod(CGTypeP a, CGTypeP b) { return mkcty(CGTy::Prod, std::move(a), std::move(b)); }
CGTypeP cg_sum(CGTypeP a, CGTypeP b) { return mkcty(CGTy::Sum, std::move(a), std::move(b)); }
CGTypeP cg_ref(Label l, CGTypeP t) { return mkcty(CGTy::Ref, std::move(t), nullptr, l); }
CGTypeP cg_labeled(Label l, CGTypeP t) { return mkcty(CGTy::Labeled, std::move(t), nullptr, l); }
CGTypeP cg_slio(Label pc, Label taint, CGTypeP t) {
    return mkcty(CGTy::Slio, std::move(t), nullptr, pc, taint);
}

bool cg_type_eq(const CGTypeP& x, const CGTypeP& y) {
    if (x.get() == y.get()) return true;
    if (!x || !y) return false;
    if (x->k != y->k) return false;
    switch (x->k) {
        case CGTy::Bool:
        case CGTy::Unit: return true;
        case CGTy::Fun:
        case CGTy::Prod:
        case CGTy::Sum: return cg_type_eq(x->a, y->a) && cg_type_eq(x->b, y->b);
        case CGTy::Ref:
        case CGTy::Labeled: return x->l1 == y->l1 && cg_type_eq(x->a, y->a);
        case CGTy::Slio:
            return x->l1 == y->l1 && x->l2 == y->l2 && cg_type_eq(x->a, y->a);
    }
    return false;
}

// ---- CG expression builders ----

namespace cgb {

static std::shared_ptr<CGExpr> mk(CGEx k, SrcPos pos) {
    auto e = std::make_shared<CGExpr>();
    e->k = k;
    e->pos = pos;
    return e;
}

CGExprP var(const std::string& n, SrcPos pos) {
    auto e = mk(CGEx::Var, pos);
    e->name = n;
    return e;
}
CGExprP tru(SrcPos pos) { return mk(CGEx::BTrue, pos); }
CGExprP fls(SrcPos pos) { return mk(CGEx::BFalse, pos); }
CGExprP unit(SrcPos pos) { return mk(CGEx::UnitE, pos); }

CGExprP lam(const std::string& x, CGTypeP ty, CGExprP body, SrcPos pos) {
    auto e = mk(CGEx::Lam, pos);
    e->name = x;
    e->tyA = std::move(ty);
    e->e1 = std::move(body);
    return e;
}
CGExprP app(CGExprP f, CGExprP a, SrcPos pos) {
    auto e = mk(CGEx::App, pos);
    e->e1 = std::move(f);
    e->e2 = std::move(a);
    return e;
}
CGExprP pair(CGExprP a, CGExprP b, SrcPos pos) {
    auto e = mk(CGEx::Pair, pos);
    e->e1 = std::move(a);
    e->e2 = std::move(b);
    return e;
}
CGExprP fst(CGExprP x, SrcPos pos) {
    auto e = mk(CGEx::Fst, pos);
    e->e1 = std::move(x);
    return e;
}
CGExprP snd(CGExprP x, SrcPos pos) {
    auto e = mk(CGEx::Snd, pos);
    e->e1 = std::move(x);
    return e;
}
CGExprP inl(CGExprP x, CGTypeP sumA, CGTypeP sumB, SrcPos pos) {
    auto e = mk(CGEx::Inl, pos);
    e->e1 = std::move(x);
    e->tyA = std::move(sumA);
    e->tyB = std::move(sumB);
    return e;
}
CGExprP inr(CGExprP x, CGTypeP sumA, CGTypeP sumB, SrcPos pos) {
    auto e = mk(CGEx::Inr, pos);
    e->e1 = std::move(x);
    e->tyA = std::move(sumA);
    e->tyB = std::move(sumB);
    return e;
}
CGExprP cse(CGExprP s, const std::string& x, CGExprP l, const std::string& y, CGExprP r,
            SrcPos pos) {
    auto e = mk(CGEx::Case, pos);
    e->e1 = std::move(s);
    e->name = x;
    e->e2 = std::move(l);
    e->name2 = y;
    e->e3 = std::move(r);
    return e;
}
CGExprP ife(CGExprP c, CGExprP t, CGExprP f, SrcPos pos) {
    auto e = mk(CGEx::If, pos);
    e->e1 = std::move(c);
    e->e2 = std::move(t);
    e->e3 = std::move(f);
    return e;
}
CGExprP label(Label l, CGExprP x, SrcPos pos) {
    auto e = mk(CGEx::LabelE, pos);
    e->lab = l;
    e->e1 = std::move(x);
    return e;
}
CGExprP unlabel(CGExprP x, SrcPos pos) {
    auto e = mk(CGEx::Unlabel, pos);
    e->e1 = std::move(x);
    return e;
}
CGExprP toLabeled(CGExprP x, SrcPos pos) {
    auto e = mk(CGEx::ToLabeled, pos);
    e->e1 = std::move(x);
    return e;
}
CGExprP ret(CGExprP x, SrcPos pos) {
    auto e = mk(CGEx::Ret, pos);
    e->e1 = std::move(x);
    return e;
}
CGExprP bind(CGExprP m, const std::string& x, CGExprP body, SrcPos pos) {
    auto e = mk(CGEx::Bind, pos);
    e->e1 = std::move(m);
    e->name = x;
    e->e2 = std::move(body);
    return e;
}
CGExprP newe(CGExprP x, CGTypeP ann, SrcPos pos) {
    auto e = mk(CGEx::New, pos);
    e->e1 = std::move(x);
    e->tyA = std::move(ann);
    return e;
}
CGExprP deref(CGExprP x, SrcPos pos) {
    auto e = mk(CGEx::Deref, pos);
    e->e1 = std::move(x);
    return e;
}
CGExprP assign(CGExprP r, CGExprP v, SrcPos pos) {
    auto e = mk(CGEx::Assign, pos);
    e->e1 = std::move(r);
    e->e2 = std::move(v);
    return e;
}

} // namespace cgb

} // namespace ifc

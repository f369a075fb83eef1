#pragma once

#include <memory>
#include <string>

#include "diag.hpp"
#include "lattice.hpp"

namespace ifc {

// ---- fine-grained types: every node carries a security label ----

struct FGType;
using FGTypeP = std::shared_ptr<const FGType>;

// Step budget both evaluators default to.
inline constexpr long kDefaultFuel = 100000;

enum class FGTy { Bool, Unit, Fun, Prod, Sum, Ref };

struct FGType {
    FGTy k;
    Label lab;     // top-level label of this type
    FGTypeP a, b;  // Fun: a -> b; Prod/Sum: components; Ref: a = cell type
    Label latent;  // Fun only: pc the body assumes
};

FGTypeP fg_bool(Label l);
FGTypeP fg_unit(Label l);
FGTypeP fg_fun(FGTypeP arg, Label latent, FGTypeP res, Label l);
FGTypeP fg_prod(FGTypeP a, FGTypeP b, Label l);
FGTypeP fg_sum(FGTypeP a, FGTypeP b, Label l);
FGTypeP fg_ref(FGTypeP cell, Label l);
FGTypeP fg_relabel(const FGTypeP& t, Label l);
FGTypeP fg_raise(const FGTypeP& t, Label l); // top label joined with l
bool fg_type_eq(const FGTypeP& x, const FGTypeP& y);

// ---- fine-grained expressions ----

struct FGExpr;
using FGExprP = std::shared_ptr<const FGExpr>;

enum class FGEx {
    Var, BTrue, BFalse, UnitE,
    Lam, App, Pair, Fst, Snd, Inl, Inr, Case, If,
    New, Deref, Assign,
    And, Or, Not
};

struct FGExpr {
    FGEx k;
    SrcPos pos;
    std::string name;   // Var; Lam param; Case left binder
    std::string name2;  // Case right binder
    FGTypeP tyA, tyB;   // Lam: tyA = param type; Inl/Inr: tyA,tyB = sum components;
                        // New: tyA = optional cell annotation
    Label latent;       // Lam
    FGExprP e1, e2, e3;
    // cg2fg marks the dead `inr ()` it emits for bind; the instrumented
    // evaluator counts evaluations of marked nodes. Not printed, not parsed.
    bool synthetic_dead = false;
};

namespace fgb { // expression builders
FGExprP var(const std::string& n, SrcPos pos = {});
FGExprP tru(SrcPos pos = {});
FGExprP fls(SrcPos pos = {});
FGExprP unit(SrcPos pos = {});
FGExprP lam(const std::string& x, FGTypeP ty, Label latent, FGExprP body, SrcPos pos = {});
FGExprP app(FGExprP f, FGExprP a, SrcPos pos = {});
FGExprP pair(FGExprP a, FGExprP b, SrcPos pos = {});
FGExprP fst(FGExprP e, SrcPos pos = {});
FGExprP snd(FGExprP e, SrcPos pos = {});
FGExprP inl(FGExprP e, FGTypeP sumA, FGTypeP sumB, SrcPos pos = {});
FGExprP inr(FGExprP e, FGTypeP sumA, FGTypeP sumB, SrcPos pos = {});
FGExprP cse(FGExprP s, const std::string& x, FGExprP l, const std::string& y, FGExprP r,
            SrcPos pos = {});
FGExprP ife(FGExprP c, FGExprP t, FGExprP e, SrcPos pos = {});
FGExprP newe(FGExprP e, FGTypeP ann, SrcPos pos = {}); // ann may be null
FGExprP deref(FGExprP e, SrcPos pos = {});
FGExprP assign(FGExprP r, FGExprP v, SrcPos pos = {});
FGExprP band(FGExprP a, FGExprP b, SrcPos pos = {});
FGExprP bor(FGExprP a, FGExprP b, SrcPos pos = {});
FGExprP bnot(FGExprP e, SrcPos pos = {});
} // namespace fgb

// ---- coarse-grained types ----

struct CGType;
using CGTypeP = std::shared_ptr<const CGType>;

enum class CGTy { Bool, Unit, Fun, Prod, Sum, Ref, Labeled, Slio };

struct CGType {
    CGTy k;
    CGTypeP a, b;  // Fun: a -> b; Prod/Sum: components; Ref/Labeled/Slio: a = payload
    Label l1, l2;  // Ref/Labeled: l1; Slio: l1 = pc, l2 = taint
};

CGTypeP cg_bool();
CGTypeP cg_unit();
CGTypeP cg_fun(CGTypeP a, CGTypeP b);
CGTypeP cg_prod(CGTypeP a, CGTypeP b);
CGTypeP cg_sum(CGTypeP a, CGTypeP b);
CGTypeP cg_ref(Label l, CGTypeP t);
CGTypeP cg_labeled(Label l, CGTypeP t);
CGTypeP cg_slio(Label pc, Label taint, CGTypeP t);
bool cg_type_eq(const CGTypeP& x, const CGTypeP& y);

// ---- coarse-grained expressions ----

struct CGExpr;
using CGExprP = std::shared_ptr<const CGExpr>;

enum class CGEx {
    Var, BTrue, BFalse, UnitE,
    Lam, App, Pair, Fst, Snd, Inl, Inr, Case, If,
    LabelE, Unlabel, ToLabeled, Ret, Bind,
    New, Deref, Assign
};

struct CGExpr {
    CGEx k;
    SrcPos pos;
    std::string name;   // Var; Lam param; Bind binder; Case left binder
    std::string name2;  // Case right binder
    CGTypeP tyA, tyB;   // Lam: tyA = param type; Inl/Inr: sum components;
                        // New: tyA = optional Labeled cell annotation
    Label lab;          // LabelE
    CGExprP e1, e2, e3;
};

namespace cgb {
CGExprP var(const std::string& n, SrcPos pos = {});
CGExprP tru(SrcPos pos = {});
CGExprP fls(SrcPos pos = {});
CGExprP unit(SrcPos pos = {});
CGExprP lam(const std::string& x, CGTypeP ty, CGExprP body, SrcPos pos = {});
CGExprP app(CGExprP f, CGExprP a, SrcPos pos = {});
CGExprP pair(CGExprP a, CGExprP b, SrcPos pos = {});
CGExprP fst(CGExprP e, SrcPos pos = {});
CGExprP snd(CGExprP e, SrcPos pos = {});
CGExprP inl(CGExprP e, CGTypeP sumA, CGTypeP sumB, SrcPos pos = {});
CGExprP inr(CGExprP e, CGTypeP sumA, CGTypeP sumB, SrcPos pos = {});
CGExprP cse(CGExprP s, const std::string& x, CGExprP l, const std::string& y, CGExprP r,
            SrcPos pos = {});
CGExprP ife(CGExprP c, CGExprP t, CGExprP e, SrcPos pos = {});
CGExprP label(Label l, CGExprP e, SrcPos pos = {});
CGExprP unlabel(CGExprP e, SrcPos pos = {});
CGExprP toLabeled(CGExprP e, SrcPos pos = {});
CGExprP ret(CGExprP e, SrcPos pos = {});
CGExprP bind(CGExprP m, const std::string& x, CGExprP body, SrcPos pos = {});
CGExprP newe(CGExprP e, CGTypeP ann, SrcPos pos = {}); // ann: Labeled type or null
CGExprP deref(CGExprP e, SrcPos pos = {});
CGExprP assign(CGExprP r, CGExprP v, SrcPos pos = {});
} // namespace cgb

} // namespace ifc

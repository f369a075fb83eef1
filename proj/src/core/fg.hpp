#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ast.hpp"

namespace ifc {

// ---- typing ----

// Scoped context; lookup walks back to front so inner binders shadow.
using FGCtx = std::vector<std::pair<std::string, FGTypeP>>;

// t is protected at l: the top-level label of t sits at or above l.
bool fg_protected_at(const FGTypeP& t, Label l);

// Declarative subtype order. Labels covariant at the top of every type,
// products/sums covariant componentwise, functions contravariant in the
// argument and in the latent label (it lower-bounds the body's write
// effects) and covariant in the result, references invariant in the cell.
bool fg_subtype(const FGTypeP& a, const FGTypeP& b);

// Least upper / greatest lower bound in the subtype order, where one
// exists; null otherwise (kind mismatch, or unequal ref cells).
FGTypeP fg_join_type(const FGTypeP& a, const FGTypeP& b);
FGTypeP fg_meet_type(const FGTypeP& a, const FGTypeP& b);

// Synthesizes the principal type of e under ctx at program-counter label
// pc. Subsumption is folded into the elimination rules: arguments and
// stored values are checked against the expected type with fg_subtype,
// and eliminating a value labeled l joins l into the result's top label.
// Throws TypeError carrying the violated rule's name.
FGTypeP fg_typecheck(const FGCtx& ctx, Label pc, const FGExprP& e);

// ---- evaluation ----
// Labels are erased at runtime; enforcement is entirely static.

struct FGValue;
using FGValueP = std::shared_ptr<const FGValue>;

struct FGEnvNode;
using FGEnvP = std::shared_ptr<const FGEnvNode>;

struct FGEnvNode {
    std::string name;
    FGValueP v;
    FGEnvP next;
};

FGEnvP fg_env_extend(const FGEnvP& env, const std::string& name, FGValueP v);
FGValueP fg_env_lookup(const FGEnvP& env, const std::string& name); // null if absent

enum class FGVal { Unit, Bool, Closure, Pair, Inl, Inr, Loc };

struct FGValue {
    FGVal k;
    bool b = false;          // Bool
    FGEnvP env;              // Closure
    std::string param;       // Closure
    FGExprP body;            // Closure
    FGValueP v1, v2;         // Pair; Inl/Inr use v1
    size_t loc = 0;          // Loc
};

FGValueP fg_vunit();
FGValueP fg_vbool(bool b);
FGValueP fg_vpair(FGValueP a, FGValueP b);
FGValueP fg_vinl(FGValueP v);
FGValueP fg_vinr(FGValueP v);
FGValueP fg_vloc(size_t loc);

struct FGHeap {
    std::vector<FGValueP> cells; // locations are indices; never deallocated
};

// Call-by-value, left to right, environment closures. Every evaluation
// rule costs one fuel unit except literals and variables, which are free.
// Throws EvalTimeout when fuel runs out and EvalStuck on an ill-shaped
// value (which means a checker bug, never user error).
FGValueP fg_eval(FGHeap& heap, const FGEnvP& env, const FGExprP& e, long& fuel, long& steps);

struct FGRun {
    FGValueP v;
    long steps = 0;
};

// Convenience wrapper: evaluate with a fresh step counter.
FGRun fg_run(FGHeap& heap, const FGEnvP& env, const FGExprP& e, long fuel = kDefaultFuel);

// Evaluation counter for expressions carrying the synthetic_dead mark.
// The coarse-to-fine translator emits such nodes only where control can
// never reach; a nonzero count after a run therefore indicates a
// translator bug. Process-wide, reset manually.
long fg_dead_hits();
void fg_dead_reset();

std::string fg_value_str(const FGValueP& v);

// Structural equality; closures compare by identity only.
bool fg_value_eq(const FGValueP& a, const FGValueP& b);

} // namespace ifc

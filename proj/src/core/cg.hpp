#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ast.hpp"

namespace ifc {

// ---- typing ----

using CGCtx = std::vector<std::pair<std::string, CGTypeP>>;

// Labeled is covariant in label and payload; the computation type is
// contravariant in its pc bound (a computation safe to run at high pc is
// safe at a lower one... never the reverse) and covariant in its taint and
// payload; references are invariant; functions standard contra/co.
bool cg_subtype(const CGTypeP& a, const CGTypeP& b);

// Bounds in the subtype order where they exist, null otherwise.
CGTypeP cg_join_type(const CGTypeP& a, const CGTypeP& b);
CGTypeP cg_meet_type(const CGTypeP& a, const CGTypeP& b);

// Principal type of e under ctx. The judgment has no pc: effects live in
// the computation type. Throws TypeError carrying the violated rule name.
CGTypeP cg_typecheck(const CGCtx& ctx, const LatticeP& lat, const CGExprP& e);

// ---- values ----
// Runtime labels are erased, except that labeled values keep an unlabeled
// wrapper so forcing can check shapes, and monadic expressions evaluate to
// suspended thunks that only forcing executes.

struct CGValue;
using CGValueP = std::shared_ptr<const CGValue>;

struct CGEnvNode;
using CGEnvP = std::shared_ptr<const CGEnvNode>;

struct CGEnvNode {
    std::string name;
    CGValueP v;
    CGEnvP next;
};

CGEnvP cg_env_extend(const CGEnvP& env, const std::string& name, CGValueP v);
CGValueP cg_env_lookup(const CGEnvP& env, const std::string& name);

enum class CGVal {
    Unit, Bool, Closure, Pair, Inl, Inr, Loc,
    Labeled,   // wrapper around a payload value
    RetT,      // suspended: yield v1
    BindT,     // suspended: force v1, bind param, evaluate body, force that
    UnlabelT,  // suspended: strip the wrapper of v1
    ToLabeledT,// suspended: force v1, wrap the result
    NewT,      // suspended: allocate v1
    DerefT,    // suspended: load v1 (a location)
    AssignT,   // suspended: store v2 into v1 (a location)
};

struct CGValue {
    CGVal k;
    bool b = false;
    CGEnvP env;         // Closure, BindT
    std::string param;  // Closure, BindT
    CGExprP body;       // Closure, BindT
    CGValueP v1, v2;    // Pair; Inl/Inr/Labeled/thunk payloads use v1
    size_t loc = 0;
};

bool cg_is_thunk(CGVal k);

CGValueP cg_vunit();
CGValueP cg_vbool(bool b);
CGValueP cg_vpair(CGValueP a, CGValueP b);
CGValueP cg_vinl(CGValueP v);
CGValueP cg_vinr(CGValueP v);
CGValueP cg_vloc(size_t loc);
CGValueP cg_vlabeled(CGValueP payload);

struct CGHeap {
    std::vector<CGValueP> cells;
};

// Pure call-by-value evaluation: never touches a heap; monadic constructs
// evaluate their sub-expressions and suspend. Costs mirror the rule
// instances (literals and variables free).
CGValueP cg_eval_pure(const CGEnvP& env, const CGExprP& e, long& fuel, long& steps);

// Executes a suspended computation against the heap.
CGValueP cg_force(CGHeap& heap, const CGValueP& m, long& fuel, long& steps);

struct CGRun {
    CGValueP v;
    long steps = 0;
};

CGRun cg_run_pure(const CGEnvP& env, const CGExprP& e, long fuel = kDefaultFuel);
// Evaluate purely, then force if the result is a computation.
CGRun cg_run_forced(CGHeap& heap, const CGEnvP& env, const CGExprP& e, long fuel = kDefaultFuel);

std::string cg_value_str(const CGValueP& v);

// Structural equality; closures and thunks compare by identity only.
bool cg_value_eq(const CGValueP& a, const CGValueP& b);

} // namespace ifc

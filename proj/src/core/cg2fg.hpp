#pragma once

#include <string>

#include "cg.hpp"
#include "fg.hpp"

namespace ifc {

struct CG2FGResult {
    FGExprP target;
    CGTypeP sourceType;
    FGTypeP targetType; // always cg2fg_type(sourceType)
};

// Type image. Plain structure maps across with every constructor labeled
// bot. The two interesting clauses use a sum coding: Labeled l t becomes
// (<image t> + unit)@l, and a computation SLIO l1 l2 t becomes a thunk,
// (unit -> [l1] (<image t> + unit)@l2)@bot, so the pc bound turns into a
// latent effect and the taint into the label of the coded result. A cell
// ref l t stores the coded Labeled payload. The right summand is never
// inhabited by translated code; it only exists so the taint has a label
// position to live on.
FGTypeP cg2fg_type(const CGTypeP& t, const LatticeP& lat);

FGCtx cg2fg_ctx(const CGCtx& ctx, const LatticeP& lat);

// Derivation-directed translation. Pure constructs map homomorphically;
// monadic constructs become thunks taking a unit argument, with the
// latent label forced by the contract (it must equal the computation's
// pc bound for the image to typecheck). bind becomes a case over the
// coded result of the first computation whose right branch is
// unreachable; that branch is marked so the instrumented evaluator can
// prove it dead (fg_dead_hits). The emitted term is typechecked at pc
// top against the type image before returning; failure throws
// TranslateError and means a translator bug, never user error. Fresh
// variables are %d1, %d2, ... so they cannot collide with source names.
CG2FGResult cg2fg_expr(const CGCtx& ctx, const LatticeP& lat, const CGExprP& e);

// Deliberately miscompile in a named way; the differential harness must
// catch every mode. "" switches the fault off.
void cg2fg_set_fault(const std::string& mode);
std::string cg2fg_fault();

} // namespace ifc

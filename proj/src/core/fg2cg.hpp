#pragma once

#include <string>

#include "cg.hpp"
#include "fg.hpp"

namespace ifc {

struct FG2CGResult {
    CGExprP target;
    FGTypeP sourceType;
    CGTypeP targetType; // always slio(pc, bot, fg2cg_type(sourceType))
};

// Type image: a labeled source type A@l becomes Labeled l <image of A>;
// the function image threads the latent label through the monad,
// A ->[le] B becomes <image A> -> SLIO le bot <image B>; a reference cell
// A@l becomes ref l <image of A>.
CGTypeP fg2cg_type(const FGTypeP& t);
CGTypeP fg2cg_type_raw(const FGTypeP& t); // the structure under the label

CGCtx fg2cg_ctx(const FGCtx& ctx);

// Derivation-directed translation. Re-synthesizes the source typing as it
// recurses (the term determines the derivation), emits one deterministic
// target term, and typechecks that term against the contract type before
// returning; a contract violation throws TranslateError and means a
// translator bug, never user error. Fresh variables are %a1, %a2, ... so
// they cannot collide with source names.
FG2CGResult fg2cg_expr(const FGCtx& ctx, const LatticeP& lat, Label pc, const FGExprP& e);

// Deliberately miscompile in a named way; the differential harness must
// catch every mode. "" switches the fault off.
void fg2cg_set_fault(const std::string& mode);
std::string fg2cg_fault();

} // namespace ifc

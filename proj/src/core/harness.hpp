#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cg.hpp"
#include "fg.hpp"

namespace ifc {

// Deterministic draws: bounded values come from modulo reduction of the
// raw 64-bit stream, never from a distribution object, so a seed replays
// the same corpus on any standard library.
class Rng {
public:
    explicit Rng(uint64_t seed) : g_(seed) {}
    uint64_t raw() { return g_(); }
    size_t below(size_t n) { return n ? static_cast<size_t>(raw() % n) : 0; }
    bool coin() { return (raw() & 1) != 0; }
    Label pick_label(const LatticeP& lat);

private:
    std::mt19937_64 g_;
};

// ---- generation ----

// A random type every closed program can inhabit at the given pc (the
// guard matters for reference cells, which require pc-bounded writes to
// allocate). Depth bounds nesting, not the node count.
FGTypeP gen_fg_type(Rng& rng, const LatticeP& lat, Label pc, int depth, bool allowRef,
                    bool allowFun);
CGTypeP gen_cg_type(Rng& rng, const LatticeP& lat, int depth, bool allowRef, bool allowFun,
                    bool allowMonad);

// Smallest-shape value expression of the type: literals with coin-flipped
// booleans, constant lambdas, injections picking an inhabitable side.
// Closed, pure, typechecks at any pc. Reference types are refused
// (IfcError): values never denote locations.
FGExprP gen_fg_value_expr(Rng& rng, const FGTypeP& t);
CGExprP gen_cg_value_expr(Rng& rng, const CGTypeP& t);

// A copy with the first boolean literal flipped, or null when the
// expression contains none; used to make secret pairs differ.
FGExprP flip_first_bool_fg(const FGExprP& e);
CGExprP flip_first_bool_cg(const CGExprP& e);

// Type-directed program generation: pick the goal's head production,
// reserve space for the smallest completion of every subgoal, spend the
// slack randomly. The result always typechecks under (ctx, pc) at a
// subtype of goal. The size budget caps elective structure: the result
// never exceeds max(size, smallest completion of the goal). A null goal
// draws one that fits. Throws IfcError when the goal cannot be inhabited
// here (the caller's retry signal).
FGExprP gen_fg_program(const LatticeP& lat, const FGCtx& ctx, Label pc, FGTypeP goal,
                       int size, uint64_t seed);
CGExprP gen_cg_program(const LatticeP& lat, const CGCtx& ctx, CGTypeP goal, int size,
                       uint64_t seed);

// Secret types for the noninterference oracles: first-order-plus-constant
// -functions, no references, every label position drawn from the lattice,
// the top label forced to the secret label.
FGTypeP gen_fg_secret_type(Rng& rng, const LatticeP& lat, Label li);
CGTypeP gen_cg_secret_type(Rng& rng, const LatticeP& lat, Label li); // Labeled li payload

size_t fg_expr_size(const FGExprP& e);
size_t cg_expr_size(const CGExprP& e);

// ---- oracles ----

struct NIConfig {
    Label secret_label; // l_i
    Label observer;     // l, with l_i not flowing to l
    int samples = 50;
    long fuel = kDefaultFuel;
    uint64_t seed = 0;
};

struct Verdict {
    enum class Kind { Pass, Counterexample, Inconclusive, TypeRejected };
    Kind kind = Kind::Pass;
    std::string detail;         // failure description or rejecting rule
    std::string v1, v2, r1, r2; // counterexample payload, pretty-printed
    int fail_index = -1;        // index of the failing trial
    int conclusive = 0;         // trials where every run terminated
    int timeouts = 0;           // trials with at least one timeout
    bool ok() const { return kind == Kind::Pass; }
};

// Differential noninterference run: substitute each secret pair for the
// one free variable through the environment, evaluate both copies under
// fuel against fresh heaps, and compare results. Unequal terminating
// results are a counterexample; a timeout on either side makes the trial
// inconclusive (the theorems are termination-insensitive); no conclusive
// trial at all makes the verdict inconclusive.
Verdict ni_run_fg(const FGExprP& e, const std::string& var,
                  const std::vector<std::pair<FGValueP, FGValueP>>& pairs, long fuel);
Verdict ni_run_cg(const CGExprP& e, const std::string& var,
                  const std::vector<std::pair<CGValueP, CGValueP>>& pairs, long fuel);

// Full oracle: checks the theorem preconditions (secret label must not
// flow to the observer; the program must typecheck at boolean observed at
// the observer), generates secret pairs distinct where the type allows,
// and runs the differential check. Type rejection is its own verdict: the
// type system doing its job, not an oracle failure.
Verdict ni_check_fg(const LatticeP& lat, const std::string& var, const FGTypeP& secretType,
                    Label pc, const FGExprP& e, const NIConfig& cfg);
Verdict ni_check_cg(const LatticeP& lat, const std::string& var, const CGTypeP& secretType,
                    const CGExprP& e, const NIConfig& cfg);

// Secret pairs as value expressions (the replayable form).
std::vector<std::pair<FGExprP, FGExprP>> gen_fg_secret_exprs(const FGTypeP& t, int n,
                                                             uint64_t seed);
std::vector<std::pair<CGExprP, CGExprP>> gen_cg_secret_exprs(const CGTypeP& t, int n,
                                                             uint64_t seed);

// ---- translation oracles ----

// Closed boolean program: source run vs. translated-and-forced run must
// agree exactly; both-timeout passes, a one-sided timeout is
// inconclusive, and a translator contract violation counts as a failure.
Verdict equiv_check_fg2cg(const LatticeP& lat, Label pc, const FGExprP& e, long fuel);
Verdict equiv_check_cg2fg(const LatticeP& lat, const CGExprP& e, long fuel);

// Noninterference transfer: wrappers exposing a translated program to the
// other system's NI oracle, and secret transport through the value
// translation (no second value-coding path to drift from the
// translators).
CGExprP ni_wrap_fg2cg(const CGExprP& target);                  // bind(t, z. unlabel z)
FGExprP ni_wrap_cg2fg(const FGExprP& target);                  // case(t (), b. b, u. false)
CGValueP transport_secret_fg2cg(const LatticeP& lat, const FGExprP& valueExpr);
FGValueP transport_secret_cg2fg(const LatticeP& lat, const CGExprP& valueExpr);

} // namespace ifc

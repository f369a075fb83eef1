#pragma once

#include <unordered_map>
#include <vector>

#include "cg.hpp"
#include "fg.hpp"

namespace ifc {

// Sorted, duplicate-free set of interned type ids.
using TypeSet = std::vector<int>;

bool set_contains(const TypeSet& s, int v);
void set_insert(TypeSet& s, int v);
TypeSet set_union(const TypeSet& a, const TypeSet& b);
TypeSet set_intersect(const TypeSet& a, const TypeSet& b);

// A type node with interned children; the basis for hash-consing.
struct TypeNodeKey {
    uint8_t k = 0;
    uint64_t lab = 0, latent = 0; // label bits (latent doubles as a second label)
    int a = -1, b = -1;
    bool operator==(const TypeNodeKey& o) const = default;
};

// Exhaustive search over the declarative typing rules. For an expression it
// computes the set of ALL derivable types; the set is finite because every
// type in a derivation shares its skeleton with an annotation or with a
// subterm's type, and only the labels move (reference cells cannot move at
// all). The algorithmic checker is validated against this search: it must
// succeed exactly when the set is non-empty, its result must be a member,
// and the result must sit below every member.
//
// Binders are canonical: where a rule binds a variable against a candidate
// from an earlier premise (case scrutinees, bind computations), the search
// types the body once, against the least derivable candidate when one
// exists. Raised variants resurface through the result's closure, so this
// loses nothing except families built by pushing a raised binder through a
// label-invariant position (an unannotated cell), which no elaboration
// would produce. Without a least candidate every one is tried.
//
// Per-rule combinators are public so the small-term enumerator can reuse
// them on precomputed child sets without re-walking an AST.
class FGSearch {
public:
    explicit FGSearch(LatticeP lat);

    const LatticeP& lat() const { return lat_; }

    // structural interning; ids are dense and stable for this instance
    int id(const FGTypeP& t);
    FGTypeP at(int i) const; // by value: interning may grow the table mid-expression

    // every declarative supertype: same skeleton, labels re-chosen wherever
    // the subtype order lets them move. Throws when the skeleton has too
    // many label positions to enumerate (the search is bounded).
    const TypeSet& close(int t);
    TypeSet close_set(const TypeSet& s);

    // least element, or -1 when the set is empty or has no least element
    int min_of(const TypeSet& s) const;

    // Rule-wise conclusion sets from the children's closed sets; each
    // result is itself closed. `pc` is the program counter where the rule
    // reads it. Case/if take one scrutinee candidate at a time because the
    // branch sets depend on it (binder type and raised pc).
    TypeSet r_lit_bool();
    TypeSet r_lit_unit();
    TypeSet r_var(int declared);
    TypeSet r_lam(int param, Label latent, const TypeSet& body);
    TypeSet r_app(const TypeSet& fn, const TypeSet& arg, Label pc);
    TypeSet r_pair(const TypeSet& a, const TypeSet& b);
    TypeSet r_fst(const TypeSet& p);
    TypeSet r_snd(const TypeSet& p);
    TypeSet r_inj(bool left, int sumA, int sumB, const TypeSet& v);
    TypeSet r_case_one(int scrut, const TypeSet& b1, const TypeSet& b2);
    TypeSet r_if_one(int cond, const TypeSet& b1, const TypeSet& b2);
    TypeSet r_new(const TypeSet& v, int ann, Label pc); // ann = -1 when absent
    TypeSet r_deref(const TypeSet& r);
    TypeSet r_assign(const TypeSet& r, const TypeSet& v, Label pc);
    TypeSet r_boolop(const TypeSet& a, const TypeSet& b);
    TypeSet r_not(const TypeSet& a);

    // full search on an expression; unbound variables yield the empty set
    TypeSet decl(const FGCtx& ctx, Label pc, const FGExprP& e);

private:
    TypeSet decl_in(FGCtx& ctx, Label pc, const FGExprP& e);

    LatticeP lat_;
    std::vector<FGTypeP> types_;
    std::vector<TypeNodeKey> keys_;
    std::unordered_map<uint64_t, std::vector<int>> index_; // hash -> candidate ids
    std::unordered_map<int, TypeSet> closed_;
};

class CGSearch {
public:
    explicit CGSearch(LatticeP lat);

    const LatticeP& lat() const { return lat_; }

    int id(const CGTypeP& t);
    CGTypeP at(int i) const;

    const TypeSet& close(int t);
    TypeSet close_set(const TypeSet& s);
    int min_of(const TypeSet& s) const;

    TypeSet r_lit_bool();
    TypeSet r_lit_unit();
    TypeSet r_var(int declared);
    TypeSet r_lam(int param, const TypeSet& body);
    TypeSet r_app(const TypeSet& fn, const TypeSet& arg);
    TypeSet r_pair(const TypeSet& a, const TypeSet& b);
    TypeSet r_fst(const TypeSet& p);
    TypeSet r_snd(const TypeSet& p);
    TypeSet r_inj(bool left, int sumA, int sumB, const TypeSet& v);
    TypeSet r_case_one(int scrut, const TypeSet& b1, const TypeSet& b2);
    TypeSet r_if(const TypeSet& cond, const TypeSet& b1, const TypeSet& b2);
    TypeSet r_label(Label l, const TypeSet& v);
    TypeSet r_unlabel(const TypeSet& v);
    TypeSet r_tolabeled(const TypeSet& m);
    TypeSet r_ret(const TypeSet& v);
    TypeSet r_bind_one(int m, const TypeSet& body);
    TypeSet r_new(const TypeSet& v, int ann); // ann = -1 when absent
    TypeSet r_deref(const TypeSet& r);
    TypeSet r_assign(const TypeSet& r, const TypeSet& v);

    TypeSet decl(const CGCtx& ctx, const CGExprP& e);

private:
    TypeSet decl_in(CGCtx& ctx, const CGExprP& e);

    LatticeP lat_;
    std::vector<CGTypeP> types_;
    std::vector<TypeNodeKey> keys_;
    std::unordered_map<uint64_t, std::vector<int>> index_;
    std::unordered_map<int, TypeSet> closed_;
};

} // namespace ifc

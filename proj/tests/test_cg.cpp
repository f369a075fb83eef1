#include "doctest.h"

#include "core/cg.hpp"
#include "core/surface.hpp"

using namespace ifc;

namespace {

LatticeP two() { return lattice_two_point(); }

CGTypeP ty(const std::string& s) { return parse_cg_type(s, two()); }

std::string check_str(const std::string& ctx_and_expr) {
    SourceFile f = parse_source("(cg (lattice 2pt) " + ctx_and_expr + ")");
    return cg_type_str(cg_typecheck(f.cg_ctx, f.lat, f.cg_body));
}

std::string rejected_rule(const std::string& ctx_and_expr) {
    SourceFile f = parse_source("(cg (lattice 2pt) " + ctx_and_expr + ")");
    try {
        cg_typecheck(f.cg_ctx, f.lat, f.cg_body);
        return "";
    } catch (const TypeError& e) {
        return e.rule;
    }
}

CGExprP ex(const std::string& s) { return parse_cg_expr(s, two()); }

std::string pure_str(const std::string& expr) {
    return cg_value_str(cg_run_pure(nullptr, ex(expr)).v);
}

struct Forced {
    std::string v;
    size_t heap_size;
};

Forced forced(const std::string& expr, long fuel = kDefaultFuel) {
    CGHeap heap;
    CGRun r = cg_run_forced(heap, nullptr, ex(expr), fuel);
    return {cg_value_str(r.v), heap.cells.size()};
}

bool heaps_equal(const CGHeap& a, const CGHeap& b) {
    if (a.cells.size() != b.cells.size()) return false;
    for (size_t i = 0; i < a.cells.size(); i++)
        if (!cg_value_eq(a.cells[i], b.cells[i])) return false;
    return true;
}

} // namespace

TEST_CASE("labeled types are covariant in label and payload") {
    CHECK(cg_subtype(ty("(labeled L bool)"), ty("(labeled H bool)")));
    CHECK_FALSE(cg_subtype(ty("(labeled H bool)"), ty("(labeled L bool)")));
    CHECK(cg_subtype(ty("(labeled L (labeled L bool))"), ty("(labeled H (labeled H bool))")));
}

TEST_CASE("computation types are contravariant in pc, covariant in taint") {
    CHECK(cg_subtype(ty("(slio H L bool)"), ty("(slio L H bool)")));
    CHECK_FALSE(cg_subtype(ty("(slio L L bool)"), ty("(slio H L bool)")));
    CHECK(cg_subtype(ty("(slio H L bool)"), ty("(slio H H bool)")));
    CHECK_FALSE(cg_subtype(ty("(slio H H bool)"), ty("(slio H L bool)")));
    CHECK(cg_subtype(ty("(slio H L (labeled L bool))"), ty("(slio L H (labeled H bool))")));
}

TEST_CASE("references are invariant, functions contra/co") {
    CHECK(cg_subtype(ty("(ref H bool)"), ty("(ref H bool)")));
    CHECK_FALSE(cg_subtype(ty("(ref L bool)"), ty("(ref H bool)")));
    CHECK_FALSE(cg_subtype(ty("(ref H (labeled L bool))"), ty("(ref H (labeled H bool))")));
    CHECK(cg_subtype(ty("((labeled H bool) -> (labeled L bool))"),
                     ty("((labeled L bool) -> (labeled H bool))")));
    CHECK_FALSE(cg_subtype(ty("((labeled L bool) -> bool)"), ty("((labeled H bool) -> bool)")));
}

TEST_CASE("join and meet respect the computation variances") {
    CGTypeP a = ty("(slio H L bool)");
    CGTypeP b = ty("(slio L H bool)");
    CHECK(cg_type_str(cg_join_type(a, b)) == "(slio L H bool)");
    CHECK(cg_type_str(cg_meet_type(a, b)) == "(slio H L bool)");
    CHECK(cg_type_str(cg_join_type(ty("(labeled L bool)"), ty("(labeled H bool)"))) ==
          "(labeled H bool)");
    CHECK(cg_join_type(ty("(ref L bool)"), ty("(ref H bool)")) == nullptr);
    CHECK(cg_join_type(ty("bool"), ty("unit")) == nullptr);
}

TEST_CASE("returning is maximally permissive and taint-free") {
    CHECK(check_str("(ret true)") == "(slio H L bool)");
    CHECK(check_str("(ret (lam (x bool) x))") == "(slio H L (bool -> bool))");
}

TEST_CASE("labeling is pure; unlabeling taints") {
    CHECK(check_str("(label H true)") == "(labeled H bool)");
    CHECK(check_str("(label L (pair true ()))") == "(labeled L (bool * unit))");
    CHECK(check_str("(unlabel (label H true))") == "(slio H H bool)");
    CHECK(check_str("(unlabel (label L true))") == "(slio H L bool)");
    CHECK(rejected_rule("(unlabel true)") == "CG-UNLABEL-LABELED");
}

TEST_CASE("binding sequences taint into the continuation's pc bound") {
    CHECK(check_str("(bind (ret true) (x (ret x)))") == "(slio H L bool)");
    CHECK(check_str("(s : (labeled H bool)) (bind (unlabel s) (x (ret x)))") ==
          "(slio H H bool)");
    // the frozen rejection: secret taint flowing into a low write
    CHECK(rejected_rule("(r : (ref L bool))"
                        " (bind (unlabel (label H true)) (x (assign r (label L x))))") ==
          "CG-BIND-TAINT");
    CHECK(rejected_rule("(bind true (x (ret x)))") == "CG-BIND-LEFT");
    CHECK(rejected_rule("(bind (ret true) (x x))") == "CG-BIND-RIGHT");
}

TEST_CASE("toLabeled encapsulates the taint in the result label") {
    CHECK(check_str("(toLabeled (unlabel (label H false)))") == "(slio H L (labeled H bool))");
    CHECK(check_str("(s : (labeled H bool)) (r : (ref L bool))"
                    " (bind (toLabeled (unlabel s)) (x (assign r (label L false))))") ==
          "(slio L L unit)");
    CHECK(rejected_rule("(toLabeled (label H true))") == "CG-TOLABELED-SLIO");
}

TEST_CASE("allocation takes the label of the stored value") {
    CHECK(check_str("(new (label L true))") == "(slio L L (ref L bool))");
    CHECK(check_str("(new (label H true))") == "(slio H L (ref H bool))");
    CHECK(check_str("(new (label L true) (labeled H bool))") == "(slio H L (ref H bool))");
    CHECK(rejected_rule("(new true)") == "CG-NEW-LABELED");
    CHECK(rejected_rule("(new (label H true) (labeled L bool))") == "CG-NEW-ANN");
}

TEST_CASE("loads give back the labeled cell content") {
    CHECK(check_str("(r : (ref H bool)) (deref r)") == "(slio H L (labeled H bool))");
    CHECK(rejected_rule("(deref true)") == "CG-DEREF-REF");
}

TEST_CASE("stores require the cell's label and permit payload subtyping") {
    CHECK(check_str("(r : (ref L bool)) (assign r (label L true))") == "(slio L L unit)");
    CHECK(check_str("(r : (ref H bool)) (assign r (label L true))") == "(slio H L unit)");
    CHECK(rejected_rule("(r : (ref L bool)) (assign r (label H true))") == "CG-ASSIGN-VAL");
    CHECK(rejected_rule("(assign true (label L true))") == "CG-ASSIGN-REF");
}

TEST_CASE("pure fragment typing") {
    CHECK(check_str("(lam (x (labeled H bool)) (unlabel x))") ==
          "((labeled H bool) -> (slio H H bool))");
    CHECK(check_str("(app (lam (x bool) (ret x)) true)") == "(slio H L bool)");
    CHECK(check_str("(fst (pair true ()))") == "bool");
    CHECK(check_str("(inl true (bool + unit))") == "(bool + unit)");
    CHECK(check_str("(case (inl true (bool + unit)) (a (ret a)) (b (ret false)))") ==
          "(slio H L bool)");
    CHECK(rejected_rule("(app true false)") == "CG-APP-FUN");
    CHECK(rejected_rule("(app (lam (x (labeled H bool)) x) (label H ()))") == "CG-APP-ARG");
    CHECK(rejected_rule("y") == "CG-VAR-UNBOUND");
    CHECK(rejected_rule("(fst true)") == "CG-FST-PROD");
    CHECK(rejected_rule("(case true (a a) (b b))") == "CG-CASE-SUM");
    CHECK(rejected_rule("(if () true false)") == "CG-IF-BOOL");
    CHECK(rejected_rule("(inl () (bool + unit))") == "CG-INL-ANN");
}

TEST_CASE("branches join through the computation variances") {
    CHECK(check_str("(s : (labeled H bool)) (if true (ret true) (unlabel s))") ==
          "(slio H H bool)");
    CHECK(check_str("(r : (ref L bool)) (s : (labeled L bool))"
                    " (if false (assign r s) (ret ()))") == "(slio L L unit)");
    CHECK(rejected_rule("(r1 : (ref L bool)) (r2 : (ref H bool)) (if true (ret r1) (ret r2))") ==
          "CG-IF-JOIN");
    // argument subtyping applies when storing into branches of different labels
    CHECK(check_str("(s : ((labeled L bool) + (labeled H bool)))"
                    " (case s (a (unlabel a)) (b (unlabel b)))") == "(slio H H bool)");
}

TEST_CASE("pure evaluation suspends monadic work") {
    CHECK(pure_str("(ret true)") == "<computation>");
    CHECK(pure_str("(label H true)") == "(labeled true)");
    CHECK(pure_str("(fst (pair true ()))") == "true");
    CHECK(pure_str("(bind (ret true) (x (ret x)))") == "<computation>");
    CHECK(pure_str("(toLabeled (unlabel (label H false)))") == "<computation>");
    // no heap exists during pure evaluation, so nothing can have been written
    CHECK(pure_str("(new (label L true))") == "<computation>");
    CHECK(pure_str("(assign (lam (x bool) x) (label L true))") == "<computation>");
}

TEST_CASE("forcing executes the suspension") {
    CHECK(forced("(ret true)").v == "true");
    CHECK(forced("(ret true)").heap_size == 0);
    CHECK(forced("(bind (new (label L true)) (r (deref r)))").v == "(labeled true)");
    CHECK(forced("(bind (new (label L true)) (r (deref r)))").heap_size == 1);
    CHECK(forced("(toLabeled (unlabel (label H false)))").v == "(labeled false)");
    CHECK(forced("(unlabel (label H (pair true ())))").v == "(pair true ())");
    CHECK(forced("(bind (new (label L false)) (r (bind (assign r (label L true))"
                 " (u (deref r)))))").v == "(labeled true)");
}

TEST_CASE("forcing a non-computation is stuck") {
    CGHeap heap;
    long fuel = 100, steps = 0;
    CHECK_THROWS_AS(cg_force(heap, cg_vbool(true), fuel, steps), EvalStuck);
}

TEST_CASE("monad laws hold under forcing") {
    // left identity: bind (ret v) k  ==  k v
    {
        CGHeap h1, h2;
        CGRun a = cg_run_forced(h1, nullptr,
                                ex("(bind (ret (label L true)) (x (new x)))"));
        CGRun b = cg_run_forced(h2, nullptr, ex("(new (label L true))"));
        CHECK(cg_value_eq(a.v, b.v));
        CHECK(heaps_equal(h1, h2));
    }
    // right identity: bind m ret  ==  m
    {
        CGHeap h1, h2;
        CGRun a = cg_run_forced(h1, nullptr,
                                ex("(bind (new (label H false)) (x (ret x)))"));
        CGRun b = cg_run_forced(h2, nullptr, ex("(new (label H false))"));
        CHECK(cg_value_eq(a.v, b.v));
        CHECK(heaps_equal(h1, h2));
    }
    // associativity across a write/read pair
    {
        CGHeap h1, h2;
        CGRun a = cg_run_forced(
            h1, nullptr,
            ex("(bind (bind (new (label L true)) (r (assign r (label L false)))) (u (ret ())))"));
        CGRun b = cg_run_forced(
            h2, nullptr,
            ex("(bind (new (label L true)) (r (bind (assign r (label L false)) (u (ret ())))))"));
        CHECK(cg_value_eq(a.v, b.v));
        CHECK(heaps_equal(h1, h2));
    }
}

TEST_CASE("toLabeled is transparent up to wrapping") {
    CGHeap h1, h2;
    CGRun a = cg_run_forced(h1, nullptr,
                            ex("(toLabeled (bind (new (label L true)) (r (deref r))))"));
    CGRun b = cg_run_forced(h2, nullptr, ex("(bind (new (label L true)) (r (deref r)))"));
    REQUIRE(a.v->k == CGVal::Labeled);
    CHECK(cg_value_eq(a.v->v1, b.v));
    CHECK(heaps_equal(h1, h2));
}

TEST_CASE("self-reference through the heap runs out of fuel") {
    std::string knot =
        "(bind (new (label L (lam (d unit) (ret ()))))"
        " (r (bind (assign r (label L (lam (d unit)"
        "   (bind (deref r) (lv (bind (unlabel lv) (f (app f d))))))))"
        "  (u (bind (deref r) (lv (bind (unlabel lv) (f (app f ())))))))))";
    SourceFile f = parse_source("(cg (lattice 2pt) " + knot + ")");
    CHECK(cg_type_str(cg_typecheck(f.cg_ctx, f.lat, f.cg_body)) == "(slio L L unit)");
    CGHeap heap;
    CHECK_THROWS_AS(cg_run_forced(heap, nullptr, f.cg_body, 10000), EvalTimeout);
}

TEST_CASE("typechecking is deterministic") {
    for (const char* s : {
             "(toLabeled (unlabel (label H true)))",
             "(bind (new (label L true)) (r (deref r)))",
         }) {
        CHECK(check_str(s) == check_str(s));
    }
}

TEST_CASE("labels are erased at runtime") {
    // high- and low-labeled wrappings of the same payload are the same value
    CHECK(cg_value_eq(cg_run_pure(nullptr, ex("(label H true)")).v,
                      cg_run_pure(nullptr, ex("(label L true)")).v));
}

#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "core/search.hpp"
#include "core/surface.hpp"

using namespace ifc;

namespace {

LatticeP two() { return lattice_two_point(); }
Label L() { return two()->bot(); }
Label H() { return two()->top(); }

std::vector<std::string> fg_strs(FGSearch& s, const TypeSet& ts) {
    std::vector<std::string> out;
    for (int t : ts) out.push_back(fg_type_str(s.at(t)));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> cg_strs(CGSearch& s, const TypeSet& ts) {
    std::vector<std::string> out;
    for (int t : ts) out.push_back(cg_type_str(s.at(t)));
    std::sort(out.begin(), out.end());
    return out;
}

// What the checker and the search must always agree on, for one program.
struct Verdict {
    bool alg_ok = false;       // checker accepted
    std::string alg;           // its type
    bool nonempty = false;     // search found a derivation
    bool member = false;       // checker's type is among the derivable ones
    bool principal = false;    // and below every derivable one
    std::string least;         // least derivable type, if any
    size_t count = 0;
};

Verdict fg_verdict(const std::string& ctx_and_expr, Label pc) {
    SourceFile f = parse_source("(fg (lattice 2pt) " + ctx_and_expr + ")");
    Verdict v;
    FGTypeP alg;
    try {
        alg = fg_typecheck(f.fg_ctx, pc, f.fg_body);
        v.alg_ok = true;
        v.alg = fg_type_str(alg);
    } catch (const TypeError&) {
    }
    FGSearch s(f.lat);
    TypeSet ds = s.decl(f.fg_ctx, pc, f.fg_body);
    v.nonempty = !ds.empty();
    v.count = ds.size();
    if (v.alg_ok && v.nonempty) {
        v.member = set_contains(ds, s.id(alg));
        v.principal = true;
        for (int t : ds)
            if (!fg_subtype(alg, s.at(t))) v.principal = false;
    }
    int m = s.min_of(ds);
    if (m >= 0) v.least = fg_type_str(s.at(m));
    return v;
}

Verdict cg_verdict(const std::string& ctx_and_expr) {
    SourceFile f = parse_source("(cg (lattice 2pt) " + ctx_and_expr + ")");
    Verdict v;
    CGTypeP alg;
    try {
        alg = cg_typecheck(f.cg_ctx, f.lat, f.cg_body);
        v.alg_ok = true;
        v.alg = cg_type_str(alg);
    } catch (const TypeError&) {
    }
    CGSearch s(f.lat);
    TypeSet ds = s.decl(f.cg_ctx, f.cg_body);
    v.nonempty = !ds.empty();
    v.count = ds.size();
    if (v.alg_ok && v.nonempty) {
        v.member = set_contains(ds, s.id(alg));
        v.principal = true;
        for (int t : ds)
            if (!cg_subtype(alg, s.at(t))) v.principal = false;
    }
    int m = s.min_of(ds);
    if (m >= 0) v.least = cg_type_str(s.at(m));
    return v;
}

// the full accept-side agreement: checker succeeds, its type is derivable
// and least
void expect_agreement(const Verdict& v, const std::string& type) {
    CHECK(v.alg_ok);
    CHECK(v.alg == type);
    CHECK(v.nonempty);
    CHECK(v.member);
    CHECK(v.principal);
    CHECK(v.least == type);
}

void expect_untypable(const Verdict& v) {
    CHECK_FALSE(v.alg_ok);
    CHECK_FALSE(v.nonempty);
}

} // namespace

TEST_CASE("closing a type enumerates exactly its supertypes") {
    FGSearch s(two());

    CHECK(fg_strs(s, s.close(s.id(parse_fg_type("bool@L", two())))) ==
          std::vector<std::string>{"bool@H", "bool@L"});
    CHECK(fg_strs(s, s.close(s.id(parse_fg_type("bool@H", two())))) ==
          std::vector<std::string>{"bool@H"});

    // the cell of a reference cannot move, only the outer label
    CHECK(fg_strs(s, s.close(s.id(parse_fg_type("(ref bool@L)@L", two())))) ==
          std::vector<std::string>{"(ref bool@L)@H", "(ref bool@L)@L"});

    // functions: argument and latent go down, result and outer label go up
    CHECK(fg_strs(s, s.close(s.id(parse_fg_type("(bool@H ->[L] bool@H)@L", two())))) ==
          std::vector<std::string>{"(bool@H ->[L] bool@H)@H", "(bool@H ->[L] bool@H)@L",
                                   "(bool@L ->[L] bool@H)@H", "(bool@L ->[L] bool@H)@L"});
}

TEST_CASE("membership in a closure coincides with the subtype order") {
    FGSearch s(two());
    // every same-skeleton pair: fun over base types (16 x 16), products,
    // references
    std::vector<std::string> funs;
    for (const char* a : {"bool@L", "bool@H"})
        for (const char* le : {"L", "H"})
            for (const char* b : {"unit@L", "unit@H"})
                for (const char* l : {"L", "H"})
                    funs.push_back("(" + std::string(a) + " ->[" + le + "] " + b + ")@" + l);
    for (const auto& x : funs)
        for (const auto& y : funs) {
            FGTypeP a = parse_fg_type(x, two()), b = parse_fg_type(y, two());
            CHECK(fg_subtype(a, b) == set_contains(s.close(s.id(a)), s.id(b)));
        }

    CGSearch c(two());
    std::vector<std::string> slios;
    for (const char* p : {"L", "H"})
        for (const char* t : {"L", "H"})
            for (const char* pay : {"bool", "(labeled L bool)", "(labeled H bool)"})
                slios.push_back("(slio " + std::string(p) + " " + t + " " + pay + ")");
    for (const auto& x : slios)
        for (const auto& y : slios) {
            CGTypeP a = parse_cg_type(x, two()), b = parse_cg_type(y, two());
            CHECK(cg_subtype(a, b) == set_contains(c.close(c.id(a)), c.id(b)));
        }
}

TEST_CASE("search is bounded: oversized label spaces are refused") {
    LatticeP ps = lattice_powerset({"a", "b", "c"});
    FGSearch s(ps);
    FGTypeP t = parse_fg_type(
        "(((bool@bot ->[bot] bool@bot)@bot ->[bot] (bool@bot ->[bot] bool@bot)@bot)@bot"
        " ->[bot] bool@bot)@bot",
        ps);
    CHECK_THROWS_AS((void)s.close(s.id(t)), IfcError);
}

TEST_CASE("derivable sets for literals and variables") {
    auto v = fg_verdict("true", L());
    expect_agreement(v, "bool@L");
    CHECK(v.count == 2);

    v = fg_verdict("(x : bool@H) x", L());
    expect_agreement(v, "bool@H");
    CHECK(v.count == 1);

    // pc does not restrict pure reads
    expect_agreement(fg_verdict("true", H()), "bool@L");
}

TEST_CASE("derivable sets for functions and application") {
    auto v = fg_verdict("(lam (x bool@H) [L] x)", L());
    expect_agreement(v, "(bool@H ->[L] bool@H)@L");
    CHECK(v.count == 4); // argument down, outer label up

    expect_agreement(fg_verdict("(app (lam (x bool@L) [top] x) true)", L()), "bool@L");
    expect_agreement(fg_verdict("(app (lam (x bool@L) [top] x) true)", H()), "bool@L");

    // a low latent label forbids calling from a high context
    expect_untypable(fg_verdict("(app (lam (x bool@L) [L] x) true)", H()));

    // argument outside the domain
    expect_untypable(fg_verdict("(x : bool@H) (app (lam (y bool@L) [top] y) x)", L()));
}

TEST_CASE("derivable sets track the raise discipline of eliminations") {
    // high scrutinee: both branches join at unit@H, never lower
    auto v = fg_verdict("(x : bool@H) (r : (ref unit@L)@L) (if x (deref r) ())", L());
    expect_agreement(v, "unit@H");
    CHECK(v.count == 1);

    expect_agreement(fg_verdict("(p : (bool@L * bool@H)@H) (fst p)", L()), "bool@H");
    expect_agreement(fg_verdict("(r : (ref bool@L)@H) (deref r)", L()), "bool@H");
}

TEST_CASE("derivable sets for writes respect the program counter") {
    expect_agreement(fg_verdict("(r : (ref bool@L)@L) (assign r true)", L()), "unit@L");
    CHECK(fg_verdict("(r : (ref bool@L)@L) (assign r true)", L()).count == 2);

    // no derivation writes a low cell under a high pc
    expect_untypable(fg_verdict("(r : (ref bool@L)@L) (assign r true)", H()));
    expect_untypable(
        fg_verdict("(x : bool@H) (r : (ref bool@L)@L) (if x (assign r true) ())", L()));
    expect_untypable(fg_verdict("(r : (ref bool@L)@L) (x : bool@H) (assign r x)", L()));

    // the high cell absorbs both the pc and the value
    expect_agreement(
        fg_verdict("(x : bool@H) (r : (ref bool@H)@L) (if x (assign r true) ())", L()),
        "unit@H");
}

TEST_CASE("allocation without an annotation uses the least derivable type") {
    auto v = fg_verdict("(new true)", L());
    expect_agreement(v, "(ref bool@L)@L");
    CHECK(v.count == 2); // only the outer label moves

    // under a high pc the least cell type is too low, and no other cell is
    // allowed to replace it
    expect_untypable(fg_verdict("(new true)", H()));
    expect_agreement(fg_verdict("(new true bool@H)", H()), "(ref bool@H)@L");
}

TEST_CASE("derivable sets for sums and booleans") {
    expect_agreement(fg_verdict("(inl true (bool@L + unit@H))", L()), "(bool@L + unit@H)@L");
    expect_untypable(fg_verdict("(x : bool@H) (inl x (bool@L + unit@H))", L()));

    auto v = fg_verdict(
        "(s : (bool@L + unit@L)@H) (case s (x true) (y false))", L());
    expect_agreement(v, "bool@H");

    expect_agreement(fg_verdict("(x : bool@H) (and x true)", L()), "bool@H");
    expect_agreement(fg_verdict("(not (or true false))", L()), "bool@L");
}

TEST_CASE("coarse-grained closures") {
    CGSearch s(two());
    CHECK(cg_strs(s, s.close(s.id(parse_cg_type("(labeled L bool)", two())))) ==
          std::vector<std::string>{"(labeled H bool)", "(labeled L bool)"});
    CHECK(cg_strs(s, s.close(s.id(parse_cg_type("(slio H L bool)", two())))) ==
          std::vector<std::string>{"(slio H H bool)", "(slio H L bool)", "(slio L H bool)",
                                   "(slio L L bool)"});
    // references are rigid through and through
    CHECK(cg_strs(s, s.close(s.id(parse_cg_type("(ref L (labeled L bool))", two())))) ==
          std::vector<std::string>{"(ref L (labeled L bool))"});
}

TEST_CASE("derivable sets for the labeled fragment") {
    auto v = cg_verdict("(ret true)");
    expect_agreement(v, "(slio H L bool)");
    CHECK(v.count == 4);

    v = cg_verdict("(unlabel (label H true))");
    expect_agreement(v, "(slio H H bool)");
    CHECK(v.count == 2); // taint is pinned high, only the pc moves

    expect_agreement(cg_verdict("(toLabeled (unlabel (label H true)))"),
                     "(slio H L (labeled H bool))");
    expect_agreement(cg_verdict("(label L (label H true))"), "(labeled L (labeled H bool))");
}

TEST_CASE("derivable sets for bind") {
    expect_agreement(cg_verdict("(bind (ret true) (x (ret x)))"), "(slio H L bool)");

    // unlabeling a high value taints everything that follows
    expect_agreement(cg_verdict("(bind (unlabel (label H true)) (x (ret x)))"),
                     "(slio H H bool)");

    // a tainted computation may not write low afterwards
    expect_untypable(cg_verdict(
        "(r : (ref L bool)) (bind (unlabel (label H true)) (x (assign r (label L x))))"));

    // but ending at a high cell is fine
    expect_agreement(cg_verdict("(r : (ref H bool)) (bind (unlabel (label H true)) (x (assign "
                                "r (label H x))))"),
                     "(slio H H unit)");
}

TEST_CASE("derivable sets for the coarse-grained store") {
    expect_agreement(cg_verdict("(new (label L true))"), "(slio L L (ref L bool))");
    expect_agreement(cg_verdict("(new (label L true) (labeled H bool))"),
                     "(slio H L (ref H bool))");
    expect_agreement(cg_verdict("(r : (ref H bool)) (deref r)"),
                     "(slio H L (labeled H bool))");
    expect_agreement(cg_verdict("(r : (ref H bool)) (assign r (label L true))"),
                     "(slio H L unit)");
    expect_untypable(cg_verdict("(r : (ref L bool)) (assign r (label H true))"));
    // allocation needs a labeled value
    expect_untypable(cg_verdict("(new true)"));
}

TEST_CASE("checker and search agree across a mixed program suite") {
    // fine-grained, checked under both program counters
    std::vector<std::string> fg = {
        "true",
        "()",
        "(pair true ())",
        "(lam (x bool@L) [H] (pair x x))",
        "(x : bool@H) (if x true false)",
        "(x : bool@H) (snd (pair x true))",
        "(f : (bool@L ->[H] bool@L)@L) (app f true)",
        "(f : (bool@L ->[L] bool@L)@H) (app f true)",
        "(r : (ref bool@H)@L) (assign r true)",
        "(x : bool@H) (new x bool@H)",
        "(x : bool@H) (new x)",
        "(s : (bool@H + unit@L)@L) (case s (x x) (y true))",
        "(s : (bool@H + unit@L)@L) (case s (x (new x)) (y (new true)))",
        "(x : bool@L) (and (not x) (or x false))",
        "(r : (ref (bool@L * bool@L)@L)@L) (assign r (pair true false))",
        "(x : bool@H) (inl x (bool@H + (ref bool@L)@L))",
        "(app (lam (x bool@H) [L] (new x bool@H)) true)",
        "(x : bool@H) (app (lam (d unit@L) [H] x) ())",
    };
    for (const auto& p : fg)
        for (Label pc : {L(), H()}) {
            CAPTURE(p);
            CAPTURE(two()->print(pc));
            Verdict v = fg_verdict(p, pc);
            CHECK(v.alg_ok == v.nonempty);
            if (v.alg_ok) {
                CHECK(v.member);
                CHECK(v.principal);
                CHECK(v.least == v.alg);
            }
        }

    std::vector<std::string> cg = {
        "true",
        "(pair (label H true) (label L ()))",
        "(lam (x (labeled H bool)) (unlabel x))",
        "(x : (labeled H bool)) (bind (unlabel x) (y (ret (if y false true))))",
        "(x : (labeled H bool)) (toLabeled (bind (unlabel x) (y (ret (if y false true)))))",
        "(r : (ref L bool)) (bind (deref r) (v (bind (unlabel v) (b (assign r (label L b))))))",
        "(r : (ref L bool)) (x : (labeled H bool)) "
        "(bind (unlabel x) (b (bind (assign r (label L true)) (d (ret b)))))",
        "(x : (labeled H bool)) (bind (unlabel x) (b (new (label H b))))",
        "(x : (labeled H bool)) (bind (unlabel x) (b (new (label L b))))",
        "(s : ((labeled H bool) + unit)) (case s (x (unlabel x)) (y (ret true)))",
        "(f : (bool -> (slio H L bool))) (bind (app f true) (x (ret x)))",
        "(x : (labeled L bool)) (bind (unlabel x) (b (if b (ret (label H b)) (ret (label H "
        "false)))))",
    };
    for (const auto& p : cg) {
        CAPTURE(p);
        Verdict v = cg_verdict(p);
        CHECK(v.alg_ok == v.nonempty);
        if (v.alg_ok) {
            CHECK(v.member);
            CHECK(v.principal);
            CHECK(v.least == v.alg);
        }
    }
}

#include "doctest.h"

#include "core/lattice.hpp"

using namespace ifc;

namespace {

// Exhaustive law check for one instance. Small carriers only (<= 64 elements).
void check_laws(const LatticeP& lat) {
    auto xs = lat->all();
    REQUIRE(!xs.empty());
    Label bot = lat->bot(), top = lat->top();

    for (auto a : xs) {
        CHECK(lat->leq(bot, a));
        CHECK(lat->leq(a, top));
        CHECK(lat->leq(a, a));
        CHECK(lat->join(a, a) == a);
        CHECK(lat->meet(a, a) == a);
        CHECK(lat->join(bot, a) == a);
        CHECK(lat->meet(top, a) == a);
    }
    for (auto a : xs)
        for (auto b : xs) {
            CHECK(lat->join(a, b) == lat->join(b, a));
            CHECK(lat->meet(a, b) == lat->meet(b, a));
            // absorption
            CHECK(lat->join(a, lat->meet(a, b)) == a);
            CHECK(lat->meet(a, lat->join(a, b)) == a);
            // leq(a,b) <=> join(a,b)=b <=> meet(a,b)=a
            bool le = lat->leq(a, b);
            CHECK(le == (lat->join(a, b) == b));
            CHECK(le == (lat->meet(a, b) == a));
            // antisymmetry
            if (le && lat->leq(b, a)) CHECK(a == b);
        }
    for (auto a : xs)
        for (auto b : xs)
            for (auto c : xs) {
                CHECK(lat->join(lat->join(a, b), c) == lat->join(a, lat->join(b, c)));
                CHECK(lat->meet(lat->meet(a, b), c) == lat->meet(a, lat->meet(b, c)));
                // transitivity
                if (lat->leq(a, b) && lat->leq(b, c)) CHECK(lat->leq(a, c));
                // join is the least upper bound, meet the greatest lower
                if (lat->leq(a, c) && lat->leq(b, c)) CHECK(lat->leq(lat->join(a, b), c));
                if (lat->leq(c, a) && lat->leq(c, b)) CHECK(lat->leq(c, lat->meet(a, b)));
            }
    // print/parse round-trip over the whole carrier
    for (auto a : xs) CHECK(lat->parse(lat->print(a)) == a);
}

} // namespace

TEST_CASE("two-point lattice order and operations") {
    auto lat = lattice_two_point();
    Label L = lat->parse("L"), H = lat->parse("H");

    CHECK(lat->leq(L, H));
    CHECK_FALSE(lat->leq(H, L));
    CHECK(lat->join(L, H) == H);
    CHECK(lat->meet(L, H) == L);
    CHECK(lat->bot() == L);
    CHECK(lat->top() == H);
    CHECK(lat->parse("bot") == L);
    CHECK(lat->parse("top") == H);
    CHECK(lat->print(L) == "L");
    CHECK(lat->print(H) == "H");
}

TEST_CASE("powerset lattice is the subset order") {
    auto lat = lattice_powerset({"a", "b"});
    Label a = lat->parse("{a}"), b = lat->parse("{b}"), ab = lat->parse("{a,b}");

    CHECK(lat->leq(a, ab));
    CHECK_FALSE(lat->leq(a, b));
    CHECK_FALSE(lat->leq(b, a));
    CHECK(lat->join(a, b) == ab);
    CHECK(lat->meet(ab, b) == b);
    CHECK(lat->print(ab) == "{a,b}");
    CHECK(lat->print(lat->bot()) == "bot");
    CHECK(lat->parse("{}") == lat->bot());
}

TEST_CASE("lattice laws hold exhaustively on all shipped instances") {
    check_laws(lattice_two_point());
    check_laws(lattice_powerset({"a"}));
    check_laws(lattice_powerset({"a", "b"}));
    check_laws(lattice_powerset({"x", "y", "z"}));
    check_laws(lattice_product(lattice_two_point(), lattice_powerset({"a", "b"})));
    check_laws(lattice_product(lattice_two_point(), lattice_two_point()));
}

TEST_CASE("product labels print and parse componentwise") {
    auto lat = lattice_product(lattice_two_point(), lattice_powerset({"a", "b"}));
    Label l = lat->parse("(H,{a})");
    CHECK(lat->print(l) == "(H,{a})");
    CHECK(lat->leq(l, lat->top()));
    CHECK(lat->join(l, lat->parse("(L,{b})")) == lat->parse("(H,top)"));
    CHECK(lat->meet(l, lat->parse("(L,{b})")) == lat->parse("(L,bot)"));
}

TEST_CASE("cross-instance operations are rejected") {
    auto two = lattice_two_point();
    auto ps = lattice_powerset({"a"});
    CHECK_THROWS_AS((void)two->leq(two->bot(), ps->bot()), LatticeError);
    CHECK_THROWS_AS((void)two->join(ps->top(), two->top()), LatticeError);
}

TEST_CASE("instances are interned") {
    CHECK(lattice_two_point().get() == lattice_two_point().get());
    CHECK(lattice_powerset({"a", "b"}).get() == lattice_powerset({"b", "a"}).get());
    auto p1 = lattice_product(lattice_two_point(), lattice_two_point());
    auto p2 = lattice_product(lattice_two_point(), lattice_two_point());
    CHECK(p1.get() == p2.get());
}

TEST_CASE("lattice declarations parse to interned instances") {
    CHECK(lattice_from_decl("2pt").get() == lattice_two_point().get());
    CHECK(lattice_from_decl("(powerset a b)").get() == lattice_powerset({"a", "b"}).get());
    auto p = lattice_from_decl("(product 2pt (powerset a))");
    CHECK(p->name() == "(product 2pt (powerset a))");
    CHECK(lattice_from_decl(p->name()).get() == p.get());
    CHECK_THROWS_AS(lattice_from_decl("3pt"), LatticeError);
    CHECK_THROWS_AS(lattice_from_decl("(powerset a b c d)"), LatticeError);
}

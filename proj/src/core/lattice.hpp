#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "diag.hpp"

namespace ifc {

class Lattice;
using LatticeP = std::shared_ptr<const Lattice>;

// A label is an element of one specific lattice instance. Instances are
// interned, so pointer equality decides whether two labels are comparable.
struct Label {
    const Lattice* lat = nullptr;
    uint64_t bits = 0;

    bool operator==(const Label& o) const { return lat == o.lat && bits == o.bits; }
    bool operator!=(const Label& o) const { return !(*this == o); }
};

enum class LatKind { TwoPoint, Powerset, Product };

class Lattice {
public:
    virtual ~Lattice() = default;

    LatKind kind() const { return kind_; }
    // Canonical descriptor, also the surface syntax of the lattice declaration.
    const std::string& name() const { return name_; }

    bool leq(Label a, Label b) const;
    Label join(Label a, Label b) const;
    Label meet(Label a, Label b) const;
    Label bot() const { return mk(bot_); }
    Label top() const { return mk(top_); }

    // All elements, for exhaustive law checks and closure enumeration.
    std::vector<Label> all() const;

    std::string print(Label l) const;

    // Parses one label written in the surface syntax (e.g. "H", "bot",
    // "{a,b}", "(L,{a})"). Throws LatticeError on anything else.
    Label parse(const std::string& text) const;

protected:
    virtual bool leq_bits(uint64_t a, uint64_t b) const = 0;
    virtual uint64_t join_bits(uint64_t a, uint64_t b) const = 0;
    virtual uint64_t meet_bits(uint64_t a, uint64_t b) const = 0;
    virtual void all_bits(std::vector<uint64_t>& out) const = 0;
    virtual std::string print_bits(uint64_t b) const = 0;
    virtual bool parse_body(const std::string& text, uint64_t& out) const = 0;

    Label mk(uint64_t b) const { return Label{this, b}; }
    void check_instance(Label a, Label b) const;

    LatKind kind_;
    std::string name_;
    uint64_t bot_ = 0, top_ = 0;
};

// Interned constructors. Same arguments always return the same object.
LatticeP lattice_two_point();
LatticeP lattice_powerset(const std::vector<std::string>& atoms); // 1..3 atoms
LatticeP lattice_product(LatticeP a, LatticeP b);

// Parses a lattice declaration body: "2pt", "(powerset a b)",
// "(product 2pt 2pt)". Used by the surface parser and --lattice flag.
LatticeP lattice_from_decl(const std::string& decl);

} // namespace ifc

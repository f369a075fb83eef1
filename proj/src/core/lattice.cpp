#include "lattice.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace ifc {

void Lattice::check_instance(Label a, Label b) const {
    if (a.lat != this || b.lat != this)
        throw LatticeError("labels from different lattice instances (" +
                           (a.lat ? a.lat->name() : "<null>") + " vs " +
                           (b.lat ? b.lat->name() : "<null>") + " vs " + name() + ")");
}

bool Lattice::leq(Label a, Label b) const {
    check_instance(a, b);
    return leq_bits(a.bits, b.bits);
}

Label Lattice::join(Label a, Label b) const {
    check_instance(a, b);
    return mk(join_bits(a.bits, b.bits));
}

Label Lattice::meet(Label a, Label b) const {
    check_instance(a, b);
    return mk(meet_bits(a.bits, b.bits));
}

std::vector<Label> Lattice::all() const {
    std::vector<uint64_t> bs;
    all_bits(bs);
    std::vector<Label> out;
    out.reserve(bs.size());
    for (auto b : bs) out.push_back(mk(b));
    return out;
}

std::string Lattice::print(Label l) const {
    if (l.lat != this) throw LatticeError("printing label of a different lattice");
    return print_bits(l.bits);
}

Label Lattice::parse(const std::string& text) const {
    if (text == "bot") return bot();
    if (text == "top") return top();
    uint64_t b;
    if (parse_body(text, b)) return mk(b);
    throw LatticeError("bad label '" + text + "' for lattice " + name());
}

// ---- two-point {L, H} ----

namespace {

class TwoPointLattice final : public Lattice {
public:
    TwoPointLattice() {
        kind_ = LatKind::TwoPoint;
        name_ = "2pt";
        bot_ = 0;
        top_ = 1;
    }

protected:
    bool leq_bits(uint64_t a, uint64_t b) const override { return a <= b; }
    uint64_t join_bits(uint64_t a, uint64_t b) const override { return a | b; }
    uint64_t meet_bits(uint64_t a, uint64_t b) const override { return a & b; }
    void all_bits(std::vector<uint64_t>& out) const override { out = {0, 1}; }
    std::string print_bits(uint64_t b) const override { return b ? "H" : "L"; }
    bool parse_body(const std::string& t, uint64_t& out) const override {
        if (t == "L") { out = 0; return true; }
        if (t == "H") { out = 1; return true; }
        return false;
    }
};

// ---- powerset over 1..3 named atoms, subset order ----

class PowersetLattice final : public Lattice {
public:
    explicit PowersetLattice(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
        if (atoms_.empty() || atoms_.size() > 3)
            throw LatticeError("powerset lattice needs 1..3 atoms");
        std::sort(atoms_.begin(), atoms_.end());
        for (size_t i = 1; i < atoms_.size(); i++)
            if (atoms_[i] == atoms_[i - 1])
                throw LatticeError("duplicate powerset atom '" + atoms_[i] + "'");
        kind_ = LatKind::Powerset;
        std::string n = "(powerset";
        for (auto& a : atoms_) n += " " + a;
        name_ = n + ")";
        bot_ = 0;
        top_ = (1u << atoms_.size()) - 1;
    }

protected:
    bool leq_bits(uint64_t a, uint64_t b) const override { return (a & ~b) == 0; }
    uint64_t join_bits(uint64_t a, uint64_t b) const override { return a | b; }
    uint64_t meet_bits(uint64_t a, uint64_t b) const override { return a & b; }
    void all_bits(std::vector<uint64_t>& out) const override {
        for (uint64_t b = 0; b <= top_; b++) out.push_back(b);
    }
    std::string print_bits(uint64_t b) const override {
        if (b == 0) return "bot";
        std::string s = "{";
        bool first = true;
        for (size_t i = 0; i < atoms_.size(); i++)
            if (b & (1u << i)) {
                if (!first) s += ",";
                s += atoms_[i];
                first = false;
            }
        return s + "}";
    }
    bool parse_body(const std::string& t, uint64_t& out) const override {
        if (t.size() < 2 || t.front() != '{' || t.back() != '}') return false;
        out = 0;
        std::string inner = t.substr(1, t.size() - 2);
        if (inner.empty()) return true; // "{}" is bot
        std::stringstream ss(inner);
        std::string atom;
        while (std::getline(ss, atom, ',')) {
            auto it = std::find(atoms_.begin(), atoms_.end(), atom);
            if (it == atoms_.end()) return false;
            out |= 1u << (it - atoms_.begin());
        }
        return true;
    }

private:
    std::vector<std::string> atoms_;
};

// ---- binary product, componentwise order ----
// Component labels are packed into one word: low 32 bits left, high 32 right.

class ProductLattice final : public Lattice {
public:
    ProductLattice(LatticeP a, LatticeP b) : a_(std::move(a)), b_(std::move(b)) {
        kind_ = LatKind::Product;
        name_ = "(product " + a_->name() + " " + b_->name() + ")";
        bot_ = pack(a_->bot().bits, b_->bot().bits);
        top_ = pack(a_->top().bits, b_->top().bits);
    }

protected:
    static uint64_t pack(uint64_t l, uint64_t r) { return (l & 0xffffffffu) | (r << 32); }
    static uint64_t left(uint64_t b) { return b & 0xffffffffu; }
    static uint64_t right(uint64_t b) { return b >> 32; }

    Label la(uint64_t v) const { return Label{a_.get(), v}; }
    Label lb(uint64_t v) const { return Label{b_.get(), v}; }

    bool leq_bits(uint64_t x, uint64_t y) const override {
        return a_->leq(la(left(x)), la(left(y))) && b_->leq(lb(right(x)), lb(right(y)));
    }
    uint64_t join_bits(uint64_t x, uint64_t y) const override {
        return pack(a_->join(la(left(x)), la(left(y))).bits,
                    b_->join(lb(right(x)), lb(right(y))).bits);
    }
    uint64_t meet_bits(uint64_t x, uint64_t y) const override {
        return pack(a_->meet(la(left(x)), la(left(y))).bits,
                    b_->meet(lb(right(x)), lb(right(y))).bits);
    }
    void all_bits(std::vector<uint64_t>& out) const override {
        for (Label l : a_->all())
            for (Label r : b_->all()) out.push_back(pack(l.bits, r.bits));
    }
    std::string print_bits(uint64_t x) const override {
        return "(" + a_->print(la(left(x))) + "," + b_->print(lb(right(x))) + ")";
    }
    bool parse_body(const std::string& t, uint64_t& out) const override {
        if (t.size() < 3 || t.front() != '(' || t.back() != ')') return false;
        std::string inner = t.substr(1, t.size() - 2);
        // split at the comma that sits at depth 0
        int depth = 0;
        size_t cut = std::string::npos;
        for (size_t i = 0; i < inner.size(); i++) {
            char c = inner[i];
            if (c == '(' || c == '{') depth++;
            else if (c == ')' || c == '}') depth--;
            else if (c == ',' && depth == 0) { cut = i; break; }
        }
        if (cut == std::string::npos) return false;
        try {
            Label l = a_->parse(inner.substr(0, cut));
            Label r = b_->parse(inner.substr(cut + 1));
            out = pack(l.bits, r.bits);
            return true;
        } catch (const LatticeError&) {
            return false;
        }
    }

private:
    LatticeP a_, b_;
};

std::mutex g_intern_mu;
std::map<std::string, LatticeP> g_interned;

LatticeP intern(LatticeP l) {
    std::lock_guard<std::mutex> g(g_intern_mu);
    auto [it, fresh] = g_interned.emplace(l->name(), l);
    return it->second;
}

} // namespace

LatticeP lattice_two_point() {
    static LatticeP inst = intern(std::make_shared<TwoPointLattice>());
    return inst;
}

LatticeP lattice_powerset(const std::vector<std::string>& atoms) {
    return intern(std::make_shared<PowersetLattice>(atoms));
}

LatticeP lattice_product(LatticeP a, LatticeP b) {
    return intern(std::make_shared<ProductLattice>(std::move(a), std::move(b)));
}

// decl := "2pt" | "(powerset atom+)" | "(product decl decl)"
namespace {

struct DeclParser {
    const std::string& s;
    size_t i = 0;

    explicit DeclParser(const std::string& str) : s(str) {}

    void skip_ws() { while (i < s.size() && isspace((unsigned char)s[i])) i++; }

    std::string word() {
        skip_ws();
        size_t start = i;
        while (i < s.size() && !isspace((unsigned char)s[i]) && s[i] != '(' && s[i] != ')') i++;
        if (start == i) throw LatticeError("bad lattice declaration '" + s + "'");
        return s.substr(start, i - start);
    }

    LatticeP decl() {
        skip_ws();
        if (i < s.size() && s[i] == '(') {
            i++;
            std::string head = word();
            LatticeP out;
            if (head == "powerset") {
                std::vector<std::string> atoms;
                skip_ws();
                while (i < s.size() && s[i] != ')') {
                    atoms.push_back(word());
                    skip_ws();
                }
                out = lattice_powerset(atoms);
            } else if (head == "product") {
                LatticeP a = decl();
                LatticeP b = decl();
                out = lattice_product(a, b);
            } else {
                throw LatticeError("unknown lattice kind '" + head + "'");
            }
            skip_ws();
            if (i >= s.size() || s[i] != ')')
                throw LatticeError("unclosed lattice declaration '" + s + "'");
            i++;
            return out;
        }
        std::string head = word();
        if (head == "2pt") return lattice_two_point();
        throw LatticeError("unknown lattice '" + head + "'");
    }
};

} // namespace

LatticeP lattice_from_decl(const std::string& decl) {
    DeclParser p(decl);
    LatticeP l = p.decl();
    p.skip_ws();
    if (p.i != decl.size())
        throw LatticeError("trailing input in lattice declaration '" + decl + "'");
    return l;
}

} // namespace ifc

#include "surface.hpp"

#include <cctype>
#include <sstream>

namespace ifc {

// ---- lexer ----

namespace {

enum class Tok { LP, RP, LBRK, RBRK, LBRACE, RBRACE, Comma, At, Colon, Sym, End };

struct Token {
    Tok k;
    std::string text;
    SrcPos pos;
};

bool ident_char(char c) {
    return std::isalnum((unsigned char)c) || c == '_' || c == '\'' || c == '%';
}

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tok k, std::string t, SrcPos p) { out.push_back({k, std::move(t), p}); };
    while (i < s.size()) {
        char c = s[i];
        SrcPos pos{line, col};
        if (c == '\n') {
            line++;
            col = 1;
            i++;
            continue;
        }
        if (std::isspace((unsigned char)c)) {
            i++;
            col++;
            continue;
        }
        if (c == ';') {
            while (i < s.size() && s[i] != '\n') i++;
            continue;
        }
        auto single = [&](Tok k) {
            push(k, std::string(1, c), pos);
            i++;
            col++;
        };
        switch (c) {
            case '(': single(Tok::LP); continue;
            case ')': single(Tok::RP); continue;
            case '[': single(Tok::LBRK); continue;
            case ']': single(Tok::RBRK); continue;
            case '{': single(Tok::LBRACE); continue;
            case '}': single(Tok::RBRACE); continue;
            case ',': single(Tok::Comma); continue;
            case '@': single(Tok::At); continue;
            case ':': single(Tok::Colon); continue;
            case '*': push(Tok::Sym, "*", pos); i++; col++; continue;
            case '+': push(Tok::Sym, "+", pos); i++; col++; continue;
            case '-':
                if (i + 1 < s.size() && s[i + 1] == '>') {
                    push(Tok::Sym, "->", pos);
                    i += 2;
                    col += 2;
                    continue;
                }
                throw ParseError(pos, "stray '-'");
            default: break;
        }
        if (ident_char(c)) {
            size_t start = i;
            while (i < s.size() && ident_char(s[i])) {
                i++;
                col++;
            }
            push(Tok::Sym, s.substr(start, i - start), pos);
            continue;
        }
        throw ParseError(pos, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

// ---- parser ----

const char* tok_name(Tok k) {
    switch (k) {
        case Tok::LP: return "'('";
        case Tok::RP: return "')'";
        case Tok::LBRK: return "'['";
        case Tok::RBRK: return "']'";
        case Tok::LBRACE: return "'{'";
        case Tok::RBRACE: return "'}'";
        case Tok::Comma: return "','";
        case Tok::At: return "'@'";
        case Tok::Colon: return "':'";
        case Tok::Sym: return "symbol";
        case Tok::End: return "end of input";
    }
    return "?";
}

bool fg_keyword(const std::string& s) {
    static const char* kws[] = {"lam", "app",  "pair",  "fst",    "snd", "inl",
                                "inr", "case", "if",    "new",    "deref", "assign",
                                "and", "or",   "not",   "true",   "false", "bool",
                                "unit", "ref", "lattice", "fg",   "cg"};
    for (auto k : kws)
        if (s == k) return true;
    return false;
}

bool cg_keyword(const std::string& s) {
    static const char* kws[] = {"lam",   "app",     "pair",      "fst",  "snd",   "inl",
                                "inr",   "case",    "if",        "new",  "deref", "assign",
                                "label", "unlabel", "toLabeled", "ret",  "bind",  "true",
                                "false", "bool",    "unit",      "ref",  "labeled", "slio",
                                "lattice", "fg",    "cg"};
    for (auto k : kws)
        if (s == k) return true;
    return false;
}

struct Parser {
    std::vector<Token> ts;
    size_t i = 0;
    LatticeP lat;

    const Token& peek(size_t ahead = 0) const {
        size_t j = i + ahead;
        return j < ts.size() ? ts[j] : ts.back();
    }
    Token next() {
        Token t = peek();
        if (t.k != Tok::End) i++;
        return t;
    }
    Token expect(Tok k, const char* what) {
        Token t = next();
        if (t.k != k)
            throw ParseError(t.pos, std::string("expected ") + what + ", found " +
                                        (t.k == Tok::Sym ? "'" + t.text + "'" : tok_name(t.k)));
        return t;
    }
    std::string expect_sym(const char* what) { return expect(Tok::Sym, what).text; }

    // Reassembles the textual form of a label so the lattice can parse it.
    std::string label_text() {
        Token t = peek();
        if (t.k == Tok::Sym) {
            next();
            return t.text;
        }
        if (t.k == Tok::LBRACE) {
            next();
            std::string s = "{";
            bool first = true;
            while (peek().k == Tok::Sym) {
                if (!first) s += ",";
                s += next().text;
                first = false;
                if (peek().k == Tok::Comma) next();
            }
            expect(Tok::RBRACE, "'}'");
            return s + "}";
        }
        if (t.k == Tok::LP) {
            next();
            std::string l = label_text();
            expect(Tok::Comma, "','");
            std::string r = label_text();
            expect(Tok::RP, "')'");
            return "(" + l + "," + r + ")";
        }
        throw ParseError(t.pos, "expected a label");
    }

    Label label() {
        Token t = peek();
        try {
            return lat->parse(label_text());
        } catch (const LatticeError& e) {
            throw ParseError(t.pos, e.what());
        }
    }

    // ---- types ----

    FGTypeP fg_type() {
        Token t = peek();
        FGTy k;
        FGTypeP a, b;
        Label latent{};
        if (t.k == Tok::Sym) {
            next();
            if (t.text == "bool") k = FGTy::Bool;
            else if (t.text == "unit") k = FGTy::Unit;
            else throw ParseError(t.pos, "expected a type, found '" + t.text + "'");
        } else if (t.k == Tok::LP) {
            next();
            if (peek().k == Tok::Sym && peek().text == "ref") {
                next();
                a = fg_type();
                expect(Tok::RP, "')'");
                k = FGTy::Ref;
            } else {
                a = fg_type();
                std::string op = expect_sym("'->', '*' or '+'");
                if (op == "->") {
                    expect(Tok::LBRK, "'['");
                    latent = label();
                    expect(Tok::RBRK, "']'");
                    b = fg_type();
                    k = FGTy::Fun;
                } else if (op == "*") {
                    b = fg_type();
                    k = FGTy::Prod;
                } else if (op == "+") {
                    b = fg_type();
                    k = FGTy::Sum;
                } else {
                    throw ParseError(t.pos, "expected '->', '*' or '+', found '" + op + "'");
                }
                expect(Tok::RP, "')'");
            }
        } else {
            throw ParseError(t.pos, "expected a type");
        }
        expect(Tok::At, "'@'");
        Label lab = label();
        switch (k) {
            case FGTy::Bool: return fg_bool(lab);
            case FGTy::Unit: return fg_unit(lab);
            case FGTy::Fun: return fg_fun(a, latent, b, lab);
            case FGTy::Prod: return fg_prod(a, b, lab);
            case FGTy::Sum: return fg_sum(a, b, lab);
            case FGTy::Ref: return fg_ref(a, lab);
        }
        throw ParseError(t.pos, "unreachable");
    }

    CGTypeP cg_type() {
        Token t = peek();
        if (t.k == Tok::Sym) {
            next();
            if (t.text == "bool") return cg_bool();
            if (t.text == "unit") return cg_unit();
            throw ParseError(t.pos, "expected a type, found '" + t.text + "'");
        }
        if (t.k != Tok::LP) throw ParseError(t.pos, "expected a type");
        next();
        if (peek().k == Tok::Sym) {
            const std::string& h = peek().text;
            if (h == "ref" || h == "labeled" || h == "slio") {
                next();
                if (h == "slio") {
                    Label l1 = label(), l2 = label();
                    CGTypeP p = cg_type();
                    expect(Tok::RP, "')'");
                    return cg_slio(l1, l2, p);
                }
                Label l = label();
                CGTypeP p = cg_type();
                expect(Tok::RP, "')'");
                return h == "ref" ? cg_ref(l, p) : cg_labeled(l, p);
            }
        }
        CGTypeP a = cg_type();
        std::string op = expect_sym("'->', '*' or '+'");
        CGTypeP b = cg_type();
        expect(Tok::RP, "')'");
        if (op == "->") return cg_fun(a, b);
        if (op == "*") return cg_prod(a, b);
        if (op == "+") return cg_sum(a, b);
        throw ParseError(t.pos, "expected '->', '*' or '+', found '" + op + "'");
    }

    // ---- expressions ----

    FGExprP fg_expr() {
        Token t = peek();
        if (t.k == Tok::Sym) {
            next();
            if (t.text == "true") return fgb::tru(t.pos);
            if (t.text == "false") return fgb::fls(t.pos);
            if (fg_keyword(t.text))
                throw ParseError(t.pos, "keyword '" + t.text + "' cannot be a variable");
            return fgb::var(t.text, t.pos);
        }
        if (t.k != Tok::LP) throw ParseError(t.pos, "expected an expression");
        next();
        if (peek().k == Tok::RP) {
            next();
            return fgb::unit(t.pos);
        }
        std::string head = expect_sym("an expression form");
        if (head == "lam") {
            expect(Tok::LP, "'('");
            std::string x = expect_sym("parameter name");
            FGTypeP ty = fg_type();
            expect(Tok::RP, "')'");
            expect(Tok::LBRK, "'['");
            Label le = label();
            expect(Tok::RBRK, "']'");
            FGExprP body = fg_expr();
            expect(Tok::RP, "')'");
            return fgb::lam(x, ty, le, body, t.pos);
        }
        if (head == "app" || head == "pair" || head == "assign" || head == "and" ||
            head == "or") {
            FGExprP a = fg_expr(), b = fg_expr();
            expect(Tok::RP, "')'");
            if (head == "app") return fgb::app(a, b, t.pos);
            if (head == "pair") return fgb::pair(a, b, t.pos);
            if (head == "assign") return fgb::assign(a, b, t.pos);
            if (head == "and") return fgb::band(a, b, t.pos);
            return fgb::bor(a, b, t.pos);
        }
        if (head == "fst" || head == "snd" || head == "deref" || head == "not") {
            FGExprP e = fg_expr();
            expect(Tok::RP, "')'");
            if (head == "fst") return fgb::fst(e, t.pos);
            if (head == "snd") return fgb::snd(e, t.pos);
            if (head == "deref") return fgb::deref(e, t.pos);
            return fgb::bnot(e, t.pos);
        }
        if (head == "inl" || head == "inr") {
            FGExprP e = fg_expr();
            expect(Tok::LP, "'('");
            FGTypeP ta = fg_type();
            std::string op = expect_sym("'+'");
            if (op != "+") throw ParseError(t.pos, "sum annotation must use '+'");
            FGTypeP tb = fg_type();
            expect(Tok::RP, "')'");
            expect(Tok::RP, "')'");
            return head == "inl" ? fgb::inl(e, ta, tb, t.pos) : fgb::inr(e, ta, tb, t.pos);
        }
        if (head == "case") {
            FGExprP s = fg_expr();
            expect(Tok::LP, "'('");
            std::string x = expect_sym("binder");
            FGExprP l = fg_expr();
            expect(Tok::RP, "')'");
            expect(Tok::LP, "'('");
            std::string y = expect_sym("binder");
            FGExprP r = fg_expr();
            expect(Tok::RP, "')'");
            expect(Tok::RP, "')'");
            return fgb::cse(s, x, l, y, r, t.pos);
        }
        if (head == "if") {
            FGExprP c = fg_expr(), a = fg_expr(), b = fg_expr();
            expect(Tok::RP, "')'");
            return fgb::ife(c, a, b, t.pos);
        }
        if (head == "new") {
            FGExprP e = fg_expr();
            FGTypeP ann;
            if (peek().k != Tok::RP) ann = fg_type();
            expect(Tok::RP, "')'");
            return fgb::newe(e, ann, t.pos);
        }
        throw ParseError(t.pos, "unknown expression form '" + head + "'");
    }

    CGExprP cg_expr() {
        Token t = peek();
        if (t.k == Tok::Sym) {
            next();
            if (t.text == "true") return cgb::tru(t.pos);
            if (t.text == "false") return cgb::fls(t.pos);
            if (cg_keyword(t.text))
                throw ParseError(t.pos, "keyword '" + t.text + "' cannot be a variable");
            return cgb::var(t.text, t.pos);
        }
        if (t.k != Tok::LP) throw ParseError(t.pos, "expected an expression");
        next();
        if (peek().k == Tok::RP) {
            next();
            return cgb::unit(t.pos);
        }
        std::string head = expect_sym("an expression form");
        if (head == "lam") {
            expect(Tok::LP, "'('");
            std::string x = expect_sym("parameter name");
            CGTypeP ty = cg_type();
            expect(Tok::RP, "')'");
            CGExprP body = cg_expr();
            expect(Tok::RP, "')'");
            return cgb::lam(x, ty, body, t.pos);
        }
        if (head == "app" || head == "pair" || head == "assign") {
            CGExprP a = cg_expr(), b = cg_expr();
            expect(Tok::RP, "')'");
            if (head == "app") return cgb::app(a, b, t.pos);
            if (head == "pair") return cgb::pair(a, b, t.pos);
            return cgb::assign(a, b, t.pos);
        }
        if (head == "fst" || head == "snd" || head == "deref" || head == "unlabel" ||
            head == "toLabeled" || head == "ret") {
            CGExprP e = cg_expr();
            expect(Tok::RP, "')'");
            if (head == "fst") return cgb::fst(e, t.pos);
            if (head == "snd") return cgb::snd(e, t.pos);
            if (head == "deref") return cgb::deref(e, t.pos);
            if (head == "unlabel") return cgb::unlabel(e, t.pos);
            if (head == "toLabeled") return cgb::toLabeled(e, t.pos);
            return cgb::ret(e, t.pos);
        }
        if (head == "label") {
            Label l = label();
            CGExprP e = cg_expr();
            expect(Tok::RP, "')'");
            return cgb::label(l, e, t.pos);
        }
        if (head == "inl" || head == "inr") {
            CGExprP e = cg_expr();
            expect(Tok::LP, "'('");
            CGTypeP ta = cg_type();
            std::string op = expect_sym("'+'");
            if (op != "+") throw ParseError(t.pos, "sum annotation must use '+'");
            CGTypeP tb = cg_type();
            expect(Tok::RP, "')'");
            expect(Tok::RP, "')'");
            return head == "inl" ? cgb::inl(e, ta, tb, t.pos) : cgb::inr(e, ta, tb, t.pos);
        }
        if (head == "case") {
            CGExprP s = cg_expr();
            expect(Tok::LP, "'('");
            std::string x = expect_sym("binder");
            CGExprP l = cg_expr();
            expect(Tok::RP, "')'");
            expect(Tok::LP, "'('");
            std::string y = expect_sym("binder");
            CGExprP r = cg_expr();
            expect(Tok::RP, "')'");
            expect(Tok::RP, "')'");
            return cgb::cse(s, x, l, y, r, t.pos);
        }
        if (head == "if") {
            CGExprP c = cg_expr(), a = cg_expr(), b = cg_expr();
            expect(Tok::RP, "')'");
            return cgb::ife(c, a, b, t.pos);
        }
        if (head == "bind") {
            CGExprP m = cg_expr();
            expect(Tok::LP, "'('");
            std::string x = expect_sym("binder");
            CGExprP body = cg_expr();
            expect(Tok::RP, "')'");
            expect(Tok::RP, "')'");
            return cgb::bind(m, x, body, t.pos);
        }
        if (head == "new") {
            CGExprP e = cg_expr();
            CGTypeP ann;
            if (peek().k != Tok::RP) {
                Token at = peek();
                ann = cg_type();
                if (ann->k != CGTy::Labeled)
                    throw ParseError(at.pos, "new annotation must be a labeled type");
            }
            expect(Tok::RP, "')'");
            return cgb::newe(e, ann, t.pos);
        }
        throw ParseError(t.pos, "unknown expression form '" + head + "'");
    }

    // Reassembles the lattice declaration body as text for lattice_from_decl.
    std::string lattice_decl_text() {
        Token t = peek();
        if (t.k == Tok::Sym) {
            next();
            return t.text;
        }
        if (t.k == Tok::LP) {
            next();
            std::string s = "(";
            bool first = true;
            while (peek().k != Tok::RP && peek().k != Tok::End) {
                if (!first) s += " ";
                s += lattice_decl_text();
                first = false;
            }
            expect(Tok::RP, "')'");
            return s + ")";
        }
        throw ParseError(t.pos, "expected a lattice declaration");
    }

    SourceFile source() {
        SourceFile f;
        expect(Tok::LP, "'('");
        Token langTok = expect(Tok::Sym, "'fg' or 'cg'");
        if (langTok.text == "fg") f.lang = Lang::FG;
        else if (langTok.text == "cg") f.lang = Lang::CG;
        else throw ParseError(langTok.pos, "expected 'fg' or 'cg', found '" + langTok.text + "'");

        expect(Tok::LP, "'('");
        Token latTok = expect(Tok::Sym, "'lattice'");
        if (latTok.text != "lattice") throw ParseError(latTok.pos, "expected 'lattice'");
        std::string decl = lattice_decl_text();
        expect(Tok::RP, "')'");
        try {
            lat = lattice_from_decl(decl);
        } catch (const LatticeError& e) {
            throw ParseError(latTok.pos, e.what());
        }
        f.lat = lat;

        // context declarations: (x : T), possibly several; then the body
        while (peek().k == Tok::LP && peek(1).k == Tok::Sym && peek(2).k == Tok::Colon) {
            next();
            std::string x = expect_sym("variable name");
            expect(Tok::Colon, "':'");
            if (f.lang == Lang::FG) f.fg_ctx.emplace_back(x, fg_type());
            else f.cg_ctx.emplace_back(x, cg_type());
            expect(Tok::RP, "')'");
        }
        if (f.lang == Lang::FG) f.fg_body = fg_expr();
        else f.cg_body = cg_expr();
        expect(Tok::RP, "')'");
        expect(Tok::End, "end of input");
        return f;
    }
};

std::string lab_str(Label l) { return l.lat->print(l); }

} // namespace

// ---- public parse entry points ----

SourceFile parse_source(const std::string& text) {
    Parser p{lex(text), 0, nullptr};
    return p.source();
}

FGExprP parse_fg_expr(const std::string& text, const LatticeP& lat) {
    Parser p{lex(text), 0, lat};
    FGExprP e = p.fg_expr();
    p.expect(Tok::End, "end of input");
    return e;
}

CGExprP parse_cg_expr(const std::string& text, const LatticeP& lat) {
    Parser p{lex(text), 0, lat};
    CGExprP e = p.cg_expr();
    p.expect(Tok::End, "end of input");
    return e;
}

FGTypeP parse_fg_type(const std::string& text, const LatticeP& lat) {
    Parser p{lex(text), 0, lat};
    FGTypeP t = p.fg_type();
    p.expect(Tok::End, "end of input");
    return t;
}

CGTypeP parse_cg_type(const std::string& text, const LatticeP& lat) {
    Parser p{lex(text), 0, lat};
    CGTypeP t = p.cg_type();
    p.expect(Tok::End, "end of input");
    return t;
}

// ---- pretty-printing: one canonical single-line form ----

std::string fg_type_str(const FGTypeP& t) {
    std::string body;
    switch (t->k) {
        case FGTy::Bool: body = "bool"; break;
        case FGTy::Unit: body = "unit"; break;
        case FGTy::Fun:
            body = "(" + fg_type_str(t->a) + " ->[" + lab_str(t->latent) + "] " +
                   fg_type_str(t->b) + ")";
            break;
        case FGTy::Prod: body = "(" + fg_type_str(t->a) + " * " + fg_type_str(t->b) + ")"; break;
        case FGTy::Sum: body = "(" + fg_type_str(t->a) + " + " + fg_type_str(t->b) + ")"; break;
        case FGTy::Ref: body = "(ref " + fg_type_str(t->a) + ")"; break;
    }
    return body + "@" + lab_str(t->lab);
}

std::string cg_type_str(const CGTypeP& t) {
    switch (t->k) {
        case CGTy::Bool: return "bool";
        case CGTy::Unit: return "unit";
        case CGTy::Fun: return "(" + cg_type_str(t->a) + " -> " + cg_type_str(t->b) + ")";
        case CGTy::Prod: return "(" + cg_type_str(t->a) + " * " + cg_type_str(t->b) + ")";
        case CGTy::Sum: return "(" + cg_type_str(t->a) + " + " + cg_type_str(t->b) + ")";
        case CGTy::Ref: return "(ref " + lab_str(t->l1) + " " + cg_type_str(t->a) + ")";
        case CGTy::Labeled: return "(labeled " + lab_str(t->l1) + " " + cg_type_str(t->a) + ")";
        case CGTy::Slio:
            return "(slio " + lab_str(t->l1) + " " + lab_str(t->l2) + " " + cg_type_str(t->a) +
                   ")";
    }
    return "?";
}

std::string fg_expr_str(const FGExprP& e) {
    switch (e->k) {
        case FGEx::Var: return e->name;
        case FGEx::BTrue: return "true";
        case FGEx::BFalse: return "false";
        case FGEx::UnitE: return "()";
        case FGEx::Lam:
            return "(lam (" + e->name + " " + fg_type_str(e->tyA) + ") [" +
                   lab_str(e->latent) + "] " + fg_expr_str(e->e1) + ")";
        case FGEx::App: return "(app " + fg_expr_str(e->e1) + " " + fg_expr_str(e->e2) + ")";
        case FGEx::Pair: return "(pair " + fg_expr_str(e->e1) + " " + fg_expr_str(e->e2) + ")";
        case FGEx::Fst: return "(fst " + fg_expr_str(e->e1) + ")";
        case FGEx::Snd: return "(snd " + fg_expr_str(e->e1) + ")";
        case FGEx::Inl:
        case FGEx::Inr:
            return std::string("(") + (e->k == FGEx::Inl ? "inl " : "inr ") +
                   fg_expr_str(e->e1) + " (" + fg_type_str(e->tyA) + " + " +
                   fg_type_str(e->tyB) + "))";
        case FGEx::Case:
            return "(case " + fg_expr_str(e->e1) + " (" + e->name + " " + fg_expr_str(e->e2) +
                   ") (" + e->name2 + " " + fg_expr_str(e->e3) + "))";
        case FGEx::If:
            return "(if " + fg_expr_str(e->e1) + " " + fg_expr_str(e->e2) + " " +
                   fg_expr_str(e->e3) + ")";
        case FGEx::New:
            return "(new " + fg_expr_str(e->e1) + (e->tyA ? " " + fg_type_str(e->tyA) : "") +
                   ")";
        case FGEx::Deref: return "(deref " + fg_expr_str(e->e1) + ")";
        case FGEx::Assign:
            return "(assign " + fg_expr_str(e->e1) + " " + fg_expr_str(e->e2) + ")";
        case FGEx::And: return "(and " + fg_expr_str(e->e1) + " " + fg_expr_str(e->e2) + ")";
        case FGEx::Or: return "(or " + fg_expr_str(e->e1) + " " + fg_expr_str(e->e2) + ")";
        case FGEx::Not: return "(not " + fg_expr_str(e->e1) + ")";
    }
    return "?";
}

std::string cg_expr_str(const CGExprP& e) {
    switch (e->k) {
        case CGEx::Var: return e->name;
        case CGEx::BTrue: return "true";
        case CGEx::BFalse: return "false";
        case CGEx::UnitE: return "()";
        case CGEx::Lam:
            return "(lam (" + e->name + " " + cg_type_str(e->tyA) + ") " + cg_expr_str(e->e1) +
                   ")";
        case CGEx::App: return "(app " + cg_expr_str(e->e1) + " " + cg_expr_str(e->e2) + ")";
        case CGEx::Pair: return "(pair " + cg_expr_str(e->e1) + " " + cg_expr_str(e->e2) + ")";
        case CGEx::Fst: return "(fst " + cg_expr_str(e->e1) + ")";
        case CGEx::Snd: return "(snd " + cg_expr_str(e->e1) + ")";
        case CGEx::Inl:
        case CGEx::Inr:
            return std::string("(") + (e->k == CGEx::Inl ? "inl " : "inr ") +
                   cg_expr_str(e->e1) + " (" + cg_type_str(e->tyA) + " + " +
                   cg_type_str(e->tyB) + "))";
        case CGEx::Case:
            return "(case " + cg_expr_str(e->e1) + " (" + e->name + " " + cg_expr_str(e->e2) +
                   ") (" + e->name2 + " " + cg_expr_str(e->e3) + "))";
        case CGEx::If:
            return "(if " + cg_expr_str(e->e1) + " " + cg_expr_str(e->e2) + " " +
                   cg_expr_str(e->e3) + ")";
        case CGEx::LabelE: return "(label " + lab_str(e->lab) + " " + cg_expr_str(e->e1) + ")";
        case CGEx::Unlabel: return "(unlabel " + cg_expr_str(e->e1) + ")";
        case CGEx::ToLabeled: return "(toLabeled " + cg_expr_str(e->e1) + ")";
        case CGEx::Ret: return "(ret " + cg_expr_str(e->e1) + ")";
        case CGEx::Bind:
            return "(bind " + cg_expr_str(e->e1) + " (" + e->name + " " + cg_expr_str(e->e2) +
                   "))";
        case CGEx::New:
            return "(new " + cg_expr_str(e->e1) + (e->tyA ? " " + cg_type_str(e->tyA) : "") +
                   ")";
        case CGEx::Deref: return "(deref " + cg_expr_str(e->e1) + ")";
        case CGEx::Assign:
            return "(assign " + cg_expr_str(e->e1) + " " + cg_expr_str(e->e2) + ")";
    }
    return "?";
}

std::string pretty_source(const SourceFile& f) {
    std::string s = "(";
    s += f.lang == Lang::FG ? "fg" : "cg";
    s += " (lattice " + f.lat->name() + ")";
    if (f.lang == Lang::FG) {
        for (auto& [x, t] : f.fg_ctx) s += " (" + x + " : " + fg_type_str(t) + ")";
        s += " " + fg_expr_str(f.fg_body);
    } else {
        for (auto& [x, t] : f.cg_ctx) s += " (" + x + " : " + cg_type_str(t) + ")";
        s += " " + cg_expr_str(f.cg_body);
    }
    return s + ")";
}

// ---- structural expression equality (positions ignored) ----

bool fg_expr_eq(const FGExprP& a, const FGExprP& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->k != b->k) return false;
    if (a->name != b->name || a->name2 != b->name2) return false;
    if ((a->tyA != nullptr) != (b->tyA != nullptr)) return false;
    if (a->tyA && !fg_type_eq(a->tyA, b->tyA)) return false;
    if ((a->tyB != nullptr) != (b->tyB != nullptr)) return false;
    if (a->tyB && !fg_type_eq(a->tyB, b->tyB)) return false;
    if (a->k == FGEx::Lam && a->latent != b->latent) return false;
    return fg_expr_eq(a->e1, b->e1) && fg_expr_eq(a->e2, b->e2) && fg_expr_eq(a->e3, b->e3);
}

bool cg_expr_eq(const CGExprP& a, const CGExprP& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->k != b->k) return false;
    if (a->name != b->name || a->name2 != b->name2) return false;
    if ((a->tyA != nullptr) != (b->tyA != nullptr)) return false;
    if (a->tyA && !cg_type_eq(a->tyA, b->tyA)) return false;
    if ((a->tyB != nullptr) != (b->tyB != nullptr)) return false;
    if (a->tyB && !cg_type_eq(a->tyB, b->tyB)) return false;
    if (a->k == CGEx::LabelE && a->lab != b->lab) return false;
    return cg_expr_eq(a->e1, b->e1) && cg_expr_eq(a->e2, b->e2) && cg_expr_eq(a->e3, b->e3);
}

} // namespace ifc

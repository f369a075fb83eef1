#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ast.hpp"

namespace ifc {

enum class Lang { FG, CG };

// A parsed .ifc file: language tag, lattice declaration, optional context
// declarations (the free variables), and the body expression.
struct SourceFile {
    Lang lang = Lang::FG;
    LatticeP lat;
    std::vector<std::pair<std::string, FGTypeP>> fg_ctx;
    std::vector<std::pair<std::string, CGTypeP>> cg_ctx;
    FGExprP fg_body;
    CGExprP cg_body;
};

SourceFile parse_source(const std::string& text);
std::string pretty_source(const SourceFile& f);

// Stand-alone expression/type parsers, used by tests and the fuzz replay
// reader. The expression must be the whole input.
FGExprP parse_fg_expr(const std::string& text, const LatticeP& lat);
CGExprP parse_cg_expr(const std::string& text, const LatticeP& lat);
FGTypeP parse_fg_type(const std::string& text, const LatticeP& lat);
CGTypeP parse_cg_type(const std::string& text, const LatticeP& lat);

// Canonical single-line forms. parse(pretty(ast)) reproduces the ast.
std::string fg_expr_str(const FGExprP& e);
std::string cg_expr_str(const CGExprP& e);
std::string fg_type_str(const FGTypeP& t);
std::string cg_type_str(const CGTypeP& t);

bool fg_expr_eq(const FGExprP& a, const FGExprP& b);
bool cg_expr_eq(const CGExprP& a, const CGExprP& b);

} // namespace ifc

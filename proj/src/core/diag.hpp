#pragma once

#include <stdexcept>
#include <string>

namespace ifc {

struct SrcPos {
    int line = 0;
    int col = 0;
    bool known() const { return line > 0; }
};

inline std::string pos_str(SrcPos p) {
    if (!p.known()) return "<generated>";
    return std::to_string(p.line) + ":" + std::to_string(p.col);
}

// ---- error taxonomy ----
// Every failure mode the C API / CLI must distinguish gets its own class.

struct IfcError : std::runtime_error {
    explicit IfcError(const std::string& m) : std::runtime_error(m) {}
};

struct ParseError : IfcError {
    SrcPos pos;
    ParseError(SrcPos p, const std::string& m)
        : IfcError(pos_str(p) + ": " + m), pos(p) {}
};

struct LatticeError : IfcError {
    explicit LatticeError(const std::string& m) : IfcError(m) {}
};

// Type errors carry the name of the violated rule; leak-fixture tests and
// CLI output key off `rule`.
struct TypeError : IfcError {
    std::string rule;
    SrcPos pos;
    TypeError(std::string r, SrcPos p, const std::string& m)
        : IfcError(r + " at " + pos_str(p) + ": " + m), rule(std::move(r)), pos(p) {}
};

struct EvalTimeout : IfcError {
    EvalTimeout() : IfcError("evaluation ran out of fuel") {}
};

// A stuck well-typed program means a checker or evaluator bug, never user error.
struct EvalStuck : IfcError {
    explicit EvalStuck(const std::string& m) : IfcError("stuck: " + m) {}
};

struct TranslateError : IfcError {
    explicit TranslateError(const std::string& m) : IfcError(m) {}
};

} // namespace ifc

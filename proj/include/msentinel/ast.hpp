#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace msentinel {

// Expressions are a single fat struct rather than a class hierarchy; the
// language is small enough that a kind tag plus optional slots stays simple.
struct Expr {
    enum class Kind {
        IntLit,
        StringLit,
        BoolLit,
        NullLit,
        Name,        // bare identifier or `this`
        FieldAccess, // base.field, base is an Expr
        Call,        // callee is either a Name or Class.method FieldAccess
        Unary,       // op is "!" or "-"
        Binary,      // op is one of && || == != < <= > >= + - * /
    };

    Kind kind;
    int line = 0;

    long long int_value = 0;    // IntLit
    bool bool_value = false;    // BoolLit
    std::string text;           // StringLit payload, Name identifier, Unary/Binary op
    std::unique_ptr<Expr> base; // FieldAccess base, Unary operand, Binary lhs
    std::unique_ptr<Expr> rhs;  // Binary rhs
    std::string field;          // FieldAccess member name
    std::unique_ptr<Expr> callee;            // Call target expression
    std::vector<std::unique_ptr<Expr>> args; // Call arguments
};

using ExprPtr = std::unique_ptr<Expr>;

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    enum class Kind {
        VarDecl,  // var name = expr;
        Assign,   // lvalue = expr;   lvalue is Name or FieldAccess
        If,       // if (cond) { then } [else { otherwise }]
        While,    // while (cond) { body }
        Return,   // return [expr];
        ExprCall, // call();  expression statement, must be a call
    };

    Kind kind;
    int line = 0;

    std::string var_name;       // VarDecl
    ExprPtr lvalue;             // Assign
    ExprPtr value;              // VarDecl initializer, Assign rhs, Return value, ExprCall call
    ExprPtr cond;               // If, While
    std::vector<StmtPtr> body;  // If then-branch, While body
    std::vector<StmtPtr> orelse; // If else-branch
};

struct LineSpan {
    int first = 0;
    int last = 0;
};

struct MethodDecl {
    std::string name;
    std::vector<std::string> params;
    std::vector<StmtPtr> body;
    LineSpan span; // declaration line through closing brace
};

struct ClassDecl {
    std::string name;
    std::vector<std::string> fields;
    std::vector<MethodDecl> methods;
    LineSpan span;
};

struct FuncDecl {
    std::string name;
    std::vector<std::string> params;
    std::vector<StmtPtr> body;
    LineSpan span;
};

struct GlobalDecl {
    std::string name;
    ExprPtr init; // may be null for `var g;`
    int line = 0;
};

// Top-level declarations in source order.
struct Ast {
    std::string file; // path the unit was parsed from
    std::vector<std::variant<ClassDecl, FuncDecl, GlobalDecl>> decls;
};

} // namespace msentinel

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "msentinel/ast.hpp"
#include "msentinel/source.hpp"
#include "msentinel/token.hpp"

namespace msentinel {

namespace detail {

class Parser {
public:
    Parser(std::string file, std::vector<Token> tokens)
        : file_(std::move(file)), toks_(std::move(tokens)) {}

    Ast parse_program() {
        Ast ast;
        ast.file = file_;
        while (!at(TokenKind::EndOfFile)) {
            if (at(TokenKind::KwClass))
                ast.decls.emplace_back(parse_class());
            else if (at(TokenKind::KwFunc))
                ast.decls.emplace_back(parse_func());
            else if (at(TokenKind::KwVar))
                ast.decls.emplace_back(parse_global());
            else
                fail("expected 'class', 'func' or 'var' at top level");
        }
        return ast;
    }

private:
    std::string file_;
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& peek(int ahead = 0) const {
        size_t i = pos_ + static_cast<size_t>(ahead);
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    Token expect(TokenKind k, const char* what) {
        if (!at(k))
            fail(std::string("expected ") + what + ", found " +
                 token_kind_name(peek().kind));
        return next();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(file_ + ":" + std::to_string(peek().line) + ": " + msg);
    }

    ClassDecl parse_class() {
        ClassDecl cls;
        cls.span.first = peek().line;
        expect(TokenKind::KwClass, "'class'");
        cls.name = expect(TokenKind::Identifier, "class name").text;
        expect(TokenKind::LBrace, "'{'");
        while (!at(TokenKind::RBrace)) {
            if (at(TokenKind::KwField)) {
                next();
                cls.fields.push_back(expect(TokenKind::Identifier, "field name").text);
                expect(TokenKind::Semicolon, "';'");
            } else if (at(TokenKind::KwMethod)) {
                MethodDecl m;
                m.span.first = peek().line;
                next();
                m.name = expect(TokenKind::Identifier, "method name").text;
                m.params = parse_params();
                m.body = parse_block();
                m.span.last = last_brace_line_;
                cls.methods.push_back(std::move(m));
            } else {
                fail("expected 'field', 'method' or '}' in class body");
            }
        }
        cls.span.last = peek().line;
        expect(TokenKind::RBrace, "'}'");
        return cls;
    }

    FuncDecl parse_func() {
        FuncDecl fn;
        fn.span.first = peek().line;
        expect(TokenKind::KwFunc, "'func'");
        fn.name = expect(TokenKind::Identifier, "function name").text;
        fn.params = parse_params();
        fn.body = parse_block();
        fn.span.last = last_brace_line_;
        return fn;
    }

    GlobalDecl parse_global() {
        GlobalDecl g;
        g.line = peek().line;
        expect(TokenKind::KwVar, "'var'");
        g.name = expect(TokenKind::Identifier, "variable name").text;
        if (at(TokenKind::Assign)) {
            next();
            g.init = parse_expr();
        }
        expect(TokenKind::Semicolon, "';'");
        return g;
    }

    std::vector<std::string> parse_params() {
        std::vector<std::string> params;
        expect(TokenKind::LParen, "'('");
        if (!at(TokenKind::RParen)) {
            params.push_back(expect(TokenKind::Identifier, "parameter name").text);
            while (at(TokenKind::Comma)) {
                next();
                params.push_back(expect(TokenKind::Identifier, "parameter name").text);
            }
        }
        expect(TokenKind::RParen, "')'");
        return params;
    }

    int last_brace_line_ = 0; // line of the most recently closed block

    std::vector<StmtPtr> parse_block() {
        expect(TokenKind::LBrace, "'{'");
        std::vector<StmtPtr> stmts;
        while (!at(TokenKind::RBrace))
            stmts.push_back(parse_stmt());
        last_brace_line_ = peek().line;
        expect(TokenKind::RBrace, "'}'");
        return stmts;
    }

    StmtPtr parse_stmt() {
        auto stmt = std::make_unique<Stmt>();
        stmt->line = peek().line;
        switch (peek().kind) {
        case TokenKind::KwVar: {
            next();
            stmt->kind = Stmt::Kind::VarDecl;
            stmt->var_name = expect(TokenKind::Identifier, "variable name").text;
            expect(TokenKind::Assign, "'='");
            stmt->value = parse_expr();
            expect(TokenKind::Semicolon, "';'");
            return stmt;
        }
        case TokenKind::KwIf: {
            next();
            stmt->kind = Stmt::Kind::If;
            expect(TokenKind::LParen, "'('");
            stmt->cond = parse_expr();
            expect(TokenKind::RParen, "')'");
            stmt->body = parse_block();
            if (at(TokenKind::KwElse)) {
                next();
                stmt->orelse = parse_block();
            }
            return stmt;
        }
        case TokenKind::KwWhile: {
            next();
            stmt->kind = Stmt::Kind::While;
            expect(TokenKind::LParen, "'('");
            stmt->cond = parse_expr();
            expect(TokenKind::RParen, "')'");
            stmt->body = parse_block();
            return stmt;
        }
        case TokenKind::KwReturn: {
            next();
            stmt->kind = Stmt::Kind::Return;
            if (!at(TokenKind::Semicolon))
                stmt->value = parse_expr();
            expect(TokenKind::Semicolon, "';'");
            return stmt;
        }
        case TokenKind::Identifier:
        case TokenKind::KwThis: {
            ExprPtr e = parse_postfix();
            if (at(TokenKind::Assign)) {
                if (e->kind != Expr::Kind::Name && e->kind != Expr::Kind::FieldAccess)
                    fail("left side of '=' must be a variable or field");
                next();
                stmt->kind = Stmt::Kind::Assign;
                stmt->lvalue = std::move(e);
                stmt->value = parse_expr();
                expect(TokenKind::Semicolon, "';'");
                return stmt;
            }
            if (e->kind != Expr::Kind::Call)
                fail("expected '=' or call arguments");
            stmt->kind = Stmt::Kind::ExprCall;
            stmt->value = std::move(e);
            expect(TokenKind::Semicolon, "';'");
            return stmt;
        }
        default:
            fail(std::string("unexpected ") + token_kind_name(peek().kind) +
                 " at start of statement");
        }
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(TokenKind::OrOr)) {
            int line = peek().line;
            next();
            lhs = make_binary("||", std::move(lhs), parse_and(), line);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (at(TokenKind::AndAnd)) {
            int line = peek().line;
            next();
            lhs = make_binary("&&", std::move(lhs), parse_equality(), line);
        }
        return lhs;
    }

    ExprPtr parse_equality() {
        ExprPtr lhs = parse_relational();
        while (at(TokenKind::Eq) || at(TokenKind::Ne)) {
            std::string op = peek().text;
            int line = peek().line;
            next();
            lhs = make_binary(op, std::move(lhs), parse_relational(), line);
        }
        return lhs;
    }

    ExprPtr parse_relational() {
        ExprPtr lhs = parse_additive();
        while (at(TokenKind::Lt) || at(TokenKind::Le) || at(TokenKind::Gt) ||
               at(TokenKind::Ge)) {
            std::string op = peek().text;
            int line = peek().line;
            next();
            lhs = make_binary(op, std::move(lhs), parse_additive(), line);
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
            std::string op = peek().text;
            int line = peek().line;
            next();
            lhs = make_binary(op, std::move(lhs), parse_multiplicative(), line);
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (at(TokenKind::Star) || at(TokenKind::Slash)) {
            std::string op = peek().text;
            int line = peek().line;
            next();
            lhs = make_binary(op, std::move(lhs), parse_unary(), line);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(TokenKind::Not) || at(TokenKind::Minus)) {
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->line = peek().line;
            e->text = peek().text;
            next();
            e->base = parse_unary();
            return e;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (at(TokenKind::Dot)) {
                int line = peek().line;
                next();
                auto fa = std::make_unique<Expr>();
                fa->kind = Expr::Kind::FieldAccess;
                fa->line = line;
                fa->field = expect(TokenKind::Identifier, "member name").text;
                fa->base = std::move(e);
                e = std::move(fa);
            } else if (at(TokenKind::LParen)) {
                auto call = std::make_unique<Expr>();
                call->kind = Expr::Kind::Call;
                call->line = e->line;
                if (e->kind != Expr::Kind::Name &&
                    !(e->kind == Expr::Kind::FieldAccess &&
                      e->base->kind == Expr::Kind::Name))
                    fail("call target must be a name or Class.method");
                call->callee = std::move(e);
                next();
                if (!at(TokenKind::RParen)) {
                    call->args.push_back(parse_expr());
                    while (at(TokenKind::Comma)) {
                        next();
                        call->args.push_back(parse_expr());
                    }
                }
                expect(TokenKind::RParen, "')'");
                e = std::move(call);
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_primary() {
        auto e = std::make_unique<Expr>();
        e->line = peek().line;
        switch (peek().kind) {
        case TokenKind::IntLiteral:
            e->kind = Expr::Kind::IntLit;
            e->int_value = std::stoll(peek().text);
            next();
            return e;
        case TokenKind::StringLiteral:
            e->kind = Expr::Kind::StringLit;
            e->text = peek().text;
            next();
            return e;
        case TokenKind::KwTrue:
        case TokenKind::KwFalse:
            e->kind = Expr::Kind::BoolLit;
            e->bool_value = at(TokenKind::KwTrue);
            next();
            return e;
        case TokenKind::KwNull:
            e->kind = Expr::Kind::NullLit;
            next();
            return e;
        case TokenKind::KwThis:
            e->kind = Expr::Kind::Name;
            e->text = "this";
            next();
            return e;
        case TokenKind::Identifier:
            e->kind = Expr::Kind::Name;
            e->text = peek().text;
            next();
            return e;
        case TokenKind::LParen: {
            next();
            ExprPtr inner = parse_expr();
            expect(TokenKind::RParen, "')'");
            return inner;
        }
        default:
            fail(std::string("unexpected ") + token_kind_name(peek().kind) +
                 " in expression");
        }
    }

    static ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs, int line) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->line = line;
        e->text = std::move(op);
        e->base = std::move(lhs);
        e->rhs = std::move(rhs);
        return e;
    }
};

} // namespace detail

inline Ast parse(const SourceFile& src) {
    return detail::Parser(src.path, tokenize(src)).parse_program();
}

inline Ast parse_text(std::string path, std::string_view text) {
    return parse(SourceFile::from_text(std::move(path), text));
}

} // namespace msentinel

#pragma once

#include <cctype>
#include <string>
#include <unordered_map>
#include <vector>

#include "msentinel/source.hpp"

namespace msentinel {

enum class TokenKind {
    Identifier,
    IntLiteral,
    StringLiteral,
    KwVar,
    KwClass,
    KwField,
    KwMethod,
    KwFunc,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwTrue,
    KwFalse,
    KwNull,
    KwThis,
    Assign,     // =
    Eq,         // ==
    Ne,         // !=
    Lt,         // <
    Le,         // <=
    Gt,         // >
    Ge,         // >=
    Plus,
    Minus,
    Star,
    Slash,
    AndAnd,
    OrOr,
    Not,
    Dot,
    Comma,
    Semicolon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    EndOfFile,
};

struct Token {
    TokenKind kind;
    std::string text; // spelling; identifier name or literal payload
    int line;         // 1-based line the token starts on
};

inline const char* token_kind_name(TokenKind k) {
    switch (k) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntLiteral: return "integer literal";
    case TokenKind::StringLiteral: return "string literal";
    case TokenKind::KwVar: return "'var'";
    case TokenKind::KwClass: return "'class'";
    case TokenKind::KwField: return "'field'";
    case TokenKind::KwMethod: return "'method'";
    case TokenKind::KwFunc: return "'func'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwWhile: return "'while'";
    case TokenKind::KwReturn: return "'return'";
    case TokenKind::KwTrue: return "'true'";
    case TokenKind::KwFalse: return "'false'";
    case TokenKind::KwNull: return "'null'";
    case TokenKind::KwThis: return "'this'";
    case TokenKind::Assign: return "'='";
    case TokenKind::Eq: return "'=='";
    case TokenKind::Ne: return "'!='";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Ge: return "'>='";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::AndAnd: return "'&&'";
    case TokenKind::OrOr: return "'||'";
    case TokenKind::Not: return "'!'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::EndOfFile: return "end of file";
    }
    return "?";
}

// Lexes a whole file. Comments (// to end of line) and whitespace are
// skipped; every token records the line it starts on. The returned
// stream always ends with an EndOfFile token.
inline std::vector<Token> tokenize(const SourceFile& src) {
    static const std::unordered_map<std::string, TokenKind> keywords = {
        {"var", TokenKind::KwVar},       {"class", TokenKind::KwClass},
        {"field", TokenKind::KwField},   {"method", TokenKind::KwMethod},
        {"func", TokenKind::KwFunc},     {"if", TokenKind::KwIf},
        {"else", TokenKind::KwElse},     {"while", TokenKind::KwWhile},
        {"return", TokenKind::KwReturn}, {"true", TokenKind::KwTrue},
        {"false", TokenKind::KwFalse},   {"null", TokenKind::KwNull},
        {"this", TokenKind::KwThis},
    };

    std::vector<Token> out;
    for (int ln = 1; ln <= src.line_count(); ++ln) {
        const std::string& s = src.line(ln);
        size_t i = 0;
        while (i < s.size()) {
            char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (c == '/' && i + 1 < s.size() && s[i + 1] == '/')
                break; // comment to end of line
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                size_t j = i;
                while (j < s.size() &&
                       (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                    ++j;
                std::string word = s.substr(i, j - i);
                auto kw = keywords.find(word);
                out.push_back({kw == keywords.end() ? TokenKind::Identifier : kw->second,
                               std::move(word), ln});
                i = j;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                size_t j = i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
                    ++j;
                out.push_back({TokenKind::IntLiteral, s.substr(i, j - i), ln});
                i = j;
                continue;
            }
            if (c == '"') {
                std::string payload;
                size_t j = i + 1;
                bool closed = false;
                while (j < s.size()) {
                    if (s[j] == '\\' && j + 1 < s.size()) {
                        payload += s[j + 1];
                        j += 2;
                        continue;
                    }
                    if (s[j] == '"') {
                        closed = true;
                        ++j;
                        break;
                    }
                    payload += s[j];
                    ++j;
                }
                if (!closed)
                    throw LexError(src.path + ":" + std::to_string(ln) +
                                   ": unterminated string literal");
                out.push_back({TokenKind::StringLiteral, std::move(payload), ln});
                i = j;
                continue;
            }
            auto two = [&](char a, char b) {
                return c == a && i + 1 < s.size() && s[i + 1] == b;
            };
            if (two('=', '=')) { out.push_back({TokenKind::Eq, "==", ln}); i += 2; continue; }
            if (two('!', '=')) { out.push_back({TokenKind::Ne, "!=", ln}); i += 2; continue; }
            if (two('<', '=')) { out.push_back({TokenKind::Le, "<=", ln}); i += 2; continue; }
            if (two('>', '=')) { out.push_back({TokenKind::Ge, ">=", ln}); i += 2; continue; }
            if (two('&', '&')) { out.push_back({TokenKind::AndAnd, "&&", ln}); i += 2; continue; }
            if (two('|', '|')) { out.push_back({TokenKind::OrOr, "||", ln}); i += 2; continue; }
            TokenKind k;
            switch (c) {
            case '=': k = TokenKind::Assign; break;
            case '<': k = TokenKind::Lt; break;
            case '>': k = TokenKind::Gt; break;
            case '+': k = TokenKind::Plus; break;
            case '-': k = TokenKind::Minus; break;
            case '*': k = TokenKind::Star; break;
            case '/': k = TokenKind::Slash; break;
            case '!': k = TokenKind::Not; break;
            case '.': k = TokenKind::Dot; break;
            case ',': k = TokenKind::Comma; break;
            case ';': k = TokenKind::Semicolon; break;
            case '(': k = TokenKind::LParen; break;
            case ')': k = TokenKind::RParen; break;
            case '{': k = TokenKind::LBrace; break;
            case '}': k = TokenKind::RBrace; break;
            default:
                throw LexError(src.path + ":" + std::to_string(ln) +
                               ": illegal character '" + std::string(1, c) + "'");
            }
            out.push_back({k, std::string(1, c), ln});
            ++i;
        }
    }
    int eof_line = src.line_count() == 0 ? 1 : src.line_count();
    out.push_back({TokenKind::EndOfFile, "", eof_line});
    return out;
}

} // namespace msentinel

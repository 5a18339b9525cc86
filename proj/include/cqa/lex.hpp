#pragma once

// Shared tokenizer for the schema and query languages.
//
// Identifiers and keywords are case-insensitive (matched lowercased);
// string literals use single quotes with '' as the escape; `--` and `#`
// start line comments.  Errors carry line:column positions.

#include <cctype>
#include <string>
#include <vector>

#include "types.hpp"

namespace cqa {

enum class TokKind { Ident, Number, String, Punct, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;    // idents lowercased; Number/Punct verbatim; String unescaped
    std::string raw;     // idents in original case
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src, std::string origin = "input")
        : origin_(std::move(origin)) {
        tokenize(src);
    }

    const Token& peek(int ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == TokKind::End; }

    bool accept_punct(const std::string& p) {
        if (peek().kind == TokKind::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }
    bool accept_keyword(const std::string& kw) {
        if (peek().kind == TokKind::Ident && peek().text == kw) {
            next();
            return true;
        }
        return false;
    }
    void expect_punct(const std::string& p) {
        if (!accept_punct(p)) fail("expected '" + p + "'");
    }
    void expect_keyword(const std::string& kw) {
        if (!accept_keyword(kw)) fail("expected '" + kw + "'");
    }
    std::string expect_ident(const char* what) {
        if (peek().kind != TokKind::Ident) fail(std::string("expected ") + what);
        return next().raw;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string got = t.kind == TokKind::End ? "end of input" : "'" + (t.raw.empty() ? t.text : t.raw) + "'";
        throw ParseError(origin_ + ":" + std::to_string(t.line) + ":" + std::to_string(t.col) +
                         ": " + msg + ", got " + got);
    }

private:
    void tokenize(const std::string& s) {
        int line = 1, col = 1;
        std::size_t i = 0;
        auto advance = [&](std::size_t n) {
            for (std::size_t k = 0; k < n; ++k, ++i) {
                if (s[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
        };
        while (i < s.size()) {
            char c = s[i];
            if (std::isspace((unsigned char)c)) {
                advance(1);
                continue;
            }
            if (c == '#' || (c == '-' && i + 1 < s.size() && s[i + 1] == '-')) {
                while (i < s.size() && s[i] != '\n') advance(1);
                continue;
            }
            Token t;
            t.line = line;
            t.col = col;
            if (std::isalpha((unsigned char)c) || c == '_') {
                std::size_t j = i;
                while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) ++j;
                t.kind = TokKind::Ident;
                t.raw = s.substr(i, j - i);
                t.text = t.raw;
                for (char& ch : t.text) ch = (char)std::tolower((unsigned char)ch);
                advance(j - i);
            } else if (std::isdigit((unsigned char)c)) {
                std::size_t j = i;
                while (j < s.size() && (std::isdigit((unsigned char)s[j]) || s[j] == '.')) ++j;
                t.kind = TokKind::Number;
                t.text = s.substr(i, j - i);
                advance(j - i);
            } else if (c == '\'') {
                std::size_t j = i + 1;
                std::string val;
                bool closed = false;
                while (j < s.size()) {
                    if (s[j] == '\'') {
                        if (j + 1 < s.size() && s[j + 1] == '\'') {
                            val += '\'';
                            j += 2;
                        } else {
                            closed = true;
                            ++j;
                            break;
                        }
                    } else {
                        val += s[j];
                        ++j;
                    }
                }
                if (!closed)
                    throw ParseError(origin_ + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                     ": unterminated string literal");
                t.kind = TokKind::String;
                t.text = val;
                advance(j - i);
            } else {
                static const char* two[] = {"<=", ">=", "<>", "!="};
                std::string p(1, c);
                if (i + 1 < s.size())
                    for (const char* w : two)
                        if (c == w[0] && s[i + 1] == w[1]) p = w;
                t.kind = TokKind::Punct;
                t.text = p;
                advance(p.size());
            }
            toks_.push_back(std::move(t));
        }
        Token end;
        end.kind = TokKind::End;
        end.line = line;
        end.col = col;
        toks_.push_back(end);
    }

    std::string origin_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace cqa

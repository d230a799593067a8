// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/parser.hpp"

#include <cctype>
#include <optional>

namespace pwhile {

namespace {

const char* const kKeywords[] = {"skip", "abort", "tick",  "if",  "while", "true",
                                 "false", "nat",   "max",   "not", "and",   "or"};

bool is_keyword(const std::string& s) {
    for (const char* k : kKeywords) {
        if (s == k) return true;
    }
    return false;
}

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool peek2(const char* two) {
        skip_ws();
        return pos_ + 1 < text_.size() && text_[pos_] == two[0] && text_[pos_ + 1] == two[1];
    }

    // Consumes `tok` (1-2 chars) if present.
    bool accept(const std::string& tok) {
        skip_ws();
        if (text_.compare(pos_, tok.size(), tok) == 0) {
            for (size_t i = 0; i < tok.size(); ++i) advance();
            return true;
        }
        return false;
    }

    void expect(const std::string& tok, const std::string& what) {
        if (!accept(tok)) fail("expected '" + tok + "' " + what);
    }

    std::optional<std::string> ident() {
        skip_ws();
        if (pos_ >= text_.size()) return std::nullopt;
        char c = text_[pos_];
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return std::nullopt;
        size_t start = pos_;
        while (pos_ < text_.size()) {
            char d = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
                advance();
            } else {
                break;
            }
        }
        return text_.substr(start, pos_ - start);
    }

    // Peeks an identifier without consuming it.
    std::string peek_ident() {
        size_t save_pos = pos_;
        int save_line = line_, save_col = col_;
        auto id = ident();
        pos_ = save_pos;
        line_ = save_line;
        col_ = save_col;
        return id.value_or("");
    }

    std::optional<Int> integer() {
        skip_ws();
        size_t start = pos_;
        if (pos_ < text_.size() && !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            return std::nullopt;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance();
        if (pos_ == start) return std::nullopt;
        return Int(text_.substr(start, pos_ - start));
    }

    Rat rational() {
        skip_ws();
        bool neg = false;
        if (accept("-")) neg = true;
        auto num = integer();
        if (!num) fail("expected a rational literal");
        Int n = neg ? Int(-*num) : *num;
        if (accept("/")) {
            auto den = integer();
            if (!den) fail("expected a denominator");
            if (*den == 0) fail("zero denominator");
            return rat_of(n, *den);
        }
        return rat_of(n);
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

    int line() const { return line_; }
    int col() const { return col_; }

    struct Mark {
        size_t pos;
        int line, col;
    };
    Mark mark() const { return {pos_, line_, col_}; }
    void reset(const Mark& m) {
        pos_ = m.pos;
        line_ = m.line;
        col_ = m.col;
    }

  private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    explicit Parser(const std::string& text) : lex_(text) {}

    Command program() {
        Command c = command();
        if (!lex_.eof()) lex_.fail("trailing input after program");
        return c;
    }

    CostExpr cost_toplevel() {
        CostExpr c = cost_expr();
        if (!lex_.eof()) lex_.fail("trailing input after cost expression");
        return c;
    }

    BExp bexp_toplevel() {
        BExp b = bexp();
        if (!lex_.eof()) lex_.fail("trailing input after boolean expression");
        return b;
    }

    Rat rat_toplevel() {
        Rat r = lex_.rational();
        if (!lex_.eof()) lex_.fail("trailing input after rational");
        return r;
    }

    // --- commands ---

    Command command() {
        Command first = simple_command();
        if (lex_.accept(";")) {
            return cseq(first, command());
        }
        return first;
    }

    Command simple_command() {
        if (lex_.peek() == '{') {
            Command blk = block();
            if (lex_.accept("<>")) {
                return cnd(blk, block());
            }
            if (lex_.peek() == '[') {
                lex_.expect("[", "for probabilistic choice");
                Rat p = lex_.rational();
                if (p < 0 || p > 1) lex_.fail("choice probability " + rat_str(p) + " outside [0,1]");
                lex_.expect("]", "after choice probability");
                return cprob(p, blk, block());
            }
            return blk;  // grouping
        }
        std::string id = lex_.peek_ident();
        if (id == "skip") {
            lex_.ident();
            return cskip();
        }
        if (id == "abort") {
            lex_.ident();
            return cabort();
        }
        if (id == "tick") {
            lex_.ident();
            lex_.expect("(", "after tick");
            Rat r = lex_.rational();
            if (r < 0) lex_.fail("tick rate must be nonnegative");
            lex_.expect(")", "after tick rate");
            return ctick(r);
        }
        if (id == "if") {
            lex_.ident();
            lex_.expect("[", "before if invariant");
            BExp inv = bexp();
            lex_.expect("]", "after if invariant");
            lex_.expect("(", "before if guard");
            BExp g = bexp();
            lex_.expect(")", "after if guard");
            Command t = block();
            Command e = block();
            return cif(inv, g, t, e);
        }
        if (id == "while") {
            lex_.ident();
            lex_.expect("[", "before while invariant");
            BExp inv = bexp();
            lex_.expect("]", "after while invariant");
            lex_.expect("(", "before while guard");
            BExp g = bexp();
            lex_.expect(")", "after while guard");
            return cwhile(inv, g, block());
        }
        if (!id.empty() && !is_keyword(id)) {
            lex_.ident();
            lex_.expect(":=", "in assignment");
            return cassign(Var(id), dist());
        }
        lex_.fail("expected a command");
    }

    Command block() {
        lex_.expect("{", "to open a block");
        Command c = command();
        lex_.expect("}", "to close a block");
        return c;
    }

    DistExpr dist() {
        if (lex_.peek() == '{') {
            lex_.expect("{", "to open a distribution");
            DistExpr d;
            int line = lex_.line(), col = lex_.col();
            do {
                Rat p = lex_.rational();
                lex_.expect(":", "after branch probability");
                IntExpr e = int_expr();
                if (p <= 0 || p > 1) {
                    lex_.fail("branch probability " + rat_str(p) + " outside (0,1]");
                }
                d.branches.push_back({p, e});
            } while (lex_.accept(","));
            lex_.expect("}", "to close a distribution");
            try {
                validate_dist(d);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), line, col);
            }
            return d;
        }
        return dirac(int_expr());
    }

    // --- integer expressions ---

    IntExpr int_expr() {
        IntExpr lhs = int_term();
        for (;;) {
            if (lex_.accept("+")) {
                lhs = iadd(lhs, int_term());
            } else if (lex_.accept("-")) {
                lhs = isub(lhs, int_term());
            } else {
                break;
            }
        }
        return lhs;
    }

    IntExpr int_term() {
        IntExpr lhs = int_factor();
        while (lex_.peek() == '*') {
            lex_.accept("*");
            lhs = imul(lhs, int_factor());
        }
        return lhs;
    }

    IntExpr int_factor() {
        if (lex_.accept("(")) {
            IntExpr e = int_expr();
            lex_.expect(")", "in integer expression");
            return e;
        }
        if (lex_.peek() == '-') {
            lex_.accept("-");
            IntExpr e = int_factor();
            if (e->kind == IntExprNode::Kind::Constant) return iconst(Int(-e->value));
            return isub(iconst(0), e);
        }
        if (auto z = lex_.integer()) {
            return iconst(*z);
        }
        std::string id = lex_.peek_ident();
        if (!id.empty() && !is_keyword(id)) {
            lex_.ident();
            return ivar(Var(id));
        }
        lex_.fail("expected an integer expression");
    }

    // --- boolean expressions ---

    BExp bexp() {
        BExp lhs = bterm();
        while (lex_.accept("||") || peek_word("or")) {
            lhs = bor(lhs, bterm());
        }
        return lhs;
    }

    BExp bterm() {
        BExp lhs = bfactor();
        while (lex_.accept("&&") || peek_word("and")) {
            lhs = band(lhs, bfactor());
        }
        return lhs;
    }

    BExp bfactor() {
        if (lex_.accept("!")) return bnot(bfactor());
        std::string id = lex_.peek_ident();
        if (id == "not") {
            lex_.ident();
            return bnot(bfactor());
        }
        if (id == "true") {
            lex_.ident();
            return btrue();
        }
        if (id == "false") {
            lex_.ident();
            return bfalse();
        }
        if (lex_.peek() == '(') {
            return paren_or_cmp();
        }
        return comparison();
    }

    // Parses `( ... )` which may be a boolean group or the left operand of a
    // comparison. Tries the boolean reading first and falls back.
    BExp paren_or_cmp() {
        auto save = lex_.mark();
        try {
            lex_.expect("(", "");
            BExp inner = bexp();
            lex_.expect(")", "");
            if (is_cmp_ahead()) {
                // `(iexp) < ...` was misread as a boolean group; re-parse.
                lex_.reset(save);
                return comparison();
            }
            return inner;
        } catch (const ParseError&) {
            lex_.reset(save);
            return comparison();
        }
    }

    BExp comparison() {
        IntExpr lhs = int_expr();
        CmpOp op;
        if (lex_.accept("<=")) {
            op = CmpOp::Le;
        } else if (lex_.accept(">=")) {
            op = CmpOp::Ge;
        } else if (lex_.accept("!=")) {
            op = CmpOp::Ne;
        } else if (lex_.accept("==")) {
            op = CmpOp::Eq;
        } else if (lex_.accept("<")) {
            op = CmpOp::Lt;
        } else if (lex_.accept(">")) {
            op = CmpOp::Gt;
        } else if (lex_.accept("=")) {
            op = CmpOp::Eq;
        } else {
            lex_.fail("expected a comparison operator");
        }
        return bcmp(op, lhs, int_expr());
    }

    // --- cost expressions ---

    CostExpr cost_expr() {
        CostExpr lhs = cost_term();
        while (lex_.peek() == '+') {
            lex_.accept("+");
            lhs = cadd(lhs, cost_term());
        }
        return lhs;
    }

    CostExpr cost_term() {
        CostExpr lhs = cost_factor();
        while (lex_.peek() == '*') {
            lex_.accept("*");
            lhs = cmul(lhs, cost_factor());
        }
        return lhs;
    }

    CostExpr cost_factor() {
        if (lex_.accept("(")) {
            CostExpr c = cost_expr();
            lex_.expect(")", "in cost expression");
            return c;
        }
        if (lex_.accept("[")) {
            BExp g = bexp();
            lex_.expect("]", "after Iverson guard");
            lex_.expect("*", "after Iverson bracket");
            return civerson(g, cost_factor());
        }
        if (lex_.accept("?")) {
            auto id = lex_.ident();
            if (!id) lex_.fail("expected a coefficient name after '?'");
            return ccoeff(*id);
        }
        std::string id = lex_.peek_ident();
        if (id == "nat") {
            lex_.ident();
            lex_.expect("(", "after nat");
            IntExpr a = int_expr();
            lex_.expect(")", "after nat argument");
            return cnat(a);
        }
        if (id == "max") {
            lex_.ident();
            lex_.expect("(", "after max");
            CostExpr a = cost_expr();
            lex_.expect(",", "between max arguments");
            CostExpr b = cost_expr();
            lex_.expect(")", "after max arguments");
            return cmax(a, b);
        }
        int line = lex_.line(), col = lex_.col();
        Rat q = lex_.rational();
        if (q < 0) throw ParseError("cost constant must be nonnegative", line, col);
        return cconst(q);
    }

  private:
    bool peek_word(const char* w) {
        if (lex_.peek_ident() == w) {
            lex_.ident();
            return true;
        }
        return false;
    }

    bool is_cmp_ahead() {
        char c = lex_.peek();
        return c == '<' || c == '>' || c == '=' || (c == '!' && lex_.peek2("!="));
    }

    Lexer lex_;
};

}  // namespace

Command parse_program(const std::string& text) { return Parser(text).program(); }

CostExpr parse_cost_expr(const std::string& text) { return Parser(text).cost_toplevel(); }

BExp parse_bexp_text(const std::string& text) { return Parser(text).bexp_toplevel(); }

Rat parse_rat_text(const std::string& text) { return Parser(text).rat_toplevel(); }

}  // namespace pwhile

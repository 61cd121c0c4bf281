#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "interval.hpp"
#include "timed_word.hpp"

namespace mitlkit {

// MITL formulas in pointwise finite-word semantics.  Core connectives only:
// the concrete syntax's F/G/-> are expanded by the parser, R is the dual of
// U (release).  Modality intervals carry natural (or +inf) endpoints and are
// non-singular; the parser and validate() enforce this, the node type itself
// can hold arbitrary intervals (evaluation of shifted variants needs that).
enum class FKind { True, False, Atom, NegAtom, Not, And, Or, Until, Release };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    FKind kind;
    std::string atom;             // Atom / NegAtom
    FormulaPtr lhs, rhs;          // Not uses lhs only
    std::optional<Interval> ivl;  // Until / Release
};

inline FormulaPtr f_true() { return std::make_shared<Formula>(Formula{FKind::True, "", nullptr, nullptr, {}}); }
inline FormulaPtr f_false() { return std::make_shared<Formula>(Formula{FKind::False, "", nullptr, nullptr, {}}); }
inline FormulaPtr f_atom(std::string a) { return std::make_shared<Formula>(Formula{FKind::Atom, std::move(a), nullptr, nullptr, {}}); }
inline FormulaPtr f_neg_atom(std::string a) { return std::make_shared<Formula>(Formula{FKind::NegAtom, std::move(a), nullptr, nullptr, {}}); }
inline FormulaPtr f_not(FormulaPtr p) { return std::make_shared<Formula>(Formula{FKind::Not, "", std::move(p), nullptr, {}}); }
inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return std::make_shared<Formula>(Formula{FKind::And, "", std::move(a), std::move(b), {}}); }
inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return std::make_shared<Formula>(Formula{FKind::Or, "", std::move(a), std::move(b), {}}); }
inline FormulaPtr f_until(FormulaPtr a, Interval i, FormulaPtr b) {
    return std::make_shared<Formula>(Formula{FKind::Until, "", std::move(a), std::move(b), i});
}
inline FormulaPtr f_release(FormulaPtr a, Interval i, FormulaPtr b) {
    return std::make_shared<Formula>(Formula{FKind::Release, "", std::move(a), std::move(b), i});
}

// Shortcuts: eventually = T U_I φ, globally = F R_I φ (dual of eventually).
inline FormulaPtr f_eventually(Interval i, FormulaPtr p) { return f_until(f_true(), i, std::move(p)); }
inline FormulaPtr f_globally(Interval i, FormulaPtr p) { return f_release(f_false(), i, std::move(p)); }
inline Interval full_interval() { return Interval::unbounded(Rational(0), false); }

// Negation that keeps atoms in literal form and cancels double negations.
inline FormulaPtr f_negate(const FormulaPtr& p) {
    switch (p->kind) {
        case FKind::True: return f_false();
        case FKind::False: return f_true();
        case FKind::Atom: return f_neg_atom(p->atom);
        case FKind::NegAtom: return f_atom(p->atom);
        case FKind::Not: return p->lhs;
        default: return f_not(p);
    }
}

namespace detail {
inline int print_rank(FKind k) {
    switch (k) {
        case FKind::True: case FKind::False: case FKind::Atom: case FKind::NegAtom: case FKind::Not:
            return 5;
        case FKind::Until: case FKind::Release:
            return 4;
        case FKind::And:
            return 3;
        case FKind::Or:
            return 2;
    }
    return 0;
}
}  // namespace detail

// Concrete-syntax printer.  Modality operands are parenthesized unless
// atomic, and modalities under &/| always get parentheses; chains of the
// same binary connective stay flat only in their left-associative reading,
// so parse(print(φ)) reproduces φ structurally.
inline std::string print(const FormulaPtr& p) {
    auto wrap = [](const std::string& s) { return "(" + s + ")"; };
    switch (p->kind) {
        case FKind::True: return "T";
        case FKind::False: return "F";
        case FKind::Atom: return p->atom;
        case FKind::NegAtom: return "!" + p->atom;
        case FKind::Not: {
            const std::string inner = print(p->lhs);
            return detail::print_rank(p->lhs->kind) == 5 ? "!" + inner : "!" + wrap(inner);
        }
        case FKind::And: case FKind::Or: {
            const bool is_and = p->kind == FKind::And;
            const char* op = is_and ? " & " : " | ";
            const bool left_bare = detail::print_rank(p->lhs->kind) == 5 || p->lhs->kind == p->kind ||
                                   (!is_and && p->lhs->kind == FKind::And);
            const bool right_bare = detail::print_rank(p->rhs->kind) == 5 ||
                                    (!is_and && p->rhs->kind == FKind::And);
            std::string l = print(p->lhs);
            std::string r = print(p->rhs);
            return (left_bare ? l : wrap(l)) + op + (right_bare ? r : wrap(r));
        }
        case FKind::Until: case FKind::Release: {
            const char* op = p->kind == FKind::Until ? "U" : "R";
            std::string l = print(p->lhs);
            if (detail::print_rank(p->lhs->kind) != 5) l = wrap(l);
            std::string r = print(p->rhs);
            if (detail::print_rank(p->rhs->kind) != 5) r = wrap(r);
            return l + " " + op + p->ivl->to_string() + " " + r;
        }
    }
    return "?";
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case FKind::True: case FKind::False: return true;
        case FKind::Atom: case FKind::NegAtom: return a->atom == b->atom;
        case FKind::Not: return equal(a->lhs, b->lhs);
        case FKind::And: case FKind::Or: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
        case FKind::Until: case FKind::Release:
            return *a->ivl == *b->ivl && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
    return false;
}

// Negative normal form via the dualities ¬(φ1 U_I φ2) = ¬φ1 R_I ¬φ2,
// de Morgan, and double-negation cancellation.
inline FormulaPtr to_nnf(const FormulaPtr& p, bool neg = false) {
    switch (p->kind) {
        case FKind::True: return neg ? f_false() : f_true();
        case FKind::False: return neg ? f_true() : f_false();
        case FKind::Atom: return neg ? f_neg_atom(p->atom) : f_atom(p->atom);
        case FKind::NegAtom: return neg ? f_atom(p->atom) : f_neg_atom(p->atom);
        case FKind::Not: return to_nnf(p->lhs, !neg);
        case FKind::And:
            return neg ? f_or(to_nnf(p->lhs, true), to_nnf(p->rhs, true))
                       : f_and(to_nnf(p->lhs, false), to_nnf(p->rhs, false));
        case FKind::Or:
            return neg ? f_and(to_nnf(p->lhs, true), to_nnf(p->rhs, true))
                       : f_or(to_nnf(p->lhs, false), to_nnf(p->rhs, false));
        case FKind::Until:
            return neg ? f_release(to_nnf(p->lhs, true), *p->ivl, to_nnf(p->rhs, true))
                       : f_until(to_nnf(p->lhs, false), *p->ivl, to_nnf(p->rhs, false));
        case FKind::Release:
            return neg ? f_until(to_nnf(p->lhs, true), *p->ivl, to_nnf(p->rhs, true))
                       : f_release(to_nnf(p->lhs, false), *p->ivl, to_nnf(p->rhs, false));
    }
    throw std::logic_error("to_nnf: bad node");
}

inline bool is_nnf(const FormulaPtr& p) {
    switch (p->kind) {
        case FKind::Not: return false;
        case FKind::And: case FKind::Or: case FKind::Until: case FKind::Release:
            return is_nnf(p->lhs) && is_nnf(p->rhs);
        default: return true;
    }
}

// Pointwise satisfaction (θ,i) ⊨ φ, positions 1-based.  Release is evaluated
// through its defining duality ¬(¬φ1 U_I ¬φ2) without building negated ASTs.
inline bool eval(const TimedWord& th, std::size_t i, const FormulaPtr& p) {
    const std::size_t n = th.size();
    if (i < 1 || i > n)
        throw std::invalid_argument("eval: position " + std::to_string(i) + " outside 1.." + std::to_string(n));
    switch (p->kind) {
        case FKind::True: return true;
        case FKind::False: return false;
        case FKind::Atom: return th[i - 1].letter == p->atom;
        case FKind::NegAtom: return th[i - 1].letter != p->atom;
        case FKind::Not: return !eval(th, i, p->lhs);
        case FKind::And: return eval(th, i, p->lhs) && eval(th, i, p->rhs);
        case FKind::Or: return eval(th, i, p->lhs) || eval(th, i, p->rhs);
        case FKind::Until: {
            for (std::size_t j = i; j <= n; ++j) {
                if (p->ivl->contains(th[j - 1].time - th[i - 1].time) && eval(th, j, p->rhs))
                    return true;
                if (!eval(th, j, p->lhs))
                    return false;
            }
            return false;
        }
        case FKind::Release: {
            for (std::size_t j = i; j <= n; ++j) {
                if (p->ivl->contains(th[j - 1].time - th[i - 1].time) && !eval(th, j, p->rhs))
                    return false;
                if (eval(th, j, p->lhs))
                    return true;
            }
            return true;
        }
    }
    throw std::logic_error("eval: bad node");
}

// Subformulas in first-visit preorder, deduplicated structurally.
inline std::vector<FormulaPtr> subformulas(const FormulaPtr& p) {
    std::vector<FormulaPtr> out;
    std::set<std::string> seen;
    auto visit = [&](auto&& self, const FormulaPtr& q) -> void {
        if (seen.insert(print(q)).second) out.push_back(q);
        switch (q->kind) {
            case FKind::Not: self(self, q->lhs); break;
            case FKind::And: case FKind::Or: case FKind::Until: case FKind::Release:
                self(self, q->lhs);
                self(self, q->rhs);
                break;
            default: break;
        }
    };
    visit(visit, p);
    return out;
}

// Number of U/R modalities (the |Φ| used by the copy bounds).
inline std::size_t size(const FormulaPtr& p) {
    switch (p->kind) {
        case FKind::Not: return size(p->lhs);
        case FKind::And: case FKind::Or: return size(p->lhs) + size(p->rhs);
        case FKind::Until: case FKind::Release: return 1 + size(p->lhs) + size(p->rhs);
        default: return 0;
    }
}

// Checks the MITL restrictions on every modality interval: natural (or +inf)
// endpoints and non-singular.
inline void validate(const FormulaPtr& p) {
    switch (p->kind) {
        case FKind::Not: validate(p->lhs); return;
        case FKind::And: case FKind::Or: validate(p->lhs); validate(p->rhs); return;
        case FKind::Until: case FKind::Release: {
            const Interval& i = *p->ivl;
            const bool lo_nat = i.lo().is_integer() && !i.lo().is_negative();
            const bool hi_nat = i.hi_infinite() || (i.hi().is_integer() && !i.hi().is_negative());
            if (!lo_nat || !hi_nat)
                throw std::invalid_argument("modality interval endpoints must be natural or inf: " + i.to_string());
            if (!i.hi_infinite() && i.lo() == i.hi())
                throw std::invalid_argument("singular interval " + i.to_string() + " not allowed in MITL");
            validate(p->lhs);
            validate(p->rhs);
            return;
        }
        default: return;
    }
}

// ---------------------------------------------------------------------------
// Concrete-syntax parser.  Grammar (precedence ! > U/R/F/G > & > | > ->):
//   impl  := or ("->" impl)?
//   or    := and ("|" and)*
//   and   := modal ("&" modal)*
//   modal := unary (("U"|"R") interval modal)?
//   unary := "!" unary | ("F"|"G") interval? unary | primary
//   primary := "true" | "T" | "false" | ident | "(" impl ")"
// "F" doubles as the falsity constant: it is a modality only when followed
// by something that can start an operand or an interval bracket.
// ---------------------------------------------------------------------------
class Parser {
public:
    Parser(std::string text, const std::set<std::string>* alphabet)
        : text_(std::move(text)), alphabet_(alphabet) {}

    FormulaPtr run() {
        FormulaPtr p = parse_impl();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        validate(p);
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("syntax error at position " + std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) { ++pos_; return true; }
        return false;
    }
    bool lookahead_word(const char* w) {
        skip_ws();
        std::size_t i = pos_, k = 0;
        while (w[k] && i < text_.size() && text_[i] == w[k]) { ++i; ++k; }
        if (w[k]) return false;
        return i >= text_.size() || !(std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_');
    }
    bool eat_word(const char* w) {
        if (!lookahead_word(w)) return false;
        pos_ += std::string(w).size();
        return true;
    }
    std::string read_ident() {
        skip_ws();
        std::string s;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            s += text_[pos_++];
        return s;
    }
    std::uint64_t read_nat() {
        skip_ws();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("expected a natural number");
        std::uint64_t v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            v = v * 10 + static_cast<std::uint64_t>(text_[pos_++] - '0');
        return v;
    }

    // An interval starts with '[' always, or with '(' directly followed by a
    // digit (a parenthesized formula cannot start with one).
    bool at_interval() {
        skip_ws();
        if (pos_ >= text_.size()) return false;
        if (text_[pos_] == '[') return true;
        if (text_[pos_] != '(') return false;
        std::size_t i = pos_ + 1;
        while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
        return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    }

    bool at_formula_start() {
        skip_ws();
        if (pos_ >= text_.size()) return false;
        const char c = text_[pos_];
        return c == '!' || c == '(' || std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }

    Interval parse_interval() {
        skip_ws();
        bool lo_open;
        if (eat('[')) lo_open = false;
        else if (eat('(')) lo_open = true;
        else fail("expected interval");
        const std::uint64_t lo = read_nat();
        if (!eat(',')) fail("expected ',' in interval");
        std::optional<std::uint64_t> hi;
        if (!eat_word("inf")) hi = read_nat();
        bool hi_open;
        if (eat(']')) hi_open = false;
        else if (eat(')')) hi_open = true;
        else fail("expected ']' or ')' closing interval");
        if (!hi && !hi_open) fail("interval with sup inf must be right-open");
        if (hi && *hi == lo) fail("singular interval [" + std::to_string(lo) + "," + std::to_string(lo) + "] not allowed in MITL");
        if (hi && *hi < lo) fail("interval sup below inf");
        return Interval::make(Rational(static_cast<std::int64_t>(lo)), lo_open,
                              hi ? std::optional<Rational>(Rational(static_cast<std::int64_t>(*hi))) : std::nullopt,
                              hi_open);
    }

    FormulaPtr parse_impl() {
        FormulaPtr l = parse_or();
        skip_ws();
        if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '>') {
            pos_ += 2;
            return f_or(f_negate(l), parse_impl());
        }
        return l;
    }
    FormulaPtr parse_or() {
        FormulaPtr l = parse_and();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '|') { ++pos_; l = f_or(l, parse_and()); }
            else return l;
        }
    }
    FormulaPtr parse_and() {
        FormulaPtr l = parse_modal();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '&') { ++pos_; l = f_and(l, parse_modal()); }
            else return l;
        }
    }
    FormulaPtr parse_modal() {
        FormulaPtr l = parse_unary();
        skip_ws();
        if (lookahead_word("U")) {
            pos_ += 1;
            const Interval i = parse_interval();
            return f_until(l, i, parse_modal());
        }
        if (lookahead_word("R")) {
            pos_ += 1;
            const Interval i = parse_interval();
            return f_release(l, i, parse_modal());
        }
        return l;
    }
    FormulaPtr parse_unary() {
        if (eat('!'))
            return f_negate(parse_unary());
        if (lookahead_word("F") || lookahead_word("G")) {
            const bool globally = text_[pos_] == 'G';
            const std::size_t mark = pos_;
            pos_ += 1;
            if (at_interval()) {
                const Interval i = parse_interval();
                return globally ? f_globally(i, parse_unary()) : f_eventually(i, parse_unary());
            }
            // A following binary keyword (as in "F R[2,3] q") means the bare
            // constant, not a modality waiting for an operand.
            if (!lookahead_word("U") && !lookahead_word("R") && at_formula_start())
                return globally ? f_globally(full_interval(), parse_unary())
                                : f_eventually(full_interval(), parse_unary());
            pos_ = mark;
            if (globally) fail("'G' needs an operand");
            pos_ += 1;
            return f_false();
        }
        return parse_primary();
    }
    FormulaPtr parse_primary() {
        if (eat('(')) {
            FormulaPtr p = parse_impl();
            if (!eat(')')) fail("expected ')'");
            return p;
        }
        if (eat_word("true") || eat_word("T")) return f_true();
        if (eat_word("false")) return f_false();
        const std::size_t start = pos_;
        skip_ws();
        const std::string id = read_ident();
        if (id.empty()) fail("expected a formula");
        if (id == "inf" || id == "U" || id == "R") { pos_ = start; fail("'" + id + "' cannot be an atom"); }
        if (alphabet_ && !alphabet_->count(id)) { pos_ = start; fail("unknown atom '" + id + "'"); }
        return f_atom(id);
    }

    std::string text_;
    const std::set<std::string>* alphabet_;
    std::size_t pos_ = 0;
};

inline FormulaPtr parse(const std::string& text) { return Parser(text, nullptr).run(); }
inline FormulaPtr parse(const std::string& text, const std::set<std::string>& alphabet) {
    return Parser(text, &alphabet).run();
}

// All atom names occurring in the formula.
inline void collect_atoms(const FormulaPtr& p, std::set<std::string>& out) {
    switch (p->kind) {
        case FKind::Atom: case FKind::NegAtom: out.insert(p->atom); return;
        case FKind::Not: collect_atoms(p->lhs, out); return;
        case FKind::And: case FKind::Or: case FKind::Until: case FKind::Release:
            collect_atoms(p->lhs, out);
            collect_atoms(p->rhs, out);
            return;
        default: return;
    }
}

// Compact constructor-style AST dump for the CLI.
inline std::string dump_ast(const FormulaPtr& p) {
    switch (p->kind) {
        case FKind::True: return "True";
        case FKind::False: return "False";
        case FKind::Atom: return "Atom(" + p->atom + ")";
        case FKind::NegAtom: return "NegAtom(" + p->atom + ")";
        case FKind::Not: return "Not(" + dump_ast(p->lhs) + ")";
        case FKind::And: return "And(" + dump_ast(p->lhs) + ", " + dump_ast(p->rhs) + ")";
        case FKind::Or: return "Or(" + dump_ast(p->lhs) + ", " + dump_ast(p->rhs) + ")";
        case FKind::Until:
            return "Until(" + p->ivl->to_string() + ", " + dump_ast(p->lhs) + ", " + dump_ast(p->rhs) + ")";
        case FKind::Release:
            return "Release(" + p->ivl->to_string() + ", " + dump_ast(p->lhs) + ", " + dump_ast(p->rhs) + ")";
    }
    return "?";
}

}  // namespace mitlkit

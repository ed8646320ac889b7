#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "koenigs/error.hpp"
#include "koenigs/jet.hpp"

namespace koenigs {

enum class Op { Const, ImagUnit, Var, Add, Sub, Mul, Div, Neg, PowInt, PowReal, Exp, Log };

/// One node of an expression tree. Nodes are immutable and shared.
struct ExprNode {
    Op op = Op::Const;
    double number = 0.0;  // Const value or real exponent
    int exponent = 0;     // integer exponent
    std::shared_ptr<const ExprNode> lhs;
    std::shared_ptr<const ExprNode> rhs;
    /// Branch-safety precondition for Div, Log, PowReal and negative PowInt nodes.
    std::string note;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace detail {

inline std::string format_number(double x) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", x);
    return buf.data();
}

inline const char* kDivNote = "denominator must not vanish";
inline const char* kLogNote = "principal Log: argument must avoid the closed negative real axis";
inline const char* kPowNote = "w^t = exp(t Log w): w must avoid the closed negative real axis";

inline NodePtr make_leaf(Op op, double number = 0.0) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->number = number;
    return n;
}

inline NodePtr make_unary(Op op, NodePtr arg, double number = 0.0, int exponent = 0) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(arg);
    n->number = number;
    n->exponent = exponent;
    if (op == Op::Log) {
        n->note = kLogNote;
    } else if (op == Op::PowReal) {
        n->note = kPowNote;
    } else if (op == Op::PowInt && exponent < 0) {
        n->note = kDivNote;
    }
    return n;
}

inline NodePtr make_binary(Op op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    if (op == Op::Div) {
        n->note = kDivNote;
    }
    return n;
}

/// Power node; integral exponents of moderate size use the integer rule.
inline NodePtr make_power(NodePtr base, double t) {
    if (std::trunc(t) == t && std::abs(t) <= 1024.0) {
        return make_unary(Op::PowInt, std::move(base), 0.0, static_cast<int>(t));
    }
    return make_unary(Op::PowReal, std::move(base), t);
}

class Parser {
  public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) {
            throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
        }
        return e;
    }

  private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary(Op::Add, lhs, term());
            } else if (accept('-')) {
                lhs = make_binary(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = make_binary(Op::Mul, lhs, factor());
            } else if (accept('/')) {
                lhs = make_binary(Op::Div, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        if (accept('-')) {
            return make_unary(Op::Neg, factor());
        }
        if (accept('+')) {
            return factor();
        }
        NodePtr b = base();
        if (accept('^')) {
            b = make_power(std::move(b), exponent());
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '^') {
                throw ParseError("chained powers need parentheses", pos_);
            }
        }
        return b;
    }

    double exponent() {
        skip_ws();
        if (accept('(')) {
            const double e = signed_number();
            expect(')');
            return e;
        }
        return signed_number();
    }

    double signed_number() {
        double sign = 1.0;
        if (accept('-')) {
            sign = -1.0;
        } else {
            accept('+');
        }
        skip_ws();
        if (pos_ >= src_.size() || !(std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
            throw ParseError("expected numeric exponent", pos_);
        }
        return sign * number();
    }

    double number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                ++pos_;
            }
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                digits();
            } else {
                pos_ = save;
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc{} || ptr != src_.data() + pos_ || pos_ == start) {
            throw ParseError("malformed number", start);
        }
        return value;
    }

    NodePtr base() {
        skip_ws();
        if (pos_ >= src_.size()) {
            throw ParseError("expected operand", pos_);
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return make_leaf(Op::Const, number());
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
            const std::string_view ident = src_.substr(start, pos_ - start);
            if (ident == "z") {
                return make_leaf(Op::Var);
            }
            if (ident == "i") {
                return make_leaf(Op::ImagUnit);
            }
            if (ident == "exp" || ident == "log") {
                expect('(');
                std::vector<NodePtr> args{expr()};
                while (accept(',')) {
                    args.push_back(expr());
                }
                expect(')');
                if (args.size() != 1) {
                    throw ParseError("arity mismatch: " + std::string(ident) + " takes 1 argument, got " +
                                         std::to_string(args.size()),
                                     start);
                }
                return make_unary(ident == "exp" ? Op::Exp : Op::Log, args.front());
            }
            throw ParseError("unknown identifier '" + std::string(ident) + "'", start);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
};

inline std::string print(const ExprNode& n) {
    switch (n.op) {
        case Op::Const: return format_number(n.number);
        case Op::ImagUnit: return "i";
        case Op::Var: return "z";
        case Op::Add: return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
        case Op::Sub: return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
        case Op::Mul: return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
        case Op::Div: return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
        case Op::Neg: return "(-" + print(*n.lhs) + ")";
        case Op::PowInt:
            return "(" + print(*n.lhs) + ")^" +
                   (n.exponent < 0 ? "(" + std::to_string(n.exponent) + ")" : std::to_string(n.exponent));
        case Op::PowReal:
            return "(" + print(*n.lhs) + ")^" +
                   (n.number < 0 ? "(" + format_number(n.number) + ")" : format_number(n.number));
        case Op::Exp: return "exp(" + print(*n.lhs) + ")";
        case Op::Log: return "log(" + print(*n.lhs) + ")";
    }
    return {};
}

inline NodePtr substitute(const NodePtr& n, const NodePtr& replacement) {
    if (n->op == Op::Var) {
        return replacement;
    }
    if (!n->lhs) {
        return n;
    }
    auto copy = std::make_shared<ExprNode>(*n);
    copy->lhs = substitute(n->lhs, replacement);
    if (n->rhs) {
        copy->rhs = substitute(n->rhs, replacement);
    }
    return copy;
}

struct Instr {
    Op op;
    double number;
    int exponent;
};

inline void compile(const ExprNode& n, std::vector<Instr>& out, int depth, int& max_depth) {
    if (n.lhs) {
        compile(*n.lhs, out, depth, max_depth);
    }
    if (n.rhs) {
        compile(*n.rhs, out, depth + 1, max_depth);
    }
    max_depth = std::max(max_depth, depth + 1 + (n.rhs ? 1 : 0));
    out.push_back({n.op, n.number, n.exponent});
}

inline void collect_notes(const ExprNode& n, std::vector<std::string>& out) {
    if (!n.note.empty()) {
        out.push_back(n.note);
    }
    if (n.lhs) {
        collect_notes(*n.lhs, out);
    }
    if (n.rhs) {
        collect_notes(*n.rhs, out);
    }
}

}  // namespace detail

/// Immutable holomorphic map of the disk, stored as an expression tree and a
/// compiled postfix program for evaluation.
class MapExpr {
  public:
    MapExpr() : MapExpr(detail::make_leaf(Op::Var)) {}

    explicit MapExpr(NodePtr root, std::string name = {}) : root_(std::move(root)), name_(std::move(name)) {
        int max_depth = 0;
        detail::compile(*root_, program_, 0, max_depth);
        stack_depth_ = static_cast<std::size_t>(max_depth) + 1;
        if (name_.empty()) {
            name_ = detail::print(*root_);
        }
    }

    const NodePtr& root() const noexcept { return root_; }
    const std::string& name() const noexcept { return name_; }
    bool asserted_univalent() const noexcept { return univalent_; }

    /// Largest |z| at which evaluation is permitted (inclusive), if clipped.
    std::optional<double> max_modulus() const noexcept { return max_modulus_; }

    MapExpr with_name(std::string name) const {
        MapExpr m = *this;
        m.name_ = std::move(name);
        return m;
    }
    MapExpr with_univalent(bool flag) const {
        MapExpr m = *this;
        m.univalent_ = flag;
        return m;
    }
    MapExpr with_max_modulus(double r) const {
        MapExpr m = *this;
        m.max_modulus_ = r;
        return m;
    }

    /// Canonical fully parenthesized source; re-parses to an identical evaluator.
    std::string source() const { return detail::print(*root_); }

    std::vector<std::string> branch_notes() const {
        std::vector<std::string> notes;
        detail::collect_notes(*root_, notes);
        return notes;
    }

    Jet eval(cplx z) const {
        if (max_modulus_ && std::abs(z) > *max_modulus_) {
            throw DomainError("point outside the evaluable radius of " + name_);
        }
        constexpr std::size_t kInline = 32;
        std::array<Jet, kInline> inline_stack;
        std::vector<Jet> heap_stack;
        Jet* stack = inline_stack.data();
        if (stack_depth_ > kInline) {
            heap_stack.resize(stack_depth_);
            stack = heap_stack.data();
        }
        std::size_t top = 0;
        for (const auto& ins : program_) {
            switch (ins.op) {
                case Op::Const: stack[top++] = Jet::constant(ins.number); break;
                case Op::ImagUnit: stack[top++] = Jet::constant(cplx{0.0, 1.0}); break;
                case Op::Var: stack[top++] = Jet::variable(z); break;
                case Op::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
                case Op::Sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
                case Op::Mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
                case Op::Div: --top; stack[top - 1] = stack[top - 1] / stack[top]; break;
                case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
                case Op::PowInt: stack[top - 1] = pow(stack[top - 1], ins.exponent); break;
                case Op::PowReal: stack[top - 1] = pow(stack[top - 1], ins.number); break;
                case Op::Exp: stack[top - 1] = exp(stack[top - 1]); break;
                case Op::Log: stack[top - 1] = log(stack[top - 1]); break;
            }
        }
        const Jet out = stack[0];
        if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()) ||
            !std::isfinite(out.derivative.real()) || !std::isfinite(out.derivative.imag())) {
            throw DomainError("non-finite value evaluating " + name_);
        }
        return out;
    }

    /// Jet of this map composed with an inner jet (chain rule).
    Jet eval(const Jet& inner) const { return chain(eval(inner.value), inner); }

    cplx operator()(cplx z) const { return eval(z).value; }

  private:
    NodePtr root_;
    std::vector<detail::Instr> program_;
    std::size_t stack_depth_ = 1;
    std::string name_;
    bool univalent_ = false;
    std::optional<double> max_modulus_;
};

/// Parse an expression in the variable z. Grammar: standard precedence,
/// `^` with a numeric exponent, `i` the imaginary unit, functions exp and log.
inline MapExpr parse_map(std::string_view source) {
    return MapExpr(detail::Parser(source).parse());
}

inline Jet eval_jet(const MapExpr& expr, cplx z) { return expr.eval(z); }

/// outer∘inner as a new expression.
inline MapExpr compose(const MapExpr& outer, const MapExpr& inner) {
    MapExpr m(detail::substitute(outer.root(), inner.root()));
    if (inner.max_modulus()) {
        m = m.with_max_modulus(*inner.max_modulus());
    }
    return m;
}

}  // namespace koenigs

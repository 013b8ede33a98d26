#pragma once
// Small arithmetic language for user-supplied scalar functions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative, binds tighter than unary minus
//   primary := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//
// Variables: t, w1..wd, y1..yn, z<i><j> (or z<i>_<j>), p1..pn, q<i><j> (or q<i>_<j>).
// Functions: exp ln abs sin cos sgn (one argument), min max (two).

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace absde {

/// Slot positions of every variable in the evaluation vector:
/// [t, w(d), y(n), z(n*d, row-major), p(n), q(n*d)].
struct VariableLayout {
    std::size_t n = 1;
    std::size_t d = 1;

    std::size_t t() const { return 0; }
    std::size_t w(std::size_t j) const { return 1 + j; }
    std::size_t y(std::size_t i) const { return 1 + d + i; }
    std::size_t z(std::size_t i, std::size_t j) const { return 1 + d + n + i * d + j; }
    std::size_t p(std::size_t i) const { return 1 + d + n + n * d + i; }
    std::size_t q(std::size_t i, std::size_t j) const { return 1 + d + 2 * n + n * d + i * d + j; }
    std::size_t size() const { return 1 + d + 2 * n + 2 * n * d; }
};

class Expression {
public:
    enum class Op : unsigned char { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Ln, Abs, Sin, Cos, Sgn, Min, Max };
    struct Instr {
        Op op;
        std::size_t slot = 0;
        double value = 0.0;
    };

    Expression() = default;
    Expression(std::string source, VariableLayout layout, std::vector<Instr> program, std::size_t depth)
        : source_(std::move(source)), layout_(layout), program_(std::move(program)), depth_(depth) {}

    /// `slots` follows the layout; throws EvalError on ln of a nonpositive value.
    /// Pure and safe to call concurrently.
    double evaluate(std::span<const double> slots) const;

    const std::string& source() const { return source_; }
    const VariableLayout& layout() const { return layout_; }
    bool uses_slot(std::size_t slot) const;
    bool empty() const { return program_.empty(); }

    static constexpr std::size_t kMaxDepth = 64;

private:
    std::string source_;
    VariableLayout layout_;
    std::vector<Instr> program_;
    std::size_t depth_ = 0;
};

/// Throws ParseError with the byte offset and the set of tokens that would have been accepted.
Expression compile_expression(std::string_view source, VariableLayout layout = {});

}  // namespace absde

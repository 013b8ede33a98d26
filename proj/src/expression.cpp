#include "absde/expression.hpp"

#include "absde/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace absde {
namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

struct Function {
    std::string_view name;
    Op op;
    int arity;
};

constexpr std::array<Function, 8> kFunctions{{
    {"exp", Op::Exp, 1},
    {"ln", Op::Ln, 1},
    {"abs", Op::Abs, 1},
    {"sin", Op::Sin, 1},
    {"cos", Op::Cos, 1},
    {"sgn", Op::Sgn, 1},
    {"min", Op::Min, 2},
    {"max", Op::Max, 2},
}};

const std::vector<std::string> kOperand{"number", "variable", "function", "'('", "'-'"};

class Parser {
public:
    Parser(std::string_view src, VariableLayout layout) : src_(src), layout_(layout) {}

    std::pair<std::vector<Instr>, std::size_t> run() {
        skip();
        expr();
        skip();
        if (pos_ < src_.size()) fail({"operator", "end of input"}, "unexpected character");
        return {std::move(out_), max_depth_};
    }

private:
    [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
        throw ParseError(pos_, std::move(expected), detail);
    }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void emit(Instr ins, int stack_delta) {
        out_.push_back(ins);
        depth_ += stack_delta;
        max_depth_ = std::max<std::size_t>(max_depth_, static_cast<std::size_t>(depth_));
        if (max_depth_ > Expression::kMaxDepth) fail({}, "expression nests too deeply");
    }

    void expr() {
        term();
        for (;;) {
            if (eat('+')) {
                term();
                emit({Op::Add}, -1);
            } else if (eat('-')) {
                term();
                emit({Op::Sub}, -1);
            } else {
                return;
            }
        }
    }

    void term() {
        unary();
        for (;;) {
            if (eat('*')) {
                unary();
                emit({Op::Mul}, -1);
            } else if (eat('/')) {
                unary();
                emit({Op::Div}, -1);
            } else {
                return;
            }
        }
    }

    void unary() {
        if (++nest_ > Expression::kMaxDepth) fail({}, "expression nests too deeply");
        unary_body();
        --nest_;
    }

    void unary_body() {
        if (eat('-')) {
            unary();
            emit({Op::Neg}, 0);
        } else if (eat('+')) {
            unary();
        } else {
            power();
        }
    }

    void power() {
        primary();
        if (eat('^')) {
            unary();
            emit({Op::Pow}, -1);
        }
    }

    void primary() {
        skip();
        if (pos_ >= src_.size()) fail(kOperand, "unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            expr();
            if (!eat(')')) fail({"')'", "operator"}, "unbalanced parenthesis");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            identifier();
            return;
        }
        fail(kOperand, std::string("unexpected character '") + c + "'");
    }

    void number() {
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + src_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc()) fail({"number"}, "malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        emit({Op::Const, 0, v}, 1);
    }

    void identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view letters = src_.substr(start, pos_ - start);
        const std::size_t digits_at = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view digits = src_.substr(digits_at, pos_ - digits_at);

        if (digits.empty()) {
            if (letters == "t") {
                emit({Op::Var, layout_.t()}, 1);
                return;
            }
            for (const auto& f : kFunctions) {
                if (f.name != letters) continue;
                if (!eat('(')) fail({"'('"}, "function call needs parentheses");
                expr();
                for (int a = 1; a < f.arity; ++a) {
                    if (!eat(',')) fail({"','"}, std::string(f.name) + " takes " + std::to_string(f.arity) + " arguments");
                    expr();
                }
                if (!eat(')')) fail({"')'"}, std::string(f.name) + " takes " + std::to_string(f.arity) + " argument(s)");
                emit({f.op}, 1 - f.arity);
                return;
            }
            pos_ = start;
            fail(kOperand, "unknown identifier '" + std::string(letters) + "'");
        }

        const std::size_t slot = variable_slot(letters, digits, start);
        emit({Op::Var, slot}, 1);
    }

    std::size_t parse_index(std::string_view s, std::size_t at) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
            pos_ = at;
            fail({"variable"}, "bad variable index '" + std::string(s) + "'");
        }
        return v - 1;
    }

    std::size_t variable_slot(std::string_view letters, std::string_view digits, std::size_t at) {
        auto bad = [&](const std::string& why) {
            pos_ = at;
            fail({"variable"}, why);
        };
        auto limit = [&](std::size_t idx, std::size_t count, const char* what) {
            if (idx >= count) bad(std::string(what) + " index out of range");
        };
        if (letters.size() != 1) bad("unknown identifier '" + std::string(letters) + std::string(digits) + "'");
        const char kind = letters[0];
        if (kind == 'w' || kind == 'y' || kind == 'p') {
            const std::size_t i = parse_index(digits, at);
            if (kind == 'w') {
                limit(i, layout_.d, "w");
                return layout_.w(i);
            }
            limit(i, layout_.n, kind == 'y' ? "y" : "p");
            return kind == 'y' ? layout_.y(i) : layout_.p(i);
        }
        if (kind == 'z' || kind == 'q') {
            std::size_t i = 0, j = 0;
            if (const auto us = digits.find('_'); us != std::string_view::npos) {
                i = parse_index(digits.substr(0, us), at);
                j = parse_index(digits.substr(us + 1), at);
            } else if (digits.size() == 2) {
                i = parse_index(digits.substr(0, 1), at);
                j = parse_index(digits.substr(1, 1), at);
            } else {
                bad("matrix variables need two digits or the <row>_<col> form");
            }
            limit(i, layout_.n, "row");
            limit(j, layout_.d, "column");
            return kind == 'z' ? layout_.z(i, j) : layout_.q(i, j);
        }
        bad("unknown identifier '" + std::string(letters) + std::string(digits) + "'");
        return 0;
    }

    std::string_view src_;
    VariableLayout layout_;
    std::size_t pos_ = 0;
    std::vector<Instr> out_;
    long depth_ = 0;
    std::size_t nest_ = 0;
    std::size_t max_depth_ = 0;
};

}  // namespace

double Expression::evaluate(std::span<const double> slots) const {
    std::array<double, kMaxDepth> stack;
    std::size_t sp = 0;
    for (const Instr& ins : program_) {
        switch (ins.op) {
        case Op::Const: stack[sp++] = ins.value; break;
        case Op::Var: stack[sp++] = slots[ins.slot]; break;
        case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
        case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
        case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case Op::Div: --sp; stack[sp - 1] /= stack[sp]; break;
        case Op::Pow: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
        case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case Op::Ln: {
            const double x = stack[sp - 1];
            if (!(x > 0.0)) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "ln of nonpositive value %.17g", x);
                throw Error(ErrorCode::EvalError, buf);
            }
            stack[sp - 1] = std::log(x);
            break;
        }
        case Op::Abs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
        case Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case Op::Sgn: {
            const double x = stack[sp - 1];
            stack[sp - 1] = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
            break;
        }
        case Op::Min: --sp; stack[sp - 1] = std::min(stack[sp - 1], stack[sp]); break;
        case Op::Max: --sp; stack[sp - 1] = std::max(stack[sp - 1], stack[sp]); break;
        }
    }
    return sp == 0 ? 0.0 : stack[sp - 1];
}

bool Expression::uses_slot(std::size_t slot) const {
    return std::any_of(program_.begin(), program_.end(),
                       [slot](const Instr& i) { return i.op == Op::Var && i.slot == slot; });
}

Expression compile_expression(std::string_view source, VariableLayout layout) {
    auto [program, depth] = Parser(source, layout).run();
    return Expression(std::string(source), layout, std::move(program), depth);
}

}  // namespace absde

#include "insulopt/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace insulopt {

namespace {

bool is_name_char(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

}  // namespace

class ExprParser {
  public:
    explicit ExprParser(const std::string& src) : src_(src) {}

    Expr run() {
        Expr e;
        nodes_ = &e.nodes_;
        e.root_ = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("end of input");
        return e;
    }

  private:
    const std::string& src_;
    std::size_t pos_ = 0;
    std::vector<Expr::Node>* nodes_ = nullptr;

    [[noreturn]] void fail(const std::string& expected) {
        throw ExprSyntaxError(pos_, expected, src_);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    int add(Expr::Op op, int a = -1, int b = -1, double num = 0.0) {
        nodes_->push_back({op, num, a, b});
        return static_cast<int>(nodes_->size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (eat('+')) {
                lhs = add(Expr::Op::Add, lhs, parse_term());
            } else if (eat('-')) {
                lhs = add(Expr::Op::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            if (eat('*')) {
                lhs = add(Expr::Op::Mul, lhs, parse_unary());
            } else if (eat('/')) {
                lhs = add(Expr::Op::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    // '^' binds tighter than unary minus: -x^2 is -(x^2).  The exponent is
    // parsed at the unary level so 2^-3 works, and recursion through
    // parse_unary makes '^' right associative: 2^3^2 is 2^(3^2).
    int parse_unary() {
        if (eat('-')) return add(Expr::Op::Neg, parse_unary());
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        if (eat('^')) return add(Expr::Op::Pow, base, parse_unary());
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("a number, variable, function or '('");
        const char c = src_[pos_];

        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            if (!eat(')')) fail("')'");
            return inner;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();

        if (is_name_char(c)) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
            const std::string name = src_.substr(start, pos_ - start);
            if (name == "x") return add(Expr::Op::VarX);
            if (name == "y") return add(Expr::Op::VarY);

            Expr::Op op;
            int arity = 1;
            if (name == "sin") op = Expr::Op::Sin;
            else if (name == "cos") op = Expr::Op::Cos;
            else if (name == "exp") op = Expr::Op::Exp;
            else if (name == "sqrt") op = Expr::Op::Sqrt;
            else if (name == "abs") op = Expr::Op::Abs;
            else if (name == "min") { op = Expr::Op::Min; arity = 2; }
            else if (name == "max") { op = Expr::Op::Max; arity = 2; }
            else {
                pos_ = start;
                fail("one of x, y, sin, cos, exp, sqrt, abs, min, max");
            }

            if (!eat('(')) fail("'('");
            int a = parse_expr();
            int b = -1;
            if (arity == 2) {
                if (!eat(',')) fail("','");
                b = parse_expr();
            }
            if (!eat(')')) fail("')'");
            return add(op, a, b);
        }

        fail("a number, variable, function or '('");
    }

    int parse_number() {
        // Accept:  digits [ '.' digits ] [ ('e'|'E') ['+'|'-'] digits ]
        // and a leading '.' form like ".5".
        const char* begin = src_.data() + pos_;
        const char* end = src_.data() + src_.size();
        double value = 0.0;
        auto res = std::from_chars(begin, end, value, std::chars_format::general);
        if (res.ec != std::errc{} || res.ptr == begin) fail("a number");
        // from_chars accepts "inf"/"nan" spellings only via classify chars; it
        // never consumes alphabetic input here because parse_primary routes
        // names elsewhere.
        pos_ += static_cast<std::size_t>(res.ptr - begin);
        return add(Expr::Op::Num, -1, -1, value);
    }
};

Expr Expr::parse(const std::string& source) { return ExprParser(source).run(); }

Expr Expr::constant(double v) {
    Expr e;
    e.nodes_.push_back({Op::Num, v, -1, -1});
    e.root_ = 0;
    return e;
}

bool Expr::is_constant_zero() const {
    return root_ >= 0 && nodes_[root_].op == Op::Num && nodes_[root_].num == 0.0;
}

double Expr::eval(double x, double y) const { return eval_node(root_, x, y); }

double Expr::eval_node(int i, double x, double y) const {
    const Node& n = nodes_[i];
    switch (n.op) {
        case Op::Num: return n.num;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Add: return eval_node(n.a, x, y) + eval_node(n.b, x, y);
        case Op::Sub: return eval_node(n.a, x, y) - eval_node(n.b, x, y);
        case Op::Mul: return eval_node(n.a, x, y) * eval_node(n.b, x, y);
        case Op::Div: {
            const double num = eval_node(n.a, x, y);
            const double den = eval_node(n.b, x, y);
            if (den == 0.0) throw ExprDomainError("division by zero");
            return num / den;
        }
        case Op::Pow: return std::pow(eval_node(n.a, x, y), eval_node(n.b, x, y));
        case Op::Neg: return -eval_node(n.a, x, y);
        case Op::Sin: return std::sin(eval_node(n.a, x, y));
        case Op::Cos: return std::cos(eval_node(n.a, x, y));
        case Op::Exp: return std::exp(eval_node(n.a, x, y));
        case Op::Sqrt: {
            const double v = eval_node(n.a, x, y);
            if (v < 0.0) throw ExprDomainError("sqrt of a negative value");
            return std::sqrt(v);
        }
        case Op::Abs: return std::fabs(eval_node(n.a, x, y));
        case Op::Min: return std::fmin(eval_node(n.a, x, y), eval_node(n.b, x, y));
        case Op::Max: return std::fmax(eval_node(n.a, x, y), eval_node(n.b, x, y));
    }
    std::abort();  // unreachable
}

std::string Expr::to_string() const {
    std::string out;
    print_node(root_, out);
    return out;
}

void Expr::print_node(int i, std::string& out) const {
    const Node& n = nodes_[i];
    auto binary = [&](const char* sym) {
        out += '(';
        print_node(n.a, out);
        out += sym;
        print_node(n.b, out);
        out += ')';
    };
    auto call = [&](const char* name, int arity) {
        out += name;
        out += '(';
        print_node(n.a, out);
        if (arity == 2) {
            out += ',';
            print_node(n.b, out);
        }
        out += ')';
    };
    switch (n.op) {
        case Op::Num: {
            char buf[40];
            auto res = std::to_chars(buf, buf + sizeof buf, n.num);
            out.append(buf, res.ptr);
            return;
        }
        case Op::VarX: out += 'x'; return;
        case Op::VarY: out += 'y'; return;
        case Op::Add: binary("+"); return;
        case Op::Sub: binary("-"); return;
        case Op::Mul: binary("*"); return;
        case Op::Div: binary("/"); return;
        case Op::Pow: binary("^"); return;
        case Op::Neg:
            out += "(-";
            print_node(n.a, out);
            out += ')';
            return;
        case Op::Sin: call("sin", 1); return;
        case Op::Cos: call("cos", 1); return;
        case Op::Exp: call("exp", 1); return;
        case Op::Sqrt: call("sqrt", 1); return;
        case Op::Abs: call("abs", 1); return;
        case Op::Min: call("min", 2); return;
        case Op::Max: call("max", 2); return;
    }
}

}  // namespace insulopt

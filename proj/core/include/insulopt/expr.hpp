#pragma once

#include <string>
#include <vector>

#include "insulopt/errors.hpp"

namespace insulopt {

// Arithmetic expressions in the plane coordinates x, y.  Used for coefficient
// and data fields in run configurations (source term, ambient temperature,
// prescribed boundary values).
//
// Grammar (binding tightness: ^  >  unary -  >  * /  >  + -, with ^ right
// associative):
//
//   expr    := term  (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 'y' | name '(' expr (',' expr)? ')' | '(' expr ')'
//
// Functions: sin cos exp sqrt abs (one argument), min max (two arguments).
// Numbers are decimal literals with optional fraction and exponent.
class Expr {
  public:
    // Throws ExprSyntaxError (with the byte offset of the failure) on
    // malformed input.
    static Expr parse(const std::string& source);

    // Constant and coordinate shorthands.
    static Expr constant(double v);

    // Evaluation is total on finite inputs except division by zero and square
    // roots of negative numbers, which throw ExprDomainError.
    double eval(double x, double y) const;

    // Fully parenthesized rendering; parse(to_string()) evaluates identically.
    std::string to_string() const;

    bool is_constant_zero() const;

  private:
    enum class Op : unsigned char {
        Num, VarX, VarY,
        Add, Sub, Mul, Div, Pow, Neg,
        Sin, Cos, Exp, Sqrt, Abs, Min, Max,
    };
    struct Node {
        Op op;
        double num = 0.0;
        int a = -1;
        int b = -1;
    };

    std::vector<Node> nodes_;
    int root_ = -1;

    double eval_node(int i, double x, double y) const;
    void print_node(int i, std::string& out) const;
    friend class ExprParser;
};

}  // namespace insulopt

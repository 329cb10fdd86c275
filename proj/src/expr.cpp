#include "circle/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "circle/diophantine.hpp"
#include "circle/error.hpp"
#include "circle/trig.hpp"

namespace circle {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const Variables* vars) : text_(text), vars_(vars) {}

  double parse() {
    const double v = sum();
    skip();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  std::string_view text_;
  const Variables* vars_;
  size_t pos_ = 0;

  [[noreturn]] void error(const std::string& msg) {
    fail(ErrorKind::ParseError, "expression \"" + std::string(text_) + "\": " + msg);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double sum() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }

  // -2^2 = -(2^2); 2^-1 = 0.5
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  double power() {
    const double base = atom();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }

  double atom() {
    skip();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) error("missing ')'");
      return v;
    }
    if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      const std::string rest(text_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) error("bad number");
      pos_ += static_cast<size_t>(end - rest.c_str());
      return v;
    }
    std::string name;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) name += text_[pos_++];
    if (name.empty()) error("expected a value");
    if (name == "pi") return kPi;
    if (name == "e") return std::exp(1.0);
    if (name == "golden") return golden_mean();
    if (vars_) {
      if (const auto it = vars_->find(name); it != vars_->end()) return it->second;
    }
    if (!eat('(')) error("unknown name '" + name + "'");
    const double arg = sum();
    if (!eat(')')) error("missing ')'");
    if (name == "sqrt") return std::sqrt(arg);
    if (name == "exp") return std::exp(arg);
    if (name == "log") return std::log(arg);
    if (name == "sin") return std::sin(arg);
    if (name == "cos") return std::cos(arg);
    error("unknown function '" + name + "'");
  }
};

}  // namespace

double evaluate_expression(std::string_view text) { return Parser(text, nullptr).parse(); }

double evaluate_expression(std::string_view text, const Variables& vars) { return Parser(text, &vars).parse(); }

}  // namespace circle

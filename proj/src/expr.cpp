#include "sfk/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "sfk/errors.hpp"
#include "sfk/simd/kernels.hpp"

namespace sfk {

namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

constexpr std::size_t kChunk = 256;

struct FunctionInfo {
  Op op;
  int arity;
};

const std::unordered_map<std::string_view, FunctionInfo>& functions() {
  static const std::unordered_map<std::string_view, FunctionInfo> table = {
      {"sqrt", {Op::sqrt, 1}}, {"abs", {Op::abs, 1}},     {"exp", {Op::exp, 1}},
      {"log", {Op::log, 1}},   {"sin", {Op::sin, 1}},     {"cos", {Op::cos, 1}},
      {"tan", {Op::tan, 1}},   {"tanh", {Op::tanh, 1}},   {"sinh", {Op::sinh, 1}},
      {"cosh", {Op::cosh, 1}}, {"atan", {Op::atan, 1}},   {"atan2", {Op::atan2, 2}},
      {"min", {Op::min, 2}},   {"max", {Op::max, 2}},     {"pow", {Op::pow, 2}},
  };
  return table;
}

// Recursive-descent parser emitting postfix code.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::vector<Instr> parse() {
    sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character");
    return std::move(code_);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Instr> code_;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression: " + what + " at column " + std::to_string(pos_ + 1) + " in '" +
                      std::string(src_) + "'");
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
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
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void sum() {
    product();
    for (;;) {
      if (accept('+')) {
        product();
        code_.push_back({Op::add});
      } else if (accept('-')) {
        product();
        code_.push_back({Op::sub});
      } else {
        return;
      }
    }
  }

  void product() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        code_.push_back({Op::mul});
      } else if (accept('/')) {
        unary();
        code_.push_back({Op::div});
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      code_.push_back({Op::neg});
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  // Right associative; binds tighter than unary minus on its left.
  void power() {
    primary();
    if (accept('^')) {
      const std::size_t mark = code_.size();
      unary();
      // Small integer literal exponents become repeated multiplication.
      if (code_.size() == mark + 1 && code_[mark].op == Op::push_const) {
        const double e = code_[mark].value;
        if (e == std::floor(e) && std::fabs(e) <= 16) {
          code_.pop_back();
          code_.push_back({Op::ipow, e});
          return;
        }
      }
      code_.push_back({Op::pow});
    }
  }

  void primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      sum();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      identifier();
      return;
    }
    fail("unexpected character");
  }

  void number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    code_.push_back({Op::push_const, v});
  }

  void identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      const auto it = functions().find(name);
      if (it == functions().end()) {
        pos_ = start;
        fail("unknown function '" + std::string(name) + "'");
      }
      ++pos_;
      int args = 0;
      if (!accept(')')) {
        do {
          sum();
          ++args;
        } while (accept(','));
        expect(')');
      }
      if (args != it->second.arity) {
        pos_ = start;
        fail("function '" + std::string(name) + "' takes " + std::to_string(it->second.arity) +
             " argument(s)");
      }
      code_.push_back({it->second.op});
      return;
    }
    if (name == "x2") {
      code_.push_back({Op::push_x2});
    } else if (name == "x3") {
      code_.push_back({Op::push_x3});
    } else if (name == "pi") {
      code_.push_back({Op::push_const, std::numbers::pi});
    } else if (name == "e") {
      code_.push_back({Op::push_const, std::numbers::e});
    } else {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
  }
};

std::size_t stack_depth(const std::vector<Instr>& code) {
  std::size_t depth = 0, peak = 0;
  for (const Instr& in : code) {
    switch (in.op) {
      case Op::push_const:
      case Op::push_x2:
      case Op::push_x3:
        ++depth;
        break;
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div:
      case Op::pow:
      case Op::atan2:
      case Op::min:
      case Op::max:
        --depth;
        break;
      default:
        break;
    }
    peak = std::max(peak, depth);
  }
  return peak;
}

template <class F>
void map_unary(double* a, std::size_t n, F f) {
  for (std::size_t i = 0; i < n; ++i) a[i] = f(a[i]);
}

}  // namespace

Expression Expression::compile(std::string_view source) {
  Expression e;
  e.source_ = std::string(source);
  e.program_ = Parser(source).parse();
  e.max_depth_ = stack_depth(e.program_);
  return e;
}

bool Expression::is_constant() const {
  return std::none_of(program_.begin(), program_.end(), [](const Instr& in) {
    return in.op == Op::push_x2 || in.op == Op::push_x3;
  });
}

double Expression::operator()(double x2, double x3) const {
  double out = 0.0;
  run(&x2, &x3, &out, 1);
  return out;
}

void Expression::evaluate(std::span<const double> x2, std::span<const double> x3,
                          std::span<double> out) const {
  if (x2.size() != x3.size() || x2.size() != out.size())
    throw std::invalid_argument("Expression::evaluate: mismatched spans");
  for (std::size_t i = 0; i < out.size(); i += kChunk) {
    const std::size_t n = std::min(kChunk, out.size() - i);
    run(x2.data() + i, x3.data() + i, out.data() + i, n);
  }
}

void Expression::run(const double* x2, const double* x3, double* out, std::size_t n) const {
  const simd::KernelTable& k = simd::kernels();
  thread_local std::vector<double> storage;
  // Two scratch slots above the deepest stack level for ipow.
  storage.resize((max_depth_ + 2) * kChunk);
  std::size_t top = 0;  // number of occupied slots
  const auto slot = [&](std::size_t i) { return storage.data() + i * kChunk; };

  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::push_const:
        k.fill(in.value, slot(top++), n);
        break;
      case Op::push_x2:
        std::copy(x2, x2 + n, slot(top++));
        break;
      case Op::push_x3:
        std::copy(x3, x3 + n, slot(top++));
        break;
      case Op::add:
        --top;
        k.add(slot(top - 1), slot(top), slot(top - 1), n);
        break;
      case Op::sub:
        --top;
        k.sub(slot(top - 1), slot(top), slot(top - 1), n);
        break;
      case Op::mul:
        --top;
        k.mul(slot(top - 1), slot(top), slot(top - 1), n);
        break;
      case Op::div:
        --top;
        k.div(slot(top - 1), slot(top), slot(top - 1), n);
        break;
      case Op::min:
        --top;
        k.min(slot(top - 1), slot(top), slot(top - 1), n);
        break;
      case Op::max:
        --top;
        k.max(slot(top - 1), slot(top), slot(top - 1), n);
        break;
      case Op::pow: {
        --top;
        double* a = slot(top - 1);
        const double* b = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::pow(a[i], b[i]);
        break;
      }
      case Op::atan2: {
        --top;
        double* a = slot(top - 1);
        const double* b = slot(top);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::atan2(a[i], b[i]);
        break;
      }
      case Op::ipow: {
        double* a = slot(top - 1);
        const int e = static_cast<int>(in.value);
        const unsigned m = static_cast<unsigned>(std::abs(e));
        // Square-and-multiply in the scratch slots above the stack top.
        double* base = slot(top);
        double* acc = slot(top + 1);
        std::copy(a, a + n, base);
        k.fill(1.0, acc, n);
        for (unsigned bit = m; bit; bit >>= 1) {
          if (bit & 1u) k.mul(acc, base, acc, n);
          if (bit > 1) k.mul(base, base, base, n);
        }
        if (e < 0) {
          k.fill(1.0, a, n);
          k.div(a, acc, a, n);
        } else {
          std::copy(acc, acc + n, a);
        }
        break;
      }
      case Op::neg:
        k.neg(slot(top - 1), slot(top - 1), n);
        break;
      case Op::sqrt:
        k.sqrt(slot(top - 1), slot(top - 1), n);
        break;
      case Op::abs:
        k.abs(slot(top - 1), slot(top - 1), n);
        break;
      case Op::exp:
        map_unary(slot(top - 1), n, [](double v) { return std::exp(v); });
        break;
      case Op::log:
        map_unary(slot(top - 1), n, [](double v) { return std::log(v); });
        break;
      case Op::sin:
        map_unary(slot(top - 1), n, [](double v) { return std::sin(v); });
        break;
      case Op::cos:
        map_unary(slot(top - 1), n, [](double v) { return std::cos(v); });
        break;
      case Op::tan:
        map_unary(slot(top - 1), n, [](double v) { return std::tan(v); });
        break;
      case Op::tanh:
        map_unary(slot(top - 1), n, [](double v) { return std::tanh(v); });
        break;
      case Op::sinh:
        map_unary(slot(top - 1), n, [](double v) { return std::sinh(v); });
        break;
      case Op::cosh:
        map_unary(slot(top - 1), n, [](double v) { return std::cosh(v); });
        break;
      case Op::atan:
        map_unary(slot(top - 1), n, [](double v) { return std::atan(v); });
        break;
    }
  }
  std::copy(slot(0), slot(0) + n, out);
}

}  // namespace sfk

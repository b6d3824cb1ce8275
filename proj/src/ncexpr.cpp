#include "ncdist/ncexpr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

namespace ncdist {

namespace {

bool word_less(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return a.size() < b.size();  // graded ...
  return a < b;                                          // ... lexicographic
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return format_real(c.real());
  std::string im = (c.imag() == 1.0) ? "i" : format_real(c.imag()) + "*i";
  if (c.real() == 0.0) return im;
  return "(" + format_real(c.real()) + "+" + im + ")";
}

}  // namespace

NCPolynomial::NCPolynomial(int num_vars, std::vector<NCMonomial> terms)
    : num_vars_(num_vars) {
  for (const auto& t : terms)
    for (int v : t.word)
      if (v < 1 || v > num_vars)
        throw ConfigError("NCPolynomial: variable index out of range");
  std::sort(terms.begin(), terms.end(),
            [](const NCMonomial& a, const NCMonomial& b) { return word_less(a.word, b.word); });
  for (auto& t : terms) {
    if (!terms_.empty() && terms_.back().word == t.word)
      terms_.back().coefficient += t.coefficient;
    else
      terms_.push_back(std::move(t));
  }
  std::erase_if(terms_, [](const NCMonomial& t) { return t.coefficient == Complex(0.0); });
}

int NCPolynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max<int>(d, static_cast<int>(t.word.size()));
  return d;
}

NCPolynomial NCPolynomial::adjoint() const {
  std::vector<NCMonomial> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    NCMonomial m{std::conj(t.coefficient), t.word};
    std::reverse(m.word.begin(), m.word.end());
    out.push_back(std::move(m));
  }
  return NCPolynomial(num_vars_, std::move(out));
}

bool NCPolynomial::is_selfadjoint(double tol) const {
  const NCPolynomial adj = adjoint();
  if (adj.terms_.size() != terms_.size()) return false;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (terms_[k].word != adj.terms_[k].word) return false;
    if (std::abs(terms_[k].coefficient - adj.terms_[k].coefficient) > tol) return false;
  }
  return true;
}

ComplexMatrix NCPolynomial::evaluate(std::span<const ComplexMatrix> X) const {
  if (static_cast<int>(X.size()) != num_vars_)
    throw DimensionError("NCPolynomial::evaluate: wrong tuple length");
  const std::size_t n = X.empty() ? 1 : X[0].rows();
  for (const auto& x : X)
    if (!x.is_square() || x.rows() != n)
      throw DimensionError("NCPolynomial::evaluate: matrices must be square of equal size");
  ComplexMatrix acc(n, n);
  for (const auto& t : terms_) {
    ComplexMatrix m = ComplexMatrix::scalar(n, t.coefficient);
    for (int v : t.word) m = m * X[static_cast<std::size_t>(v - 1)];
    acc += m;
  }
  return acc;
}

std::string NCPolynomial::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& t : terms_) {
    if (!s.empty()) s += " + ";
    std::string mono;
    for (int v : t.word) {
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(v);
    }
    if (mono.empty())
      s += format_complex(t.coefficient);
    else if (t.coefficient == Complex(1.0))
      s += mono;
    else
      s += format_complex(t.coefficient) + "*" + mono;
  }
  return s;
}

ExprPtr make_constant(Complex c) {
  auto e = std::make_shared<RationalExpr>();
  e->kind = RationalExpr::Kind::constant;
  e->value = c;
  return e;
}

ExprPtr make_variable(int index) {
  if (index < 1) throw ConfigError("make_variable: index must be >= 1");
  auto e = std::make_shared<RationalExpr>();
  e->kind = RationalExpr::Kind::variable;
  e->var_index = index;
  return e;
}

ExprPtr make_sum(ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<RationalExpr>();
  e->kind = RationalExpr::Kind::sum;
  e->left = std::move(a);
  e->right = std::move(b);
  return e;
}

ExprPtr make_product(ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<RationalExpr>();
  e->kind = RationalExpr::Kind::product;
  e->left = std::move(a);
  e->right = std::move(b);
  return e;
}

ExprPtr make_inverse(ExprPtr a) {
  if (a->kind == RationalExpr::Kind::constant && a->value == Complex(0.0))
    throw ConfigError("make_inverse: inverse of the zero constant");
  auto e = std::make_shared<RationalExpr>();
  e->kind = RationalExpr::Kind::inverse;
  e->child = std::move(a);
  return e;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int num_vars) : text_(text), d_(num_vars) {}

  ExprPtr run() {
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("parse error at position " + std::to_string(pos_) + ": " + msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      if (eat('+'))
        e = make_sum(e, parse_term());
      else if (eat('-'))
        e = make_sum(e, make_product(make_constant(-1.0), parse_term()));
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_power();
    while (eat('*')) e = make_product(e, parse_power());
    return e;
  }

  ExprPtr parse_power() {
    ExprPtr e = parse_primary();
    while (eat('^')) {
      skip_ws();
      std::size_t start = pos_;
      long k = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        k = k * 10 + (text_[pos_] - '0');
        ++pos_;
        if (k > 64) fail("exponent too large");
      }
      if (pos_ == start) fail("expected a nonnegative integer exponent");
      if (k == 0) {
        e = make_constant(1.0);
      } else {
        ExprPtr base = e;
        for (long j = 1; j < k; ++j) e = make_product(e, base);
      }
    }
    return e;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (c == '-') {
      ++pos_;
      return make_product(make_constant(-1.0), parse_power());
    }
    if (c == 'i' && !starts_keyword("inv")) {
      ++pos_;
      return make_constant(Complex(0.0, 1.0));
    }
    if (starts_keyword("inv")) {
      pos_ += 3;
      if (!eat('(')) fail("expected '(' after inv");
      ExprPtr inner = parse_sum();
      if (!eat(')')) fail("expected ')'");
      if (inner->kind == RationalExpr::Kind::constant && inner->value == Complex(0.0))
        fail("inverse of the zero constant");
      return make_inverse(inner);
    }
    if (c == 'x') {
      ++pos_;
      std::size_t start = pos_;
      long idx = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        idx = idx * 10 + (text_[pos_] - '0');
        ++pos_;
        if (idx > 1000000) fail("variable index too large");
      }
      if (pos_ == start) fail("expected a variable index after 'x'");
      if (idx < 1 || idx > d_)
        fail("variable x" + std::to_string(idx) + " out of range 1..x" + std::to_string(d_));
      return make_variable(static_cast<int>(idx));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    fail(std::string("unexpected character '") + c + "'");
  }

  bool starts_keyword(std::string_view kw) {
    skip_ws();
    return text_.substr(pos_, kw.size()) == kw;
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    const std::string tok(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail("malformed number '" + tok + "'");
      return make_constant(v);
    } catch (const std::exception&) {
      fail("malformed number '" + tok + "'");
    }
  }

  std::string_view text_;
  int d_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse(std::string_view text, int num_vars) {
  return Parser(text, num_vars).run();
}

ExprPtr adjoint(const ExprPtr& e) {
  switch (e->kind) {
    case RationalExpr::Kind::constant:
      return make_constant(std::conj(e->value));
    case RationalExpr::Kind::variable:
      return e;
    case RationalExpr::Kind::sum:
      return make_sum(adjoint(e->left), adjoint(e->right));
    case RationalExpr::Kind::product:
      return make_product(adjoint(e->right), adjoint(e->left));
    case RationalExpr::Kind::inverse:
      return make_inverse(adjoint(e->child));
  }
  throw Error("adjoint: corrupt expression node");
}

bool is_polynomial(const ExprPtr& e) {
  switch (e->kind) {
    case RationalExpr::Kind::constant:
    case RationalExpr::Kind::variable:
      return true;
    case RationalExpr::Kind::sum:
    case RationalExpr::Kind::product:
      return is_polynomial(e->left) && is_polynomial(e->right);
    case RationalExpr::Kind::inverse:
      return false;
  }
  return false;
}

bool is_constant(const ExprPtr& e, Complex* value) {
  if (is_polynomial(e)) {
    NCPolynomial p = to_polynomial(e, std::max(1, max_variable(e)));
    if (p.degree() == 0) {
      if (value) *value = p.is_zero() ? Complex(0.0) : p.terms()[0].coefficient;
      return true;
    }
  }
  return false;
}

int max_variable(const ExprPtr& e) {
  switch (e->kind) {
    case RationalExpr::Kind::constant:
      return 0;
    case RationalExpr::Kind::variable:
      return e->var_index;
    case RationalExpr::Kind::sum:
    case RationalExpr::Kind::product:
      return std::max(max_variable(e->left), max_variable(e->right));
    case RationalExpr::Kind::inverse:
      return max_variable(e->child);
  }
  return 0;
}

NCPolynomial to_polynomial(const ExprPtr& e, int num_vars) {
  switch (e->kind) {
    case RationalExpr::Kind::constant:
      return NCPolynomial(num_vars, {{e->value, {}}});
    case RationalExpr::Kind::variable:
      return NCPolynomial(num_vars, {{Complex(1.0), {e->var_index}}});
    case RationalExpr::Kind::sum: {
      NCPolynomial l = to_polynomial(e->left, num_vars);
      NCPolynomial r = to_polynomial(e->right, num_vars);
      std::vector<NCMonomial> terms = l.terms();
      terms.insert(terms.end(), r.terms().begin(), r.terms().end());
      return NCPolynomial(num_vars, std::move(terms));
    }
    case RationalExpr::Kind::product: {
      NCPolynomial l = to_polynomial(e->left, num_vars);
      NCPolynomial r = to_polynomial(e->right, num_vars);
      std::vector<NCMonomial> terms;
      terms.reserve(l.terms().size() * r.terms().size());
      for (const auto& a : l.terms())
        for (const auto& b : r.terms()) {
          NCMonomial m{a.coefficient * b.coefficient, a.word};
          m.word.insert(m.word.end(), b.word.begin(), b.word.end());
          terms.push_back(std::move(m));
        }
      return NCPolynomial(num_vars, std::move(terms));
    }
    case RationalExpr::Kind::inverse:
      throw ConfigError("to_polynomial: expression contains an inverse");
  }
  throw Error("to_polynomial: corrupt expression node");
}

ComplexMatrix evaluate(const ExprPtr& e, std::span<const ComplexMatrix> X) {
  const std::size_t n = X.empty() ? 1 : X[0].rows();
  for (const auto& x : X)
    if (!x.is_square() || x.rows() != n)
      throw DimensionError("evaluate: matrices must be square of equal size");
  switch (e->kind) {
    case RationalExpr::Kind::constant:
      return ComplexMatrix::scalar(n, e->value);
    case RationalExpr::Kind::variable: {
      const std::size_t k = static_cast<std::size_t>(e->var_index - 1);
      if (k >= X.size()) throw DimensionError("evaluate: not enough matrices for variables");
      return X[k];
    }
    case RationalExpr::Kind::sum:
      return evaluate(e->left, X) + evaluate(e->right, X);
    case RationalExpr::Kind::product:
      return evaluate(e->left, X) * evaluate(e->right, X);
    case RationalExpr::Kind::inverse: {
      ComplexMatrix inner = evaluate(e->child, X);
      try {
        return solve_inverse(inner);
      } catch (const SingularMatrixError&) {
        throw EvaluationError("r(X1,...,Xd) not defined: inverse of " + print_expr(e->child) +
                              " does not exist");
      }
    }
  }
  throw Error("evaluate: corrupt expression node");
}

std::string print_expr(const ExprPtr& e) {
  switch (e->kind) {
    case RationalExpr::Kind::constant:
      return format_complex(e->value);
    case RationalExpr::Kind::variable:
      return "x" + std::to_string(e->var_index);
    case RationalExpr::Kind::sum:
      return "(" + print_expr(e->left) + " + " + print_expr(e->right) + ")";
    case RationalExpr::Kind::product:
      return "(" + print_expr(e->left) + "*" + print_expr(e->right) + ")";
    case RationalExpr::Kind::inverse:
      return "inv(" + print_expr(e->child) + ")";
  }
  return "?";
}

namespace {

// Canonical normalization for the syntactic selfadjointness check: constants
// folded, sums flattened and sorted by printed form, products left-assoc.
ExprPtr normalize(const ExprPtr& e);

void flatten_sum(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (e->kind == RationalExpr::Kind::sum) {
    flatten_sum(e->left, out);
    flatten_sum(e->right, out);
  } else {
    out.push_back(e);
  }
}

ExprPtr normalize(const ExprPtr& e) {
  switch (e->kind) {
    case RationalExpr::Kind::constant:
    case RationalExpr::Kind::variable:
      return e;
    case RationalExpr::Kind::sum: {
      std::vector<ExprPtr> parts;
      flatten_sum(e, parts);
      for (auto& p : parts) p = normalize(p);
      // fold constants together
      Complex cval(0.0);
      std::vector<ExprPtr> rest;
      for (auto& p : parts) {
        if (p->kind == RationalExpr::Kind::constant)
          cval += p->value;
        else
          rest.push_back(p);
      }
      if (cval != Complex(0.0) || rest.empty()) rest.push_back(make_constant(cval));
      std::sort(rest.begin(), rest.end(), [](const ExprPtr& a, const ExprPtr& b) {
        return print_expr(a) < print_expr(b);
      });
      ExprPtr acc = rest[0];
      for (std::size_t k = 1; k < rest.size(); ++k) acc = make_sum(acc, rest[k]);
      return acc;
    }
    case RationalExpr::Kind::product: {
      ExprPtr l = normalize(e->left);
      ExprPtr r = normalize(e->right);
      if (l->kind == RationalExpr::Kind::constant && r->kind == RationalExpr::Kind::constant)
        return make_constant(l->value * r->value);
      // re-associate to the left so that a*(b*c) and (a*b)*c agree
      if (r->kind == RationalExpr::Kind::product)
        return normalize(make_product(make_product(l, r->left), r->right));
      return make_product(l, r);
    }
    case RationalExpr::Kind::inverse: {
      ExprPtr c = normalize(e->child);
      if (c->kind == RationalExpr::Kind::constant) {
        if (c->value == Complex(0.0)) throw ConfigError("normalize: inverse of zero constant");
        return make_constant(Complex(1.0) / c->value);
      }
      return make_inverse(c);
    }
  }
  throw Error("normalize: corrupt expression node");
}

bool equal_nodes(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case RationalExpr::Kind::constant:
      return a->value == b->value;
    case RationalExpr::Kind::variable:
      return a->var_index == b->var_index;
    case RationalExpr::Kind::sum:
    case RationalExpr::Kind::product:
      return equal_nodes(a->left, b->left) && equal_nodes(a->right, b->right);
    case RationalExpr::Kind::inverse:
      return equal_nodes(a->child, b->child);
  }
  return false;
}

}  // namespace

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  return equal_nodes(normalize(a), normalize(b));
}

bool is_selfadjoint(const ExprPtr& e) {
  if (is_polynomial(e)) {
    const int d = std::max(1, max_variable(e));
    return to_polynomial(e, d).is_selfadjoint();
  }
  return structurally_equal(e, adjoint(e));
}

}  // namespace ncdist

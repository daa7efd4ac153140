#include "sigkit/rational.hpp"

#include <cctype>

#include "sigkit/errors.hpp"

namespace sigkit {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  std::string text(s);
  if (!text.empty() && text[0] == '+') text.erase(0, 1);
  return mpz_class(text, 10);
}

}  // namespace

Rational::Rational(long num, long den) : q_(num, den) {
  if (den == 0) throw InputError("rational with zero denominator");
  q_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw InputError("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto slash = text.find('/');
  const auto num = text.substr(0, slash);
  const auto den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-') {
    throw ParseError("not an exact rational: \"" + std::string(text) + "\"");
  }
  return Rational(parse_integer(num), parse_integer(den));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw InvariantViolation("rational division by zero");
  q_ /= o.q_;
  return *this;
}

std::string Rational::str() const { return q_.get_num().get_str() + "/" + q_.get_den().get_str(); }

mpz_class factorial(unsigned n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

mpz_class binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

}  // namespace sigkit

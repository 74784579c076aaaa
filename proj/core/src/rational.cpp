#include "pxv/rational.hpp"

#include <cctype>

namespace pxv {

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw ParseError("empty rational", 0);
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  std::string num;
  std::string den = "1";
  std::size_t start = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) num += text[i++];
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::string frac;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) frac += text[i++];
    if (num.empty() && frac.empty()) throw ParseError("malformed decimal", start);
    num += frac;
    den = "1" + std::string(frac.size(), '0');
  } else if (i < text.size() && text[i] == '/') {
    ++i;
    den.clear();
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) den += text[i++];
    if (den.empty()) throw ParseError("missing denominator", i);
  }
  if (num.empty()) throw ParseError("malformed rational '" + std::string(text) + "'", start);
  if (i != text.size()) throw ParseError("trailing characters in rational '" + std::string(text) + "'", i);
  mpz_class n(num, 10), d(den, 10);
  if (d == 0) throw ParseError("zero denominator", i);
  Rational r(n, d);
  r.canonicalize();
  if (negative) r = -r;
  return r;
}

std::string to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational pow(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw Error("zero raised to a negative power");
    Rational inv = 1 / base;
    return pow(inv, -exponent);
  }
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num().get_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(d.get_mpz_t(), base.get_den().get_mpz_t(), static_cast<unsigned long>(exponent));
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::optional<Rational> exact_root(const Rational& r, unsigned long k) {
  if (k == 0) return std::nullopt;
  if (k == 1) return r;
  if (r < 0 && k % 2 == 0) return std::nullopt;
  mpz_class n, d;
  mpz_class an = abs(r.get_num());
  if (mpz_root(n.get_mpz_t(), an.get_mpz_t(), k) == 0) return std::nullopt;
  if (mpz_root(d.get_mpz_t(), r.get_den().get_mpz_t(), k) == 0) return std::nullopt;
  if (r < 0) n = -n;
  Rational out(n, d);
  out.canonicalize();
  return out;
}

}  // namespace pxv

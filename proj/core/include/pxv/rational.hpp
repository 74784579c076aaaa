#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pxv {

using Rational = mpq_class;

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Raised when an enumeration bound (worlds, alignments, events) is exceeded.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

// Accepts "3/4", "-2", "0.4725", "1e-3" is rejected. Decimals are read exactly.
Rational parse_rational(std::string_view text);

// Lowest terms, "p/q" or "p" when the denominator is 1.
std::string to_string(const Rational& r);

Rational pow(const Rational& base, long exponent);

// Exact k-th root if one exists in the rationals.
std::optional<Rational> exact_root(const Rational& r, unsigned long k);

}  // namespace pxv

#include "tvx/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "tvx/errors.hpp"

namespace tvx {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& detail)
    : Error(detail + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

ValidationError::ValidationError(std::string field, const std::string& detail)
    : Error(field + ": " + detail), field_(std::move(field)) {}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void malformed(std::string_view text) {
  throw ParseError(ParseError::Kind::MalformedNumber, 0,
                   "malformed number '" + std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) malformed(text);
    mpz_class d{std::string(den), 10};
    if (d == 0) malformed(text);
    value = Rational(mpz_class(std::string(num), 10), d);
    value.canonicalize();
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if (!all_digits(whole) || !all_digits(frac)) malformed(text);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    value = Rational(mpz_class(std::string(whole) + std::string(frac), 10), scale);
    value.canonicalize();
  } else {
    if (!all_digits(body)) malformed(text);
    value = Rational(mpz_class(std::string(body), 10));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) { return value.get_str(); }

Rational ratio(long num, long den) {
  if (den == 0) throw std::invalid_argument("ratio: zero denominator");
  Rational r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

double to_double(const Rational& value) { return value.get_d(); }

Rational from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("from_double: non-finite value");
  Rational r(value);
  r.canonicalize();
  return r;
}

}  // namespace tvx

#include "nilspec/rational.hpp"

#include <charconv>
#include <cmath>
#include <compare>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace nilspec {

namespace {

using Wide = __int128;

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits(Wide v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parse_int(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a rational: '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::domain_error("rational with zero denominator");
  *this = from_wide(numerator, denominator);
}

Rational Rational::from_wide(Wide n, Wide d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  Wide g = wide_gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n == 0) d = 1;
  if (!fits(n) || !fits(d)) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rational Rational::operator-() const {
  if (num_ == std::numeric_limits<std::int64_t>::min()) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
  if (den_ == 1 && rhs.den_ == 1) {
    std::int64_t out;
    if (__builtin_add_overflow(num_, rhs.num_, &out)) throw std::overflow_error("rational overflow");
    num_ = out;
    return *this;
  }
  const std::int64_t g = std::gcd(den_, rhs.den_);
  Wide n = Wide(num_) * (rhs.den_ / g) + Wide(rhs.num_) * (den_ / g);
  Wide d = Wide(den_) * (rhs.den_ / g);
  return *this = from_wide(n, d);
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
  if (num_ == 0 || rhs.num_ == 0) {
    num_ = 0;
    den_ = 1;
    return *this;
  }
  if (den_ == 1 && rhs.den_ == 1) {
    std::int64_t out;
    if (__builtin_mul_overflow(num_, rhs.num_, &out)) throw std::overflow_error("rational overflow");
    num_ = out;
    return *this;
  }
  const std::int64_t g1 = std::gcd(num_, rhs.den_);
  const std::int64_t g2 = std::gcd(rhs.num_, den_);
  Wide n = Wide(num_ / g1) * (rhs.num_ / g2);
  Wide d = Wide(den_ / g2) * (rhs.den_ / g1);
  if (!fits(n) || !fits(d)) throw std::overflow_error("rational overflow");
  num_ = static_cast<std::int64_t>(n);
  den_ = static_cast<std::int64_t>(d);
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.num_ == 0) throw std::domain_error("rational division by zero");
  Rational inv;
  inv.num_ = rhs.den_;
  inv.den_ = rhs.num_;
  if (inv.den_ < 0) {
    inv.num_ = -inv.num_;
    inv.den_ = -inv.den_;
  }
  return *this *= inv;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return Wide(a.num_) * b.den_ <=> Wide(b.num_) * a.den_;
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

namespace {
std::optional<std::int64_t> isqrt_exact(std::int64_t v) {
  if (v < 0) return std::nullopt;
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
  for (std::int64_t c = std::max<std::int64_t>(0, s - 2); c <= s + 2; ++c) {
    if (Wide(c) * c == v) return c;
  }
  return std::nullopt;
}
}  // namespace

std::optional<Rational> exact_sqrt(const Rational& r) {
  auto n = isqrt_exact(r.num());
  auto d = isqrt_exact(r.den());
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

std::int64_t floor(const Rational& r) {
  std::int64_t q = r.num() / r.den();
  if (r.num() % r.den() != 0 && r.num() < 0) --q;
  return q;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  os << r.num();
  if (r.den() != 1) os << '/' << r.den();
  return os;
}

}  // namespace nilspec

#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "commchar/error.hpp"

namespace commchar {

// Exact non-negative rational used for supports and support thresholds.
class Ratio {
public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ <= 0 || num_ < 0) throw InvalidSupport("ratio must be non-negative with positive denominator");
    const auto g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Ratio& a, const Ratio& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
  }

  // True when count/total >= *this.
  bool reached_by(std::int64_t count, std::int64_t total) const {
    return static_cast<__int128>(count) * den_ >= static_cast<__int128>(num_) * total;
  }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  // Accepts "p/q" or a plain decimal such as "0.3" (converted exactly).
  static Ratio parse(std::string_view text) {
    const auto fail = [&] { return InvalidSupport("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
      return Ratio(parse_digits(text.substr(0, slash), fail), parse_digits(text.substr(slash + 1), fail));
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool seen_dot = false;
    bool seen_digit = false;
    for (const char c : text) {
      if (c == '.' && !seen_dot) {
        seen_dot = true;
      } else if (c >= '0' && c <= '9') {
        if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10) throw fail();
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
        seen_digit = true;
      } else {
        throw fail();
      }
    }
    if (!seen_digit) throw fail();
    return Ratio(num, den);
  }

private:
  template <typename Fail>
  static std::int64_t parse_digits(std::string_view digits, const Fail& fail) {
    if (digits.empty()) throw fail();
    std::int64_t v = 0;
    for (const char c : digits) {
      if (c < '0' || c > '9' || v > (INT64_MAX - 9) / 10) throw fail();
      v = v * 10 + (c - '0');
    }
    return v;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace commchar

/*
 * Copyright 2026 The epsfine authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace epsfine {

// All quantities in this library are exact rationals. Certificates and
// inequality reports are proof objects, so no floating point anywhere.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Rational rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Canonical text form: "p" when the denominator is 1, otherwise "p/q".
inline std::string format_rational(const Rational& q) {
  const BigInt num = numerator(q);
  const BigInt den = denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Strict parser for "p", "-p", "p/q" (q a positive integer). No whitespace,
/// no floats. Returns nullopt on any malformed input.
inline std::optional<Rational> parse_rational(std::string_view text) {
  auto parse_int = [](std::string_view s, bool allow_sign) -> std::optional<BigInt> {
    if (s.empty()) return std::nullopt;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return std::nullopt;
    for (std::size_t j = i; j < s.size(); ++j) {
      if (s[j] < '0' || s[j] > '9') return std::nullopt;
    }
    BigInt magnitude{std::string(s.substr(i))};
    if (!s.empty() && s[0] == '-') magnitude = -magnitude;
    return magnitude;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    auto num = parse_int(text, true);
    if (!num) return std::nullopt;
    return Rational(*num);
  }
  auto num = parse_int(text.substr(0, slash), true);
  auto den = parse_int(text.substr(slash + 1), false);
  if (!num || !den || *den == 0) return std::nullopt;
  return Rational(*num, *den);
}

}  // namespace epsfine

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
#include <catch2/catch_amalgamated.hpp>

#include "epsfine/rational.hpp"

using namespace epsfine;

TEST_CASE("rational text round trip") {
  CHECK(format_rational(Rational(3, 10)) == "3/10");
  CHECK(format_rational(Rational(4, 2)) == "2");
  CHECK(format_rational(Rational(-1, 4)) == "-1/4");
  CHECK(format_rational(Rational(0)) == "0");

  CHECK(parse_rational("3/10") == Rational(3, 10));
  CHECK(parse_rational("-7/2") == Rational(-7, 2));
  CHECK(parse_rational("+5") == Rational(5));
  CHECK(parse_rational("0") == Rational(0));
  CHECK(parse_rational("6/4") == Rational(3, 2));
}

TEST_CASE("rational parser rejects malformed input") {
  CHECK_FALSE(parse_rational(""));
  CHECK_FALSE(parse_rational("1.5"));
  CHECK_FALSE(parse_rational("1/0"));
  CHECK_FALSE(parse_rational("1/-2"));
  CHECK_FALSE(parse_rational("a/b"));
  CHECK_FALSE(parse_rational(" 1/2"));
  CHECK_FALSE(parse_rational("1/2 "));
  CHECK_FALSE(parse_rational("1//2"));
  CHECK_FALSE(parse_rational("/2"));
  CHECK_FALSE(parse_rational("3/"));
}

TEST_CASE("rational helpers") {
  CHECK(rat_abs(Rational(-3, 7)) == Rational(3, 7));
  CHECK(rat_abs(Rational(3, 7)) == Rational(3, 7));
  CHECK(rat_max(Rational(1, 3), Rational(34, 100)) == Rational(34, 100));
}

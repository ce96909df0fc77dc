#include "doctest.h"

#include "hcmeta/errors.hpp"
#include "hcmeta/exponent.hpp"

using namespace hcmeta;

TEST_CASE("rational parsing") {
    CHECK(parse_rational("7/10") == Rational(7, 10));
    CHECK(parse_rational("14/20") == Rational(7, 10));
    CHECK(parse_rational("0.7") == Rational(7, 10));
    CHECK(parse_rational("-0.25") == Rational(-1, 4));
    CHECK(parse_rational("3") == Rational(3));
    for (auto bad : {"", "x", "7/11x", "1/0", "0.5.1", "1/", "/2", "2e3"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_rational(bad), InvalidArgument);
    }
}

TEST_CASE("rational formatting") {
    CHECK(to_string(Rational(7, 10)) == "7/10");
    CHECK(to_string(Rational(4, 2)) == "2");
    CHECK(to_string(Rational(-3, 9)) == "-1/3");
    CHECK(to_double(Rational(3, 8)) == 0.375);
    for (auto text : {"11/20", "2/5", "3/10", "-5/7"}) CHECK(to_string(parse_rational(text)) == text);
}

TEST_CASE("asymptotic exponents") {
    AsymptoticExponent a{2, 1}, b{3, -1};
    Rational half(1, 2);
    CHECK(a.value(half) == Rational(5, 2));
    CHECK(b.value(half) == Rational(5, 2));
    CHECK(compare(a, b, half) == Order::tie);
    CHECK(compare(a, a, half) == Order::equal);
    CHECK(compare(a, b, Rational(7, 10)) == Order::greater);
    CHECK(compare(b, a, Rational(7, 10)) == Order::less);
    CHECK(a + b == AsymptoticExponent{5, 0});
    CHECK(a - b == AsymptoticExponent{-1, 2});
    CHECK(-a == AsymptoticExponent{-2, -1});
    CHECK(a.value(0.5) == 2.5);
    CHECK(to_string(b) == "[3,-1]");
    // pi(x) grows like lambda^{|x_U| + (1+alpha)|x_V|}.
    CHECK(weight_exponent(2, 3).value(half) == Rational(2) + Rational(3) * Rational(3, 2));
    CHECK(gamma_exponent().value(half) == Rational(3, 2));
}

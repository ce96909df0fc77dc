#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace hcmeta {

using Rational = boost::rational<std::int64_t>;

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

// Order lambda^(p + q*alpha) as lambda -> infinity.
struct AsymptoticExponent {
    std::int64_t p = 0;
    std::int64_t q = 0;

    Rational value(const Rational& alpha) const { return Rational(p) + Rational(q) * alpha; }
    double value(double alpha) const { return static_cast<double>(p) + static_cast<double>(q) * alpha; }

    AsymptoticExponent operator+(const AsymptoticExponent& o) const { return {p + o.p, q + o.q}; }
    AsymptoticExponent operator-(const AsymptoticExponent& o) const { return {p - o.p, q - o.q}; }
    AsymptoticExponent operator-() const { return {-p, -q}; }
    bool operator==(const AsymptoticExponent& o) const = default;
};

enum class Order { less, equal, greater, tie };

// Compares lambda^a with lambda^b under alpha.  `tie` means equal value but distinct (p,q).
Order compare(const AsymptoticExponent& a, const AsymptoticExponent& b, const Rational& alpha);

// Stationary weight of a configuration with nu U-particles and nv V-particles.
inline AsymptoticExponent weight_exponent(int nu, int nv) { return {nu + nv, nv}; }

// gamma = (1+lambda)|U| + (1+lambda_bar)|V| grows like lambda_bar.
inline AsymptoticExponent gamma_exponent() { return {1, 1}; }

std::string to_string(const AsymptoticExponent& e);

}  // namespace hcmeta

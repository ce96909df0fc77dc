#include "hcmeta/exponent.hpp"

#include "hcmeta/errors.hpp"

namespace hcmeta {

namespace {

// Whole-string integer; rejects trailing characters.
std::int64_t parse_int(const std::string& text) {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos) {
            auto dot = text.find('.');
            if (dot == std::string::npos) return Rational(parse_int(text));
            // Decimal literal: exact conversion of the written digits.
            std::string digits = text.substr(0, dot) + text.substr(dot + 1);
            std::int64_t den = 1;
            for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
            return Rational(parse_int(digits), den);
        }
        std::int64_t num = parse_int(text.substr(0, slash));
        std::int64_t den = parse_int(text.substr(slash + 1));
        if (den == 0) throw InvalidArgument("zero denominator in '" + text + "'");
        return Rational(num, den);
    } catch (const InvalidArgument&) {
        throw;
    } catch (const std::exception&) {
        throw InvalidArgument("cannot parse rational '" + text + "'");
    }
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Order compare(const AsymptoticExponent& a, const AsymptoticExponent& b, const Rational& alpha) {
    Rational va = a.value(alpha), vb = b.value(alpha);
    if (va < vb) return Order::less;
    if (va > vb) return Order::greater;
    return a == b ? Order::equal : Order::tie;
}

std::string to_string(const AsymptoticExponent& e) {
    return "[" + std::to_string(e.p) + "," + std::to_string(e.q) + "]";
}

}  // namespace hcmeta

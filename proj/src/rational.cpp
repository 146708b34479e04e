#include "krepair/rational.hpp"

#include <cctype>

#include "krepair/errors.hpp"

namespace krepair {

namespace {

BigInt pow10(long exponent)
{
    BigInt result = 1;
    for (long i = 0; i < exponent; ++i)
        result *= 10;
    return result;
}

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

Rational parse_decimal(std::string_view text, std::string_view original)
{
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        auto exp_text = text.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 4)
            throw FormatError("bad exponent in number '" + std::string(original) + "'");
        exponent = std::stol(std::string(exp_text));
        if (exp_negative)
            exponent = -exponent;
        text = text.substr(0, e);
    }

    std::string_view integral = text;
    std::string_view fraction;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        integral = text.substr(0, dot);
        fraction = text.substr(dot + 1);
    }
    if ((integral.empty() && fraction.empty())
        || (!integral.empty() && !all_digits(integral))
        || (!fraction.empty() && !all_digits(fraction)))
        throw FormatError("not a number: '" + std::string(original) + "'");

    // cpp_int reads a leading zero as an octal prefix.
    std::string joined = std::string(integral) + std::string(fraction);
    auto first = joined.find_first_not_of('0');
    BigInt digits(first == std::string::npos ? std::string("0") : joined.substr(first));
    long scale = static_cast<long>(fraction.size()) - exponent;
    Rational value = scale >= 0 ? Rational(digits, pow10(scale)) : Rational(digits * pow10(-scale));
    return negative ? Rational(-value) : value;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty())
        throw FormatError("empty number");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash), text);
        Rational den = parse_decimal(text.substr(slash + 1), text);
        if (den == 0)
            throw FormatError("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    return parse_decimal(text, text);
}

std::string to_string(const Rational& value)
{
    return value.str();
}

BigInt floor_of(const Rational& value)
{
    BigInt num = boost::multiprecision::numerator(value);
    BigInt den = boost::multiprecision::denominator(value);
    BigInt q = num / den;
    if (num < 0 && q * den != num)
        q -= 1;
    return q;
}

double to_double(const Rational& value)
{
    return value.convert_to<double>();
}

} // namespace krepair

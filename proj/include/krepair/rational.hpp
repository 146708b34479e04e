#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace krepair {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts integers, decimals ("0.125", "-3.5", "1e-3") and fractions ("2/7").
// Decimal input is converted exactly, never through binary floating point.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& value);

BigInt floor_of(const Rational& value);

double to_double(const Rational& value);

} // namespace krepair

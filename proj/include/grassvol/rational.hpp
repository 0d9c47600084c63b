#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace grassvol {

using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long long num, long long den = 1) { return Rational(num, den); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace grassvol

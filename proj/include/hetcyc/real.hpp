#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>
#include <type_traits>

namespace hetcyc {

// Variable-precision float. The working precision is process-wide (MPFR default),
// so set it once with PrecisionScope before spawning worker threads.
using hp = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                         boost::multiprecision::et_off>;

template <class R>
inline constexpr bool is_hp_v = std::is_same_v<R, hp>;

class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits10);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

unsigned working_digits();

// Raises the working precision for its lifetime; never lowers it.
class DigitsAtLeast {
public:
    explicit DigitsAtLeast(unsigned digits10);
    ~DigitsAtLeast();
    DigitsAtLeast(const DigitsAtLeast&) = delete;
    DigitsAtLeast& operator=(const DigitsAtLeast&) = delete;

private:
    unsigned saved_;
    bool active_;
};

// Digits needed to resolve an orbit whose |y| values multiply to 10^-decades.
unsigned digits_for_decades(double decades);

hp hp_pi();
hp hp_from_string(const std::string& s);
std::string hp_to_string(const hp& v);  // full working precision, scientific
double hp_log10_abs(const hp& v);       // finite even when |v| underflows double

template <class R>
inline R pi_v() {
    if constexpr (is_hp_v<R>)
        return hp_pi();
    else
        return static_cast<R>(3.141592653589793238462643383279502884L);
}

template <class To, class From>
inline To real_cast(const From& v) {
    if constexpr (std::is_same_v<To, From>)
        return v;
    else if constexpr (is_hp_v<From>)
        return static_cast<To>(v);
    else
        return To(v);
}

inline double to_d(const hp& v) { return static_cast<double>(v); }
inline double to_d(double v) { return v; }
inline double to_d(long double v) { return static_cast<double>(v); }

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

}  // namespace hetcyc

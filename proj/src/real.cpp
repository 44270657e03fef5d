#include "hetcyc/real.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hetcyc {

PrecisionScope::PrecisionScope(unsigned digits10) : saved_(hp::default_precision()) {
    hp::default_precision(digits10);
}

PrecisionScope::~PrecisionScope() { hp::default_precision(saved_); }

DigitsAtLeast::DigitsAtLeast(unsigned digits10)
    : saved_(hp::default_precision()), active_(digits10 > saved_) {
    if (active_) hp::default_precision(digits10);
}

DigitsAtLeast::~DigitsAtLeast() {
    if (active_) hp::default_precision(saved_);
}

unsigned working_digits() { return hp::default_precision(); }

unsigned digits_for_decades(double decades) {
    if (!(decades >= 0)) decades = 0;
    return static_cast<unsigned>(std::ceil(2.0 * decades)) + 80u;
}

hp hp_pi() {
    hp r(0);
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

hp hp_from_string(const std::string& s) {
    hp r;
    if (mpfr_set_str(r.backend().data(), s.c_str(), 10, MPFR_RNDN) != 0)
        throw std::invalid_argument("not a decimal number: " + s);
    return r;
}

std::string hp_to_string(const hp& v) {
    return v.str(0, std::ios_base::scientific);
}

double hp_log10_abs(const hp& v) {
    if (v == 0) return -std::numeric_limits<double>::infinity();
    long e = 0;
    double m = mpfr_get_d_2exp(&e, v.backend().data(), MPFR_RNDN);
    return std::log10(std::fabs(m)) + static_cast<double>(e) * std::log10(2.0);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace hetcyc

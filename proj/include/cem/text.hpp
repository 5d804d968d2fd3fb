#pragma once

#include <charconv>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cem {

// Shortest round-trip decimal rendering. Locale-free, used everywhere a
// number ends up in a file so that identical runs produce identical bytes.
inline std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad float literal: '" + std::string(s) + "'");
    return x;
}

// Complex as "(re,im)".
inline std::string format_complex(std::complex<double> z) {
    return "(" + format_double(z.real()) + "," + format_double(z.imag()) + ")";
}

inline std::complex<double> parse_complex(std::string_view s) {
    if (s.size() < 5 || s.front() != '(' || s.back() != ')')
        throw std::invalid_argument("bad complex literal: '" + std::string(s) + "'");
    s = s.substr(1, s.size() - 2);
    auto comma = s.find(',');
    if (comma == std::string_view::npos)
        throw std::invalid_argument("bad complex literal");
    return {parse_double(s.substr(0, comma)), parse_double(s.substr(comma + 1))};
}

// Human-facing complex rendering, e.g. "(0.5+0i)" or "(0-2i)".
inline std::string pretty_complex(std::complex<double> z) {
    std::string s = "(" + format_double(z.real());
    s += (z.imag() < 0 || std::signbit(z.imag())) ? "-" : "+";
    s += format_double(std::abs(z.imag()));
    s += "i)";
    return s;
}

}  // namespace cem

#include "layoutforge/format.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace layoutforge {

std::string format_double(double v) {
    if (v == 0.0) {
        return "0";
    }
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format number");
    }
    return std::string(buf.data(), end);
}

std::string format_fixed(double v, int digits) {
    std::array<char, 64> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
    std::string out(buf.data(), static_cast<std::size_t>(n));
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) {
        out.erase(0, 1);
    }
    return out;
}

}  // namespace layoutforge

#include "dseq/interval.hpp"

#include <cstdlib>
#include <string>

namespace dseq {

Interval parse_interval(std::string_view text) {
    std::string s;
    for (char ch : text)
        if (ch != ' ' && ch != '\t') s += ch;
    auto bad = [&] { return std::invalid_argument("malformed interval '" + std::string(text) + "'"); };
    if (s.size() < 5) throw bad();
    const char open = s.front(), close = s.back();
    if ((open != '[' && open != '(') || (close != ']' && close != ')')) throw bad();
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw bad();
    const std::string left = s.substr(1, comma - 1), right = s.substr(comma + 1, s.size() - comma - 2);
    char* end = nullptr;
    const double lo = std::strtod(left.c_str(), &end);
    if (left.empty() || *end) throw bad();
    const double hi = std::strtod(right.c_str(), &end);
    if (right.empty() || *end) throw bad();
    return Interval(lo, hi, open == '(', close == ')');
}

} // namespace dseq

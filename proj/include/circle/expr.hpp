#pragma once

#include <map>
#include <string>
#include <string_view>

namespace circle {

/// Evaluates a small arithmetic expression such as "(sqrt(5)-1)/2" or "1/pi".
/// Knows + - * / ^, parentheses, sqrt/exp/log/sin/cos, the constants pi and e,
/// and "golden" for (sqrt(5)-1)/2. Throws ParseError.
double evaluate_expression(std::string_view text);

using Variables = std::map<std::string, double, std::less<>>;
/// Same, with extra named values (e.g. "alpha").
double evaluate_expression(std::string_view text, const Variables& vars);

}  // namespace circle

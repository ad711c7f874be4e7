#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "physbench/polyfield.hpp"

namespace pb::cli {

class ExpressionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parses an exact polynomial such as "1 + x^2/4 - 3/5*x*y" over n variables.
// Variables are x0..x(n-1), the names used when polynomials are printed; for
// n <= 4 the names x, y, z, w are accepted as well.
// Decimal literals are read as exact rationals; division is by constants only.
[[nodiscard]] poly::RPoly parse_polynomial(std::string_view text, std::size_t n_vars);

}  // namespace pb::cli

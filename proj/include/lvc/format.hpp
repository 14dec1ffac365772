#pragma once

#include <string>
#include <string_view>

namespace lvc {

/// Text with 17 significant digits ("%.17g"); round-trips every double.
std::string format_number(double v);

/// Parses a full string as a double; throws ConfigError naming `key` otherwise.
double parse_number(std::string_view key, std::string_view text);

}  // namespace lvc

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cislunar::csv {

/// 18 significant digits; the representation every artifact uses.
std::string number(double value);
std::string number(const std::optional<double>& value);

/// Joins fields with commas. Fields are written verbatim; ids must not
/// contain commas (enforced by Scenario::validate).
std::string row(const std::vector<std::string>& fields);

std::vector<std::string> split(std::string_view line);

}  // namespace cislunar::csv

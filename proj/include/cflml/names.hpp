#pragma once

#include "cflml/evolution.hpp"
#include "cflml/neighborhood.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace cflml {

// Command-line / model-file spellings of the option enums.

std::string_view to_string(FilterKind v);
std::string_view to_string(CenterMode v);
std::string_view to_string(Strategy v);
std::string_view to_string(Variant v);

std::optional<FilterKind> parse_filter(std::string_view s);
std::optional<CenterMode> parse_center(std::string_view s);
std::optional<Strategy> parse_strategy(std::string_view s);
std::optional<Variant> parse_variant(std::string_view s);

}  // namespace cflml

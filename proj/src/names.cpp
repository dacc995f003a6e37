#include "cflml/names.hpp"

namespace cflml {

std::string_view to_string(FilterKind v) { return v == FilterKind::Gaussian ? "gaussian" : "butterworth"; }
std::string_view to_string(CenterMode v) { return v == CenterMode::Weighted ? "weighted" : "self"; }
std::string_view to_string(Strategy v) { return v == Strategy::Radical ? "radical" : "conservative"; }

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Single:
      return "cflml1";
    case Variant::UpToThree:
      return "cflml3";
    case Variant::Unbounded:
      return "em";
  }
  return "?";
}

std::optional<FilterKind> parse_filter(std::string_view s) {
  if (s == "gaussian") return FilterKind::Gaussian;
  if (s == "butterworth") return FilterKind::Butterworth;
  return std::nullopt;
}

std::optional<CenterMode> parse_center(std::string_view s) {
  if (s == "weighted") return CenterMode::Weighted;
  if (s == "self") return CenterMode::Self;
  return std::nullopt;
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "radical") return Strategy::Radical;
  if (s == "conservative") return Strategy::Conservative;
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "cflml1") return Variant::Single;
  if (s == "cflml3") return Variant::UpToThree;
  if (s == "em") return Variant::Unbounded;
  return std::nullopt;
}

}  // namespace cflml

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace runclust {

/// Parses an ISO-8601 UTC timestamp into seconds since the Unix epoch.
///
/// Accepted forms: `YYYY-MM-DDTHH:MM[:SS[.fff]]` with an optional `Z` or
/// `+00:00` suffix; a space may replace the `T`. Any other offset is
/// rejected. Throws DataError on malformed input.
double parse_iso8601(std::string_view text);

/// Formats epoch seconds as `YYYY-MM-DDTHH:MM:SSZ`. Non-integral times get a
/// six-digit fractional part.
std::string format_iso8601(double epoch_seconds);

}  // namespace runclust

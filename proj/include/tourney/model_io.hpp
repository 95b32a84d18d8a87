#pragma once

#include <string>

#include "tourney/outcome_model.hpp"

namespace tourney {

// Parse a model description of the form
//   { "id": "chess", "denominator": 2,
//     "support": [[0, 0.25], [1, 0.5], [2, 0.25]],
//     "support_exact": [[0, [1, 4]], [1, [1, 2]], [2, [1, 4]]] }
// support_exact is optional; when present its numerators must match support's
// and the rational weights override nothing — floats stay authoritative for
// float paths, rationals for the oracle. Throws ConfigError on malformed input
// or DomainError if the parsed model fails validation.
OutcomeModel parse_model_json(const std::string& text);

// Load from a file path; the names "classical" and "chess" resolve to the
// built-in models without touching the filesystem.
OutcomeModel load_model(const std::string& path_or_name);

}  // namespace tourney

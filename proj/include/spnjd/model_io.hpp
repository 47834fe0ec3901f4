#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "spnjd/spn.hpp"

namespace spnjd {

// Model documents are JSON:
//
//   {
//     "places": ["A", "B"],
//     "transitions": [
//       {"name": "t1", "rate": 1.0, "input": {"A": 1}, "output": {"B": 1}}
//     ],
//     "initial_marking": {"A": 100},
//     "alpha": {"A": 1},          (optional scaling direction)
//     "notes": ["..."]            (optional, ignored)
//   }

/// Parses document text. Throws SyntaxError (with line:column) for bad JSON
/// and ModelError (with the field path) for schema violations.
ModelDocument parse_model_document(std::string_view text, std::string_view source = "<input>");

/// parse_model_document + validate_model on a file.
SpnModel parse_model_file(const std::filesystem::path& path);

/// Pretty-printed JSON document for `model`, with optional notes.
std::string serialize_model(const SpnModel& model, const std::vector<std::string>& notes = {});

}  // namespace spnjd

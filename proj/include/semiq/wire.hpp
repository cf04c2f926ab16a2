#pragma once

#include <cstddef>

#include "json.hpp"
#include "semiq/session.hpp"

namespace semiq {

// Nil -> null, numbers and booleans native, everything else its text form.
nlohmann::json value_json(const Value& v, const Store& store);

// {"kind": scalar|values|listing|table, ...}. A non-zero `row_limit` caps
// table rows, value lists and listing nodes and sets "truncated".
nlohmann::json result_json(const QueryResult& r, const Store& store, std::size_t row_limit = 0);

// The query response: status, parse_back, bindings, notes, then either
// result or error {message, position, expected, template}, never both.
nlohmann::json outcome_json(const QueryOutcome& o, const Store& store, std::size_t row_limit = 0);

// Class tree, attributes with types, classifiers and instance counts.
nlohmann::json schema_json(const Store& store);

}  // namespace semiq

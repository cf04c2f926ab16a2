#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "semiq/bound.hpp"
#include "semiq/store.hpp"
#include "semiq/warnings.hpp"

namespace semiq {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineOptions {
  // Worker threads for the outer scan; 0 picks the hardware concurrency.
  unsigned threads = 1;
};

// SHOW / FULLSHOW output.
struct ListingNode {
  std::string cls;    // class or classifier name
  std::string label;  // source key
  std::vector<Value> values;
  // FULLSHOW: child instances, grouped per child class in declaration order.
  std::vector<ListingNode> children;
};

struct Listing {
  std::string cls;
  std::vector<std::string> attributes;
  std::vector<ListingNode> nodes;
  std::size_t matched = 0;  // instances satisfying the condition, before the limit
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

struct QueryResult {
  enum Kind { Scalar, ValueList, InstanceListing, TableResult };

  Kind kind = Scalar;
  Value scalar;
  std::vector<Value> values;
  Listing listing;
  Table table;
  double elapsed_ms = 0;
  WarningLog warnings;
};

std::string_view name_of(QueryResult::Kind k);

QueryResult execute(const BoundQuery& q, const Store& store, const EngineOptions& options = {});

// Nil entries are dropped first and counted in a warning. SUM of nothing is
// Integer 0; AVG, MAX, MIN and MOST of nothing are Nil plus a warning.
Value eval_aggregate(AggKind kind, const std::vector<Value>& values, WarningLog* warnings);

// --- formatting -----------------------------------------------------------------------

// Classifier references render as their key, lists comma-joined, Nil as "nil".
std::string format_value(const Value& v, const Store& store);

// Aligned plain text.
std::string format_text(const QueryResult& r, const Store& store);

// RFC 4180 with a header row; Nil is an empty field.
std::string format_csv(const QueryResult& r, const Store& store);

}  // namespace semiq

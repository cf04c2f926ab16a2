#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "semiq/engine.hpp"

namespace oracle {

using namespace semiq;

// Plain instance model: rows per class with a direct parent row index.
struct Row {
  std::uint32_t parent = 0;
  std::vector<Value> values;
  std::string key;
};

struct Db {
  std::shared_ptr<const Schema> schema;
  std::vector<std::vector<Row>> classes;
  std::vector<std::vector<std::vector<Value>>> classifiers;
  std::vector<std::vector<std::string>> classifier_keys;
};

// Rows keep their indices in the store.
Store build_store(const Db& db);
Db snapshot(const Store& store);

// Reference evaluation: every binding enumerates the whole class and filters
// by walking parent links; no early exit, no indexes.
QueryResult execute(const BoundQuery& q, const Db& db);

// Exact equality; reals bitwise. `why` receives the first difference.
bool same_value(const Value& a, const Value& b);
bool same_result(const QueryResult& a, const QueryResult& b, std::string* why = nullptr);

}  // namespace oracle

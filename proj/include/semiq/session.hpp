#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semiq/engine.hpp"

namespace semiq {

enum class OutputFormat { Text, Csv, JsonLines };

struct SessionConfig {
  std::filesystem::path schema;
  std::filesystem::path mapping;
  std::filesystem::path data;
  OutputFormat format = OutputFormat::Text;
  bool echo = true;
  bool timing = false;
  EngineOptions engine;
};

struct QueryOutcome {
  enum Status { Ok, ParseFailed, ResolveFailed, InternalFailed };

  Status status = Ok;
  std::string query;
  // Canonical text after resolution; after a resolve error, the token echo.
  std::string parse_back;
  std::vector<std::string> bindings;
  std::vector<std::string> notes;
  std::optional<QueryResult> result;
  // Failure details.
  std::string error;
  Span span;
  std::vector<std::string> expected;
  std::string template_prefix;
};

std::string_view name_of(QueryOutcome::Status s);

// Keywords upper-cased, tokens single-spaced, strings quoted.
std::string token_echo(std::string_view text);

// A loaded store plus the parse / resolve / execute pipeline.
class Session {
 public:
  Session(std::shared_ptr<const Schema> schema, Store store, LoadReport report, double load_ms);

  // Throws SchemaError, MappingError or LoadError.
  static Session open(const SessionConfig& cfg);

  QueryOutcome run(std::string_view text, const EngineOptions& options = {}) const;

  const Schema& schema() const { return *schema_; }
  const Store& store() const { return store_; }
  const LoadReport& report() const { return report_; }
  double load_ms() const { return load_ms_; }

 private:
  std::shared_ptr<const Schema> schema_;
  Store store_;
  LoadReport report_;
  double load_ms_ = 0;
};

// Class tree with attribute types and instance counts, then classifiers.
std::string describe_schema(const Store& store);

}  // namespace semiq

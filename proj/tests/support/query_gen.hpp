#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>

#include "semiq/bound.hpp"

namespace gen {

using namespace semiq;

// Which language features a set of resolved queries exercised.
struct Coverage {
  std::set<Template> templates;
  std::set<QuantorKind> quantors;
  std::set<AggKind> aggregates;
  std::set<Nav> navigation;
  bool selector = false;
  bool star = false;
  bool keep = false;
  bool sort = false;
  bool leave = false;

  void add(const BoundQuery& q);
  // Missing features, empty when everything was seen.
  std::string missing() const;
};

// Seeded random query text over a schema. Most outputs resolve; callers skip
// the ones that do not.
class QueryGen {
 public:
  QueryGen(std::shared_ptr<const Schema> schema, std::uint64_t seed);
  std::string next();

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace gen

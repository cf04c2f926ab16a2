#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oracle.hpp"

namespace gen {

using namespace semiq;

// Literal pools shared by the store and query generators so that generated
// comparisons hit real values.
const std::vector<std::string>& string_pool();
const std::vector<std::string>& classifier_keys(const std::string& classifier);
const std::vector<double>& real_pool();
Date first_date();
int date_span_days();

// Random instance tree over `schema` with at most `max_instances` basic-class
// instances. Children pick random parents, so load order differs from tree
// order. About one value in ten is nil.
oracle::Db random_db(std::shared_ptr<const Schema> schema, std::uint64_t seed,
                     std::size_t max_instances = 100);

}  // namespace gen

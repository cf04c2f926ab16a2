#include "semiq/wire.hpp"

#include <algorithm>

namespace semiq {

using nlohmann::json;

json value_json(const Value& v, const Store& store) {
  switch (v.tag()) {
    case TypeTag::Nil: return nullptr;
    case TypeTag::Integer: return v.as_integer();
    case TypeTag::Real: return v.as_real();
    case TypeTag::Boolean: return v.as_boolean();
    case TypeTag::String: return v.as_string();
    case TypeTag::List: {
      json out = json::array();
      for (const auto& item : v.as_list()) out.push_back(value_json(item, store));
      return out;
    }
    default: return format_value(v, store);
  }
}

namespace {

std::size_t capped(std::size_t n, std::size_t limit, bool& truncated) {
  if (limit != 0 && n > limit) {
    truncated = true;
    return limit;
  }
  return n;
}

json node_json(const ListingNode& n, const Store& store) {
  json values = json::array();
  for (const auto& v : n.values) values.push_back(value_json(v, store));
  json out = {{"class", n.cls}, {"key", n.label}, {"values", values}};
  if (!n.children.empty()) {
    json children = json::array();
    for (const auto& c : n.children) children.push_back(node_json(c, store));
    out["children"] = children;
  }
  return out;
}

json attributes_json(const std::vector<AttributeDef>& attrs, const Schema& schema) {
  json out = json::array();
  for (const auto& a : attrs) out.push_back({{"name", a.name}, {"type", schema.describe_type(a.type)}});
  return out;
}

}  // namespace

json result_json(const QueryResult& r, const Store& store, std::size_t row_limit) {
  json out = {{"kind", name_of(r.kind)}};
  bool truncated = false;
  switch (r.kind) {
    case QueryResult::Scalar:
      out["value"] = value_json(r.scalar, store);
      out["text"] = format_value(r.scalar, store);
      break;
    case QueryResult::ValueList: {
      json values = json::array();
      std::size_t n = capped(r.values.size(), row_limit, truncated);
      for (std::size_t i = 0; i < n; ++i) values.push_back(value_json(r.values[i], store));
      out["values"] = values;
      out["count"] = r.values.size();
      break;
    }
    case QueryResult::InstanceListing: {
      json nodes = json::array();
      std::size_t n = capped(r.listing.nodes.size(), row_limit, truncated);
      for (std::size_t i = 0; i < n; ++i) nodes.push_back(node_json(r.listing.nodes[i], store));
      out["class"] = r.listing.cls;
      out["attributes"] = r.listing.attributes;
      out["nodes"] = nodes;
      out["shown"] = r.listing.nodes.size();
      out["matched"] = r.listing.matched;
      break;
    }
    case QueryResult::TableResult: {
      json rows = json::array();
      std::size_t n = capped(r.table.rows.size(), row_limit, truncated);
      for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (const auto& v : r.table.rows[i]) row.push_back(value_json(v, store));
        rows.push_back(row);
      }
      out["columns"] = r.table.columns;
      out["rows"] = rows;
      out["row_count"] = r.table.rows.size();
      break;
    }
  }
  out["truncated"] = truncated;
  return out;
}

json outcome_json(const QueryOutcome& o, const Store& store, std::size_t row_limit) {
  json out = {{"status", name_of(o.status)},
              {"query", o.query},
              {"parse_back", o.parse_back.empty() ? json(nullptr) : json(o.parse_back)},
              {"bindings", o.bindings},
              {"notes", o.notes}};
  if (o.status == QueryOutcome::Ok && o.result) {
    out["result"] = result_json(*o.result, store, row_limit);
    out["warnings"] = o.result->warnings.lines();
    out["elapsed_ms"] = o.result->elapsed_ms;
    return out;
  }
  json error = {{"message", o.error}};
  if (o.status != QueryOutcome::InternalFailed) {
    error["position"] = {{"offset", o.span.offset}, {"length", o.span.length}};
    error["expected"] = o.expected;
    error["template"] = o.template_prefix;
  }
  out["warnings"] = json::array();
  out["elapsed_ms"] = 0.0;
  out["error"] = error;
  return out;
}

json schema_json(const Store& store) {
  const Schema& schema = store.schema();
  json classes = json::array();
  for (std::size_t i = 0; i < schema.classes().size(); ++i) {
    const ClassDef& c = schema.classes()[i];
    json children = json::array();
    for (ClassId child : c.children) children.push_back(schema.cls(child).name);
    classes.push_back({{"name", c.name},
                       {"parent", c.parent ? json(schema.cls(*c.parent).name) : json(nullptr)},
                       {"children", children},
                       {"attributes", attributes_json(c.attributes, schema)},
                       {"count", store.size(static_cast<ClassId>(i))}});
  }
  json classifiers = json::array();
  for (std::size_t i = 0; i < schema.classifiers().size(); ++i) {
    const ClassifierDef& k = schema.classifiers()[i];
    classifiers.push_back({{"name", k.name},
                           {"key", k.key_attribute},
                           {"attributes", attributes_json(k.attributes, schema)},
                           {"count", store.classifier_size(static_cast<ClassifierId>(i))}});
  }
  json root = schema.classes().empty() ? json(nullptr) : json(schema.cls(schema.root()).name);
  return {{"root", root}, {"classes", classes}, {"classifiers", classifiers}};
}

}  // namespace semiq

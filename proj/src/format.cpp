#include <algorithm>

#include "semiq/engine.hpp"

namespace semiq {

std::string format_value(const Value& v, const Store& store) {
  switch (v.tag()) {
    case TypeTag::Classifier: return store.classifier_key(v.as_classifier());
    case TypeTag::List: {
      std::string out;
      for (const auto& item : v.as_list()) {
        if (!out.empty()) out += ", ";
        out += format_value(item, store);
      }
      return out;
    }
    default: return render(v);
  }
}

namespace {

std::string csv_cell(const Value& v, const Store& store) {
  return v.is_nil() ? std::string() : csv_escape(format_value(v, store));
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + "\r\n";
}

void listing_text(const ListingNode& n, const Store& store, int depth, std::string& out) {
  const Schema& schema = store.schema();
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ') + n.cls + " " + n.label;
  const std::vector<AttributeDef>* attrs = nullptr;
  if (auto c = schema.find_class(n.cls)) {
    attrs = &schema.cls(*c).attributes;
  } else if (auto k = schema.find_classifier(n.cls)) {
    attrs = &schema.classifier(*k).attributes;
  }
  for (std::size_t i = 0; i < n.values.size(); ++i) {
    out += "  " + (attrs ? (*attrs)[i].name : std::to_string(i)) + "=" +
           format_value(n.values[i], store);
  }
  out += '\n';
  for (const auto& c : n.children) listing_text(c, store, depth + 1, out);
}

void listing_csv(const ListingNode& n, const Store& store, int depth, std::string& out) {
  std::vector<std::string> cells = {std::to_string(depth), csv_escape(n.cls), csv_escape(n.label)};
  for (const auto& v : n.values) cells.push_back(csv_cell(v, store));
  out += csv_line(cells);
  for (const auto& c : n.children) listing_csv(c, store, depth + 1, out);
}

}  // namespace

std::string format_text(const QueryResult& r, const Store& store) {
  std::string out;
  switch (r.kind) {
    case QueryResult::Scalar: return format_value(r.scalar, store) + "\n";
    case QueryResult::ValueList:
      for (const auto& v : r.values) out += format_value(v, store) + "\n";
      out += std::to_string(r.values.size()) + " distinct value(s)\n";
      return out;
    case QueryResult::InstanceListing:
      for (const auto& n : r.listing.nodes) listing_text(n, store, 0, out);
      out += std::to_string(r.listing.nodes.size()) + " of " + std::to_string(r.listing.matched) +
             " " + r.listing.cls + " instance(s) shown\n";
      return out;
    case QueryResult::TableResult: {
      const Table& t = r.table;
      std::vector<std::vector<std::string>> cells;
      cells.push_back(t.columns);
      for (const auto& row : t.rows) {
        std::vector<std::string> line;
        for (const auto& v : row) line.push_back(format_value(v, store));
        cells.push_back(std::move(line));
      }
      std::vector<std::size_t> width(t.columns.size(), 0);
      for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], utf8_length(line[c]));
      }
      auto emit = [&](const std::vector<std::string>& line) {
        std::string text;
        for (std::size_t c = 0; c < line.size(); ++c) {
          if (c) text += " | ";
          text += line[c];
          if (c + 1 < line.size()) text += std::string(width[c] - utf8_length(line[c]), ' ');
        }
        out += text + "\n";
      };
      emit(cells[0]);
      std::string rule;
      for (std::size_t c = 0; c < width.size(); ++c) {
        if (c) rule += "-+-";
        rule += std::string(width[c], '-');
      }
      out += rule + "\n";
      for (std::size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
      out += std::to_string(t.rows.size()) + " row(s)\n";
      return out;
    }
  }
  return out;
}

std::string format_csv(const QueryResult& r, const Store& store) {
  std::string out;
  switch (r.kind) {
    case QueryResult::Scalar:
      out = csv_line({"value"});
      out += csv_line({csv_cell(r.scalar, store)});
      return out;
    case QueryResult::ValueList:
      out = csv_line({"value"});
      for (const auto& v : r.values) out += csv_line({csv_cell(v, store)});
      return out;
    case QueryResult::InstanceListing: {
      std::vector<std::string> header = {"depth", "class", "key"};
      for (const auto& a : r.listing.attributes) header.push_back(csv_escape(a));
      out = csv_line(header);
      for (const auto& n : r.listing.nodes) listing_csv(n, store, 0, out);
      return out;
    }
    case QueryResult::TableResult: {
      std::vector<std::string> header;
      for (const auto& c : r.table.columns) header.push_back(csv_escape(c));
      out = csv_line(header);
      for (const auto& row : r.table.rows) {
        std::vector<std::string> cells;
        for (const auto& v : row) cells.push_back(csv_cell(v, store));
        out += csv_line(cells);
      }
      return out;
    }
  }
  return out;
}

}  // namespace semiq

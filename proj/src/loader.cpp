#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "semiq/store.hpp"

namespace semiq {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("missing data file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_nil_token(std::string_view cell) {
  return cell.size() == 3 && std::tolower(static_cast<unsigned char>(cell[0])) == 'n' &&
         std::tolower(static_cast<unsigned char>(cell[1])) == 'i' &&
         std::tolower(static_cast<unsigned char>(cell[2])) == 'l';
}

struct Table {
  std::string file;
  std::vector<CsvRecord> rows;
  std::unordered_map<std::string, std::size_t> columns;

  std::size_t column(const std::string& name, const std::string& target) const {
    auto it = columns.find(name);
    if (it == columns.end()) {
      throw LoadError(file + ": missing column '" + name + "' mapped for " + target);
    }
    return it->second;
  }
};

Table read_table(const std::filesystem::path& dir, const ClassMapping& m) {
  Table t;
  t.file = m.file;
  auto records = parse_csv(read_file(dir / m.file));
  if (records.empty()) throw LoadError(m.file + ": missing header row");
  const auto& header = records.front().fields;
  for (std::size_t i = 0; i < header.size(); ++i) t.columns.emplace(header[i], i);
  t.rows.assign(std::make_move_iterator(records.begin() + 1),
                std::make_move_iterator(records.end()));
  return t;
}

std::string where(const Table& t, const CsvRecord& r) {
  return t.file + ":" + std::to_string(r.line);
}

// Converts one mapped cell. Absent, empty and malformed cells become Nil and
// are counted; the literal `nil` is an intentional Nil.
class CellReader {
 public:
  CellReader(const Table& table, LoadReport& report, FileReport& file)
      : table_(table), report_(report), file_(file) {}

  const std::string* cell(const CsvRecord& r, std::size_t col, const std::string& column,
                          const std::string& attribute) {
    if (col >= r.fields.size()) {
      coerce("missing value", where(table_, r) + ": no value for " + attribute + " (column " +
                                  column + " absent from row)");
      return nullptr;
    }
    const std::string& text = r.fields[col];
    if (text.empty()) {
      coerce("missing value", where(table_, r) + ": empty " + column + " for " + attribute);
      return nullptr;
    }
    if (is_nil_token(text)) return nullptr;
    return &text;
  }

  Value primitive(const CsvRecord& r, std::size_t col, const std::string& column,
                  const AttributeDef& attr) {
    const std::string* text = cell(r, col, column, attr.name);
    if (!text) return Value();
    if (auto v = try_parse_literal(*text, attr.type.tag)) return *std::move(v);
    coerce("type mismatch", where(table_, r) + ": '" + *text + "' is not a valid " +
                                std::string(type_name(attr.type.tag)) + " for " + attr.name);
    return Value();
  }

  void coerce(const std::string& category, std::string message) {
    ++file_.nil_coerced;
    report_.warn(category, std::move(message));
  }

 private:
  const Table& table_;
  LoadReport& report_;
  FileReport& file_;
};

}  // namespace

LoadResult load(std::shared_ptr<const Schema> schema_ptr, const MappingSpec& mapping,
                const std::filesystem::path& data_dir) {
  const Schema& schema = *schema_ptr;
  try {
    check_mapping(mapping, schema);
  } catch (const MappingError& e) {
    throw LoadError(e.what());
  }

  Store::Builder builder(schema_ptr);
  LoadReport report;

  auto find_mapping = [&](bool classifier, const std::string& name) -> const ClassMapping* {
    for (const auto& m : mapping.entries) {
      if (m.classifier == classifier && m.target == name) return &m;
    }
    return nullptr;
  };

  for (ClassifierId id = 0; id < schema.classifiers().size(); ++id) {
    const auto& def = schema.classifier(id);
    const ClassMapping* m = find_mapping(true, def.name);
    if (!m) continue;
    Table table = read_table(data_dir, *m);
    FileReport file{m->file, def.name};
    CellReader reader(table, report, file);
    std::size_t key_col = table.column(m->key_column, def.name);
    std::vector<std::pair<std::size_t, std::size_t>> cols;  // (attr index, column index)
    for (const auto& c : m->columns) {
      cols.emplace_back(*schema.find_classifier_attribute(id, c.attribute),
                        table.column(c.column, def.name));
    }
    std::unordered_set<std::string> keys;
    for (const auto& r : table.rows) {
      ++file.rows_read;
      std::string key = key_col < r.fields.size() ? r.fields[key_col] : std::string();
      if (key.empty()) {
        ++file.rows_skipped;
        report.warn("missing key", where(table, r) + ": empty key column " + m->key_column);
        continue;
      }
      if (!keys.insert(key).second) {
        throw LoadError(where(table, r) + ": duplicate key '" + key + "' in " + m->file);
      }
      std::vector<Value> values(def.attributes.size());
      for (std::size_t i = 0; i < cols.size(); ++i) {
        auto [attr, col] = cols[i];
        values[attr] = reader.primitive(r, col, m->columns[i].column, def.attributes[attr]);
      }
      builder.add_classifier_row(id, key, std::move(values));
      ++file.rows_loaded;
    }
    report.files.push_back(file);
  }

  // Source key -> row, per basic class, for parent lookups further down.
  std::vector<std::unordered_map<std::string, std::uint32_t>> key_rows(schema.classes().size());

  for (ClassId cls : schema.root_to_leaf_order()) {
    const auto& def = schema.cls(cls);
    const ClassMapping* m = find_mapping(false, def.name);
    if (!m) continue;
    Table table = read_table(data_dir, *m);
    FileReport file{m->file, def.name};
    CellReader reader(table, report, file);
    std::size_t key_col = table.column(m->key_column, def.name);
    std::optional<std::size_t> parent_col;
    if (def.parent) parent_col = table.column(m->parent_column, def.name);
    struct Col {
      std::size_t attr;
      std::size_t column;
      const std::string* name;
    };
    std::vector<Col> cols;
    for (const auto& c : m->columns) {
      std::size_t attr = 0;
      while (def.attributes[attr].name != c.attribute) ++attr;
      cols.push_back({attr, table.column(c.column, def.name), &c.column});
    }

    std::unordered_set<std::string> seen;
    auto& own_keys = key_rows[cls];
    for (const auto& r : table.rows) {
      ++file.rows_read;
      std::string key = key_col < r.fields.size() ? r.fields[key_col] : std::string();
      if (key.empty()) {
        ++file.rows_skipped;
        report.warn("missing key", where(table, r) + ": empty key column " + m->key_column);
        continue;
      }
      if (!seen.insert(key).second) {
        throw LoadError(where(table, r) + ": duplicate key '" + key + "' in " + m->file);
      }
      std::uint32_t parent_row = 0;
      if (parent_col) {
        std::string pkey = *parent_col < r.fields.size() ? r.fields[*parent_col] : std::string();
        const auto& parent_keys = key_rows[*def.parent];
        auto it = parent_keys.find(pkey);
        if (it == parent_keys.end()) {
          ++file.rows_skipped;
          report.warn("dangling parent key",
                      where(table, r) + ": " + def.name + " " + key + " refers to missing " +
                          schema.cls(*def.parent).name + " '" + pkey + "'");
          continue;
        }
        parent_row = it->second;
      }
      std::vector<Value> values(def.attributes.size());
      for (const auto& c : cols) {
        const AttributeDef& attr = def.attributes[c.attr];
        if (attr.type.tag != TypeTag::Classifier) {
          values[c.attr] = reader.primitive(r, c.column, *c.name, attr);
          continue;
        }
        const std::string* text = reader.cell(r, c.column, *c.name, attr.name);
        if (!text) continue;
        if (auto ref = builder.find_classifier_row(attr.type.classifier, *text)) {
          values[c.attr] = Value::classifier(*ref);
        } else {
          reader.coerce("dangling classifier key",
                        where(table, r) + ": " + attr.name + " refers to missing " +
                            schema.classifier(attr.type.classifier).name + " '" + *text + "'");
        }
      }
      std::uint32_t row = builder.add_instance(cls, parent_row, std::move(values), key);
      own_keys.emplace(key, row);
      ++file.rows_loaded;
    }
    report.files.push_back(file);
  }

  return LoadResult{std::move(builder).finish(), std::move(report)};
}

}  // namespace semiq

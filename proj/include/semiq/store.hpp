#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semiq/ontology.hpp"
#include "semiq/value.hpp"

namespace semiq {

// Identity of a basic-class instance: class plus load-order ordinal.
struct InstanceRef {
  ClassId cls = 0;
  std::uint32_t row = 0;

  friend bool operator==(const InstanceRef&, const InstanceRef&) = default;
};

// --- CSV ------------------------------------------------------------------------

struct CsvRecord {
  std::vector<std::string> fields;
  int line = 0;  // 1-based line where the record starts
};

// RFC 4180: comma separated, double-quoted fields with "" escapes, CRLF or LF.
std::vector<CsvRecord> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

// --- mapping ----------------------------------------------------------------------

struct ColumnMapping {
  std::string attribute;
  std::string column;
};

struct ClassMapping {
  bool classifier = false;
  std::string target;         // class or classifier name
  std::string file;           // relative to the data directory
  std::string key_column;
  std::string parent_column;  // non-root basic classes only
  std::vector<ColumnMapping> columns;
};

struct MappingSpec {
  std::vector<ClassMapping> entries;
};

class MappingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mapping DSL:
//   map classifier CPhysician from "physicians.csv" key code { code <- code }
//   map Patient from "patients.csv" key id { personCode <- person_code }
//   map HospitalEpisode from "episodes.csv" key id parent patient_id { ... }
MappingSpec parse_mapping(std::string_view text);
MappingSpec load_mapping_file(const std::filesystem::path& path);
// Throws MappingError when the mapping does not fit the schema.
void check_mapping(const MappingSpec& mapping, const Schema& schema);

// --- load report ------------------------------------------------------------------

struct FileReport {
  std::string file;
  std::string target;
  std::size_t rows_read = 0;
  std::size_t rows_loaded = 0;
  std::size_t rows_skipped = 0;
  std::size_t nil_coerced = 0;
};

struct LoadReport {
  std::vector<FileReport> files;
  // Warning category -> count, and the first few messages per category.
  std::map<std::string, std::size_t> warning_counts;
  std::map<std::string, std::vector<std::string>> samples;

  std::size_t total_warnings() const;
  std::size_t total_skipped() const;
  std::size_t total_nil_coerced() const;
  std::string render() const;

  static constexpr std::size_t kMaxSamples = 5;
  void warn(const std::string& category, std::string message);
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- store ------------------------------------------------------------------------

// Immutable instance graph. Per basic class: attribute slots in load order, a
// parent link and, per child class, the child rows in load order.
class Store {
 public:
  class Builder;

  Store() = default;

  const Schema& schema() const { return *schema_; }
  std::shared_ptr<const Schema> schema_ptr() const { return schema_; }

  std::size_t size(ClassId cls) const { return tables_[cls].parents.size(); }
  std::size_t classifier_size(ClassifierId id) const;
  std::size_t total_instances() const;

  const Value& value(InstanceRef x, std::size_t attr) const {
    const auto& t = tables_[x.cls];
    return t.slots[static_cast<std::size_t>(x.row) * t.width + attr];
  }
  std::span<const Value> row(InstanceRef x) const {
    const auto& t = tables_[x.cls];
    return {t.slots.data() + static_cast<std::size_t>(x.row) * t.width, t.width};
  }
  const Value& classifier_value(ClassifierRef ref, std::size_t attr) const {
    const auto& t = classifier_tables_[ref.classifier];
    return t.slots[static_cast<std::size_t>(ref.row) * t.width + attr];
  }
  std::optional<ClassifierRef> find_classifier_row(ClassifierId id, std::string_view key) const;

  // Direct parent instance; nullopt for the root class.
  std::optional<InstanceRef> parent(InstanceRef x) const;
  // The unique instance of `ancestor` on x's parent chain (x itself when
  // ancestor == class of x).
  InstanceRef parent_of(InstanceRef x, ClassId ancestor) const;
  // Direct children of x in class `child_class` (a child class of x's class).
  std::span<const std::uint32_t> children(InstanceRef x, ClassId child_class) const;

  // Depth-first, child-list order. `fn(InstanceRef)` returns false to stop;
  // the function returns false when stopped early.
  template <typename Fn>
  bool for_each_descendant(InstanceRef x, ClassId target, Fn&& fn) const;

  std::vector<InstanceRef> descendants_of(InstanceRef x, ClassId descendant) const;
  // Instances of `brother` under the nearest common ancestor instance of x
  // (x's own class's parent instance for the self-brother case).
  std::vector<InstanceRef> brothers_of(InstanceRef x, ClassId brother) const;

  // Source key (CSV key column) of an instance, or "#<ordinal>" when absent.
  std::string label(InstanceRef x) const;
  std::optional<InstanceRef> find_by_label(ClassId cls, std::string_view label) const;
  // Key attribute text of a classifier row.
  std::string classifier_key(ClassifierRef ref) const;

  // Order-sensitive digest of every slot and link; equal stores hash equal.
  std::uint64_t structural_hash() const;

 private:
  struct ChildIndex {
    ClassId child = 0;
    std::vector<std::uint32_t> offsets;  // size = parent rows + 1
    std::vector<std::uint32_t> rows;
  };
  struct ClassTable {
    std::size_t width = 0;
    std::vector<Value> slots;
    std::vector<std::uint32_t> parents;  // parent row; unused for the root
    std::vector<std::string> keys;       // empty when instances carry no key
    std::vector<ChildIndex> children;    // in ClassDef::children order
  };
  struct ClassifierTable {
    std::size_t width = 0;
    std::vector<Value> slots;
    std::unordered_map<std::string, std::uint32_t> by_key;
  };

  template <typename Fn>
  bool descend(InstanceRef x, std::span<const ClassId> path, Fn& fn) const;
  const ChildIndex& child_index(ClassId parent, ClassId child) const;

  std::shared_ptr<const Schema> schema_;
  std::vector<ClassTable> tables_;
  std::vector<ClassifierTable> classifier_tables_;
  // child_slot_[c] = position of class c in its parent's ClassDef::children.
  std::vector<std::size_t> child_slot_;
  // Cached path_down(from, to) lookups, indexed [from][to].
  std::vector<std::vector<std::vector<ClassId>>> paths_;
};

// Appends instances in load order, then freezes them into a Store.
class Store::Builder {
 public:
  explicit Builder(std::shared_ptr<const Schema> schema);

  // Returns the new classifier row. `key` is the lookup text for foreign keys.
  std::uint32_t add_classifier_row(ClassifierId id, std::string key, std::vector<Value> values);
  // `parent_row` is ignored for the root class. `key` may be empty.
  std::uint32_t add_instance(ClassId cls, std::uint32_t parent_row, std::vector<Value> values,
                             std::string key = {});
  std::optional<ClassifierRef> find_classifier_row(ClassifierId id, std::string_view key) const;
  std::size_t size(ClassId cls) const { return store_.tables_[cls].parents.size(); }

  Store finish() &&;

 private:
  Store store_;
};

struct LoadResult {
  Store store;
  LoadReport report;
};

// Classifiers first, then basic classes root to leaf. Dirty cells degrade to
// Nil, dangling parent keys skip the row (and with it the subtree). Missing
// files, missing mapped columns and duplicate keys throw LoadError.
LoadResult load(std::shared_ptr<const Schema> schema, const MappingSpec& mapping,
                const std::filesystem::path& data_dir);

// --- synthetic data -----------------------------------------------------------------

struct SyntheticScale {
  std::size_t roots = 10;
  // Mean children per parent instance, by class name. Classes not listed get 1.
  std::map<std::string, double> per_parent;
  // Rows per classifier, by name; default classifier_rows.
  std::map<std::string, std::size_t> classifier_counts;
  std::size_t classifier_rows = 20;
  // Draw child counts uniformly from [0, 2*mean] instead of using the mean.
  bool vary = false;
  // Probability that a classifier-typed attribute is Nil.
  double nil_rate = 0.05;
};

// Parses "100000" (root count, demo ratios) or "Patient=100000,HospitalEpisode=3,...".
SyntheticScale parse_scale(std::string_view text, const Schema& schema);

// Deterministic for a given (schema, scale, seed).
Store generate_synthetic(std::shared_ptr<const Schema> schema, const SyntheticScale& scale,
                         std::uint64_t seed);

// --- template definitions ------------------------------------------------------------

template <typename Fn>
bool Store::descend(InstanceRef x, std::span<const ClassId> path, Fn& fn) const {
  ClassId next = path.front();
  for (std::uint32_t r : children(x, next)) {
    InstanceRef child{next, r};
    if (path.size() == 1) {
      if (!fn(child)) return false;
    } else if (!descend(child, path.subspan(1), fn)) {
      return false;
    }
  }
  return true;
}

template <typename Fn>
bool Store::for_each_descendant(InstanceRef x, ClassId target, Fn&& fn) const {
  const auto& path = paths_[x.cls][target];
  if (path.empty()) return true;
  return descend(x, std::span<const ClassId>(path), fn);
}

}  // namespace semiq

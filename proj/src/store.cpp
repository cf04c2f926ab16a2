#include "semiq/store.hpp"

#include <algorithm>
#include <sstream>

namespace semiq {

// --- load report ------------------------------------------------------------------

void LoadReport::warn(const std::string& category, std::string message) {
  ++warning_counts[category];
  auto& s = samples[category];
  if (s.size() < kMaxSamples) s.push_back(std::move(message));
}

std::size_t LoadReport::total_warnings() const {
  std::size_t n = 0;
  for (const auto& [_, count] : warning_counts) n += count;
  return n;
}

std::size_t LoadReport::total_skipped() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.rows_skipped;
  return n;
}

std::size_t LoadReport::total_nil_coerced() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.nil_coerced;
  return n;
}

std::string LoadReport::render() const {
  std::ostringstream out;
  for (const auto& f : files) {
    out << f.file << " -> " << f.target << ": read " << f.rows_read << ", loaded "
        << f.rows_loaded << ", skipped " << f.rows_skipped << ", nil-coerced " << f.nil_coerced
        << "\n";
  }
  out << "warnings: " << total_warnings() << "\n";
  for (const auto& [category, count] : warning_counts) {
    out << "  " << category << ": " << count << "\n";
    for (const auto& s : samples.at(category)) out << "    " << s << "\n";
  }
  return out.str();
}

// --- builder ------------------------------------------------------------------------

Store::Builder::Builder(std::shared_ptr<const Schema> schema) {
  const Schema& s = *schema;
  store_.schema_ = std::move(schema);
  store_.tables_.resize(s.classes().size());
  for (ClassId c = 0; c < s.classes().size(); ++c) {
    store_.tables_[c].width = s.cls(c).attributes.size();
  }
  store_.classifier_tables_.resize(s.classifiers().size());
  for (ClassifierId c = 0; c < s.classifiers().size(); ++c) {
    store_.classifier_tables_[c].width = s.classifier(c).attributes.size();
  }
}

std::uint32_t Store::Builder::add_classifier_row(ClassifierId id, std::string key,
                                                 std::vector<Value> values) {
  auto& t = store_.classifier_tables_[id];
  auto row = static_cast<std::uint32_t>(t.width == 0 ? t.by_key.size() : t.slots.size() / t.width);
  values.resize(t.width);
  for (auto& v : values) t.slots.push_back(std::move(v));
  t.by_key.emplace(std::move(key), row);
  return row;
}

std::uint32_t Store::Builder::add_instance(ClassId cls, std::uint32_t parent_row,
                                           std::vector<Value> values, std::string key) {
  auto& t = store_.tables_[cls];
  auto row = static_cast<std::uint32_t>(t.parents.size());
  values.resize(t.width);
  for (auto& v : values) t.slots.push_back(std::move(v));
  t.parents.push_back(parent_row);
  if (!key.empty() || !t.keys.empty()) {
    t.keys.resize(row);
    t.keys.push_back(std::move(key));
  }
  return row;
}

std::optional<ClassifierRef> Store::Builder::find_classifier_row(ClassifierId id,
                                                                 std::string_view key) const {
  return store_.find_classifier_row(id, key);
}

Store Store::Builder::finish() && {
  const Schema& s = *store_.schema_;
  std::size_t n = s.classes().size();
  store_.child_slot_.assign(n, 0);
  for (ClassId c = 0; c < n; ++c) {
    const auto& kids = s.cls(c).children;
    for (std::size_t i = 0; i < kids.size(); ++i) store_.child_slot_[kids[i]] = i;
  }
  for (ClassId c = 0; c < n; ++c) {
    auto& t = store_.tables_[c];
    if (!t.keys.empty()) t.keys.resize(t.parents.size());
    t.children.clear();
    for (ClassId child : s.cls(c).children) {
      ChildIndex idx;
      idx.child = child;
      const auto& parents = store_.tables_[child].parents;
      idx.offsets.assign(t.parents.size() + 1, 0);
      for (std::uint32_t p : parents) ++idx.offsets[p + 1];
      for (std::size_t i = 1; i < idx.offsets.size(); ++i) idx.offsets[i] += idx.offsets[i - 1];
      idx.rows.resize(parents.size());
      std::vector<std::uint32_t> cursor(idx.offsets.begin(), idx.offsets.end() - 1);
      for (std::uint32_t r = 0; r < parents.size(); ++r) idx.rows[cursor[parents[r]]++] = r;
      t.children.push_back(std::move(idx));
    }
  }
  store_.paths_.assign(n, std::vector<std::vector<ClassId>>(n));
  for (ClassId from = 0; from < n; ++from) {
    for (ClassId to = 0; to < n; ++to) {
      if (s.is_ancestor(from, to)) store_.paths_[from][to] = s.path_down(from, to);
    }
  }
  return std::move(store_);
}

// --- navigation ---------------------------------------------------------------------

std::size_t Store::classifier_size(ClassifierId id) const {
  const auto& t = classifier_tables_[id];
  return t.width == 0 ? t.by_key.size() : t.slots.size() / t.width;
}

std::size_t Store::total_instances() const {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.parents.size();
  return n;
}

std::optional<ClassifierRef> Store::find_classifier_row(ClassifierId id,
                                                        std::string_view key) const {
  const auto& t = classifier_tables_[id];
  auto it = t.by_key.find(std::string(key));
  if (it == t.by_key.end()) return std::nullopt;
  return ClassifierRef{id, it->second};
}

std::optional<InstanceRef> Store::parent(InstanceRef x) const {
  auto p = schema_->cls(x.cls).parent;
  if (!p) return std::nullopt;
  return InstanceRef{*p, tables_[x.cls].parents[x.row]};
}

InstanceRef Store::parent_of(InstanceRef x, ClassId ancestor) const {
  while (x.cls != ancestor) {
    auto p = parent(x);
    if (!p) break;
    x = *p;
  }
  return x;
}

const Store::ChildIndex& Store::child_index(ClassId parent, ClassId child) const {
  return tables_[parent].children[child_slot_[child]];
}

std::span<const std::uint32_t> Store::children(InstanceRef x, ClassId child_class) const {
  const auto& idx = child_index(x.cls, child_class);
  return {idx.rows.data() + idx.offsets[x.row], idx.offsets[x.row + 1] - idx.offsets[x.row]};
}

std::vector<InstanceRef> Store::descendants_of(InstanceRef x, ClassId descendant) const {
  std::vector<InstanceRef> out;
  for_each_descendant(x, descendant, [&](InstanceRef y) {
    out.push_back(y);
    return true;
  });
  return out;
}

std::vector<InstanceRef> Store::brothers_of(InstanceRef x, ClassId brother) const {
  const Schema& s = *schema_;
  RelationInfo rel = s.relation(x.cls, brother);
  std::optional<ClassId> anchor;
  switch (rel.kind) {
    case Relation::Self: anchor = s.cls(brother).parent; break;
    case Relation::Brother: anchor = rel.common_ancestor; break;
    case Relation::Ancestor: return {parent_of(x, brother)};
    case Relation::Descendant: return descendants_of(x, brother);
  }
  std::vector<InstanceRef> out;
  if (!anchor) {
    // Root brothers: every root instance.
    for (std::uint32_t r = 0; r < size(brother); ++r) out.push_back({brother, r});
    return out;
  }
  return descendants_of(parent_of(x, *anchor), brother);
}

std::string Store::label(InstanceRef x) const {
  const auto& keys = tables_[x.cls].keys;
  if (x.row < keys.size() && !keys[x.row].empty()) return keys[x.row];
  return "#" + std::to_string(x.row + 1);
}

std::optional<InstanceRef> Store::find_by_label(ClassId cls, std::string_view label) const {
  for (std::uint32_t r = 0; r < size(cls); ++r) {
    if (this->label({cls, r}) == label) return InstanceRef{cls, r};
  }
  return std::nullopt;
}

std::string Store::classifier_key(ClassifierRef ref) const {
  const auto& def = schema_->classifier(ref.classifier);
  return render(classifier_value(ref, def.key_index));
}

std::uint64_t Store::structural_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  ValueHash vh;
  for (const auto& t : tables_) {
    mix(t.parents.size());
    for (const auto& v : t.slots) mix(vh(v));
    for (auto p : t.parents) mix(p);
    for (const auto& c : t.children) {
      for (auto r : c.rows) mix(r);
    }
  }
  for (const auto& t : classifier_tables_) {
    for (const auto& v : t.slots) mix(vh(v));
  }
  return h;
}

}  // namespace semiq

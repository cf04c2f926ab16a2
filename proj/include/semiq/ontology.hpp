#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semiq/value.hpp"

namespace semiq {

using ClassId = std::uint32_t;
using ClassifierId = std::uint32_t;

// Primitive type, or a reference to a classifier when tag == Classifier.
struct AttrType {
  TypeTag tag = TypeTag::String;
  ClassifierId classifier = 0;

  friend bool operator==(const AttrType&, const AttrType&) = default;
};

struct AttributeDef {
  std::string name;
  AttrType type;
};

struct ClassDef {
  std::string name;
  std::optional<ClassId> parent;
  std::vector<AttributeDef> attributes;
  std::vector<ClassId> children;  // declaration order
  int depth = 0;                  // root is 0
};

struct ClassifierDef {
  std::string name;
  std::string key_attribute;
  std::size_t key_index = 0;
  std::vector<AttributeDef> attributes;
};

enum class Relation { Self, Ancestor, Descendant, Brother };
std::string_view name_of(Relation r);

struct RelationInfo {
  Relation kind = Relation::Self;
  // Nearest common ancestor; set for Brother only.
  std::optional<ClassId> common_ancestor;
};

struct VisibleAttribute {
  ClassId owner = 0;
  std::size_t index = 0;  // position within the owner's attribute list
  const AttributeDef* def = nullptr;
};

enum class SchemaErrorKind {
  Syntax,
  MultipleRoots,
  NoRoot,
  Cycle,
  DuplicateName,
  DuplicateAttribute,
  ShadowedAttribute,
  UnknownClassifier,
  UnknownParent,
  BadKey,
  BadAttributeType,
};

class SchemaError : public std::runtime_error {
 public:
  SchemaError(SchemaErrorKind kind, const std::string& message, int line = 0, int column = 0);
  SchemaErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  SchemaErrorKind kind_;
  int line_;
  int column_;
};

// A validated semistar ontology: basic classes forming one rooted "has" tree
// plus out-of-tree classifiers. Immutable once built.
class Schema {
 public:
  Schema() = default;

  // Validates and indexes the declarations. Throws SchemaError.
  static Schema build(std::vector<ClassDef> classes, std::vector<ClassifierDef> classifiers);

  const std::vector<ClassDef>& classes() const { return classes_; }
  const std::vector<ClassifierDef>& classifiers() const { return classifiers_; }
  const ClassDef& cls(ClassId id) const { return classes_.at(id); }
  const ClassifierDef& classifier(ClassifierId id) const { return classifiers_.at(id); }

  std::optional<ClassId> find_class(std::string_view name) const;
  std::optional<ClassifierId> find_classifier(std::string_view name) const;
  ClassId root() const { return root_; }

  // True when `ancestor` is a strict ancestor of `cls`.
  bool is_ancestor(ClassId ancestor, ClassId cls) const;
  RelationInfo relation(ClassId a, ClassId b) const;
  // Classes strictly below `from` on the way down to `to` (inclusive).
  std::vector<ClassId> path_down(ClassId from, ClassId to) const;
  // Root first, then children in breadth-first declaration order.
  std::vector<ClassId> root_to_leaf_order() const;

  // Own attributes, then ancestors' (nearest first).
  std::vector<VisibleAttribute> visible_attributes(ClassId cls) const;
  std::optional<VisibleAttribute> find_visible(ClassId cls, std::string_view name) const;
  std::optional<std::size_t> find_classifier_attribute(ClassifierId id,
                                                       std::string_view name) const;
  // Any strict descendant of `cls` declaring `name` (for diagnostics).
  std::optional<ClassId> descendant_declaring(ClassId cls, std::string_view name) const;

  std::string describe_type(const AttrType& t) const;

 private:
  std::vector<ClassDef> classes_;
  std::vector<ClassifierDef> classifiers_;
  std::unordered_map<std::string, ClassId> class_index_;
  std::unordered_map<std::string, ClassifierId> classifier_index_;
  ClassId root_ = 0;
};

// Parses the line-oriented schema DSL:
//   classifier CPhysician key code { code: String  name: String }
//   class Patient { personCode: String  familyDoctor: CPhysician }
//   class HospitalEpisode under Patient { admissionTime: DateTime }
Schema parse_schema(std::string_view text);
Schema load_schema_file(const std::filesystem::path& path);

std::optional<TypeTag> primitive_type(std::string_view name);

}  // namespace semiq

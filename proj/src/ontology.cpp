#include "semiq/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace semiq {

namespace {

struct SourcePos {
  int line = 0;
  int column = 0;
};

SchemaError error_at(SchemaErrorKind kind, const std::string& message, SourcePos pos) {
  return SchemaError(kind, message, pos.line, pos.column);
}

// Structural checks shared by Schema::build and parse_schema. `pos` may be
// empty (no source positions available).
void validate(const std::vector<ClassDef>& classes, const std::vector<ClassifierDef>& classifiers,
              const std::vector<SourcePos>& pos) {
  auto at = [&](std::size_t i) { return i < pos.size() ? pos[i] : SourcePos{}; };

  std::unordered_set<std::string> names;
  for (const auto& c : classifiers) {
    if (!names.insert(c.name).second) {
      throw SchemaError(SchemaErrorKind::DuplicateName, "duplicate name '" + c.name + "'");
    }
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!names.insert(classes[i].name).second) {
      throw error_at(SchemaErrorKind::DuplicateName,
                     "duplicate name '" + classes[i].name + "'", at(i));
    }
  }

  auto check_attrs = [&](const std::vector<AttributeDef>& attrs, const std::string& owner,
                         SourcePos p, bool primitive_only) {
    std::unordered_set<std::string> seen;
    for (const auto& a : attrs) {
      if (!seen.insert(a.name).second) {
        throw error_at(SchemaErrorKind::DuplicateAttribute,
                       "duplicate attribute '" + a.name + "' in " + owner, p);
      }
      if (a.type.tag == TypeTag::Classifier) {
        if (primitive_only) {
          throw error_at(SchemaErrorKind::BadAttributeType,
                         "classifier attribute '" + a.name + "' in " + owner +
                             " must have a primitive type",
                         p);
        }
        if (a.type.classifier >= classifiers.size()) {
          throw error_at(SchemaErrorKind::UnknownClassifier,
                         "unknown classifier for attribute '" + a.name + "'", p);
        }
      } else if (a.type.tag == TypeTag::Nil || a.type.tag == TypeTag::List) {
        throw error_at(SchemaErrorKind::BadAttributeType,
                       "attribute '" + a.name + "' has no usable type", p);
      }
    }
  };

  for (const auto& c : classifiers) {
    check_attrs(c.attributes, c.name, {}, true);
    auto it = std::find_if(c.attributes.begin(), c.attributes.end(),
                           [&](const AttributeDef& a) { return a.name == c.key_attribute; });
    if (it == c.attributes.end()) {
      throw SchemaError(SchemaErrorKind::BadKey,
                        "key attribute '" + c.key_attribute + "' not declared in " + c.name);
    }
    if (it->type.tag != TypeTag::String && it->type.tag != TypeTag::Integer) {
      throw SchemaError(SchemaErrorKind::BadKey,
                        "key attribute '" + c.key_attribute + "' of " + c.name +
                            " must be String or Integer");
    }
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    check_attrs(classes[i].attributes, classes[i].name, at(i), false);
    if (classes[i].parent && *classes[i].parent >= classes.size()) {
      throw error_at(SchemaErrorKind::UnknownParent,
                     "unknown parent class of '" + classes[i].name + "'", at(i));
    }
  }

  // Cycles: a parent chain longer than the class count revisits a class.
  for (std::size_t i = 0; i < classes.size(); ++i) {
    std::optional<ClassId> p = classes[i].parent;
    std::size_t steps = 0;
    while (p) {
      if (*p == i || ++steps > classes.size()) {
        throw error_at(SchemaErrorKind::Cycle,
                       "cycle in class hierarchy through '" + classes[i].name + "'", at(i));
      }
      p = classes[*p].parent;
    }
  }

  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!classes[i].parent) roots.push_back(i);
  }
  if (roots.empty()) throw SchemaError(SchemaErrorKind::NoRoot, "schema declares no class");
  if (roots.size() > 1) {
    throw error_at(SchemaErrorKind::MultipleRoots,
                   "multiple roots: '" + classes[roots[0]].name + "' and '" +
                       classes[roots[1]].name + "' both lack a parent",
                   at(roots[1]));
  }

  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (const auto& a : classes[i].attributes) {
      for (auto p = classes[i].parent; p; p = classes[*p].parent) {
        for (const auto& b : classes[*p].attributes) {
          if (a.name == b.name) {
            throw error_at(SchemaErrorKind::ShadowedAttribute,
                           "attribute '" + a.name + "' of " + classes[i].name +
                               " shadows the attribute of ancestor " + classes[*p].name,
                           at(i));
          }
        }
      }
    }
  }
}

// --- schema DSL lexer -----------------------------------------------------------

struct DslToken {
  enum Kind { Ident, LBrace, RBrace, Colon, End } kind = End;
  std::string text;
  SourcePos pos;
};

class DslLexer {
 public:
  explicit DslLexer(std::string_view text) : text_(text) {}

  DslToken next() {
    skip();
    DslToken t;
    t.pos = {line_, col_};
    if (i_ >= text_.size()) return t;
    char c = text_[i_];
    if (c == '{' || c == '}' || c == ':') {
      t.kind = c == '{' ? DslToken::LBrace : (c == '}' ? DslToken::RBrace : DslToken::Colon);
      t.text = std::string(1, c);
      advance();
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = DslToken::Ident;
      while (i_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
        t.text += text_[i_];
        advance();
      }
      return t;
    }
    throw error_at(SchemaErrorKind::Syntax, std::string("unexpected character '") + c + "'",
                   t.pos);
  }

 private:
  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  void skip() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct RawAttr {
  std::string name;
  std::string type;
  SourcePos pos;
};

struct RawDecl {
  bool classifier = false;
  std::string name;
  std::string parent;  // basic classes only
  std::string key;     // classifiers only
  std::vector<RawAttr> attrs;
  SourcePos pos;
  SourcePos parent_pos;
};

class DslParser {
 public:
  explicit DslParser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  std::vector<RawDecl> parse() {
    std::vector<RawDecl> decls;
    while (tok_.kind != DslToken::End) decls.push_back(declaration());
    return decls;
  }

 private:
  DslToken take(DslToken::Kind kind, const char* what) {
    if (tok_.kind != kind) {
      throw error_at(SchemaErrorKind::Syntax,
                     std::string("expected ") + what + ", found '" + tok_.text + "'", tok_.pos);
    }
    DslToken t = tok_;
    tok_ = lex_.next();
    return t;
  }
  bool at_word(std::string_view w) const { return tok_.kind == DslToken::Ident && tok_.text == w; }

  RawDecl declaration() {
    RawDecl d;
    d.pos = tok_.pos;
    if (at_word("classifier")) {
      d.classifier = true;
    } else if (!at_word("class")) {
      throw error_at(SchemaErrorKind::Syntax,
                     "expected 'class' or 'classifier', found '" + tok_.text + "'", tok_.pos);
    }
    tok_ = lex_.next();
    d.name = take(DslToken::Ident, "class name").text;
    if (d.classifier) {
      if (!at_word("key")) {
        throw error_at(SchemaErrorKind::Syntax, "expected 'key' after classifier name", tok_.pos);
      }
      tok_ = lex_.next();
      d.key = take(DslToken::Ident, "key attribute name").text;
    } else if (at_word("under")) {
      tok_ = lex_.next();
      d.parent_pos = tok_.pos;
      d.parent = take(DslToken::Ident, "parent class name").text;
    }
    take(DslToken::LBrace, "'{'");
    while (tok_.kind != DslToken::RBrace) {
      RawAttr a;
      a.pos = tok_.pos;
      a.name = take(DslToken::Ident, "attribute name or '}'").text;
      take(DslToken::Colon, "':'");
      a.type = take(DslToken::Ident, "type name").text;
      d.attrs.push_back(std::move(a));
    }
    take(DslToken::RBrace, "'}'");
    return d;
  }

  DslLexer lex_;
  DslToken tok_;
};

}  // namespace

SchemaError::SchemaError(SchemaErrorKind kind, const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + message
                                  : message),
      kind_(kind),
      line_(line),
      column_(column) {}

std::string_view name_of(Relation r) {
  switch (r) {
    case Relation::Self: return "self";
    case Relation::Ancestor: return "ancestor";
    case Relation::Descendant: return "descendant";
    case Relation::Brother: return "brother";
  }
  return "?";
}

std::optional<TypeTag> primitive_type(std::string_view name) {
  static constexpr std::pair<std::string_view, TypeTag> kTypes[] = {
      {"Integer", TypeTag::Integer}, {"Real", TypeTag::Real},
      {"Boolean", TypeTag::Boolean}, {"String", TypeTag::String},
      {"Date", TypeTag::Date},       {"DateTime", TypeTag::DateTime},
      {"Duration", TypeTag::Duration},
  };
  for (const auto& [n, t] : kTypes) {
    if (n == name) return t;
  }
  return std::nullopt;
}

Schema Schema::build(std::vector<ClassDef> classes, std::vector<ClassifierDef> classifiers) {
  validate(classes, classifiers, {});
  Schema s;
  s.classes_ = std::move(classes);
  s.classifiers_ = std::move(classifiers);
  for (ClassId i = 0; i < s.classes_.size(); ++i) {
    s.class_index_.emplace(s.classes_[i].name, i);
    s.classes_[i].children.clear();
  }
  for (ClassifierId i = 0; i < s.classifiers_.size(); ++i) {
    auto& c = s.classifiers_[i];
    s.classifier_index_.emplace(c.name, i);
    for (std::size_t k = 0; k < c.attributes.size(); ++k) {
      if (c.attributes[k].name == c.key_attribute) c.key_index = k;
    }
  }
  for (ClassId i = 0; i < s.classes_.size(); ++i) {
    if (auto p = s.classes_[i].parent) {
      s.classes_[*p].children.push_back(i);
    } else {
      s.root_ = i;
    }
  }
  for (auto& c : s.classes_) {
    int depth = 0;
    for (auto p = c.parent; p; p = s.classes_[*p].parent) ++depth;
    c.depth = depth;
  }
  return s;
}

std::optional<ClassId> Schema::find_class(std::string_view name) const {
  auto it = class_index_.find(std::string(name));
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ClassifierId> Schema::find_classifier(std::string_view name) const {
  auto it = classifier_index_.find(std::string(name));
  if (it == classifier_index_.end()) return std::nullopt;
  return it->second;
}

bool Schema::is_ancestor(ClassId ancestor, ClassId cls) const {
  for (auto p = classes_[cls].parent; p; p = classes_[*p].parent) {
    if (*p == ancestor) return true;
  }
  return false;
}

RelationInfo Schema::relation(ClassId a, ClassId b) const {
  if (a == b) return {Relation::Self, std::nullopt};
  if (is_ancestor(b, a)) return {Relation::Ancestor, std::nullopt};
  if (is_ancestor(a, b)) return {Relation::Descendant, std::nullopt};
  ClassId x = a;
  ClassId y = b;
  while (classes_[x].depth > classes_[y].depth) x = *classes_[x].parent;
  while (classes_[y].depth > classes_[x].depth) y = *classes_[y].parent;
  while (x != y) {
    x = *classes_[x].parent;
    y = *classes_[y].parent;
  }
  return {Relation::Brother, x};
}

std::vector<ClassId> Schema::path_down(ClassId from, ClassId to) const {
  std::vector<ClassId> path;
  for (ClassId c = to; c != from; c = *classes_[c].parent) path.push_back(c);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<ClassId> Schema::root_to_leaf_order() const {
  std::vector<ClassId> order;
  if (classes_.empty()) return order;
  std::deque<ClassId> queue{root_};
  while (!queue.empty()) {
    ClassId c = queue.front();
    queue.pop_front();
    order.push_back(c);
    for (ClassId ch : classes_[c].children) queue.push_back(ch);
  }
  return order;
}

std::vector<VisibleAttribute> Schema::visible_attributes(ClassId cls) const {
  std::vector<VisibleAttribute> out;
  for (std::optional<ClassId> c = cls; c; c = classes_[*c].parent) {
    const auto& attrs = classes_[*c].attributes;
    for (std::size_t i = 0; i < attrs.size(); ++i) out.push_back({*c, i, &attrs[i]});
  }
  return out;
}

std::optional<VisibleAttribute> Schema::find_visible(ClassId cls, std::string_view name) const {
  for (std::optional<ClassId> c = cls; c; c = classes_[*c].parent) {
    const auto& attrs = classes_[*c].attributes;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      if (attrs[i].name == name) return VisibleAttribute{*c, i, &attrs[i]};
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> Schema::find_classifier_attribute(ClassifierId id,
                                                             std::string_view name) const {
  const auto& attrs = classifiers_[id].attributes;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<ClassId> Schema::descendant_declaring(ClassId cls, std::string_view name) const {
  for (ClassId child : classes_[cls].children) {
    for (const auto& a : classes_[child].attributes) {
      if (a.name == name) return child;
    }
    if (auto d = descendant_declaring(child, name)) return d;
  }
  return std::nullopt;
}

std::string Schema::describe_type(const AttrType& t) const {
  if (t.tag == TypeTag::Classifier) return classifiers_.at(t.classifier).name;
  return std::string(type_name(t.tag));
}

Schema parse_schema(std::string_view text) {
  std::vector<RawDecl> decls = DslParser(text).parse();

  std::unordered_map<std::string, std::size_t> classifier_ids;
  std::unordered_map<std::string, std::size_t> class_ids;
  std::unordered_set<std::string> seen;
  for (const auto& d : decls) {
    if (!seen.insert(d.name).second) {
      throw error_at(SchemaErrorKind::DuplicateName, "duplicate name '" + d.name + "'", d.pos);
    }
    if (d.classifier) {
      classifier_ids.emplace(d.name, classifier_ids.size());
    } else {
      class_ids.emplace(d.name, class_ids.size());
    }
  }

  auto resolve_type = [&](const RawAttr& a) {
    if (auto p = primitive_type(a.type)) return AttrType{*p, 0};
    if (auto it = classifier_ids.find(a.type); it != classifier_ids.end()) {
      return AttrType{TypeTag::Classifier, static_cast<ClassifierId>(it->second)};
    }
    if (class_ids.count(a.type)) {
      throw error_at(SchemaErrorKind::BadAttributeType,
                     "attribute '" + a.name + "' cannot have basic class type '" + a.type +
                         "'; basic classes are linked by 'under'",
                     a.pos);
    }
    throw error_at(SchemaErrorKind::UnknownClassifier,
                   "unknown classifier '" + a.type + "' for attribute '" + a.name + "'", a.pos);
  };

  std::vector<ClassDef> classes;
  std::vector<ClassifierDef> classifiers;
  std::vector<SourcePos> positions;
  for (const auto& d : decls) {
    std::vector<AttributeDef> attrs;
    for (const auto& a : d.attrs) attrs.push_back({a.name, resolve_type(a)});
    if (d.classifier) {
      for (const auto& a : attrs) {
        if (a.type.tag == TypeTag::Classifier) {
          throw error_at(SchemaErrorKind::BadAttributeType,
                         "classifier attribute '" + a.name + "' in " + d.name +
                             " must have a primitive type",
                         d.pos);
        }
      }
      auto key = std::find_if(attrs.begin(), attrs.end(),
                              [&](const AttributeDef& a) { return a.name == d.key; });
      if (key == attrs.end()) {
        throw error_at(SchemaErrorKind::BadKey,
                       "key attribute '" + d.key + "' not declared in " + d.name, d.pos);
      }
      classifiers.push_back({d.name, d.key, 0, std::move(attrs)});
    } else {
      ClassDef c;
      c.name = d.name;
      c.attributes = std::move(attrs);
      if (!d.parent.empty()) {
        auto it = class_ids.find(d.parent);
        if (it == class_ids.end()) {
          throw error_at(SchemaErrorKind::UnknownParent, "unknown parent class '" + d.parent + "'",
                         d.parent_pos);
        }
        c.parent = static_cast<ClassId>(it->second);
      }
      classes.push_back(std::move(c));
      positions.push_back(d.pos);
    }
  }
  validate(classes, classifiers, positions);
  return Schema::build(std::move(classes), std::move(classifiers));
}

Schema load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open schema file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

}  // namespace semiq

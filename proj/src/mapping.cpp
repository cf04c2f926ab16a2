#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "semiq/store.hpp"

namespace semiq {

namespace {

struct MapToken {
  enum Kind { Word, Quoted, LBrace, RBrace, Arrow, End } kind = End;
  std::string text;
  int line = 1;
};

class MapLexer {
 public:
  explicit MapLexer(std::string_view text) : text_(text) {}

  MapToken next() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') ++i_;
      } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';') {
        if (c == '\n') ++line_;
        ++i_;
      } else {
        break;
      }
    }
    MapToken t;
    t.line = line_;
    if (i_ >= text_.size()) return t;
    char c = text_[i_];
    if (c == '{' || c == '}') {
      t.kind = c == '{' ? MapToken::LBrace : MapToken::RBrace;
      t.text = std::string(1, c);
      ++i_;
      return t;
    }
    if (c == '<' && i_ + 1 < text_.size() && text_[i_ + 1] == '-') {
      t.kind = MapToken::Arrow;
      t.text = "<-";
      i_ += 2;
      return t;
    }
    if (c == '"') {
      t.kind = MapToken::Quoted;
      ++i_;
      while (i_ < text_.size() && text_[i_] != '"') {
        if (text_[i_] == '\n') fail("unterminated string");
        t.text += text_[i_++];
      }
      if (i_ >= text_.size()) fail("unterminated string");
      ++i_;
      return t;
    }
    t.kind = MapToken::Word;
    while (i_ < text_.size()) {
      char d = text_[i_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '{' || d == '}' || d == '"' ||
          d == ',' || d == ';' || d == '#' || (d == '<' && i_ + 1 < text_.size() && text_[i_ + 1] == '-')) {
        break;
      }
      t.text += d;
      ++i_;
    }
    return t;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw MappingError("mapping line " + std::to_string(line_) + ": " + message);
  }

 private:
  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
};

class MapParser {
 public:
  explicit MapParser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  MappingSpec parse() {
    MappingSpec spec;
    while (tok_.kind != MapToken::End) spec.entries.push_back(entry());
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw MappingError("mapping line " + std::to_string(tok_.line) + ": " + message);
  }
  bool at_word(std::string_view w) const { return tok_.kind == MapToken::Word && tok_.text == w; }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "', found '" + tok_.text + "'");
    tok_ = lex_.next();
  }
  std::string take(MapToken::Kind kind, const char* what) {
    bool ok = tok_.kind == kind || (kind == MapToken::Word && tok_.kind == MapToken::Quoted);
    if (!ok) fail(std::string("expected ") + what + ", found '" + tok_.text + "'");
    std::string s = tok_.text;
    tok_ = lex_.next();
    return s;
  }

  ClassMapping entry() {
    ClassMapping m;
    expect_word("map");
    if (at_word("classifier")) {
      m.classifier = true;
      tok_ = lex_.next();
    }
    m.target = take(MapToken::Word, "class name");
    expect_word("from");
    m.file = take(MapToken::Word, "file name");
    expect_word("key");
    m.key_column = take(MapToken::Word, "key column");
    if (at_word("parent")) {
      tok_ = lex_.next();
      m.parent_column = take(MapToken::Word, "parent key column");
    }
    take(MapToken::LBrace, "'{'");
    while (tok_.kind != MapToken::RBrace) {
      ColumnMapping c;
      c.attribute = take(MapToken::Word, "attribute name or '}'");
      take(MapToken::Arrow, "'<-'");
      c.column = take(MapToken::Word, "column name");
      m.columns.push_back(std::move(c));
    }
    take(MapToken::RBrace, "'}'");
    return m;
  }

  MapLexer lex_;
  MapToken tok_;
};

}  // namespace

MappingSpec parse_mapping(std::string_view text) { return MapParser(text).parse(); }

MappingSpec load_mapping_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MappingError("cannot open mapping file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mapping(ss.str());
}

void check_mapping(const MappingSpec& mapping, const Schema& schema) {
  std::unordered_set<std::string> mapped;
  for (const auto& m : mapping.entries) {
    if (!mapped.insert((m.classifier ? "classifier " : "") + m.target).second) {
      throw MappingError(m.target + " is mapped twice");
    }
    std::unordered_set<std::string> attrs;
    if (m.classifier) {
      auto id = schema.find_classifier(m.target);
      if (!id) throw MappingError("unknown classifier '" + m.target + "' in mapping");
      if (!m.parent_column.empty()) {
        throw MappingError("classifier " + m.target + " cannot have a parent key column");
      }
      for (const auto& c : m.columns) {
        if (!schema.find_classifier_attribute(*id, c.attribute)) {
          throw MappingError("unknown attribute '" + c.attribute + "' of classifier " + m.target);
        }
        if (!attrs.insert(c.attribute).second) {
          throw MappingError("attribute '" + c.attribute + "' of " + m.target + " mapped twice");
        }
      }
      continue;
    }
    auto id = schema.find_class(m.target);
    if (!id) throw MappingError("unknown class '" + m.target + "' in mapping");
    bool root = !schema.cls(*id).parent.has_value();
    if (root && !m.parent_column.empty()) {
      throw MappingError("root class " + m.target + " cannot have a parent key column");
    }
    if (!root && m.parent_column.empty()) {
      throw MappingError("class " + m.target + " needs a parent key column");
    }
    const auto& own = schema.cls(*id).attributes;
    for (const auto& c : m.columns) {
      bool found = false;
      for (const auto& a : own) found = found || a.name == c.attribute;
      if (!found) {
        throw MappingError("unknown attribute '" + c.attribute + "' of class " + m.target);
      }
      if (!attrs.insert(c.attribute).second) {
        throw MappingError("attribute '" + c.attribute + "' of " + m.target + " mapped twice");
      }
    }
  }
}

}  // namespace semiq

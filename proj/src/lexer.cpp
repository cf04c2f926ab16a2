#include <algorithm>
#include <array>
#include <cctype>

#include "semiq/ast.hpp"

namespace semiq {

ParseError::ParseError(const std::string& message, Span span, std::vector<std::string> expected,
                       std::string template_prefix)
    : std::runtime_error(message),
      span_(span),
      expected_(std::move(expected)),
      template_prefix_(std::move(template_prefix)) {}

namespace {

constexpr std::array kKeywords = {
    "COUNT",  "COUNTDISTINCT", "WHERE",  "EXISTS",   "NOTEXISTS", "NOT",       "FORALL",
    "AND",    "OR",            "SUM",    "MAX",      "MIN",       "AVG",       "MOST",
    "FROM",   "SELECT",        "ATTRIBUTE", "ALL",   "DISTINCT",  "VALUES",    "SHOW",
    "FULLSHOW", "DEFINE",      "TABLE",  "COLUMN",   "KEEP",      "ROWS",      "SORT",
    "ASCENDING", "DESCENDING", "BY",     "LEAVE",    "FIRST",     "LAST",      "INTERVAL",
    "NIL",    "WHO",           "WHICH",  "WITH",     "HAVE",      "HAS",       "OF",
    "EQUALS",
};

bool is_word_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

// Typographic quotes: U+2018 U+2019 U+201C U+201D.
std::size_t typographic_quote(std::string_view s, std::size_t i) {
  if (i + 2 < s.size() && s[i] == '\xE2' && s[i + 1] == '\x80' &&
      (s[i + 2] == '\x98' || s[i + 2] == '\x99' || s[i + 2] == '\x9C' || s[i + 2] == '\x9D')) {
    return 3;
  }
  return 0;
}

bool is_comparator(const Token& t) {
  if (t.kind == TokenKind::Symbol) {
    return t.text == "=" || t.text == "<>" || t.text == "<" || t.text == "<=" || t.text == ">" ||
           t.text == ">=";
  }
  return false;
}

bool raw_stop(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '(' || c == ')' ||
         c == ';' || c == '=' || c == '<' || c == '>' || c == '!' || c == '+' || c == '*' ||
         c == '/' || c == '"' || c == '\'';
}

}  // namespace

bool is_keyword(std::string_view word) {
  std::string up(word);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return std::find(kKeywords.begin(), kKeywords.end(), up) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto emit = [&](TokenKind kind, std::string s, std::size_t start) {
    out.push_back(Token{kind, std::move(s), Span{start, i - start}});
  };

  while (true) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t start = i;
    char c = text[i];

    // Verbatim right-hand literal after `path <comparator>`.
    if (out.size() >= 2 && is_comparator(out.back())) {
      const Token& before = out[out.size() - 2];
      if (before.kind == TokenKind::Word || (before.kind == TokenKind::Symbol && before.text == ")")) {
        std::size_t j = i;
        while (j < text.size() && !raw_stop(text[j]) && !typographic_quote(text, j)) ++j;
        std::size_t end = j;
        while (end > i && text[end - 1] == '.') --end;
        std::string_view run = text.substr(i, end - i);
        if (run.size() > 1 && run.find('-') != std::string_view::npos) {
          i = end;
          emit(TokenKind::Raw, std::string(run), start);
          continue;
        }
      }
    }

    if (std::size_t q = typographic_quote(text, i); q || c == '"' || c == '\'') {
      bool typographic = q != 0;
      i += typographic ? q : 1;
      std::string s;
      bool closed = false;
      while (i < text.size()) {
        if (typographic && typographic_quote(text, i)) {
          i += 3;
          closed = true;
          break;
        }
        if (!typographic && text[i] == '\\' && i + 1 < text.size() && text[i + 1] == c) {
          s += c;
          i += 2;
          continue;
        }
        if (!typographic && text[i] == c) {
          ++i;
          closed = true;
          break;
        }
        s += text[i++];
      }
      if (!closed) throw ParseError("unterminated string", Span{start, text.size() - start});
      emit(TokenKind::String, std::move(s), start);
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size()) {
        unsigned char d = static_cast<unsigned char>(text[i]);
        if (std::isalnum(d) || d == '_') {
          ++i;
        } else if ((d == '.' || d == ':') && i + 1 < text.size() &&
                   std::isalnum(static_cast<unsigned char>(text[i + 1]))) {
          ++i;
        } else {
          break;
        }
      }
      emit(TokenKind::Number, std::string(text.substr(start, i - start)), start);
      continue;
    }

    if (is_word_start(static_cast<unsigned char>(c))) {
      while (i < text.size() && is_word_char(static_cast<unsigned char>(text[i])) &&
             !typographic_quote(text, i)) {
        ++i;
      }
      emit(TokenKind::Word, std::string(text.substr(start, i - start)), start);
      continue;
    }

    auto two = text.substr(i, 2);
    if (two == "<>" || two == "<=" || two == ">=" || two == "!=") {
      i += 2;
      emit(TokenKind::Symbol, two == "!=" ? "<>" : std::string(two), start);
      continue;
    }
    if (std::string_view("(),.;+-*/=<>").find(c) != std::string_view::npos) {
      ++i;
      emit(TokenKind::Symbol, std::string(1, c), start);
      continue;
    }
    throw ParseError("illegal character '" + std::string(1, c) + "'", Span{start, 1});
  }
  out.push_back(Token{TokenKind::End, "", Span{text.size(), 0}});
  return out;
}

}  // namespace semiq

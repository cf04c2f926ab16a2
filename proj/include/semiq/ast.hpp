#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "semiq/value.hpp"

namespace semiq {

struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;
};

// --- tokens -------------------------------------------------------------------------

enum class TokenKind {
  Word,    // identifier or keyword; keywords are matched case-insensitively
  Number,  // digit-led run such as 12, 10.0, 2015.06.17T10:45, 30d
  String,  // quoted literal, quotes stripped
  Raw,     // verbatim right-hand literal such as 250285-10507
  Symbol,  // ( ) , . ; + - * / = <> < <= > >=
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  Span span;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, Span span, std::vector<std::string> expected = {},
             std::string template_prefix = {});
  Span span() const { return span_; }
  const std::vector<std::string>& expected() const { return expected_; }
  // Template recognized so far, e.g. "T1 COUNT", empty before the head.
  const std::string& template_prefix() const { return template_prefix_; }

 private:
  Span span_;
  std::vector<std::string> expected_;
  std::string template_prefix_;
};

// Throws ParseError on an unterminated string or an illegal character.
std::vector<Token> tokenize(std::string_view text);

bool is_keyword(std::string_view word);

// --- syntax tree ------------------------------------------------------------------------

// `[context.]Class [short]`, also written `Class short of Class context`.
struct ClassRef {
  std::string context;
  std::string class_name;  // as written, possibly plural
  std::string short_name;
  std::string of_class;    // class named in the `of` form, checked by the resolver
  Span span;
};

enum class AggKind { Count, CountDistinct, Sum, Max, Min, Avg, Most };
std::string_view name_of(AggKind k);

struct Cond;
using CondPtr = std::unique_ptr<Cond>;

struct Expr {
  enum Kind {
    Path,       // names[0].names[1]...
    Literal,    // text, quoted
    Nil,
    Star,       // `*` on the right of `attr=*`
    Call,       // text = function; operands[0] = target, rest = arguments
    Arith,      // operands[0] op operands[1]
    Negate,     // -operands[0]
    Count,      // (COUNT source [WHERE where])
    Aggregate,  // (agg operands[0] FROM source [WHERE where])
    Selector,   // (source, WHERE where).names...
  };

  Kind kind = Path;
  Span span;
  std::vector<std::string> names;
  std::string text;
  bool quoted = false;
  ArithOp op = ArithOp::Add;
  AggKind agg = AggKind::Count;
  std::vector<Expr> operands;
  ClassRef source;
  CondPtr where;
};

enum class QuantorKind { Exists, NotExists, ForAll };
std::string_view name_of(QuantorKind k);

struct Cond {
  enum Kind { Compare, Quantor, And, Or };

  Kind kind = Compare;
  Span span;
  bool parenthesized = false;
  // Compare
  CompareOp op = CompareOp::Eq;
  std::unique_ptr<Expr> lhs;
  std::unique_ptr<Expr> rhs;
  // Quantor
  QuantorKind quantor = QuantorKind::Exists;
  ClassRef target;
  CondPtr where;
  // And / Or
  CondPtr left;
  CondPtr right;
};

enum class Template {
  Count,          // T1
  Aggregate,      // T2
  Distinct,       // T3
  Show,           // T4
  FullShow,       // T5
  Table,          // T6
  TableDistinct,  // T7a
  TableInterval,  // T7b
};
std::string_view name_of(Template t);
std::string_view label_of(Template t);  // "T1" ... "T7b"

struct ColumnSpec {
  Expr expr;
  std::string name;  // empty when omitted
  Span span;
};

struct SortSpec {
  bool descending = false;
  std::string column;
  Span span;
};

struct LeaveSpec {
  bool last = false;
  std::int64_t count = 0;
};

struct QueryAst {
  Template kind = Template::Count;
  ClassRef source;
  CondPtr where;
  AggKind agg = AggKind::Sum;
  std::unique_ptr<Expr> attribute;      // T2, T3, T7a
  std::optional<std::int64_t> limit;    // T4/T5; nullopt = ALL
  std::string row_variable;             // T7
  std::int64_t interval_start = 0;      // T7b
  std::int64_t interval_end = 0;
  std::vector<ColumnSpec> columns;      // T6/T7
  CondPtr keep;
  std::optional<SortSpec> sort;
  std::optional<LeaveSpec> leave;
};

QueryAst parse_query(std::string_view text);

}  // namespace semiq

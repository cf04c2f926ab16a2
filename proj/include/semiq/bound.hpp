#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "semiq/ast.hpp"
#include "semiq/ontology.hpp"

namespace semiq {

class ResolveError : public std::runtime_error {
 public:
  ResolveError(const std::string& message, Span span) : std::runtime_error(message), span_(span) {}
  Span span() const { return span_; }

 private:
  Span span_;
};

enum class BindingKind { Instance, Classifier, Scalar };

// How a binding's instances are reached.
enum class Nav {
  Scan,     // the query's own source: every instance of the class
  Global,   // every instance, independent of the enclosing binding
  Child,    // descendants of the context instance
  Parent,   // the single ancestor instance of the context
  Brother,  // descendants of the context's nearest common ancestor instance
  Values,   // T7 row variable
};
std::string_view name_of(Nav n);

struct Binding {
  std::string name;
  bool automatic = false;
  BindingKind kind = BindingKind::Instance;
  ClassId cls = 0;
  ClassifierId classifier = 0;
  TypeTag scalar_type = TypeTag::Nil;
  Nav nav = Nav::Scan;
  int context = -1;  // binding slot the navigation starts from; -1 for unprefixed global scans
  // Class whose instance anchors a Brother scan (nearest common ancestor, or
  // the parent class for self-brothers).
  ClassId anchor = 0;
};

struct BCond;

enum class CallFn { Temporal, Duration, Substring };

struct BExpr {
  enum Kind {
    Const,
    Attr,        // binding attribute, optionally one classifier hop
    BindingRef,  // the bound instance, classifier row or scalar itself
    Call,
    Arith,
    Negate,
    Count,
    Aggregate,
    Selector,
    MaxOf,       // `*`: maximum of operands[0] over the selector's full child set
    Column,      // KEEP ROWS reference to a table column
  };

  Kind kind = Const;
  TypeTag type = TypeTag::Nil;
  ClassifierId classifier = 0;  // when type == Classifier
  bool instance_ref = false;    // BindingRef to a basic-class instance

  Value value;                  // Const
  int binding = -1;             // Attr, BindingRef, Count, Aggregate, Selector, MaxOf
  ClassId owner = 0;            // Attr on an instance: class declaring the attribute
  std::size_t attr = 0;         // Attr: index in owner (or classifier) attributes
  std::optional<std::size_t> hop;  // Attr: classifier attribute after the hop
  CallFn fn = CallFn::Temporal;
  TemporalField field = TemporalField::Year;
  DurationUnit unit = DurationUnit::Days;
  ArithOp op = ArithOp::Add;
  AggKind agg = AggKind::Count;
  std::size_t column = 0;       // Column
  // Call: target then arguments. Arith: lhs, rhs. Negate: operand.
  // Aggregate / Selector / MaxOf: the per-instance value expression.
  std::vector<BExpr> operands;
  std::unique_ptr<BCond> where;  // Count, Aggregate, Selector
};

struct BCond {
  enum Kind { Compare, Quantor, And, Or };

  Kind kind = Compare;
  CompareOp op = CompareOp::Eq;
  BExpr lhs;
  BExpr rhs;
  QuantorKind quantor = QuantorKind::Exists;
  int binding = -1;
  std::unique_ptr<BCond> where;
  std::unique_ptr<BCond> left;
  std::unique_ptr<BCond> right;
};

struct BColumn {
  std::string name;
  BExpr expr;
};

struct BSort {
  bool descending = false;
  std::size_t column = 0;
};

struct BoundQuery {
  std::shared_ptr<const Schema> schema;
  Template kind = Template::Count;
  std::vector<Binding> bindings;
  int source = -1;   // class or classifier binding; -1 for T7b
  int row_var = -1;  // T7 scalar binding
  std::unique_ptr<BCond> where;
  AggKind agg = AggKind::Sum;
  std::unique_ptr<BExpr> attribute;
  std::optional<std::int64_t> limit;
  std::int64_t interval_start = 0;
  std::int64_t interval_end = 0;
  std::vector<BColumn> columns;
  std::unique_ptr<BCond> keep;
  std::optional<BSort> sort;
  std::optional<LeaveSpec> leave;
  // Normalizations and disambiguation notes; not part of the structure.
  std::vector<std::string> notes;
};

// Throws ResolveError.
BoundQuery resolve(const QueryAst& ast, std::shared_ptr<const Schema> schema);

// Fully disambiguated text: explicit bindings and prefixes, upper-case
// keywords. Parsing and resolving it again yields a structurally equal query.
std::string render_canonical(const BoundQuery& q);

// One line per binding: name, class and how its instances are reached.
std::vector<std::string> explain_bindings(const BoundQuery& q);

// Structural equality, ignoring notes and whether a name was generated.
bool structurally_equal(const BoundQuery& a, const BoundQuery& b);

// Display name of a binding's class or scalar type.
std::string binding_type_name(const BoundQuery& q, int slot);

}  // namespace semiq

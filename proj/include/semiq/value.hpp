#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semiq/warnings.hpp"

namespace semiq {

enum class TypeTag : std::uint8_t {
  Nil,
  Integer,
  Real,
  Boolean,
  String,
  Date,
  DateTime,
  Duration,
  Classifier,
  List,
};

std::string_view type_name(TypeTag tag);

// Proleptic Gregorian calendar date.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static bool valid(int year, int month, int day);
  static Date from_days(std::int64_t days_since_epoch);
  std::int64_t days_since_epoch() const;

  friend bool operator==(const Date&, const Date&) = default;
  friend auto operator<=>(const Date&, const Date&) = default;
};

struct DateTime {
  Date date;
  std::int64_t micros_of_day = 0;

  int hour() const { return static_cast<int>(micros_of_day / 3'600'000'000LL); }
  int minute() const { return static_cast<int>(micros_of_day / 60'000'000LL % 60); }
  // Seconds within the minute, in microseconds.
  std::int64_t second_micros() const { return micros_of_day % 60'000'000LL; }

  std::int64_t epoch_micros() const;
  static DateTime from_epoch_micros(std::int64_t micros);

  friend bool operator==(const DateTime&, const DateTime&) = default;
  friend auto operator<=>(const DateTime&, const DateTime&) = default;
};

// Calendar decomposition of a duration, e.g. 3Y4M5DT6H7M30.25S.
struct DurationParts {
  std::int32_t years = 0;
  std::int32_t months = 0;
  std::int32_t days = 0;
  std::int32_t hours = 0;
  std::int32_t minutes = 0;
  std::int64_t second_micros = 0;

  friend bool operator==(const DurationParts&, const DurationParts&) = default;
};

// Elapsed time. Ordering and accessors use `micros` only; `parts` is the
// display decomposition (absent for negative durations).
struct Duration {
  std::int64_t micros = 0;
  std::optional<DurationParts> parts;

  friend bool operator==(const Duration&, const Duration&) = default;
};

inline constexpr std::int64_t kMicrosPerSecond = 1'000'000;
inline constexpr std::int64_t kMicrosPerDay = 86'400 * kMicrosPerSecond;
inline constexpr std::int64_t kDaysPerYear = 365;
inline constexpr std::int64_t kDaysPerMonth = 30;

// Total length of a literal decomposition under the fixed conventions
// 1Y = 365 days, 1M = 30 days.
std::int64_t conventional_micros(const DurationParts& parts);

struct ClassifierRef {
  std::uint32_t classifier = 0;
  std::uint32_t row = 0;

  friend bool operator==(const ClassifierRef&, const ClassifierRef&) = default;
  friend auto operator<=>(const ClassifierRef&, const ClassifierRef&) = default;
};

class Value {
 public:
  using List = std::vector<Value>;

  Value() = default;

  static Value integer(std::int64_t v) { return Value(Storage{std::in_place_index<1>, v}); }
  static Value real(double v) { return Value(Storage{std::in_place_index<2>, v}); }
  static Value boolean(bool v) { return Value(Storage{std::in_place_index<3>, v}); }
  static Value string(std::string v) {
    return Value(Storage{std::in_place_index<4>, std::move(v)});
  }
  static Value date(Date v) { return Value(Storage{std::in_place_index<5>, v}); }
  static Value datetime(DateTime v) { return Value(Storage{std::in_place_index<6>, v}); }
  static Value duration(Duration v) { return Value(Storage{std::in_place_index<7>, v}); }
  static Value classifier(ClassifierRef v) {
    return Value(Storage{std::in_place_index<8>, v});
  }
  static Value list(List items) {
    return Value(Storage{std::in_place_index<9>,
                         std::make_shared<const List>(std::move(items))});
  }

  TypeTag tag() const { return static_cast<TypeTag>(data_.index()); }
  bool is_nil() const { return data_.index() == 0; }
  bool is_numeric() const { return tag() == TypeTag::Integer || tag() == TypeTag::Real; }

  std::int64_t as_integer() const { return std::get<1>(data_); }
  double as_real() const { return std::get<2>(data_); }
  bool as_boolean() const { return std::get<3>(data_); }
  const std::string& as_string() const { return std::get<4>(data_); }
  const Date& as_date() const { return std::get<5>(data_); }
  const DateTime& as_datetime() const { return std::get<6>(data_); }
  const Duration& as_duration() const { return std::get<7>(data_); }
  const ClassifierRef& as_classifier() const { return std::get<8>(data_); }
  const List& as_list() const { return *std::get<9>(data_); }

  // Integer or Real widened to double.
  double numeric() const {
    return tag() == TypeTag::Integer ? static_cast<double>(as_integer()) : as_real();
  }

 private:
  using Storage = std::variant<std::monostate, std::int64_t, double, bool, std::string, Date,
                               DateTime, Duration, ClassifierRef, std::shared_ptr<const List>>;
  explicit Value(Storage s) : data_(std::move(s)) {}

  Storage data_;
};

// Exact structural identity. Reals compare bitwise, durations include their
// display decomposition. Used for distinct-value sets and oracle checks.
bool identical(const Value& a, const Value& b);

struct ValueHash {
  std::size_t operator()(const Value& v) const;
};
struct ValueIdentical {
  bool operator()(const Value& a, const Value& b) const { return identical(a, b); }
};

// ---------------------------------------------------------------------------
// Primitive operations
// ---------------------------------------------------------------------------

enum class ArithOp { Add, Sub, Mul, Div };
std::string_view symbol(ArithOp op);

// Integer op Integer stays Integer for + - *; `/` always yields Real.
// Date - Date and DateTime - DateTime dispatch to temporal_sub. Any Nil operand
// yields Nil. Division by zero and overflow yield Nil plus a warning.
Value arith(ArithOp op, const Value& a, const Value& b, WarningLog* warnings = nullptr);

// 1-based inclusive character range. Out of range yields Nil plus a warning.
Value substring(const Value& s, std::int64_t first, std::int64_t last,
                WarningLog* warnings = nullptr);

enum class TemporalField { Year, Month, Day, DayOfWeek, Hour, Minute, Second, Date };
std::string_view name_of(TemporalField f);
std::optional<TemporalField> temporal_field(std::string_view name);
bool applies_to(TemporalField f, TypeTag tag);
TypeTag result_type(TemporalField f, TypeTag input);

// dayOfWeek is Monday=1 .. Sunday=7. second() is Real.
Value datetime_unary(const Value& v, TemporalField field);

// a - b for two Dates or two DateTimes. The decomposition is anchored at b:
// whole years, then whole months (day clamped to month length), then days
// and time-of-day parts.
Value temporal_sub(const Value& a, const Value& b);

enum class DurationUnit { Years, Months, Days, Hours, Minutes, Seconds };
std::string_view name_of(DurationUnit u);
std::optional<DurationUnit> duration_unit(std::string_view name);

// Whole duration expressed in `unit`, truncated toward zero (1Y=365d,
// 1M=30d). seconds() returns Real.
Value duration_accessor(const Value& d, DurationUnit unit);

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view symbol(CompareOp op);
CompareOp flipped(CompareOp op);   // a op b  <=>  b flipped(op) a
CompareOp negated(CompareOp op);   // !(a op b) for non-Nil operands

// Whether values of these two types may be compared at all.
bool comparable(TypeTag a, TypeTag b);
// Whether < <= > >= are meaningful for the family.
bool orderable(TypeTag t);

// Total order within a comparable family; nullopt across families or with Nil.
std::optional<std::strong_ordering> order(const Value& a, const Value& b);

// = and <> treat Nil as a value (nil = nil holds); ordering comparators with
// a Nil operand are false.
bool compare(CompareOp op, const Value& a, const Value& b);

enum class LogicOp { And, Or };
Value logic(LogicOp op, const Value& a, const Value& b);
Value logic_not(const Value& a);

// Calendar helpers shared with the loader and the generator.
Date add_months_clamped(const Date& d, std::int64_t months);
DateTime add_months_clamped(const DateTime& d, std::int64_t months);

// ---------------------------------------------------------------------------
// Literals
// ---------------------------------------------------------------------------

class LiteralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses `lexeme` as a value of `expected`. Strings keep the exact lexeme
// (surrounding quotes removed). Throws LiteralError on mismatch.
Value parse_literal(std::string_view lexeme, TypeTag expected);

// Like parse_literal but returns nullopt instead of throwing.
std::optional<Value> try_parse_literal(std::string_view lexeme, TypeTag expected);

std::string render(const Date& d);
std::string render(const DateTime& d);
std::string render(const Duration& d);
std::string render_real(double v);

// Canonical text. ClassifierRef renders as `#classifier:row`; callers with
// store access render classifier keys instead.
std::string render(const Value& v);

// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view s);

}  // namespace semiq

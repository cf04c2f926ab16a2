#include "semiq/value.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

namespace semiq {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(const Date& d) {
  return chr::year{d.year} / chr::month{static_cast<unsigned>(d.month)} /
         chr::day{static_cast<unsigned>(d.day)};
}

int last_day_of(int year, int month) {
  chr::year_month_day_last ymdl{chr::year{year} / chr::month{static_cast<unsigned>(month)} /
                                chr::last};
  return static_cast<int>(static_cast<unsigned>(ymdl.day()));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Reads a run of ASCII digits as a non-negative integer; advances `pos`.
std::optional<std::int64_t> read_digits(std::string_view s, std::size_t& pos,
                                        std::size_t max_digits = 18) {
  std::size_t start = pos;
  std::int64_t v = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    if (pos - start >= max_digits) return std::nullopt;
    v = v * 10 + (s[pos] - '0');
    ++pos;
  }
  if (pos == start) return std::nullopt;
  return v;
}

// Fraction digits after a '.', scaled to microseconds.
std::optional<std::int64_t> read_fraction_micros(std::string_view s, std::size_t& pos) {
  std::size_t start = pos;
  std::int64_t v = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    if (pos - start >= 6) return std::nullopt;
    v = v * 10 + (s[pos] - '0');
    ++pos;
  }
  std::size_t n = pos - start;
  if (n == 0) return std::nullopt;
  for (std::size_t i = n; i < 6; ++i) v *= 10;
  return v;
}

std::string render_seconds(std::int64_t micros) {
  std::string out = std::to_string(micros / kMicrosPerSecond);
  std::int64_t frac = micros % kMicrosPerSecond;
  if (frac != 0) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frac));
    std::string f(buf);
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += '.';
    out += f;
  }
  return out;
}

std::optional<Date> parse_date(std::string_view s) {
  std::size_t pos = 0;
  auto y = read_digits(s, pos, 6);
  if (!y || pos >= s.size() || s[pos] != '.') return std::nullopt;
  ++pos;
  std::size_t mstart = pos;
  auto m = read_digits(s, pos, 2);
  if (!m || pos - mstart == 0 || pos >= s.size() || s[pos] != '.') return std::nullopt;
  ++pos;
  auto d = read_digits(s, pos, 2);
  if (!d || pos != s.size()) return std::nullopt;
  if (!Date::valid(static_cast<int>(*y), static_cast<int>(*m), static_cast<int>(*d))) {
    return std::nullopt;
  }
  return Date{static_cast<int>(*y), static_cast<int>(*m), static_cast<int>(*d)};
}

std::optional<DateTime> parse_datetime(std::string_view s) {
  auto t = s.find_first_of("Tt");
  if (t == std::string_view::npos) return std::nullopt;
  auto date = parse_date(s.substr(0, t));
  if (!date) return std::nullopt;
  std::string_view time = s.substr(t + 1);
  std::size_t pos = 0;
  auto h = read_digits(time, pos, 2);
  if (!h || pos >= time.size() || time[pos] != ':') return std::nullopt;
  ++pos;
  auto mi = read_digits(time, pos, 2);
  if (!mi) return std::nullopt;
  std::int64_t sec_micros = 0;
  if (pos < time.size()) {
    if (time[pos] != ':') return std::nullopt;
    ++pos;
    auto sec = read_digits(time, pos, 2);
    if (!sec || *sec > 59) return std::nullopt;
    sec_micros = *sec * kMicrosPerSecond;
    if (pos < time.size()) {
      if (time[pos] != '.') return std::nullopt;
      ++pos;
      auto frac = read_fraction_micros(time, pos);
      if (!frac) return std::nullopt;
      sec_micros += *frac;
    }
  }
  if (pos != time.size() || *h > 23 || *mi > 59) return std::nullopt;
  return DateTime{*date, (*h * 60 + *mi) * 60 * kMicrosPerSecond + sec_micros};
}

std::optional<Duration> parse_duration(std::string_view s) {
  DurationParts parts;
  std::size_t pos = 0;
  bool any = false;
  bool in_time = false;
  int next_slot = 0;  // enforces Y < M < D < (T) H < M < S
  constexpr std::int64_t kLimit = 1'000'000'000;
  while (pos < s.size()) {
    if (!in_time && (s[pos] == 'T' || s[pos] == 't')) {
      in_time = true;
      next_slot = 3;
      ++pos;
      if (pos == s.size()) return std::nullopt;
      continue;
    }
    auto n = read_digits(s, pos, 10);
    if (!n || *n > kLimit) return std::nullopt;
    std::int64_t frac = 0;
    bool has_frac = false;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      auto f = read_fraction_micros(s, pos);
      if (!f) return std::nullopt;
      frac = *f;
      has_frac = true;
    }
    if (pos >= s.size()) return std::nullopt;
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[pos])));
    ++pos;
    int slot;
    if (!in_time) {
      if (c == 'Y') slot = 0;
      else if (c == 'M') slot = 1;
      else if (c == 'D') slot = 2;
      else return std::nullopt;
    } else {
      if (c == 'H') slot = 3;
      else if (c == 'M') slot = 4;
      else if (c == 'S') slot = 5;
      else return std::nullopt;
    }
    if (slot < next_slot) return std::nullopt;
    if (has_frac && slot != 5) return std::nullopt;
    next_slot = slot + 1;
    any = true;
    auto v = static_cast<std::int32_t>(*n);
    switch (slot) {
      case 0: parts.years = v; break;
      case 1: parts.months = v; break;
      case 2: parts.days = v; break;
      case 3: parts.hours = v; break;
      case 4: parts.minutes = v; break;
      default: parts.second_micros = *n * kMicrosPerSecond + frac; break;
    }
  }
  if (!any) return std::nullopt;
  return Duration{conventional_micros(parts), parts};
}

std::string strip_quotes(std::string_view s) {
  static constexpr std::string_view kOpen = "\xE2\x80\x9C";   // left double quote
  static constexpr std::string_view kClose = "\xE2\x80\x9D";  // right double quote
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    char q = s.front();
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size() && (s[i + 1] == q || s[i + 1] == '\\')) {
        out += s[++i];
      } else {
        out += s[i];
      }
    }
    return out;
  }
  auto starts = [&](std::string_view p) { return s.substr(0, p.size()) == p; };
  auto ends = [&](std::string_view p) {
    return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
  };
  if ((starts(kOpen) || starts(kClose)) && (ends(kOpen) || ends(kClose)) && s.size() >= 6) {
    return std::string(s.substr(3, s.size() - 6));
  }
  return std::string(s);
}

Duration make_difference(std::int64_t micros, std::optional<DurationParts> parts) {
  if (micros < 0) parts.reset();
  return Duration{micros, parts};
}

}  // namespace

std::string_view type_name(TypeTag tag) {
  switch (tag) {
    case TypeTag::Nil: return "Nil";
    case TypeTag::Integer: return "Integer";
    case TypeTag::Real: return "Real";
    case TypeTag::Boolean: return "Boolean";
    case TypeTag::String: return "String";
    case TypeTag::Date: return "Date";
    case TypeTag::DateTime: return "DateTime";
    case TypeTag::Duration: return "Duration";
    case TypeTag::Classifier: return "Classifier";
    case TypeTag::List: return "List";
  }
  return "?";
}

// --- Date / DateTime --------------------------------------------------------

bool Date::valid(int year, int month, int day) {
  if (year < -32767 || year > 32767 || month < 1 || month > 12 || day < 1) return false;
  return day <= last_day_of(year, month);
}

std::int64_t Date::days_since_epoch() const {
  return chr::sys_days{to_ymd(*this)}.time_since_epoch().count();
}

Date Date::from_days(std::int64_t days) {
  chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  return Date{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
              static_cast<int>(static_cast<unsigned>(ymd.day()))};
}

std::int64_t DateTime::epoch_micros() const {
  return date.days_since_epoch() * kMicrosPerDay + micros_of_day;
}

DateTime DateTime::from_epoch_micros(std::int64_t micros) {
  std::int64_t days = floor_div(micros, kMicrosPerDay);
  return DateTime{Date::from_days(days), micros - days * kMicrosPerDay};
}

Date add_months_clamped(const Date& d, std::int64_t months) {
  std::int64_t total = static_cast<std::int64_t>(d.year) * 12 + (d.month - 1) + months;
  int year = static_cast<int>(floor_div(total, 12));
  int month = static_cast<int>(total - static_cast<std::int64_t>(year) * 12) + 1;
  return Date{year, month, std::min(d.day, last_day_of(year, month))};
}

DateTime add_months_clamped(const DateTime& d, std::int64_t months) {
  return DateTime{add_months_clamped(d.date, months), d.micros_of_day};
}

std::int64_t conventional_micros(const DurationParts& p) {
  std::int64_t days = static_cast<std::int64_t>(p.years) * kDaysPerYear +
                      static_cast<std::int64_t>(p.months) * kDaysPerMonth + p.days;
  return days * kMicrosPerDay +
         (static_cast<std::int64_t>(p.hours) * 3600 + static_cast<std::int64_t>(p.minutes) * 60) *
             kMicrosPerSecond +
         p.second_micros;
}

// --- identity / hashing -----------------------------------------------------

bool identical(const Value& a, const Value& b) {
  if (a.tag() != b.tag()) return false;
  switch (a.tag()) {
    case TypeTag::Nil: return true;
    case TypeTag::Integer: return a.as_integer() == b.as_integer();
    case TypeTag::Real:
      return std::bit_cast<std::uint64_t>(a.as_real()) == std::bit_cast<std::uint64_t>(b.as_real());
    case TypeTag::Boolean: return a.as_boolean() == b.as_boolean();
    case TypeTag::String: return a.as_string() == b.as_string();
    case TypeTag::Date: return a.as_date() == b.as_date();
    case TypeTag::DateTime: return a.as_datetime() == b.as_datetime();
    case TypeTag::Duration: return a.as_duration() == b.as_duration();
    case TypeTag::Classifier: return a.as_classifier() == b.as_classifier();
    case TypeTag::List: {
      const auto& x = a.as_list();
      const auto& y = b.as_list();
      return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), identical);
    }
  }
  return false;
}

std::size_t ValueHash::operator()(const Value& v) const {
  auto mix = [](std::size_t seed, std::size_t h) {
    return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  };
  std::size_t seed = static_cast<std::size_t>(v.tag());
  switch (v.tag()) {
    case TypeTag::Nil: return seed;
    case TypeTag::Integer: return mix(seed, std::hash<std::int64_t>{}(v.as_integer()));
    case TypeTag::Real:
      return mix(seed, std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(v.as_real())));
    case TypeTag::Boolean: return mix(seed, v.as_boolean() ? 1 : 2);
    case TypeTag::String: return mix(seed, std::hash<std::string>{}(v.as_string()));
    case TypeTag::Date: return mix(seed, std::hash<std::int64_t>{}(v.as_date().days_since_epoch()));
    case TypeTag::DateTime:
      return mix(seed, std::hash<std::int64_t>{}(v.as_datetime().epoch_micros()));
    case TypeTag::Duration: return mix(seed, std::hash<std::int64_t>{}(v.as_duration().micros));
    case TypeTag::Classifier:
      return mix(seed, (static_cast<std::size_t>(v.as_classifier().classifier) << 32) ^
                           v.as_classifier().row);
    case TypeTag::List: {
      for (const auto& item : v.as_list()) seed = mix(seed, (*this)(item));
      return seed;
    }
  }
  return seed;
}

// --- arithmetic ---------------------------------------------------------------

std::string_view symbol(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

Value arith(ArithOp op, const Value& a, const Value& b, WarningLog* warnings) {
  if (a.is_nil() || b.is_nil()) return Value();
  if (op == ArithOp::Sub &&
      ((a.tag() == TypeTag::Date && b.tag() == TypeTag::Date) ||
       (a.tag() == TypeTag::DateTime && b.tag() == TypeTag::DateTime))) {
    return temporal_sub(a, b);
  }
  if (!a.is_numeric() || !b.is_numeric()) {
    if (warnings) {
      warnings->add("type mismatch in " + std::string(type_name(a.tag())) + " " +
                    std::string(symbol(op)) + " " + std::string(type_name(b.tag())));
    }
    return Value();
  }
  if (op == ArithOp::Div) {
    if (b.numeric() == 0.0) {
      if (warnings) warnings->add("division by zero");
      return Value();
    }
    return Value::real(a.numeric() / b.numeric());
  }
  if (a.tag() == TypeTag::Integer && b.tag() == TypeTag::Integer) {
    std::int64_t out = 0;
    bool overflow = false;
    switch (op) {
      case ArithOp::Add: overflow = __builtin_add_overflow(a.as_integer(), b.as_integer(), &out); break;
      case ArithOp::Sub: overflow = __builtin_sub_overflow(a.as_integer(), b.as_integer(), &out); break;
      case ArithOp::Mul: overflow = __builtin_mul_overflow(a.as_integer(), b.as_integer(), &out); break;
      case ArithOp::Div: break;
    }
    if (overflow) {
      if (warnings) warnings->add("integer overflow");
      return Value();
    }
    return Value::integer(out);
  }
  double x = a.numeric();
  double y = b.numeric();
  switch (op) {
    case ArithOp::Add: return Value::real(x + y);
    case ArithOp::Sub: return Value::real(x - y);
    case ArithOp::Mul: return Value::real(x * y);
    case ArithOp::Div: break;
  }
  return Value();
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

Value substring(const Value& s, std::int64_t first, std::int64_t last, WarningLog* warnings) {
  if (s.is_nil()) return Value();
  const std::string& str = s.as_string();
  auto len = static_cast<std::int64_t>(utf8_length(str));
  if (first < 1 || first > last || last > len) {
    if (warnings) {
      warnings->add("substring(" + std::to_string(first) + "," + std::to_string(last) +
                    ") out of range");
    }
    return Value();
  }
  std::size_t begin = str.size();
  std::size_t end = str.size();
  std::int64_t index = 0;  // 1-based index of the code point starting at i
  for (std::size_t i = 0; i < str.size(); ++i) {
    if ((static_cast<unsigned char>(str[i]) & 0xC0) == 0x80) continue;
    ++index;
    if (index == first) begin = i;
    if (index == last + 1) {
      end = i;
      break;
    }
  }
  return Value::string(str.substr(begin, end - begin));
}

// --- calendar operations ----------------------------------------------------

std::string_view name_of(TemporalField f) {
  switch (f) {
    case TemporalField::Year: return "year";
    case TemporalField::Month: return "month";
    case TemporalField::Day: return "day";
    case TemporalField::DayOfWeek: return "dayOfWeek";
    case TemporalField::Hour: return "hour";
    case TemporalField::Minute: return "minute";
    case TemporalField::Second: return "second";
    case TemporalField::Date: return "date";
  }
  return "?";
}

std::optional<TemporalField> temporal_field(std::string_view name) {
  for (auto f : {TemporalField::Year, TemporalField::Month, TemporalField::Day,
                 TemporalField::DayOfWeek, TemporalField::Hour, TemporalField::Minute,
                 TemporalField::Second, TemporalField::Date}) {
    if (iequals(name, name_of(f))) return f;
  }
  return std::nullopt;
}

bool applies_to(TemporalField f, TypeTag tag) {
  if (tag == TypeTag::Date) {
    return f == TemporalField::Year || f == TemporalField::Month || f == TemporalField::Day ||
           f == TemporalField::DayOfWeek;
  }
  if (tag == TypeTag::DateTime) return f != TemporalField::DayOfWeek;
  return false;
}

TypeTag result_type(TemporalField f, TypeTag) {
  if (f == TemporalField::Date) return TypeTag::Date;
  if (f == TemporalField::Second) return TypeTag::Real;
  return TypeTag::Integer;
}

Value datetime_unary(const Value& v, TemporalField field) {
  if (v.is_nil()) return Value();
  if (!applies_to(field, v.tag())) return Value();
  const Date& d = v.tag() == TypeTag::Date ? v.as_date() : v.as_datetime().date;
  switch (field) {
    case TemporalField::Year: return Value::integer(d.year);
    case TemporalField::Month: return Value::integer(d.month);
    case TemporalField::Day: return Value::integer(d.day);
    case TemporalField::DayOfWeek: {
      chr::weekday wd{chr::sys_days{to_ymd(d)}};
      return Value::integer(wd.iso_encoding());
    }
    case TemporalField::Hour: return Value::integer(v.as_datetime().hour());
    case TemporalField::Minute: return Value::integer(v.as_datetime().minute());
    case TemporalField::Second:
      return Value::real(static_cast<double>(v.as_datetime().second_micros()) / 1e6);
    case TemporalField::Date: return Value::date(v.as_datetime().date);
  }
  return Value();
}

Value temporal_sub(const Value& a, const Value& b) {
  if (a.is_nil() || b.is_nil()) return Value();
  if (a.tag() == TypeTag::Date && b.tag() == TypeTag::Date) {
    const Date& x = a.as_date();
    const Date& y = b.as_date();
    std::int64_t micros = (x.days_since_epoch() - y.days_since_epoch()) * kMicrosPerDay;
    if (x < y) return Value::duration(make_difference(micros, std::nullopt));
    std::int64_t years = x.year - y.year;
    while (years > 0 && add_months_clamped(y, years * 12) > x) --years;
    Date c = add_months_clamped(y, years * 12);
    std::int64_t months = (static_cast<std::int64_t>(x.year) * 12 + x.month) -
                          (static_cast<std::int64_t>(c.year) * 12 + c.month);
    while (months > 0 && add_months_clamped(c, months) > x) --months;
    Date d = add_months_clamped(c, months);
    DurationParts parts;
    parts.years = static_cast<std::int32_t>(years);
    parts.months = static_cast<std::int32_t>(months);
    parts.days = static_cast<std::int32_t>(x.days_since_epoch() - d.days_since_epoch());
    return Value::duration(make_difference(micros, parts));
  }
  if (a.tag() == TypeTag::DateTime && b.tag() == TypeTag::DateTime) {
    const DateTime& x = a.as_datetime();
    const DateTime& y = b.as_datetime();
    std::int64_t micros = x.epoch_micros() - y.epoch_micros();
    if (x < y) return Value::duration(make_difference(micros, std::nullopt));
    std::int64_t years = x.date.year - y.date.year;
    while (years > 0 && add_months_clamped(y, years * 12) > x) --years;
    DateTime c = add_months_clamped(y, years * 12);
    std::int64_t months = (static_cast<std::int64_t>(x.date.year) * 12 + x.date.month) -
                          (static_cast<std::int64_t>(c.date.year) * 12 + c.date.month);
    while (months > 0 && add_months_clamped(c, months) > x) --months;
    DateTime d = add_months_clamped(c, months);
    std::int64_t rest = x.epoch_micros() - d.epoch_micros();
    DurationParts parts;
    parts.years = static_cast<std::int32_t>(years);
    parts.months = static_cast<std::int32_t>(months);
    parts.days = static_cast<std::int32_t>(rest / kMicrosPerDay);
    rest %= kMicrosPerDay;
    parts.hours = static_cast<std::int32_t>(rest / (3600 * kMicrosPerSecond));
    rest %= 3600 * kMicrosPerSecond;
    parts.minutes = static_cast<std::int32_t>(rest / (60 * kMicrosPerSecond));
    parts.second_micros = rest % (60 * kMicrosPerSecond);
    return Value::duration(make_difference(micros, parts));
  }
  return Value();
}

std::string_view name_of(DurationUnit u) {
  switch (u) {
    case DurationUnit::Years: return "years";
    case DurationUnit::Months: return "months";
    case DurationUnit::Days: return "days";
    case DurationUnit::Hours: return "hours";
    case DurationUnit::Minutes: return "minutes";
    case DurationUnit::Seconds: return "seconds";
  }
  return "?";
}

std::optional<DurationUnit> duration_unit(std::string_view name) {
  for (auto u : {DurationUnit::Years, DurationUnit::Months, DurationUnit::Days,
                 DurationUnit::Hours, DurationUnit::Minutes, DurationUnit::Seconds}) {
    if (iequals(name, name_of(u))) return u;
  }
  return std::nullopt;
}

Value duration_accessor(const Value& d, DurationUnit unit) {
  if (d.is_nil()) return Value();
  std::int64_t micros = d.as_duration().micros;
  switch (unit) {
    case DurationUnit::Years: return Value::integer(micros / (kDaysPerYear * kMicrosPerDay));
    case DurationUnit::Months: return Value::integer(micros / (kDaysPerMonth * kMicrosPerDay));
    case DurationUnit::Days: return Value::integer(micros / kMicrosPerDay);
    case DurationUnit::Hours: return Value::integer(micros / (3600 * kMicrosPerSecond));
    case DurationUnit::Minutes: return Value::integer(micros / (60 * kMicrosPerSecond));
    case DurationUnit::Seconds: return Value::real(static_cast<double>(micros) / 1e6);
  }
  return Value();
}

// --- comparison ---------------------------------------------------------------

std::string_view symbol(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

CompareOp flipped(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return CompareOp::Gt;
    case CompareOp::Le: return CompareOp::Ge;
    case CompareOp::Gt: return CompareOp::Lt;
    case CompareOp::Ge: return CompareOp::Le;
    default: return op;
  }
}

CompareOp negated(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return CompareOp::Ne;
    case CompareOp::Ne: return CompareOp::Eq;
    case CompareOp::Lt: return CompareOp::Ge;
    case CompareOp::Le: return CompareOp::Gt;
    case CompareOp::Gt: return CompareOp::Le;
    case CompareOp::Ge: return CompareOp::Lt;
  }
  return op;
}

bool comparable(TypeTag a, TypeTag b) {
  if (a == TypeTag::List || b == TypeTag::List) return false;
  if (a == TypeTag::Nil || b == TypeTag::Nil) return true;
  auto numeric = [](TypeTag t) { return t == TypeTag::Integer || t == TypeTag::Real; };
  if (numeric(a) && numeric(b)) return true;
  return a == b;
}

bool orderable(TypeTag t) {
  return t != TypeTag::Classifier && t != TypeTag::List && t != TypeTag::Nil;
}

std::optional<std::strong_ordering> order(const Value& a, const Value& b) {
  if (a.is_nil() || b.is_nil()) return std::nullopt;
  if (a.is_numeric() && b.is_numeric()) {
    if (a.tag() == TypeTag::Integer && b.tag() == TypeTag::Integer) {
      return a.as_integer() <=> b.as_integer();
    }
    double x = a.numeric();
    double y = b.numeric();
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  if (a.tag() != b.tag()) return std::nullopt;
  switch (a.tag()) {
    case TypeTag::Boolean: return a.as_boolean() <=> b.as_boolean();
    case TypeTag::String: {
      int c = a.as_string().compare(b.as_string());
      return c < 0 ? std::strong_ordering::less
                   : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    case TypeTag::Date: return a.as_date() <=> b.as_date();
    case TypeTag::DateTime: return a.as_datetime() <=> b.as_datetime();
    case TypeTag::Duration: return a.as_duration().micros <=> b.as_duration().micros;
    case TypeTag::Classifier: return a.as_classifier() <=> b.as_classifier();
    default: return std::nullopt;
  }
}

bool compare(CompareOp op, const Value& a, const Value& b) {
  if (op == CompareOp::Eq || op == CompareOp::Ne) {
    bool equal;
    if (a.is_nil() || b.is_nil()) {
      equal = a.is_nil() && b.is_nil();
    } else {
      auto o = order(a, b);
      equal = o && *o == std::strong_ordering::equal;
    }
    return op == CompareOp::Eq ? equal : !equal;
  }
  if (!orderable(a.tag()) || !orderable(b.tag())) return false;
  auto o = order(a, b);
  if (!o) return false;
  switch (op) {
    case CompareOp::Lt: return *o < 0;
    case CompareOp::Le: return *o <= 0;
    case CompareOp::Gt: return *o > 0;
    case CompareOp::Ge: return *o >= 0;
    default: return false;
  }
}

Value logic(LogicOp op, const Value& a, const Value& b) {
  auto is = [](const Value& v, bool x) {
    return v.tag() == TypeTag::Boolean && v.as_boolean() == x;
  };
  if (op == LogicOp::And) {
    if (is(a, false) || is(b, false)) return Value::boolean(false);
    if (a.is_nil() || b.is_nil()) return Value();
    return Value::boolean(true);
  }
  if (is(a, true) || is(b, true)) return Value::boolean(true);
  if (a.is_nil() || b.is_nil()) return Value();
  return Value::boolean(false);
}

Value logic_not(const Value& a) {
  if (a.tag() != TypeTag::Boolean) return Value();
  return Value::boolean(!a.as_boolean());
}

// --- literals -----------------------------------------------------------------

std::optional<Value> try_parse_literal(std::string_view lexeme, TypeTag expected) {
  switch (expected) {
    case TypeTag::Integer: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
      if (ec != std::errc() || p != lexeme.data() + lexeme.size()) return std::nullopt;
      return Value::integer(v);
    }
    case TypeTag::Real: {
      double v = 0;
      auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
      if (ec != std::errc() || p != lexeme.data() + lexeme.size() || !std::isfinite(v)) {
        return std::nullopt;
      }
      return Value::real(v);
    }
    case TypeTag::Boolean:
      if (iequals(lexeme, "true")) return Value::boolean(true);
      if (iequals(lexeme, "false")) return Value::boolean(false);
      return std::nullopt;
    case TypeTag::String: return Value::string(strip_quotes(lexeme));
    case TypeTag::Date:
      if (auto d = parse_date(lexeme)) return Value::date(*d);
      return std::nullopt;
    case TypeTag::DateTime:
      if (auto d = parse_datetime(lexeme)) return Value::datetime(*d);
      return std::nullopt;
    case TypeTag::Duration:
      if (auto d = parse_duration(lexeme)) return Value::duration(*d);
      return std::nullopt;
    default: return std::nullopt;
  }
}

Value parse_literal(std::string_view lexeme, TypeTag expected) {
  if (auto v = try_parse_literal(lexeme, expected)) return *std::move(v);
  throw LiteralError("literal/type mismatch: '" + std::string(lexeme) + "' is not a valid " +
                     std::string(type_name(expected)));
}

std::string render(const Date& d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d.%02d.%02d", d.year, d.month, d.day);
  return buf;
}

std::string render(const DateTime& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d", d.hour(), d.minute());
  std::string out = render(d.date) + buf;
  std::int64_t sec = d.second_micros();
  if (sec != 0) {
    std::string s = render_seconds(sec);
    if (sec < 10 * kMicrosPerSecond) s = "0" + s;
    out += ':' + s;
  }
  return out;
}

std::string render(const Duration& d) {
  DurationParts p;
  std::string out;
  if (d.parts) {
    p = *d.parts;
  } else {
    std::int64_t m = d.micros;
    if (m < 0) {
      out += '-';
      m = -m;
    }
    p.days = static_cast<std::int32_t>(m / kMicrosPerDay);
    m %= kMicrosPerDay;
    p.hours = static_cast<std::int32_t>(m / (3600 * kMicrosPerSecond));
    m %= 3600 * kMicrosPerSecond;
    p.minutes = static_cast<std::int32_t>(m / (60 * kMicrosPerSecond));
    p.second_micros = m % (60 * kMicrosPerSecond);
  }
  if (p.years) out += std::to_string(p.years) + "Y";
  if (p.months) out += std::to_string(p.months) + "M";
  if (p.days) out += std::to_string(p.days) + "D";
  if (p.hours || p.minutes || p.second_micros) {
    out += 'T';
    if (p.hours) out += std::to_string(p.hours) + "H";
    if (p.minutes) out += std::to_string(p.minutes) + "M";
    if (p.second_micros) out += render_seconds(p.second_micros) + "S";
  }
  if (out.empty() || out == "-") out += "0D";
  return out;
}

std::string render_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, p);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

std::string render(const Value& v) {
  switch (v.tag()) {
    case TypeTag::Nil: return "nil";
    case TypeTag::Integer: return std::to_string(v.as_integer());
    case TypeTag::Real: return render_real(v.as_real());
    case TypeTag::Boolean: return v.as_boolean() ? "true" : "false";
    case TypeTag::String: return v.as_string();
    case TypeTag::Date: return render(v.as_date());
    case TypeTag::DateTime: return render(v.as_datetime());
    case TypeTag::Duration: return render(v.as_duration());
    case TypeTag::Classifier:
      return "#" + std::to_string(v.as_classifier().classifier) + ":" +
             std::to_string(v.as_classifier().row);
    case TypeTag::List: {
      std::string out;
      for (const auto& item : v.as_list()) {
        if (!out.empty()) out += ", ";
        out += render(item);
      }
      return out;
    }
  }
  return "?";
}

}  // namespace semiq

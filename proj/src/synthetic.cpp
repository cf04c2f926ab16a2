#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include "semiq/store.hpp"

namespace semiq {

namespace {

// Children per parent used when the scale only names the root count.
const std::map<std::string, double>& demo_ratios() {
  static const std::map<std::string, double> ratios = {
      {"HospitalEpisode", 3},    {"OutpatientEpisode", 1},  {"TreatmentWard", 1},
      {"Manipulation", 4},       {"AdmissionDiagnosis", 1}, {"DischargeDiagnosis", 1},
  };
  return ratios;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  template <typename T, std::size_t N>
  const T& pick(const T (&pool)[N]) {
    return pool[below(N)];
  }

 private:
  std::mt19937_64 engine_;
};

bool contains(std::string_view s, std::string_view part) {
  return s.find(part) != std::string_view::npos;
}

std::string classifier_key_text(const ClassifierDef& def, TypeTag key_type, std::size_t i) {
  if (key_type == TypeTag::Integer) return std::to_string(i + 1);
  char buf[32];
  if (contains(def.name, "Physician")) {
    std::snprintf(buf, sizeof buf, "PH%zu", i + 1);
  } else if (contains(def.name, "Manipulation")) {
    if (i == 0) return "02078";
    if (i == 1) return "11111";
    std::snprintf(buf, sizeof buf, "%05zu", 20000 + i);
  } else if (contains(def.name, "Diagnosis")) {
    std::snprintf(buf, sizeof buf, "%c%02zu", static_cast<char>('A' + i % 26), i + 1);
  } else {
    std::string prefix = def.name.size() > 1 && def.name[0] == 'C' ? def.name.substr(1, 2)
                                                                     : def.name.substr(0, 2);
    std::snprintf(buf, sizeof buf, "%s%zu", prefix.c_str(), i + 1);
  }
  return buf;
}

Value primitive_value(Rng& rng, const AttributeDef& attr, std::size_t sibling,
                      const std::optional<DateTime>& previous_time) {
  static const char* const kReasons[] = {"healthy", "healthy", "healthy", "deceased",
                                         "transferred"};
  static const char* const kWards[] = {"surgery", "icu", "pediatrics", "cardiology",
                                       "neurology"};
  static const char* const kSurnames[] = {"Kalnins", "Liepa",   "Ozols",   "Berzina",
                                          "Jansons", "Ozolina", "Krumins", "Zarina"};
  static const char* const kNames[] = {"Gatis", "Anna", "Janis", "Liga", "Peteris", "Inese"};
  static const double kAmounts[] = {5.0, 10.0, 12.5, 40.0, 100.0, 500.0};

  const std::string& name = attr.name;
  switch (attr.type.tag) {
    case TypeTag::String:
      if (name == "dischargeReason") return Value::string(rng.pick(kReasons));
      if (name == "ward") return Value::string(rng.pick(kWards));
      if (name == "surname") return Value::string(rng.pick(kSurnames));
      if (name == "name") return Value::string(rng.pick(kNames));
      if (name == "personCode") {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d%02d%02d-%05d", static_cast<int>(1 + rng.below(28)),
                      static_cast<int>(1 + rng.below(12)), static_cast<int>(rng.below(100)),
                      static_cast<int>(rng.below(100000)));
        return Value::string(buf);
      }
      return Value::string("s" + std::to_string(rng.below(5)));
    case TypeTag::Integer:
      if (name == "nr") return Value::integer(static_cast<std::int64_t>(sibling) + 1);
      return Value::integer(static_cast<std::int64_t>(1 + rng.below(5)));
    case TypeTag::Real: return Value::real(rng.pick(kAmounts));
    case TypeTag::Boolean: return Value::boolean(rng.below(2) == 1);
    case TypeTag::Date: {
      if (contains(name, "birth") || contains(name, "Birth")) {
        return Value::date(Date::from_days(Date{1940, 1, 1}.days_since_epoch() +
                                           static_cast<std::int64_t>(rng.below(27000))));
      }
      return Value::date(Date::from_days(Date{2015, 1, 1}.days_since_epoch() +
                                         static_cast<std::int64_t>(rng.below(365))));
    }
    case TypeTag::DateTime: {
      std::int64_t minutes = static_cast<std::int64_t>(rng.below(1440));
      if (previous_time) {
        std::int64_t days = static_cast<std::int64_t>(rng.below(41));
        return Value::datetime(DateTime::from_epoch_micros(
            previous_time->epoch_micros() + days * kMicrosPerDay + minutes * 60'000'000LL));
      }
      std::int64_t day = Date{2015, 1, 1}.days_since_epoch() +
                         static_cast<std::int64_t>(rng.below(365));
      return Value::datetime(
          DateTime::from_epoch_micros(day * kMicrosPerDay + minutes * 60'000'000LL));
    }
    case TypeTag::Duration: {
      DurationParts p;
      p.days = static_cast<std::int32_t>(rng.below(31));
      return Value::duration(Duration{conventional_micros(p), p});
    }
    default: return Value();
  }
}

std::vector<Value> make_row(Rng& rng, const std::vector<AttributeDef>& attrs,
                            const std::vector<std::size_t>& classifier_sizes, double nil_rate,
                            std::size_t sibling) {
  std::vector<Value> values(attrs.size());
  std::optional<DateTime> previous_time;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    const auto& a = attrs[i];
    if (a.type.tag == TypeTag::Classifier) {
      std::size_t n = classifier_sizes[a.type.classifier];
      if (n == 0 || rng.unit() < nil_rate) continue;
      values[i] = Value::classifier(
          {a.type.classifier, static_cast<std::uint32_t>(rng.below(n))});
      continue;
    }
    values[i] = primitive_value(rng, a, sibling, previous_time);
    if (values[i].tag() == TypeTag::DateTime && !previous_time) {
      previous_time = values[i].as_datetime();
    }
  }
  return values;
}

}  // namespace

SyntheticScale parse_scale(std::string_view text, const Schema& schema) {
  SyntheticScale scale;
  auto parse_number = [&](std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 0) {
      throw std::invalid_argument("bad scale value '" + std::string(s) + "'");
    }
    return v;
  };
  if (text.find('=') == std::string_view::npos) {
    scale.roots = static_cast<std::size_t>(parse_number(text));
    for (const auto& [name, ratio] : demo_ratios()) {
      if (schema.find_class(name)) scale.per_parent[name] = ratio;
    }
    return scale;
  }
  while (!text.empty()) {
    auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view() : text.substr(comma + 1);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("bad scale item");
    std::string key(item.substr(0, eq));
    double v = parse_number(item.substr(eq + 1));
    if (key == "roots" || key == schema.cls(schema.root()).name) {
      scale.roots = static_cast<std::size_t>(v);
    } else if (schema.find_class(key)) {
      scale.per_parent[key] = v;
    } else if (schema.find_classifier(key)) {
      scale.classifier_counts[key] = static_cast<std::size_t>(v);
    } else if (key == "vary") {
      scale.vary = v != 0;
    } else if (key == "nil") {
      scale.nil_rate = v;
    } else {
      throw std::invalid_argument("unknown class '" + key + "' in scale");
    }
  }
  return scale;
}

Store generate_synthetic(std::shared_ptr<const Schema> schema_ptr, const SyntheticScale& scale,
                         std::uint64_t seed) {
  const Schema& schema = *schema_ptr;
  Store::Builder builder(schema_ptr);
  Rng rng(seed);

  std::vector<std::size_t> classifier_sizes(schema.classifiers().size(), 0);
  if (scale.roots > 0) {
    for (ClassifierId id = 0; id < schema.classifiers().size(); ++id) {
      const auto& def = schema.classifier(id);
      auto it = scale.classifier_counts.find(def.name);
      std::size_t n = it != scale.classifier_counts.end() ? it->second : scale.classifier_rows;
      TypeTag key_type = def.attributes[def.key_index].type.tag;
      for (std::size_t i = 0; i < n; ++i) {
        std::string key = classifier_key_text(def, key_type, i);
        auto values = make_row(rng, def.attributes, classifier_sizes, 0.0, i);
        values[def.key_index] = parse_literal(key, key_type);
        builder.add_classifier_row(id, key, std::move(values));
      }
      classifier_sizes[id] = n;
    }
  }

  for (ClassId cls : schema.root_to_leaf_order()) {
    const auto& def = schema.cls(cls);
    if (!def.parent) {
      for (std::size_t i = 0; i < scale.roots; ++i) {
        builder.add_instance(cls, 0,
                             make_row(rng, def.attributes, classifier_sizes, scale.nil_rate, i));
      }
      continue;
    }
    auto it = scale.per_parent.find(def.name);
    double mean = it != scale.per_parent.end() ? it->second : 1.0;
    std::size_t parents = builder.size(*def.parent);
    for (std::uint32_t p = 0; p < parents; ++p) {
      std::size_t k;
      if (scale.vary) {
        k = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(std::llround(2 * mean)) + 1));
      } else {
        double whole = std::floor(mean);
        k = static_cast<std::size_t>(whole) + (rng.unit() < mean - whole ? 1 : 0);
      }
      for (std::size_t i = 0; i < k; ++i) {
        builder.add_instance(cls, p,
                             make_row(rng, def.attributes, classifier_sizes, scale.nil_rate, i));
      }
    }
  }
  return std::move(builder).finish();
}

}  // namespace semiq

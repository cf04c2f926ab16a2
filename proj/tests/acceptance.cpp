#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "calendar.hpp"
#include "fixture.hpp"
#include "oracle.hpp"
#include "query_gen.hpp"
#include "random_db.hpp"
#include "semiq/cli.hpp"

using namespace semiq;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

std::vector<std::string> golden() {
  std::ifstream in(fixture::golden_file());
  return read_batch(in);
}

BoundQuery bind_query(const std::string& text) { return resolve(parse_query(text), fixture::demo_schema_ptr()); }

std::string shown(const Value& v) { return format_value(v, fixture::fixture_a().store()); }

Check golden_corpus() {
  Check c;
  std::ifstream in(fixture::golden_file());
  std::ostringstream out;
  SessionConfig cfg = fixture::fixture_a_config();
  int code = run_batch(fixture::fixture_a(), cfg, in, out);
  c.expect(code == 0, "batch exit status " + std::to_string(code));
  auto queries = golden();
  c.expect(queries.size() == 20, std::to_string(queries.size()) + " golden queries");
  oracle::Db db = oracle::snapshot(fixture::fixture_a().store());
  int agreed = 0;
  for (const auto& q : queries) {
    QueryOutcome o = fixture::fixture_a().run(q);
    std::string why;
    if (o.status == QueryOutcome::Ok && oracle::same_result(*o.result, oracle::execute(bind_query(q), db), &why)) {
      ++agreed;
    } else {
      c.expect(false, q + ": " + (o.status == QueryOutcome::Ok ? why : o.error));
    }
  }
  c.expect(agreed == 20, std::to_string(agreed) + "/20 agree with the reference interpreter");
  return c;
}

Check oracle_equivalence() {
  Check c;
  auto schema = fixture::demo_schema_ptr();
  gen::QueryGen g(schema, 7);
  gen::Coverage coverage;
  oracle::Db db;
  Store store;
  int compared = 0, mismatches = 0, next_refresh = 0;
  while (compared < 1000) {
    if (compared == next_refresh) {
      db = gen::random_db(schema, 1000 + static_cast<std::uint64_t>(compared));
      store = oracle::build_store(db);
      next_refresh += 20;
    }
    std::string text = g.next();
    BoundQuery q;
    try {
      q = resolve(parse_query(text), schema);
    } catch (const std::exception&) {
      continue;
    }
    ++compared;
    coverage.add(q);
    std::string why;
    if (!oracle::same_result(execute(q, store, {1}), oracle::execute(q, db), &why)) {
      if (++mismatches <= 3) c.expect(false, render_canonical(q) + ": " + why);
    }
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches in 1000 queries");
  c.expect(coverage.missing().empty(), "not covered: " + coverage.missing());
  return c;
}

Check fixture_table() {
  Check c;
  oracle::Db db = oracle::snapshot(fixture::fixture_a().store());
  auto both = [&](const std::string& q) -> std::optional<QueryResult> {
    QueryOutcome o = fixture::fixture_a().run(q);
    if (o.status != QueryOutcome::Ok) {
      c.expect(false, q + ": " + o.error);
      return std::nullopt;
    }
    std::string why;
    c.expect(oracle::same_result(*o.result, oracle::execute(bind_query(q), db), &why), q + ": oracle differs: " + why);
    return std::move(o.result);
  };
  const std::vector<std::pair<std::string, std::string>> scalars = {
      {"COUNT Patient p, WHERE EXISTS HospitalEpisode e, WHERE EXISTS Manipulation m, WHERE manipul.code=02078",
       "2"},
      {"COUNT Patients, WHERE EXISTS HospitalEpisode, WHERE referringPhysician=familyDoctor", "1"},
      {"COUNT HospitalEpisode, WHERE EXISTS Manipulation, WHERE manipul.code=02078", "2"},
      {"SUM totalCost FROM HospitalEpisodes, WHERE dischargeReason=healthy AND birthDate.year()=2012", "140.0"},
      {"MOST diagnosis.code FROM DischargeDiagnoses, WHERE nr=1 AND dischargeReason=deceased", "B02"},
      {"COUNT HospitalEpisodes, WHERE dischargeTime-admissionTime>15d", "2"},
      {"COUNT HospitalEpisodes e1, WHERE EXISTS HospitalEpisode e2, WHERE e1<>e2 AND "
       "e2.admissionTime>e1.dischargeTime AND e2.admissionTime-e1.dischargeTime<30d",
       "1"},
  };
  for (const auto& [q, want] : scalars) {
    if (auto r = both(q)) c.expect(shown(r->scalar) == want, q + ": got " + shown(r->scalar) + ", want " + want);
  }
  if (auto r = both("SELECT HospitalEpisodes x, WHERE dischargeReason=deceased, DEFINE TABLE x.surname (COLUMN "
                    "Surname), x.dischargeTime.date() (COLUMN Dying_date), (COUNT x.Manipulation, WHERE "
                    "manipul.code=02078) (COLUMN Count_02078), (SUM manipul.cost FROM x.Manipulation, WHERE "
                    "manipul.code=02078) (COLUMN cost_02078)")) {
    std::vector<std::string> row;
    if (r->table.rows.size() == 1) {
      for (const auto& v : r->table.rows[0]) row.push_back(shown(v));
    }
    c.expect(row == std::vector<std::string>{"Liepa", "2015.02.20", "1", "10.0"}, "deceased table row");
  }
  if (auto r = both("SELECT FROM INTERVAL (1-12) ALL DISTINCT VALUES x, DEFINE TABLE x (COLUMN Month), (COUNT "
                    "HospitalEpisodes, WHERE admissionTime.month()=x) (COLUMN Episode_count) (MOST diagnosis.code "
                    "FROM AdmissionDiagnoses, WHERE nr=1 AND admissionTime.month()=x) (COLUMN "
                    "Most_frequent_main_diagnosis).")) {
    bool good = r->table.rows.size() == 12;
    for (std::size_t m = 0; good && m < 12; ++m) {
      std::int64_t want = (m + 1 == 1 || m + 1 == 5 || m + 1 == 7) ? 1 : 0;
      good = r->table.rows[m][0].as_integer() == static_cast<std::int64_t>(m + 1) &&
             r->table.rows[m][1].as_integer() == want;
    }
    c.expect(good, "month table counts");
  }
  return c;
}

Check calendar() {
  Check c;
  Value d = temporal_sub(Value::date({2015, 6, 17}), Value::date({2015, 5, 12}));
  c.expect(render(d) == "1M5D", "2015.06.17 - 2015.05.12 renders " + render(d));
  int failures = oracle::anchored_failures(10000, 2015);
  c.expect(failures == 0, std::to_string(failures) + " of 10000 anchored pairs fail");
  Value s = substring(Value::string("abcde"), 2, 3);
  c.expect(s.tag() == TypeTag::String && s.as_string() == "bc", "substring(\"abcde\",2,3) gives " + render(s));
  return c;
}

Check performance() {
  Check c;
  auto schema = fixture::demo_schema_ptr();
  const Schema& sc = *schema;
  Store store = generate_synthetic(schema, parse_scale("100000", sc), 1);
  std::size_t patients = store.size(*sc.find_class("Patient"));
  std::size_t episodes = store.size(*sc.find_class("HospitalEpisode"));
  std::size_t manipulations = store.size(*sc.find_class("Manipulation"));
  c.expect(patients >= 100000 && episodes >= 300000 && manipulations >= 1000000,
           "store has " + std::to_string(patients) + "/" + std::to_string(episodes) + "/" +
               std::to_string(manipulations) + " patients/episodes/manipulations");
  c.notes.push_back(std::to_string(patients) + " patients, " + std::to_string(episodes) + " episodes, " +
                    std::to_string(manipulations) + " manipulations");
  Session session(schema, std::move(store), LoadReport{}, 0);
  const std::vector<std::string> queries = {
      "COUNT Patient p, WHERE EXISTS HospitalEpisode e, WHERE EXISTS Manipulation m, WHERE manipul.code=02078",
      "COUNT Patients, WHERE EXISTS HospitalEpisode, WHERE referringPhysician=familyDoctor",
      "COUNT HospitalEpisodes, WHERE dischargeTime-admissionTime>15d",
      "SELECT HospitalEpisodes x, WHERE dischargeReason=deceased, DEFINE TABLE x.surname (COLUMN Surname), "
      "x.dischargeTime.date() (COLUMN Dying_date), (COUNT x.Manipulation, WHERE manipul.code=02078) (COLUMN "
      "Count_02078), (SUM manipul.cost FROM x.Manipulation, WHERE manipul.code=02078) (COLUMN cost_02078)",
  };
  double worst = 0;
  for (const auto& q : queries) {
    auto start = std::chrono::steady_clock::now();
    QueryOutcome o = session.run(q);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    worst = std::max(worst, ms);
    c.expect(o.status == QueryOutcome::Ok, q + ": " + o.error);
    c.expect(ms < 2000, q + ": " + std::to_string(ms) + " ms");
  }
  c.notes.push_back("slowest query " + std::to_string(static_cast<int>(worst)) + " ms");
  return c;
}

// Reads a comma-separated file without quoting; the corrupt fixture has none.
std::vector<std::map<std::string, std::string>> read_rows(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  if (std::getline(in, line)) header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = i < cells.size() ? cells[i] : "";
    rows.push_back(row);
  }
  return rows;
}

bool well_formed(const std::string& text, TypeTag tag) {
  namespace chr = std::chrono;
  auto valid_date = [](int y, unsigned m, unsigned d) { return chr::year_month_day{chr::year{y}, chr::month{m}, chr::day{d}}.ok(); };
  std::smatch m;
  switch (tag) {
    case TypeTag::Integer: return std::regex_match(text, std::regex(R"(-?[0-9]+)"));
    case TypeTag::Real: return std::regex_match(text, std::regex(R"(-?[0-9]+(\.[0-9]+)?)"));
    case TypeTag::Date:
      return std::regex_match(text, m, std::regex(R"(([0-9]{4})\.([0-9]{2})\.([0-9]{2}))")) &&
             valid_date(std::stoi(m[1]), std::stoul(m[2]), std::stoul(m[3]));
    case TypeTag::DateTime:
      return std::regex_match(text, m, std::regex(R"(([0-9]{4})\.([0-9]{2})\.([0-9]{2})T([0-9]{2}):([0-9]{2}))")) &&
             valid_date(std::stoi(m[1]), std::stoul(m[2]), std::stoul(m[3])) && std::stoi(m[4]) < 24 &&
             std::stoi(m[5]) < 60;
    default: return true;
  }
}

Check loader() {
  Check c;
  const Schema& schema = *fixture::demo_schema_ptr();
  MappingSpec spec = load_mapping_file(fixture::demo_mapping());
  std::map<std::string, const ClassMapping*> by_target;
  for (const auto& e : spec.entries) by_target[e.target] = &e;

  std::map<std::string, std::set<std::string>> classifier_keys;
  for (const auto& e : spec.entries) {
    if (!e.classifier) continue;
    for (const auto& row : read_rows(fixture::corrupt_dir() / e.file)) classifier_keys[e.target].insert(row.at(e.key_column));
  }

  std::map<ClassId, std::set<std::string>> loaded;
  std::size_t skipped = 0, coerced = 0;
  for (ClassId cls : schema.root_to_leaf_order()) {
    const ClassDef& def = schema.cls(cls);
    const ClassMapping& m = *by_target.at(def.name);
    for (const auto& row : read_rows(fixture::corrupt_dir() / m.file)) {
      if (def.parent && !loaded[*def.parent].count(row.at(m.parent_column))) {
        ++skipped;
        continue;
      }
      loaded[cls].insert(row.at(m.key_column));
      for (const auto& col : m.columns) {
        const std::string& text = row.at(col.column);
        if (text == "nil") continue;
        const AttributeDef& attr = *std::find_if(def.attributes.begin(), def.attributes.end(),
                                                 [&](const AttributeDef& a) { return a.name == col.attribute; });
        bool ok = !text.empty();
        if (ok && attr.type.tag == TypeTag::Classifier) {
          ok = classifier_keys[schema.describe_type(attr.type)].count(text) > 0;
        } else if (ok) {
          ok = well_formed(text, attr.type.tag);
        }
        if (!ok) ++coerced;
      }
    }
  }

  LoadResult r = load(fixture::demo_schema_ptr(), spec, fixture::corrupt_dir());
  c.expect(r.report.total_skipped() == skipped, "skipped " + std::to_string(r.report.total_skipped()) +
                                                    ", independent count " + std::to_string(skipped));
  c.expect(skipped == 6, "independent skip count " + std::to_string(skipped) + ", want 1 row plus 5 descendants");
  c.expect(r.report.total_nil_coerced() == coerced, "nil-coerced " + std::to_string(r.report.total_nil_coerced()) +
                                                        ", independent count " + std::to_string(coerced));
  c.expect(r.report.total_nil_coerced() >= 2, "fewer than 2 nil-coerced cells");
  c.notes.push_back(std::to_string(skipped) + " rows skipped, " + std::to_string(coerced) + " cells coerced to nil");
  return c;
}

Check round_trip() {
  Check c;
  for (const auto& q : golden()) {
    try {
      BoundQuery a = bind_query(q);
      std::string canon = render_canonical(a);
      BoundQuery b = bind_query(canon);
      c.expect(structurally_equal(a, b) && render_canonical(b) == canon, q);
    } catch (const std::exception& e) {
      c.expect(false, q + ": " + e.what());
    }
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"golden corpus: 20 queries run in batch mode and match the reference interpreter", golden_corpus},
      {"oracle equivalence: 1000 generated queries over random stores", oracle_equivalence},
      {"fixture results: counts, aggregates and tables", fixture_table},
      {"calendar arithmetic: 1M5D, 10000 anchored pairs, substring", calendar},
      {"performance: every required query under 2 s at 100k patients", performance},
      {"loader robustness: corrupted rows are skipped or coerced to nil", loader},
      {"round-trip: canonical text re-resolves to the same query", round_trip},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << name << "\n";
    for (const auto& f : c.notes) std::cout << "    " << f << "\n";
    if (!c.ok) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}

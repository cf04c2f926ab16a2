#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "doctest.h"
#include "fixture.hpp"
#include "oracle.hpp"
#include "random_db.hpp"
#include "semiq/store.hpp"

using namespace semiq;
namespace fs = std::filesystem;

namespace {

const Schema& demo() { return *fixture::demo_schema_ptr(); }
ClassId id(const char* name) { return *demo().find_class(name); }

const Store& fa() { return fixture::fixture_a().store(); }

InstanceRef at(const char* cls, const char* label) {
  auto x = fa().find_by_label(id(cls), label);
  REQUIRE(x.has_value());
  return *x;
}

std::vector<std::string> labels(const std::vector<InstanceRef>& xs) {
  std::vector<std::string> out;
  for (auto x : xs) out.push_back(fa().label(x));
  return out;
}

using Strings = std::vector<std::string>;

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() / ("semiq_store_test_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Copies the clean fixture into a temporary directory and lets the caller
// rewrite single files.
TempDir copy_fixture() {
  TempDir t;
  for (const auto& e : fs::directory_iterator(fixture::fixture_a_dir())) {
    fs::copy_file(e.path(), t.path / e.path().filename());
  }
  return t;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

LoadResult load_dir(const fs::path& dir) {
  return load(fixture::demo_schema_ptr(), load_mapping_file(fixture::demo_mapping()), dir);
}

}  // namespace

TEST_CASE("clean fixture loads without warnings") {
  CHECK(fa().size(id("Patient")) == 2);
  CHECK(fa().size(id("HospitalEpisode")) == 3);
  CHECK(fa().size(id("TreatmentWard")) == 4);
  CHECK(fa().size(id("Manipulation")) == 5);
  CHECK(fa().size(id("DischargeDiagnosis")) == 3);
  CHECK(fixture::fixture_a().report().total_warnings() == 0);
  for (const auto& f : fixture::fixture_a().report().files) {
    CHECK(f.rows_read == f.rows_loaded + f.rows_skipped);
  }
}

TEST_CASE("fixture values are typed") {
  InstanceRef p1 = at("Patient", "P1");
  CHECK(fa().value(p1, 0).as_string() == "250285-10507");
  CHECK(fa().value(p1, 2).as_date() == Date{2012, 3, 4});
  CHECK(fa().classifier_key(fa().value(p1, 3).as_classifier()) == "PH2");
  CHECK(fa().value(at("Patient", "P2"), 3).is_nil());
  auto x = fa().find_classifier_row(*demo().find_classifier("CManipulation"), "02078");
  REQUIRE(x.has_value());
  CHECK(fa().classifier_value(*x, 2).as_real() == 10.0);
  CHECK(fa().classifier_value(*x, 0).as_string() == "02078");
}

TEST_CASE("parent navigation") {
  CHECK(fa().label(fa().parent_of(at("TreatmentWard", "W1"), id("Patient"))) == "P1");
  CHECK(fa().label(fa().parent_of(at("HospitalEpisode", "E1"), id("Patient"))) == "P1");
  CHECK(fa().label(fa().parent_of(at("Manipulation", "M5"), id("HospitalEpisode"))) == "E3");
  CHECK(fa().label(*fa().parent(at("Manipulation", "M4"))) == "W3");
  CHECK_FALSE(fa().parent(at("Patient", "P1")).has_value());
}

TEST_CASE("descendant navigation is depth-first in child-list order") {
  CHECK(labels(fa().descendants_of(at("HospitalEpisode", "E1"), id("Manipulation"))) ==
        Strings{"M1", "M2", "M3"});
  CHECK(labels(fa().descendants_of(at("TreatmentWard", "W1"), id("Manipulation"))) == Strings{"M1", "M2"});
  CHECK(fa().descendants_of(at("HospitalEpisode", "E2"), id("AdmissionDiagnosis")).empty());
  CHECK(labels(fa().descendants_of(at("Patient", "P2"), id("DischargeDiagnosis"))) ==
        Strings{"DD2", "DD3"});
}

TEST_CASE("brother navigation") {
  CHECK(labels(fa().brothers_of(at("HospitalEpisode", "E1"), id("HospitalEpisode"))) ==
        Strings{"E1", "E2"});
  CHECK(fa().brothers_of(at("TreatmentWard", "W4"), id("OutpatientEpisode")).empty());
  CHECK(labels(fa().brothers_of(at("OutpatientEpisode", "O1"), id("HospitalEpisode"))) ==
        Strings{"E1", "E2"});
  CHECK(labels(fa().brothers_of(at("Manipulation", "M1"), id("DischargeDiagnosis"))) == Strings{"DD1"});
}

TEST_CASE("navigation consistency and brother symmetry on random stores") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    oracle::Db db = gen::random_db(fixture::demo_schema_ptr(), seed);
    Store s = oracle::build_store(db);
    for (ClassId c = 0; c < demo().classes().size(); ++c) {
      for (std::uint32_t r = 0; r < s.size(c); ++r) {
        InstanceRef y{c, r};
        for (std::optional<ClassId> a = demo().cls(c).parent; a; a = demo().cls(*a).parent) {
          auto ds = s.descendants_of(s.parent_of(y, *a), c);
          CHECK(std::find(ds.begin(), ds.end(), y) != ds.end());
        }
        for (ClassId b = 0; b < demo().classes().size(); ++b) {
          if (demo().relation(c, b).kind != Relation::Brother) continue;
          for (InstanceRef x : s.brothers_of(y, b)) {
            auto back = s.brothers_of(x, c);
            CHECK(std::find(back.begin(), back.end(), y) != back.end());
          }
        }
      }
    }
  }
}

TEST_CASE("corrupted rows degrade instead of aborting") {
  LoadResult r = load_dir(fixture::corrupt_dir());
  const LoadReport& rep = r.report;
  CHECK(rep.total_skipped() == 6);
  CHECK(rep.total_nil_coerced() == 3);
  CHECK(rep.warning_counts.at("dangling parent key") == 6);
  CHECK(rep.warning_counts.at("dangling classifier key") == 1);
  CHECK(rep.warning_counts.at("type mismatch") == 1);
  CHECK(rep.warning_counts.at("missing value") == 1);
  CHECK(r.store.size(id("HospitalEpisode")) == 2);
  CHECK(r.store.size(id("Manipulation")) == 4);
  CHECK_FALSE(r.store.find_by_label(id("HospitalEpisode"), "E3").has_value());
  InstanceRef e2 = *r.store.find_by_label(id("HospitalEpisode"), "E2");
  CHECK(r.store.value(e2, 0).is_nil());
  CHECK(r.store.value(e2, 1).tag() == TypeTag::DateTime);
  CHECK(rep.render().find("episodes.csv:4") != std::string::npos);
}

TEST_CASE("the load report is deterministic") {
  LoadResult a = load_dir(fixture::corrupt_dir());
  LoadResult b = load_dir(fixture::corrupt_dir());
  CHECK(a.report.render() == b.report.render());
  CHECK(a.store.structural_hash() == b.store.structural_hash());
}

TEST_CASE("header-only files give an empty store") {
  TempDir t;
  for (const auto& e : fs::directory_iterator(fixture::fixture_a_dir())) {
    write(t.path / e.path().filename(), first_line(e.path()) + "\n");
  }
  LoadResult r = load_dir(t.path);
  CHECK(r.store.total_instances() == 0);
  CHECK(r.report.total_warnings() == 0);
}

TEST_CASE("structural load failures throw") {
  SUBCASE("missing file") {
    TempDir t = copy_fixture();
    fs::remove(t.path / "wards.csv");
    CHECK_THROWS_AS(load_dir(t.path), LoadError);
  }
  SUBCASE("missing mapped column") {
    TempDir t = copy_fixture();
    write(t.path / "wards.csv", "id,episode_id,nr\nW1,E1,1\n");
    CHECK_THROWS_AS(load_dir(t.path), LoadError);
  }
  SUBCASE("duplicate key") {
    TempDir t = copy_fixture();
    write(t.path / "patients.csv",
          "id,person_code,surname,birth_date,family_doctor\nP1,1,A,2000.01.01,nil\nP1,2,B,2000.01.01,nil\n");
    CHECK_THROWS_AS(load_dir(t.path), LoadError);
  }
}

TEST_CASE("quoted CSV fields") {
  auto recs = parse_csv("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\n\"multi\nline\",z\n");
  REQUIRE(recs.size() == 3);
  CHECK(recs[1].fields[0] == "x, y");
  CHECK(recs[1].fields[1] == "say \"hi\"");
  CHECK(recs[2].fields[0] == "multi\nline");
  CHECK(recs[2].line == 3);
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("plain") == "plain");
}

TEST_CASE("mapping errors") {
  CHECK_THROWS_AS(parse_mapping("map Patient from patients.csv"), MappingError);
  MappingSpec bad = parse_mapping("map Patient from \"p.csv\" key id { height <- h }");
  CHECK_THROWS_AS(check_mapping(bad, demo()), MappingError);
  MappingSpec orphan = parse_mapping("map HospitalEpisode from \"e.csv\" key id { totalCost <- c }");
  CHECK_THROWS_AS(check_mapping(orphan, demo()), MappingError);
}

TEST_CASE("synthetic stores") {
  auto schema = fixture::demo_schema_ptr();
  SyntheticScale small = parse_scale("10", demo());
  Store a = generate_synthetic(schema, small, 1);
  Store b = generate_synthetic(schema, small, 1);
  CHECK(a.size(id("Patient")) == 10);
  CHECK(a.structural_hash() == b.structural_hash());
  CHECK(generate_synthetic(schema, small, 2).structural_hash() != a.structural_hash());
  Store empty = generate_synthetic(schema, parse_scale("0", demo()), 1);
  CHECK(empty.total_instances() == 0);
  SyntheticScale big = parse_scale("100000", demo());
  double manipulations = static_cast<double>(big.roots);
  for (ClassId c : demo().path_down(demo().root(), id("Manipulation"))) {
    manipulations *= big.per_parent.at(demo().cls(c).name);
  }
  CHECK(manipulations >= 1e6);
  CHECK_THROWS(parse_scale("Patient=10,Nope=3", demo()));
  SyntheticScale explicit_scale = parse_scale("Patient=7,HospitalEpisode=2", demo());
  CHECK(explicit_scale.roots == 7);
  CHECK(explicit_scale.per_parent.at("HospitalEpisode") == 2.0);
}

TEST_CASE("snapshot and rebuild preserve the store") {
  oracle::Db db = oracle::snapshot(fa());
  Store again = oracle::build_store(db);
  CHECK(again.structural_hash() == fa().structural_hash());
}

#include <algorithm>

#include "doctest.h"
#include "fixture.hpp"
#include "semiq/ontology.hpp"

using namespace semiq;

namespace {

const Schema& demo() { return *fixture::demo_schema_ptr(); }

ClassId id(const char* name) { return *demo().find_class(name); }

SchemaErrorKind error_kind(const char* text) {
  try {
    parse_schema(text);
  } catch (const SchemaError& e) {
    return e.kind();
  }
  FAIL("schema accepted: " << text);
  return SchemaErrorKind::Syntax;
}

bool visible(const char* cls, const char* owner, const char* attr) {
  for (const auto& v : demo().visible_attributes(id(cls))) {
    if (v.owner == id(owner) && v.def->name == attr) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("demo schema has seven basic classes and three classifiers") {
  CHECK(demo().classes().size() == 7);
  CHECK(demo().classifiers().size() == 3);
  CHECK(demo().cls(demo().root()).name == "Patient");
  const ClassifierDef& phys = demo().classifier(*demo().find_classifier("CPhysician"));
  CHECK(phys.key_attribute == "code");
  CHECK(phys.attributes[phys.key_index].name == "code");
}

TEST_CASE("structural errors") {
  CHECK(error_kind("class A under A { }") == SchemaErrorKind::Cycle);
  CHECK(error_kind("class A { }\nclass B { }") == SchemaErrorKind::MultipleRoots);
  CHECK(error_kind("class A under B { }\nclass B under A { }") == SchemaErrorKind::Cycle);
  CHECK(error_kind("classifier K key code { code: String }") == SchemaErrorKind::NoRoot);
  CHECK(error_kind("class A { x: Integer }\nclass A under A { }") == SchemaErrorKind::DuplicateName);
  CHECK(error_kind("class A { x: Integer  x: String }") == SchemaErrorKind::DuplicateAttribute);
  CHECK(error_kind("class A { x: Integer }\nclass B under A { x: String }") ==
        SchemaErrorKind::ShadowedAttribute);
  CHECK(error_kind("class A { x: CNope }") == SchemaErrorKind::UnknownClassifier);
  CHECK(error_kind("class A { }\nclass B under C { }") == SchemaErrorKind::UnknownParent);
  CHECK(error_kind("classifier K key missing { code: String }\nclass A { }") == SchemaErrorKind::BadKey);
  CHECK(error_kind("class A { x: Widget }") == SchemaErrorKind::UnknownClassifier);
  CHECK(error_kind("class A { x Integer }") == SchemaErrorKind::Syntax);
}

TEST_CASE("schema errors carry a line number") {
  try {
    parse_schema("class A { }\n\nclass B under Nope { }");
    FAIL("accepted");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("class relations") {
  CHECK(demo().relation(id("TreatmentWard"), id("Patient")).kind == Relation::Ancestor);
  CHECK(demo().relation(id("Patient"), id("TreatmentWard")).kind == Relation::Descendant);
  CHECK(demo().relation(id("Patient"), id("Patient")).kind == Relation::Self);
  RelationInfo b = demo().relation(id("TreatmentWard"), id("OutpatientEpisode"));
  CHECK(b.kind == Relation::Brother);
  REQUIRE(b.common_ancestor.has_value());
  CHECK(*b.common_ancestor == id("Patient"));
  RelationInfo d = demo().relation(id("Manipulation"), id("DischargeDiagnosis"));
  CHECK(d.kind == Relation::Brother);
  CHECK(*d.common_ancestor == id("HospitalEpisode"));
}

TEST_CASE("relation agrees with the parent chain") {
  auto chain = [](ClassId c) {
    std::vector<ClassId> out;
    for (std::optional<ClassId> p = c; p; p = demo().cls(*p).parent) out.push_back(*p);
    return out;
  };
  for (ClassId a = 0; a < demo().classes().size(); ++a) {
    for (ClassId b = 0; b < demo().classes().size(); ++b) {
      auto ca = chain(a), cb = chain(b);
      bool b_above_a = std::find(ca.begin() + 1, ca.end(), b) != ca.end();
      bool a_above_b = std::find(cb.begin() + 1, cb.end(), a) != cb.end();
      RelationInfo r = demo().relation(a, b);
      CAPTURE(demo().cls(a).name);
      CAPTURE(demo().cls(b).name);
      if (a == b) {
        CHECK(r.kind == Relation::Self);
      } else if (b_above_a) {
        CHECK(r.kind == Relation::Ancestor);
        CHECK(demo().is_ancestor(b, a));
      } else if (a_above_b) {
        CHECK(r.kind == Relation::Descendant);
      } else {
        CHECK(r.kind == Relation::Brother);
        ClassId nca = *std::find_first_of(ca.begin(), ca.end(), cb.begin(), cb.end());
        CHECK(*r.common_ancestor == nca);
      }
    }
  }
}

TEST_CASE("visible attributes include ancestors, nearest first") {
  CHECK(visible("HospitalEpisode", "Patient", "birthDate"));
  CHECK(visible("Manipulation", "Manipulation", "manipul"));
  CHECK(visible("Manipulation", "Patient", "personCode"));
  CHECK_FALSE(visible("Patient", "HospitalEpisode", "totalCost"));
  auto root = demo().visible_attributes(demo().root());
  CHECK(root.size() == demo().cls(demo().root()).attributes.size());
  auto m = demo().visible_attributes(id("Manipulation"));
  CHECK(m.front().owner == id("Manipulation"));
  CHECK(m.back().owner == id("Patient"));
}

TEST_CASE("paths, orders and lookups") {
  auto path = demo().path_down(id("Patient"), id("Manipulation"));
  REQUIRE(path.size() == 3);
  CHECK(path[0] == id("HospitalEpisode"));
  CHECK(path[2] == id("Manipulation"));
  auto order = demo().root_to_leaf_order();
  CHECK(order.size() == 7);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (auto p = demo().cls(order[i]).parent) {
      CHECK(std::find(order.begin(), order.begin() + static_cast<long>(i), *p) != order.begin() + static_cast<long>(i));
    }
  }
  CHECK(demo().find_visible(id("TreatmentWard"), "surname").has_value());
  CHECK_FALSE(demo().find_visible(id("Patient"), "ward").has_value());
  CHECK(demo().descendant_declaring(id("Patient"), "ward") == id("TreatmentWard"));
  CHECK(demo().describe_type(demo().cls(id("Patient")).attributes[3].type) == "CPhysician");
}

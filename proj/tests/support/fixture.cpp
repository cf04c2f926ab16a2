#include "fixture.hpp"

namespace fixture {

std::filesystem::path source_dir() { return SEMIQ_SOURCE_DIR; }
std::filesystem::path demo_schema() { return source_dir() / "demo" / "hospital.schema"; }
std::filesystem::path demo_mapping() { return source_dir() / "demo" / "hospital.map"; }
std::filesystem::path fixture_a_dir() { return source_dir() / "demo" / "fixture_a"; }
std::filesystem::path corrupt_dir() { return source_dir() / "demo" / "corrupt"; }
std::filesystem::path golden_file() { return source_dir() / "tests" / "golden_queries.txt"; }

SessionConfig fixture_a_config() {
  SessionConfig cfg;
  cfg.schema = demo_schema();
  cfg.mapping = demo_mapping();
  cfg.data = fixture_a_dir();
  return cfg;
}

std::shared_ptr<const Schema> demo_schema_ptr() {
  static const auto schema = std::make_shared<const Schema>(load_schema_file(demo_schema()));
  return schema;
}

const Session& fixture_a() {
  static const Session session = Session::open(fixture_a_config());
  return session;
}

}  // namespace fixture

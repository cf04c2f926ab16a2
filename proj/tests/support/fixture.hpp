#pragma once

#include <filesystem>
#include <memory>

#include "semiq/session.hpp"

namespace fixture {

using namespace semiq;

std::filesystem::path source_dir();
std::filesystem::path demo_schema();
std::filesystem::path demo_mapping();
std::filesystem::path fixture_a_dir();
std::filesystem::path corrupt_dir();
std::filesystem::path golden_file();

SessionConfig fixture_a_config();
std::shared_ptr<const Schema> demo_schema_ptr();
// Loaded once per process.
const Session& fixture_a();

}  // namespace fixture

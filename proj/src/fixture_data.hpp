#pragma once

#include <cstddef>

namespace metaaudit::detail {

struct EmbeddedFixture {
  const char* name;
  const char* file_name;
  const char* csv;
  const char* sha256;
};

extern const EmbeddedFixture kEmbeddedFixtures[];
extern const std::size_t kEmbeddedFixtureCount;
extern const char* const kBilinearRubric;

}  // namespace metaaudit::detail

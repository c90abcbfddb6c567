#pragma once

#include <cstddef>

namespace fourbody::detail {

struct EmbeddedTable {
    const char* id;
    const char* csv;
    const char* json;
};

extern const EmbeddedTable kEmbeddedTables[];
extern const std::size_t kEmbeddedTableCount;

}  // namespace fourbody::detail

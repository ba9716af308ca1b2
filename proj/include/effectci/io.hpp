#pragma once

#include "effectci/region.hpp"
#include "effectci/types.hpp"

#include <string>

namespace effectci {

// Reads a delimiter-separated numeric table. The delimiter is auto-detected
// among comma, tab and semicolon; a non-numeric first row is treated as a
// header. Errors name the offending row and column.
Dataset read_dataset(const std::string& path);

std::string region_to_json(const ConfidenceRegion& region);
ConfidenceRegion region_from_json(const std::string& text);
std::string region_to_text(const ConfidenceRegion& region);

// Applies --threads / EFFECT_CI_THREADS; zero keeps the runtime default.
void set_num_threads(int threads);

}  // namespace effectci

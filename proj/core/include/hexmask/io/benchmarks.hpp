#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hexmask/io/config.hpp"

namespace hexmask::io {

// Shipped benchmark configs I-IV (copies of configs/bench_*.ini, embedded at build time).
std::vector<std::string> benchmark_ids();
std::string_view benchmark_text(std::string_view id);
RunConfig benchmark_config(std::string_view id, double scale = 1.0);

}  // namespace hexmask::io

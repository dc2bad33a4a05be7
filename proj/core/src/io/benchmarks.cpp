#include "hexmask/io/benchmarks.hpp"

#include <stdexcept>

namespace hexmask::io {

namespace detail {
extern const std::string_view kBenchI;
extern const std::string_view kBenchII;
extern const std::string_view kBenchIII;
extern const std::string_view kBenchIV;
}  // namespace detail

std::vector<std::string> benchmark_ids() { return {"I", "II", "III", "IV"}; }

std::string_view benchmark_text(std::string_view id) {
  if (id == "I") return detail::kBenchI;
  if (id == "II") return detail::kBenchII;
  if (id == "III") return detail::kBenchIII;
  if (id == "IV") return detail::kBenchIV;
  throw std::invalid_argument("unknown benchmark '" + std::string(id) + "' (expected I, II, III or IV)");
}

RunConfig benchmark_config(std::string_view id, double scale) {
  RunConfig c = parse_run_config(IniDocument::parse(benchmark_text(id), "bench_" + std::string(id) + ".ini"));
  return scale == 1.0 ? c : scaled(c, scale);
}

}  // namespace hexmask::io

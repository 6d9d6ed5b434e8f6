#pragma once

#include "hcm/engine.hpp"
#include "json.hpp"

namespace hcm::cli {

inline nlohmann::ordered_json run_info_json(const ResolvedRun& run,
                                            const BatchResult& res) {
  nlohmann::ordered_json info;
  info["accepted"] = res.stats.acceptance_count;
  info["total_shots"] = res.stats.total_shots;
  info["containment"] = res.stats.containment();
  info["g_prime"] = run.filter.g_prime;
  info["cutoff"] = run.filter.cutoff;
  info["calibrated"] = run.calibrated;
  return info;
}

}  // namespace hcm::cli

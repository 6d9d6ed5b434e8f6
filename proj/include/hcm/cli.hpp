#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hcm::cli {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;   // overrides the config
  std::optional<std::uint64_t> shots;  // overrides the config
  int threads = 0;                     // 0: HCM_THREADS or hardware default
  std::string out_dir;
  bool write_samples = false;
  std::string figure;      // reproduce
  std::string sweep_path;  // sweep spec document
};

int resolve_threads(int requested);

int cmd_analytic(const CommonOptions& opt);
int cmd_simulate(const CommonOptions& opt);
int cmd_sweep(const CommonOptions& opt);
int cmd_reproduce(const CommonOptions& opt);
int cmd_calibrate(const CommonOptions& opt);

}  // namespace hcm::cli

#pragma once

#include <string>

#include "qurate/config.hpp"
#include "qurate/evaluation.hpp"

namespace qurate::cli {

inline constexpr const char* kVersion = "0.1.0";

// Each command is a deterministic function of (input files, config): it
// writes its declared outputs plus a machine-readable manifest into out_dir
// and returns 0, or throws without having written the manifest.
//
// out_dir == "" means config.paths.out.

int cmd_demo(const RunConfig& config, const std::string& out_dir);
int cmd_annotate(const RunConfig& config, const std::string& out_dir);
int cmd_score(const RunConfig& config, const std::string& out_dir);
int cmd_select(const RunConfig& config, const std::string& out_dir,
               eval::Method method);
int cmd_sweep(const RunConfig& config, const std::string& out_dir);
int cmd_transfer(const RunConfig& config, const std::string& out_dir);

}  // namespace qurate::cli

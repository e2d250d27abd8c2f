#pragma once

#include <iosfwd>

#include "ehrenfest/config.hpp"

namespace ehrenfest {

/// Exit statuses of run().
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Loads the manifest's config, dispatches the subcommand and writes its
/// CSV files plus summary.json into out_dir. Diagnostics go to `log`.
/// Returns kExitPass, kExitFail (experiment failed or run invalid) or
/// kExitConfig (bad config, unknown command, unwritable output).
int run(const RunManifest& manifest, std::ostream& log);

}  // namespace ehrenfest

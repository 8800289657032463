#pragma once

#include <string>

#include "smcva/annealing.hpp"
#include "smcva/config.hpp"
#include "smcva/sampler.hpp"

namespace smcva {

/// Stage drivers behind the CLI subcommands. Each writes its artifacts
/// into out_dir and keeps manifest.json current; later stages consume only
/// manifest-listed files.
void run_generate(const RunConfig& cfg, const std::string& out_dir);
void run_anneal(const RunConfig& cfg, const std::string& out_dir);
void run_sample(const RunConfig& cfg, const std::string& out_dir);
void run_report(const std::string& out_dir);

nlohmann::json load_manifest(const std::string& out_dir);
Observations load_observations(const std::string& out_dir);

}  // namespace smcva

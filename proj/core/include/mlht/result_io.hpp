#pragma once

#include <string>
#include <vector>

#include "mlht/mlmc.hpp"
#include "mlht/mse_study.hpp"
#include "mlht/sn_reference.hpp"

namespace mlht {

void write_mlmc_result_json(const MLMCResult& result, const std::string& path);
void write_mlmc_levels_csv(const MLMCResult& result, const std::string& path);
void write_flux_csv(std::span<const double> phi, const Grid& grid, const std::string& path);
/// Debug dump of one realization's closures.
void write_closure_csv(const ClosureSet& closures, const Grid& grid, const std::string& path);

void write_reference_json(const ReferenceSolution& ref, const GridHierarchy& hierarchy,
                          const std::string& path);
/// Reads back the whole-domain reference functional value.
double read_reference_functional(const std::string& path, const FunctionalSpec& spec);

void write_mse_study_json(const MSEStudy& study, const std::string& path);

/// Converts result.json files (plus an optional reference.json) into a
/// one-row-per-result summary table and a long-format per-level table for
/// plotting.
void write_report(const std::vector<std::string>& result_paths,
                  const std::string& reference_path, const std::string& out_dir);

} // namespace mlht

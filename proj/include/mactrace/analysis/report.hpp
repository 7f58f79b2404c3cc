#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "mactrace/analysis/bands.hpp"
#include "mactrace/analysis/exposure.hpp"
#include "mactrace/geolocate/timeline.hpp"

namespace mactrace {

// "value,fraction" rows under a header; a "# x_scale=log" comment line when log_x is set.
void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf, const std::string& value_name,
                   bool log_x = false);

// "byte4,byte5,model" scatter rows.
void write_band_scatter_csv(std::ostream& out, std::span<const LabeledMac> labeled);

// One JSON record per row.
void write_exposure_table(std::ostream& out, const ExposureSummary& summary);
void write_movement_table(std::ostream& out, const MovementReport& report);
void write_mislabel_table(std::ostream& out, const MislabelReport& report);
void write_sensitive_table(std::ostream& out, const SensitiveReport& report);

}  // namespace mactrace

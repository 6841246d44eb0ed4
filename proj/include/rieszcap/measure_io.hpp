#pragma once

// Measure files. JSON document: {"n": 2, "delta": 0.01, "atoms": [[x, y], ...],
// "weights": [w, ...]}. CSV: one atom per line, columns x1..xn,w, optional
// header line; delta is taken as the minimum atom distance.

#include <string>
#include <string_view>

#include "rieszcap/measure.hpp"

namespace rieszcap {

std::string measure_to_json_string(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json_string(std::string_view text);
DiscreteMeasure measure_from_csv_string(std::string_view text);

/// Dispatches on extension: ".csv" reads CSV, anything else JSON.
DiscreteMeasure read_measure_file(const std::string& path);
void write_measure_json(const DiscreteMeasure& mu, const std::string& path);

/// "%.17g" formatting shared by every CSV writer.
std::string format_real(double v);

}  // namespace rieszcap

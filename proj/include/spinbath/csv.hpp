#pragma once

// CSV output: a `#` metadata block, one header row, values with 12
// significant digits, empty fields for missing values.

#include <ostream>
#include <string>
#include <vector>

#include "spinbath/experiment.hpp"

namespace spinbath {

std::string format_value(double v);  // "" for NaN

// Extra metadata lines are written verbatim after "# ".
void write_time_series(std::ostream& out, const TimeSeries& ts, const std::vector<std::string>& extra_meta = {});

void write_sweep(std::ostream& out, const SweepConfig& cfg, const SweepResult& result);

}  // namespace spinbath

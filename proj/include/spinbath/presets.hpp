#pragma once

// Named configurations for the figure panels, pairs, sweeps and the
// anisotropic runs. Each preset is stored as config-file text.

#include <string>
#include <vector>

#include "spinbath/config.hpp"

namespace spinbath {

enum class PresetKind { Experiment, AppendixB, Sweep };

struct Preset {
    std::string name;
    PresetKind kind = PresetKind::Experiment;
    std::string description;
    std::string text;
    bool long_running = false;
};

const std::vector<Preset>& presets();

// Throws ConfigError for an unknown name.
const Preset& find_preset(const std::string& name);

ExperimentConfig preset_experiment(const std::string& name);
SweepConfig preset_sweep(const std::string& name);

}  // namespace spinbath

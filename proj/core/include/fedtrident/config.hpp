#pragma once

#include <string>

#include "fedtrident/engine.hpp"

namespace fedtrident {

// Experiment configuration as `key = value` lines, '#' comments, every key
// optional. Unknown keys and out-of-range values are errors that name the
// offending key. The attack is either `attack_source`/`attack_target`
// (static over all rounds) or `attack_phases` with entries like
// "1-10:3>2,11-60:3>1".
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// The config rendered back as parseable key = value text (used for the
// summary echo).
std::string config_to_text(const ExperimentConfig& config);

}  // namespace fedtrident

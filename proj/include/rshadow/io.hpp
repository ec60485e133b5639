#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rshadow/calibration.hpp"
#include "rshadow/channels.hpp"
#include "rshadow/device.hpp"
#include "rshadow/estimation.hpp"

namespace rshadow::io {

nlohmann::json noise_to_json(const NoiseSpec& spec);
NoiseSpec noise_from_json(const nlohmann::json& j);

nlohmann::json state_prep_to_json(const StatePrepSpec& spec);
StatePrepSpec state_prep_from_json(const nlohmann::json& j);

nlohmann::json calibration_to_json(const CalibrationEstimate& est);
CalibrationEstimate calibration_from_json(const nlohmann::json& j);

/// Observable definition file: "n <count>" then blocks
///   observable <id> pauli        observable <id> stabilizer
///   <coeff> <pauli label>        <signed pauli label>
///   ...                          ...
///   end                          end
std::vector<ObservableSpec> read_observables(std::istream& in);
void write_observables(std::ostream& out, const std::vector<ObservableSpec>& observables);

/// Line-per-round sample log: "round<TAB>clifford<TAB>outcome".
std::vector<ShadowSample> read_sample_log(std::istream& in, GroupTag group);

}  // namespace rshadow::io

#pragma once

#include <string>

#include "interplab/network.hpp"

namespace interplab {

// JSON persistence for trained nets. Files carry explicit shape fields and a
// flattening-order tag so parameter indices stay stable across versions.
void save_model(const NetModel& net, const std::string& path);
NetModel load_model(const std::string& path);

std::string model_to_json_text(const NetModel& net);
NetModel model_from_json_text(const std::string& text);

} // namespace interplab

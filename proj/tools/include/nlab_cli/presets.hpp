#pragma once

#include <string>
#include <vector>

#include "nlab/config.hpp"

namespace nlab::cli {

struct Preset {
  std::string name;
  std::string description;
  IniDocument doc;
};

const std::vector<Preset>& presets();
/// Throws ConfigError for an unknown name.
const Preset& find_preset(const std::string& name);

}  // namespace nlab::cli

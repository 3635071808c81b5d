#pragma once

#include <string>

#include "json.hpp"

#include "gwt/convergence.hpp"
#include "gwt/pmf.hpp"

namespace gwt {

// Every artifact embeds the run configuration: CSV as '#' comment lines,
// JSON under a "config" key, so a result file alone reproduces its run.

std::string ratio_csv(const RatioReport& r, const nlohmann::json& config);
nlohmann::json ratio_json(const RatioReport& r, const nlohmann::json& config);

std::string tv_csv(const std::vector<TVReport>& rows, const nlohmann::json& config);
nlohmann::json tv_json(const std::vector<TVReport>& rows, const nlohmann::json& config);

std::string tilt_csv(const TiltCheckReport& r, const nlohmann::json& config);
nlohmann::json tilt_json(const TiltCheckReport& r, const nlohmann::json& config);

std::string pmf_csv(const PMFVector& pmf, const nlohmann::json& config);
nlohmann::json pmf_json(const PMFVector& pmf, const nlohmann::json& config);

// Writes text to path, creating parent directories; Error on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace gwt

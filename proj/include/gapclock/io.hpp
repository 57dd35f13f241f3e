// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "gapclock/atomize.hpp"

#include "json.hpp"

namespace gapclock {

/// File-system or parse failure (CLI exit class 3).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Serializes a JSON tree with floating-point numbers rendered at 17
/// significant digits, so every double round-trips exactly and identical
/// inputs produce byte-identical files.
std::string dump17(const nlohmann::json& j, int indent = 2);

std::string format_double17(double v);

Instance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& inst);

Solution solution_from_json(const nlohmann::json& j);
nlohmann::json solution_to_json(const Solution& sol);

ContinuousSpec continuous_spec_from_json(const nlohmann::json& j);

nlohmann::json hypothesis_to_json(const HypothesisReport& rep);
nlohmann::json verify_to_json(const VerifyReport& rep);
nlohmann::json sweep_to_json(const SweepReport& rep);

Instance load_instance(const std::string& path);
Solution load_solution(const std::string& path);
ContinuousSpec load_continuous_spec(const std::string& path);
void save_text(const std::string& path, const std::string& text);
nlohmann::json load_json(const std::string& path);

std::string string_measure_csv(const StringMeasureTable& table);
std::string sweep_csv(const SweepReport& rep);

}  // namespace gapclock

#pragma once

#include "rsmdp/ctmdp_model.hpp"
#include "rsmdp/dtmdp_solver.hpp"
#include "rsmdp/extreal.hpp"
#include "rsmdp/reduction.hpp"
#include "rsmdp/simulator.hpp"

#include <json.hpp>

#include <string>

namespace rsmdp {

using Json = nlohmann::ordered_json;

/// A finite number, or the string "inf".
Json extreal_to_json(ExtReal x);
/// Throws ModelError on anything else, including negative numbers.
ExtReal extreal_from_json(const Json& j);

/// Schema check only; validate_model() does the semantic checks.
RawModel raw_model_from_json(const Json& j);
Json raw_model_to_json(const RawModel& raw);

CtmdpModel model_from_json(const Json& j);
Json model_to_json(const CtmdpModel& model);

/// Reads {"policy": {state: action, ...}}; other top-level keys are ignored,
/// so a solve report doubles as a policy file.
StationaryPolicy policy_from_json(const Json& j, const CtmdpModel& model);
Json policy_to_json(const StationaryPolicy& policy, const std::vector<std::string>& states,
                    const std::vector<std::string>& actions);

Json dtmdp_to_json(const DtmdpModel& model);
DtmdpModel dtmdp_from_json(const Json& j);

Json value_to_json(const ValueFunction& v, const std::vector<std::string>& states);
Json solve_report_to_json(const SolveReport& report, const CtmdpModel& model);
Json mc_estimate_to_json(const McEstimate& est);

/// Throws ModelError if the file cannot be read or is not JSON.
Json read_json_file(const std::string& path);

/// Numbers print in shortest round-trip form, so values survive a reload bit for bit.
std::string dump_json(const Json& j);

}  // namespace rsmdp

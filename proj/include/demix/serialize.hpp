#pragma once

#include <json.hpp>

#include <string>

#include "demix/model_core.hpp"
#include "demix/solvers.hpp"

namespace demix {

// Shortest text that round-trips a double exactly: "%.17g".
std::string format_g17(double x);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json basis_to_json(const Orthobasis& basis);
Orthobasis basis_from_json(const nlohmann::json& j);

// Descriptor with generation parameters and seed. Matrix entries are written
// alongside when the operator holds at most 1e7 of them; named families are
// reloaded by regeneration from the seed, explicit ones from the stored
// entries.
nlohmann::json design_to_json(const DesignOperator& d);
DesignOperator design_from_json(const nlohmann::json& j);

nlohmann::json instance_to_json(const SuperpositionInstance& inst,
                                const BasisPair& bases);

struct LoadedInstance {
  SuperpositionInstance instance;
  BasisPair bases;
};
LoadedInstance instance_from_json(const nlohmann::json& j);

nlohmann::json solve_result_to_json(const SolveResult& r);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace demix

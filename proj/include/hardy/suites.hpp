#pragma once

#include "hardy/config.hpp"
#include "hardy/product.hpp"
#include "hardy/report.hpp"
#include "hardy/sampling.hpp"

#include <string>
#include <vector>

namespace hardy {

struct SuiteInfo {
    std::string name;
    std::string description;
    std::vector<std::string> criteria;  // acceptance criteria the suite measures
    std::vector<std::string> keys;      // config keys it reads besides grid, potential, seed
};

// Dependency order: operators, square function, decomposition, conditions / riesz / multipliers.
const std::vector<SuiteInfo>& suite_registry();
const SuiteInfo& suite_info(const std::string& name);

// Independent of which other suites run.
Rng suite_rng(const ExperimentConfig& cfg, const std::string& suite);
// Pair on the configured grid refined by `factor`; random potentials are drawn from rng.
ProductOperatorPair make_operator_pair(const ExperimentConfig& cfg, Rng& rng, int factor = 1);

std::vector<MetricRow> run_suite(const std::string& name, const ExperimentConfig& cfg);
// Throws ConfigError when no suite is selected. Suite exceptions become failing "error" rows.
Report run_experiment(const ExperimentConfig& cfg);

const char* code_version();

}  // namespace hardy

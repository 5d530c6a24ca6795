#ifndef KACLAB_EXPERIMENTS_HPP
#define KACLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kaclab/config.hpp"
#include "kaclab/initial_state.hpp"
#include "kaclab/report.hpp"

namespace kaclab {

struct RunOptions {
    /// Overrides the config's "seed".
    std::optional<std::uint64_t> seed;
    /// Worker cap; results do not depend on it.
    int threads = 1;
};

/// verify-thm1, verify-thm2, steady-state, dsmc, inequality, saturate
const std::vector<std::string>& experiment_names();

/// Dispatches on `name` (the config's "experiment" key, if present, must
/// agree). Configuration problems throw ConfigError, an initial state outside
/// L^2 throws NotInL2 and an uncertified supremum throws CertificationError.
ExperimentReport run_experiment(const std::string& name, const Config& cfg, const RunOptions& opt = {});

ExperimentReport verify_thm1(const Config& cfg, const RunOptions& opt = {});
ExperimentReport verify_thm2(const Config& cfg, const RunOptions& opt = {});
ExperimentReport verify_steady(const Config& cfg, const RunOptions& opt = {});
ExperimentReport dsmc_experiment(const Config& cfg, const RunOptions& opt = {});
ExperimentReport inequality_experiment(const Config& cfg, const RunOptions& opt = {});
ExperimentReport saturate_experiment(const Config& cfg, const RunOptions& opt = {});

/// "2,0:0.1; 0,4:-0.02" -> Hermite terms; missing trailing degrees are 0.
std::vector<HermiteTerm> parse_hermite_terms(const std::string& text, int M);

} // namespace kaclab

#endif

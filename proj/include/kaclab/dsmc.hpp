#ifndef KACLAB_DSMC_HPP
#define KACLAB_DSMC_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kaclab/initial_state.hpp"
#include "kaclab/operators.hpp"

namespace kaclab {

enum class Dynamics { FR, T };

struct ParticleState {
    std::vector<double> v; // system
    std::vector<double> w; // reservoir
    double clock = 0.0;
};

enum class Mechanism { SS, RR, SR, Thermostat };

using Rng = std::mt19937_64;

/// Stream seed for one replica: splitmix64 applied to (master, replica).
std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica);

/// Event rates of the jump process. Empty pair sums (M = 1 for S-S, N = 1
/// for R-R) have rate zero. Under T dynamics the S-R channel becomes the
/// thermostat channel with the same rate mu M.
struct EventRates {
    double ss = 0.0, rr = 0.0, coupling = 0.0;
    double total() const { return ss + rr + coupling; }
};
EventRates event_rates(const SystemParams& p);

/// One event of the FR process: exponential holding time, then a uniform
/// rotation of a pair picked by mechanism (S-S, R-R or S-R).
Mechanism step_fr(ParticleState& s, const SystemParams& p, Rng& rng);
/// One event of the T process: S-S and R-R events as in step_fr; thermostat
/// events rotate (v_j, w*) with a fresh Maxwellian w* that is then discarded.
Mechanism step_t(ParticleState& s, const SystemParams& p, Rng& rng);

/// Runs events until the next one would fall after `t`, then sets clock = t.
/// Returns the number of events.
std::uint64_t advance_to(ParticleState& s, double t, Dynamics dyn, const SystemParams& p, Rng& rng);

/// Characteristic-function probe exp(-2 pi i (xi.v + eta.w)).
struct CfPoint {
    std::vector<double> xi;
    std::vector<double> eta;
};

struct ObservableSpec {
    std::vector<CfPoint> cf_points;
    /// Also record <v_i^2> and <v_i^4> for every i.
    bool per_coordinate = false;
};

/// Means and standard errors of the observables on the time grid.
/// Columns: E2, E3, E4 (system averages as in Moments), H2, H4 (averages of
/// <H_2(v_j)>, <H_4(v_j)>), momentum, energy, reservoir_E2, then optional
/// v2[i], v4[i], and cf_re[k], cf_im[k].
struct EnsembleResult {
    std::vector<double> t;
    std::vector<std::string> names;
    Eigen::MatrixXd mean;   // time x observable
    Eigen::MatrixXd stderr; // time x observable
    std::size_t replicas = 0;
    std::size_t flagged = 0;
    std::uint64_t events = 0;
    /// Largest relative change of |v|^2 + |w|^2 over a replica (FR only).
    double max_energy_drift = 0.0;
    /// Replica states (K x (M+N)) per grid time, when requested.
    std::vector<Eigen::MatrixXd> samples;

    int column(const std::string& name) const;
};

struct EnsembleOptions {
    std::size_t replicas = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    bool keep_samples = false;
};

/// Independent replicas from `sampler` (system) and Gamma_N (reservoir).
/// Replicas are reduced in fixed blocks of 256 in index order, so the result
/// does not depend on the thread count. Replicas with a non-finite observable
/// are flagged and left out of the statistics.
EnsembleResult run_ensemble(const SystemParams& p, Dynamics dyn, const SystemSampler& sampler,
                            std::span<const double> t_grid, const ObservableSpec& obs, const EnsembleOptions& opt);

/// Raw sample dump: 8-byte magic "KACRAW01", uint64 rows, uint64 cols, then
/// rows*cols little-endian doubles, row-major (row = replica).
void write_raw_samples(std::ostream& os, const Eigen::MatrixXd& samples);
Eigen::MatrixXd read_raw_samples(std::istream& is);

} // namespace kaclab

#endif

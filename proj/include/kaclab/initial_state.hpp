#ifndef KACLAB_INITIAL_STATE_HPP
#define KACLAB_INITIAL_STATE_HPP

#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kaclab/propagator.hpp"

namespace kaclab {

/// Raised when h0 = l0 / Gamma_M is not square integrable against Gamma_M.
class NotInL2 : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class InitialKind { Hermite, Gaussian, Mixture, Saturating };

/// One term c * prod_i H_{n_i}(v_i) of a Hermite-perturbed state.
struct HermiteTerm {
    std::vector<int> degrees; // one entry per system coordinate
    double coeff = 0.0;
};

/// Menu of initial system distributions l0 (the reservoir always starts in
/// Gamma_N).
///  Hermite:    h0 = 1 + sum of terms
///  Gaussian:   every v_i ~ N(0, 1/beta_s)
///  Mixture:    every v_i ~ weight N(0, 1/beta1) + (1-weight) N(0, 1/beta2)
///  Saturating: h0 = 1 + amplitude * u_{M,P}; amplitude <= 0 means "pick by
///              the positivity search"
struct InitialSpec {
    InitialKind kind = InitialKind::Hermite;
    std::vector<HermiteTerm> terms;
    double beta_s = kBeta;
    double beta1 = kBeta, beta2 = kBeta, weight = 0.5;
    int P = 2;
    double amplitude = 0.0;

    std::string describe() const;
};

/// Per-coordinate moments of l0. E3 is the mixed moment int v_i^2 v_j^2 l0
/// (taken as E2^2 when M = 1).
struct Moments {
    double E2 = 0.0;
    double E3 = 0.0;
    double E4 = 0.0;
};

/// Multi-indices (p_1..p_M) with p_i >= 0 summing to P, lexicographic.
std::vector<std::vector<int>> compositions(int M, int P);

/// 1D Hermite coefficients of N(0, 1/beta_s) / Gamma_1 up to `cutoff`.
std::vector<double> gaussian_coefficients(double beta_s, int cutoff);

/// Throws NotInL2 when the state has h0 outside L^2(Gamma), i.e. a Gaussian
/// component with 2 beta <= beta_0.
void require_l2(const InitialSpec& spec);

/// Positivity constant for 1 + a u_{M,P}: 0.9 / |min u| over a grid on
/// [-5, 5]^M (or 1 when u has no negative values on the grid).
double saturating_amplitude(int M, int P, int points_per_axis = 0);

/// Orthonormal coefficients of h0 on `basis` (system coordinates first).
/// Product states are truncated to the basis cutoff.
HermiteState initial_coefficients(const InitialSpec& spec, BasisPtr basis);

/// Moments from coefficients (exact for cutoff >= 4).
Moments moments_from_coefficients(const HermiteState& h);
/// Closed-form moments for Gaussian and mixture states; falls back to
/// coefficients (on a cutoff-4 v-only basis) otherwise.
Moments analytic_moments(const InitialSpec& spec, int M);

/// Draws system velocities from l0. Hermite and saturating states use
/// rejection sampling from N(0, kappa^2/(2 pi)) with kappa = 2.
class SystemSampler {
public:
    SystemSampler(const InitialSpec& spec, int M);

    void sample(std::mt19937_64& rng, std::span<double> v) const;
    double acceptance_bound() const { return bound_; }

private:
    double h0(std::span<const double> v) const;

    InitialSpec spec_;
    int M_;
    double bound_ = 1.0;
    std::vector<HermiteTerm> poly_terms_;
};

/// Thermal reservoir coordinates: N(0, 1/(2 pi)).
void sample_reservoir(std::mt19937_64& rng, std::span<double> w);

} // namespace kaclab

#endif

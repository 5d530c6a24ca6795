#ifndef KACLAB_SATURATION_HPP
#define KACLAB_SATURATION_HPP

#include <cstddef>
#include <vector>

#include "kaclab/initial_state.hpp"
#include "kaclab/operators.hpp"
#include "kaclab/propagator.hpp"

namespace kaclab {

inline constexpr double kSaturationC = 3.0 / 128.0;

/// u_{M,P} = sum over p_1 + .. + p_M = P of prod_i H_{2 p_i}(v_i).
struct SaturatingState {
    int M = 2;
    int P = 2;
    HermiteState u;
    std::size_t support = 0;
    /// positivity constant for 1 + a u
    double amplitude = 0.0;
};

/// Unit coefficients on the support, on `basis` (which may carry reservoir
/// coordinates). Throws std::invalid_argument for M < 2, P < 2 or 2P above
/// the basis cutoff.
SaturatingState build_saturating(int M, int P, BasisPtr basis, bool find_amplitude = true);

/// binom(M+P-1, M-1): compositions of P into M parts.
double composition_count(int M, int P);
/// binom(M+P, P-1), the other closed form in circulation.
double alternative_count(int M, int P);

struct CrossTerm {
    double value = 0.0;      // <R_{1,1} u, R_{2,1} u> - <T_1 u, T_2 u>
    double norm2 = 0.0;      // |u|^2
    double ratio_norm = 0.0; // value / |u|
    double ratio_norm2 = 0.0; // value / |u|^2
};

/// For a v-only state u on a basis with M >= 2 system and >= 1 reservoir
/// coordinates.
CrossTerm cross_term(const HermiteState& u, const RotationBlocks& rot);
/// For u_{M,P} on the basis (M, 1, 2P).
CrossTerm cross_term(int M, int P);

/// c (P-1)(P-2)(M+1)M / ((M+P)(M+P-1)(M+P-2)(M+P-3)).
double combinatorial_bound(int M, int P, double c);

struct SaturationPoint {
    double t = 0.0;
    double measured = 0.0;
    double lower_bound = 0.0; // (M/sqrt N) t ((C+1) e^{-Lambda t} - 1) |h0 - 1|
};

struct SaturationResult {
    SystemParams params;
    int P = 2;
    double amplitude = 0.0;
    double norm_u0 = 0.0;     // |h0 - 1|
    double slope = 0.0;       // |(Q_I - Q_T) u0|, the exact initial slope
    double slope_fd = 0.0;    // |difference(t)| / t at a small t
    double slope_bound = 0.0; // C (M/sqrt N) |h0 - 1|
    std::vector<SaturationPoint> points;
    bool pass = true;
};

/// h0 = 1 + a u_{M,P} on the (M, N) basis of cutoff 2P. Checks the measured
/// difference against the lower bound wherever it is positive, and the
/// initial slope against slope_bound.
SaturationResult saturation_experiment(const SystemParams& p, int P, const std::vector<double>& times,
                                       const SeriesOptions& opts = {});

} // namespace kaclab

#endif

#ifndef KACLAB_INEQUALITY_HPP
#define KACLAB_INEQUALITY_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kaclab {

/// Raised when a supremum cannot be certified with the declared envelope.
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scalar test function H(eta) for the D_N functionals. Suprema are taken on
/// [-interval, interval]; beyond it |H| <= tail_sup(R) for |eta| >= R.
struct TestFunction {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> tail_sup;
    double interval = 10.0;
    bool even = true;
    bool vanishes_at_zero = true;
    /// max_{p<=4} sup |H^(p)|; filled by estimate_c4 when NaN.
    double c4 = std::numeric_limits<double>::quiet_NaN();

    double operator()(double eta) const { return f(eta); }
    /// Throws std::invalid_argument when the flags do not hold on sample points.
    void validate() const;
};

/// A eta^2 exp(-s eta^2)
TestFunction bump(double A, double s);
/// (b eta^2 - c eta^4) exp(-s eta^2)
TestFunction quartic(double b, double c, double s);
/// 2 sin^2(omega eta / 2) exp(-s eta^2) = (1 - cos(omega eta)) exp(-s eta^2)
TestFunction oscillating(double omega, double s);
/// eta^4 exp(-r eta^2)
TestFunction h_r(double r);

struct C4Estimate {
    double value = 0.0;             // max over p <= 4
    std::vector<double> per_order;  // sup |H^(p)|, p = 0..4
    double consistency = 0.0;       // worst relative Richardson disagreement
    int refinements = 0;
};

/// Central finite differences at 5 stencil widths with a Richardson
/// consistency check; halves the widths (up to 6 times) while the
/// extrapolated values disagree by more than 1e-4 relative plus abs_tol.
C4Estimate estimate_c4(const std::function<double(double)>& f, double interval, int points = 4001,
                       double abs_tol = 1e-6);

/// D_1(H, a) = sup_eta |H(eta)| / (a^2 + eta^2); throws CertificationError
/// if the tail envelope exceeds the found value.
struct D1Result {
    double value = 0.0;
    double argmax = 0.0;
    double tail = 0.0;
};
D1Result d1(const TestFunction& h, double a);

/// Objective of D_N at one point.
double dn_objective(const TestFunction& h, double a, const std::vector<double>& eta);

enum class DnMode { Structured, Random, Both };

struct DnResult {
    double value = 0.0;      // larger of the modes run
    double structured = 0.0;
    double random = 0.0;
    std::vector<double> argmax;
    std::optional<double> eta0;
    bool structured_skipped = false;
};

/// D_N(H, a). Structured mode scans eta = (eta0,..,eta0, eta, 0,..) with
/// |eta| <= eta0 and the equal-coordinate configurations (x,..,x,0,..);
/// random mode runs the multi-start search on R^N.
DnResult dn(const TestFunction& h, double a, int N, DnMode mode = DnMode::Both);

/// eta0(a)^2 = D1(a) a^2 / (D1(0) - D1(a)); nullopt when D1(0) <= D1(a).
std::optional<double> eta0(double d1_zero, double d1_a, double a);

/// Majorant H~(eta) = min(D1(0) eta^2, D1(a)(a^2 + eta^2)) as a test function.
TestFunction majorant(double d1_zero, double d1_a, double a, double interval);

/// Closed-form D_N(H~, a) from the structured supremum over k <= N, |eta| <= eta0.
double dn_majorant_structured(double d1_zero, double d1_a, double a, int N);

struct InequalityLayer {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0; // rhs - lhs for "<=", lhs - rhs for ">="
    bool pass = false;
};

struct DnBoundsReport {
    std::string function;
    double a = 0.0;
    int N = 1;
    double d1_zero = 0.0, d1_a = 0.0, dn = 0.0, c4 = 0.0;
    std::optional<double> eta0;
    double eta0_continuity = 0.0;
    std::vector<InequalityLayer> layers;
    bool pass = true;
};

/// Checks D_N <= sqrt((8 C4 + D1(a)) D1(a)), D_N <= max(D1(a), 2 D1(0)/(1 + pi a^2/2)),
/// the two lower bounds on D1(a) in terms of D1(0) and C4, 2 D1(0) <= C4,
/// D_N <= N D_1(a), D_N <= D_1(0), the continuity of H~ at eta0 and the
/// structured supremum for H~.
DnBoundsReport check_dn_bounds(const TestFunction& h, double a, int N);

/// D_N(H_r, a) / D_1(H_r, a).
double counterexample_ratio(double r, int N, double a);

/// Randomised corpus: bumps, truncated quartics, oscillating bumps and the
/// H_r family, fixed by the seed.
std::vector<TestFunction> corpus(std::uint64_t seed, int count = 100);

} // namespace kaclab

#endif

// analysis.hpp
// Closed-form success probabilities, photon arrival density, feasibility
// arithmetic for detector dark counts, and arrival-density curve sweeps.

#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "phecp/protocol.hpp"
#include "phecp/quadrature.hpp"

namespace phecp {

using cplx = std::complex<double>;

// P(t) = 2 |alpha beta|^2 sin^2(g t / 2)
double success_probability(cplx alpha, cplx beta, double g, double t);
// 2 |alpha beta|^2
double max_success_probability(cplx alpha, cplx beta);
// (2n + 1) pi / g; throws NoOptimum for g == 0.
double optimal_time(double g, int n);

// g^2 / (g^2 + kappa^2)
double p_tot_coefficient(double g, double kappa);
// |alpha beta|^2 g^2 / (g^2 + kappa^2)
double total_probability(cplx alpha, cplx beta, double g, double kappa);

// 2 |alpha beta|^2 kappa * integral of sin^2(g t/2) exp(-kappa t) over
// [0, 40/kappa], plus the tail bound 2 |alpha beta|^2 exp(-40).
struct TotalProbabilityCheck {
    double closed_form = 0;
    QuadratureResult<double> quadrature;
    double tail_bound = 0;
    double relative_error = 0;
};
TotalProbabilityCheck total_probability_check(cplx alpha, cplx beta, double g, double kappa);

// Normalized arrival-time density of the heralding photon, in 1/s.
double papd(double t, const SystemParams& params);
// Integral of papd over [0, 40/kappa].
QuadratureResult<double> papd_integral(const SystemParams& params);

struct FeasibilityReport {
    double p_tot_coefficient = 0;
    double window = 0;            // s
    double max_dark_rate = 0;     // counts/s tolerated for the given |alpha beta|^2
    double min_alpha_beta_sq = 0; // smallest |alpha beta|^2 that beats dark_rate
    double alpha_beta_sq = 0;
    double dark_rate = 0;
    bool feasible = false;        // dark_rate < max_dark_rate
};
FeasibilityReport dark_count_threshold(const SystemParams& params);

struct PapdPoint {
    double t_p = 0;        // g t / (2 pi)
    double papd_per_s = 0;
};

struct PapdCurve {
    double ratio = 0;  // omega_m / kappa
    std::vector<PapdPoint> points;
    SystemParams params_used;

    double time_of(double t_p) const;  // seconds
};

std::vector<double> tp_grid(double start, double stop, double step);

// kappa = omega_m / ratio; every other parameter comes from `base`.
PapdCurve papd_curve(double ratio, const std::vector<double>& tp, const SystemParams& base);
std::vector<PapdCurve> papd_sweep(const std::vector<double>& ratios, const std::vector<double>& tp,
                                  const SystemParams& base);

struct CurveFeatures {
    std::vector<double> minima_tp;     // interior local minima
    std::vector<double> peak_tp;       // interior local maxima, parabola-refined
    std::vector<double> peak_values;   // 1/s
    double expected_peak_ratio = 0;    // exp(-2 pi kappa / g)
    double second_peak_ratio = 0;      // peak 2 / peak 1, 0 when fewer than two peaks
    std::size_t visible_peaks = 0;     // peaks at or above 1% of the first
    double sampled_integral = 0;       // composite Simpson over the curve, in t
};
CurveFeatures curve_features(const PapdCurve& curve);

// Header `ratio,t_p,papd_per_s,papd_dimensionless`; papd_dimensionless = papd / kappa.
void write_papd_csv(std::ostream& os, const std::vector<PapdCurve>& curves);

}  // namespace phecp

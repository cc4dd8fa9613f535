#include "phecp/analysis.hpp"

#include <charconv>
#include <cmath>
#include <future>
#include <numbers>
#include <ostream>

#include "phecp/errors.hpp"

namespace phecp {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

void require_normalized(cplx alpha, cplx beta) {
    const double n2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(n2 - 1) > 1e-12)
        throw NotNormalized("|alpha|^2 + |beta|^2 = " + std::to_string(n2) + ", expected 1");
}

double ab_sq(cplx alpha, cplx beta) { return std::norm(alpha) * std::norm(beta); }

void require_rates(double g, double kappa) {
    if (!(g > 0)) throw DegenerateParams("g must be positive");
    if (!(kappa > 0)) throw DegenerateParams("kappa must be positive");
}

// Largest window end used for arrival-time integrals, in decay times.
constexpr double decay_times = 40;

std::string shortest(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace

double success_probability(cplx alpha, cplx beta, double g, double t) {
    require_normalized(alpha, beta);
    const double s = std::sin(g * t / 2);
    return 2 * ab_sq(alpha, beta) * s * s;
}

double max_success_probability(cplx alpha, cplx beta) {
    require_normalized(alpha, beta);
    return 2 * ab_sq(alpha, beta);
}

double optimal_time(double g, int n) {
    if (n < 0) throw InvalidParameter("optimal time index must be nonnegative");
    if (g == 0) throw NoOptimum("with g = 0 the dark port never clicks");
    return (2 * n + 1) * std::numbers::pi / std::abs(g);
}

double p_tot_coefficient(double g, double kappa) {
    if (g == 0 && kappa == 0) throw DegenerateParams("g and kappa are both zero");
    return g * g / (g * g + kappa * kappa);
}

double total_probability(cplx alpha, cplx beta, double g, double kappa) {
    require_normalized(alpha, beta);
    require_rates(g, kappa);
    return ab_sq(alpha, beta) * p_tot_coefficient(g, kappa);
}

TotalProbabilityCheck total_probability_check(cplx alpha, cplx beta, double g, double kappa) {
    TotalProbabilityCheck c;
    c.closed_form = total_probability(alpha, beta, g, kappa);
    const double pre = 2 * ab_sq(alpha, beta);
    // Integrate in u = kappa t so the integrand is O(1).
    const double ratio = g / kappa;
    auto f = [&](double u) {
        const double s = std::sin(ratio * u / 2);
        return pre * s * s * std::exp(-u);
    };
    c.quadrature = integrate_adaptive<double>(f, 0.0, decay_times, 1e-12, 1e-14);
    c.tail_bound = pre * std::exp(-decay_times);
    c.relative_error = std::abs(c.quadrature.value - c.closed_form) / c.closed_form;
    return c;
}

double papd(double t, const SystemParams& params) {
    if (!(t >= 0)) throw InvalidParameter("arrival time must be nonnegative");
    require_normalized(params.alpha, params.beta);
    require_rates(params.g, params.kappa);
    const double ab = params.alpha_beta_sq();
    if (ab == 0) throw DegenerateParams("|alpha beta| = 0 gives no arrival density");
    const double s = std::sin(params.g * t / 2);
    return 2 * ab * s * s * params.kappa * std::exp(-params.kappa * t) /
           total_probability(params.alpha, params.beta, params.g, params.kappa);
}

QuadratureResult<double> papd_integral(const SystemParams& params) {
    papd(0, params);  // parameter checks
    const double kappa = params.kappa;
    // In u = kappa t the density becomes papd(u / kappa) / kappa.
    auto f = [&](double u) { return papd(u / kappa, params) / kappa; };
    return integrate_adaptive<double>(f, 0.0, decay_times, 1e-12, 1e-14);
}

FeasibilityReport dark_count_threshold(const SystemParams& params) {
    if (!(params.kappa > 0)) throw DegenerateParams("kappa must be positive");
    if (!(params.dark_rate >= 0)) throw DegenerateParams("dark_rate must be nonnegative");
    FeasibilityReport r;
    r.p_tot_coefficient = p_tot_coefficient(params.g, params.kappa);
    if (r.p_tot_coefficient == 0) throw DegenerateParams("g = 0: no photon ever reaches the dark port");
    r.window = 1 / params.kappa;
    r.alpha_beta_sq = params.alpha_beta_sq();
    r.dark_rate = params.dark_rate;
    r.max_dark_rate = r.p_tot_coefficient * r.alpha_beta_sq * params.kappa;
    r.min_alpha_beta_sq = params.dark_rate / (r.p_tot_coefficient * params.kappa);
    r.feasible = r.dark_rate < r.max_dark_rate;
    return r;
}

double PapdCurve::time_of(double t_p) const { return two_pi * t_p / params_used.g; }

std::vector<double> tp_grid(double start, double stop, double step) {
    if (!(step > 0) || !(stop >= start)) throw InvalidParameter("t_p grid needs step > 0 and stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = start + static_cast<double>(i) * step;
    return grid;
}

PapdCurve papd_curve(double ratio, const std::vector<double>& tp, const SystemParams& base) {
    if (!(ratio > 0)) throw InvalidParameter("omega_m / kappa ratio must be positive");
    for (std::size_t i = 1; i < tp.size(); ++i)
        if (!(tp[i] > tp[i - 1])) throw InvalidParameter("t_p grid must be strictly increasing");
    PapdCurve c;
    c.ratio = ratio;
    c.params_used = base;
    c.params_used.kappa = base.omega_m / ratio;
    c.points.reserve(tp.size());
    for (double x : tp) c.points.push_back({x, papd(c.time_of(x), c.params_used)});
    return c;
}

std::vector<PapdCurve> papd_sweep(const std::vector<double>& ratios, const std::vector<double>& tp,
                                  const SystemParams& base) {
    std::vector<std::future<PapdCurve>> jobs;
    for (double r : ratios) jobs.push_back(std::async(std::launch::async, [&, r] { return papd_curve(r, tp, base); }));
    std::vector<PapdCurve> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

CurveFeatures curve_features(const PapdCurve& curve) {
    CurveFeatures f;
    const auto& p = curve.points;
    const double g = curve.params_used.g, kappa = curve.params_used.kappa;
    f.expected_peak_ratio = std::exp(-two_pi * kappa / g);
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const double y0 = p[i - 1].papd_per_s, y1 = p[i].papd_per_s, y2 = p[i + 1].papd_per_s;
        if (y1 < y0 && y1 <= y2) f.minima_tp.push_back(p[i].t_p);
        if (y1 > y0 && y1 >= y2) {
            // Vertex of the parabola through the three samples.
            const double h = p[i + 1].t_p - p[i].t_p;
            const double denom = y0 - 2 * y1 + y2;
            const double shift = denom != 0 ? 0.5 * h * (y0 - y2) / denom : 0.0;
            const double tp = p[i].t_p + shift;
            f.peak_tp.push_back(tp);
            f.peak_values.push_back(papd(curve.time_of(tp), curve.params_used));
        }
    }
    if (f.peak_values.size() >= 2) f.second_peak_ratio = f.peak_values[1] / f.peak_values[0];
    for (double v : f.peak_values)
        if (!f.peak_values.empty() && v >= 0.01 * f.peak_values.front()) ++f.visible_peaks;
    // Composite Simpson in t on the sampled grid (pairs of equal-width panels).
    for (std::size_t i = 0; i + 2 < p.size(); i += 2) {
        const double a = curve.time_of(p[i].t_p), b = curve.time_of(p[i + 2].t_p);
        f.sampled_integral += (b - a) / 6 * (p[i].papd_per_s + 4 * p[i + 1].papd_per_s + p[i + 2].papd_per_s);
    }
    return f;
}

void write_papd_csv(std::ostream& os, const std::vector<PapdCurve>& curves) {
    os << "ratio,t_p,papd_per_s,papd_dimensionless\n";
    for (const auto& c : curves)
        for (const auto& pt : c.points)
            os << shortest(c.ratio) << ',' << shortest(pt.t_p) << ',' << shortest(pt.papd_per_s) << ','
               << shortest(pt.papd_per_s / c.params_used.kappa) << '\n';
}

}  // namespace phecp

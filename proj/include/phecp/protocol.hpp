// protocol.hpp
// End-to-end concentration pipelines for phonon Bell pairs and n-party GHZ
// states, heralded remote-pair generation, and Monte Carlo runs with an
// optional dark-count model.
//
// Bell pipeline, register u1 u2 v1 v2 (Alice holds u1 v1, Bob u2 v2):
//   1. a photon through BS1 into cavities A/B, cross-Kerr on (A,u2) and
//      (B,v2), click at the dark port of BS2;
//   2. anti-Stokes transfer v1 -> C, v2 -> B;
//   3. Hadamard on C and B;
//   4. count photons; equal counts leave the minus state, fixed by a
//      pi phase on u1.
// The GHZ pipeline is the same with photons D/E, x/y registers and one
// transfer cavity per party; an even number of clicks calls for the fix.

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "phecp/fock.hpp"
#include "phecp/ops.hpp"

namespace phecp {

// All rates are angular frequencies in rad/s; dark_rate is in counts/s.
struct SystemParams {
    double omega_m = 2 * std::numbers::pi * 1e9;
    double delta = 0;
    double g = 3.33e-2 * 2 * std::numbers::pi * 1e9;
    double kappa = 2 * std::numbers::pi * 1e9 / 90;
    double G = 0;
    std::complex<double> alpha{1 / std::numbers::sqrt2};
    std::complex<double> beta{1 / std::numbers::sqrt2};
    double p_p = 1e-3;
    double dark_rate = 0;

    void validate() const;
    double alpha_beta_sq() const { return std::norm(alpha) * std::norm(beta); }
    CrossKerrParams<double> cross_kerr(double t) const { return {delta, omega_m, g, t}; }
};

enum class Pipeline { bell, ghz };
enum class Parity { same, different, odd, even };

const char* to_string(Pipeline p);
const char* to_string(Parity p);

struct NoiseModel {
    bool enabled = false;
    double dark_rate = 0;         // counts/s
    std::optional<double> window;  // s, defaults to 1/kappa

    double window_for(double kappa) const;
    double p_dark(double kappa) const;  // dark_rate * window, clamped to [0, 1]
};

struct EcpOptions {
    TransferMode<double> transfer = TransferMode<double>::ideal();
    int parties = 3;  // GHZ pipeline only; 2 gives the two-party reduction
};

// Herald probabilities below this count as "never": at gt in 2 pi Z the
// dark-port amplitude is pure rounding noise.
inline constexpr double herald_floor = 1e-20;

struct ProtocolReport {
    Pipeline pipeline = Pipeline::bell;
    bool heralded = false;
    bool false_herald = false;
    double herald_probability = 0;
    double analytic_probability = 0;
    std::vector<std::string> detector_modes;
    Occupation detector_outcomes;
    double outcome_probability = 0;  // conditional on the herald
    std::optional<Parity> parity;
    bool correction_applied = false;
    std::optional<FockVectord> pre_correction_state;
    std::optional<FockVectord> final_state;
    double target_fidelity = 0;
    std::optional<std::uint64_t> seed;
};

struct EcpEnumeration {
    Pipeline pipeline = Pipeline::bell;
    double herald_probability = 0;
    double analytic_probability = 0;
    double herald_fail_probability = 0;
    std::vector<ProtocolReport> outcomes;         // one per detector outcome
    std::map<Parity, double> class_probabilities;  // conditional on the herald
};

struct Exhaustive {};
inline constexpr Exhaustive exhaustive{};

// (|10> + |01>)/sqrt2 on (u1, u2).
FockVectord bell_target();
// (|0..0> + |1..1>)/sqrt2 on x1..xn.
FockVectord ghz_target(int parties = 3);

// The less-entangled inputs alpha|10> + beta|01> and alpha|0..0> + beta|1..1>.
FockVectord bell_input(const SystemParams& params, const std::string& first = "u1", const std::string& second = "u2");
FockVectord ghz_input(const SystemParams& params, const std::string& prefix = "x", int parties = 3);

// Step 1 only: probability that the dark port clicks, from the simulated
// state. Never throws HeraldFailed.
double step1_herald_probability(Pipeline pipeline, const SystemParams& params, double t,
                                const EcpOptions& options = {});

// Throws HeraldFailed if the dark port can never click.
EcpEnumeration run_bell_ecp(const SystemParams& params, double t, Exhaustive, const EcpOptions& options = {});
ProtocolReport run_bell_ecp(const SystemParams& params, double t, std::uint64_t seed, const EcpOptions& options = {});

EcpEnumeration run_ghz_ecp(const SystemParams& params, double t, Exhaustive, const EcpOptions& options = {});
ProtocolReport run_ghz_ecp(const SystemParams& params, double t, std::uint64_t seed, const EcpOptions& options = {});

enum class Detector { d6, d7 };
const char* to_string(Detector d);

struct RemoteBellReport {
    std::optional<Detector> detector;  // empty when a sampled run saw no single click
    bool second_order = false;
    HeraldResult<double> herald;       // exactly one photon at the detector, none at the other
    double click_probability = 0;      // threshold detector: >= 1 photon at the detector, none at the other
    double heralded_fidelity = 0;      // click-weighted fidelity to the target Bell state
    double target_fidelity = 0;        // fidelity of herald.state
    double first_order_probability = 0;  // p_p / (1 + 2 p_p)
    std::optional<std::uint64_t> seed;
};

// (|10> + |01>)/sqrt2 for D6, (|10> - |01>)/sqrt2 for D7, on (b1, b2).
FockVectord remote_bell_target(Detector d);

// Two weak blue-sideband nodes, BS5 on (c1, c2), herald on one detector.
// With second_order off the double-pair term is dropped, as in the
// first-order treatment; with it on both the cross term and each node's
// |2,2> term are kept.
RemoteBellReport generate_remote_bell(const SystemParams& params, Detector detector, bool second_order = false);
RemoteBellReport generate_remote_bell(const SystemParams& params, std::uint64_t seed, bool second_order = false);

struct MonteCarloStats {
    Pipeline pipeline = Pipeline::bell;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    NoiseModel noise;
    double p_dark = 0;
    std::size_t true_heralds = 0;
    std::size_t false_heralds = 0;
    double herald_rate = 0;         // (true + false) / trials
    double herald_rate_stderr = 0;
    double true_herald_rate = 0;
    double analytic_probability = 0;
    std::map<std::string, std::size_t> outcome_counts;  // true heralds only, keyed "101" etc.
    std::map<std::string, double> outcome_expected;     // exact conditional probabilities
    double mean_fidelity = 0;                // over true heralds
    double effective_heralded_fidelity = 0;  // over every herald, false ones included
    double false_herald_fidelity = 0;
};

// Trials run in parallel; each draws from its own stream derived from
// (seed, trial index), so the result does not depend on scheduling.
MonteCarloStats monte_carlo(Pipeline pipeline, const SystemParams& params, double t, std::size_t trials,
                            std::uint64_t seed, const NoiseModel& noise = {}, const EcpOptions& options = {});

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

}  // namespace phecp

#include "phecp/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "phecp/analysis.hpp"

namespace phecp {

void SystemParams::validate() const {
    const double n2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(n2 - 1) > 1e-12)
        throw NotNormalized("|alpha|^2 + |beta|^2 = " + std::to_string(n2) + ", expected 1");
    if (!(omega_m > 0)) throw InvalidParameter("omega_m must be positive");
    if (!(g >= 0) || !(kappa >= 0) || !(G >= 0)) throw InvalidParameter("g, kappa and G must be nonnegative");
    if (!std::isfinite(delta)) throw InvalidParameter("delta must be finite");
    if (!(p_p >= 0) || !(p_p < 1)) throw InvalidParameter("p_p must lie in [0, 1)");
    if (!(dark_rate >= 0)) throw InvalidParameter("dark_rate must be nonnegative");
}

const char* to_string(Pipeline p) { return p == Pipeline::bell ? "bell" : "ghz"; }

const char* to_string(Parity p) {
    switch (p) {
        case Parity::same: return "same";
        case Parity::different: return "different";
        case Parity::odd: return "odd";
        case Parity::even: return "even";
    }
    return "?";
}

const char* to_string(Detector d) { return d == Detector::d6 ? "D6" : "D7"; }

double NoiseModel::window_for(double kappa) const {
    if (window) return *window;
    if (!(kappa > 0)) throw DegenerateParams("dark-count window 1/kappa needs kappa > 0");
    return 1 / kappa;
}

double NoiseModel::p_dark(double kappa) const {
    if (!enabled) return 0;
    return std::clamp(dark_rate * window_for(kappa), 0.0, 1.0);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over the pair
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

using cd = std::complex<double>;

// Everything that distinguishes the Bell and GHZ pipelines.
struct Layout {
    Pipeline pipeline;
    FockVectord input;  // photon already split by the first beam splitter
    std::string photon_a, photon_b;
    std::vector<std::pair<std::string, std::string>> kerr_pairs;  // (cavity, resonator)
    std::vector<std::pair<std::string, ModeLabel>> transfers;     // (resonator, cavity)
    std::vector<std::string> measured;
    std::string correction_mode;
    FockVectord target;
    FockVectord unconcentrated;  // register content if no projection happened
};

Owner party_owner(int j) {
    switch (j) {
        case 1: return Owner::alice;
        case 2: return Owner::bob;
        case 3: return Owner::charlie;
        default: return Owner::none;
    }
}

FockVectord split_photon(const std::string& a, const std::string& b) {
    ModeRegistry photons{optical(a, Owner::bob), optical(b, Owner::bob)};
    return beam_splitter(basis_state<double>(photons, {1, 0}), a, b);
}

Layout bell_layout(const SystemParams& p) {
    auto u = bell_input(p, "u1", "u2");
    auto v = bell_input(p, "v1", "v2");
    return Layout{Pipeline::bell,
                  tensor(tensor(split_photon("A", "B"), u), v),
                  "A",
                  "B",
                  {{"A", "u2"}, {"B", "v2"}},
                  {{"v1", optical("C", Owner::alice)}, {"v2", optical("B", Owner::bob)}},
                  {"C", "B"},
                  "u1",
                  bell_target(),
                  u};
}

std::string cavity_name(int party) {
    // Alice, Bob, Charlie own cavities F, E, G.
    switch (party) {
        case 1: return "F";
        case 2: return "E";
        case 3: return "G";
        default: return "c" + std::to_string(party);
    }
}

Layout ghz_layout(const SystemParams& p, int parties) {
    if (parties < 2 || parties > 6) throw InvalidParameter("GHZ pipeline supports 2 to 6 parties");
    auto x = ghz_input(p, "x", parties);
    auto y = ghz_input(p, "y", parties);
    std::vector<std::pair<std::string, ModeLabel>> transfers;
    std::vector<std::string> measured;
    for (int j = 1; j <= parties; ++j) {
        transfers.push_back({"y" + std::to_string(j), optical(cavity_name(j), party_owner(j))});
        measured.push_back(cavity_name(j));
    }
    return Layout{Pipeline::ghz,
                  tensor(tensor(split_photon("D", "E"), x), y),
                  "D",
                  "E",
                  {{"D", "x2"}, {"E", "y2"}},
                  std::move(transfers),
                  std::move(measured),
                  "x1",
                  ghz_target(parties),
                  x};
}

FockVectord evolve(const Layout& l, const SystemParams& p, double t) {
    FockVectord s = l.input;
    for (const auto& [cav, mech] : l.kerr_pairs) s = cross_kerr_evolve(s, cav, mech, p.cross_kerr(t));
    return s;
}

// Steps 2-3: phonons to photons, then a Hadamard on every photon.
FockVectord transfer_and_rotate(const Layout& l, const FockVectord& heralded, const EcpOptions& opt) {
    ModeRegistry cavities;
    for (const auto& [mech, cav] : l.transfers) cavities.add(cav);
    FockVectord s = tensor(heralded, vacuum<double>(cavities, heralded.cutoff()));
    std::vector<std::string> emptied;
    for (const auto& [mech, cav] : l.transfers) {
        s = anti_stokes_transfer(s, mech, cav.name, opt.transfer);
        emptied.push_back(mech);
    }
    if (opt.transfer.complete()) s = drop_vacuum_modes(s, std::span<const std::string>(emptied));
    for (const auto& m : l.measured) s = hadamard_photon(s, m);
    return s;
}

Parity parity_of(Pipeline pipeline, const Occupation& outcome) {
    const int ones = static_cast<int>(std::count(outcome.begin(), outcome.end(), 1));
    if (pipeline == Pipeline::bell) return ones == 1 ? Parity::different : Parity::same;
    return ones % 2 ? Parity::odd : Parity::even;
}

bool needs_correction(Parity parity) { return parity == Parity::same || parity == Parity::even; }

// Step 4 bookkeeping for one detector outcome.
void finish(const Layout& l, const Occupation& outcome, const HeraldResult<double>& collapsed, ProtocolReport& r) {
    r.detector_modes = l.measured;
    r.detector_outcomes = outcome;
    r.outcome_probability = collapsed.probability;
    r.parity = parity_of(l.pipeline, outcome);
    if (!collapsed.heralded()) return;
    r.pre_correction_state = *collapsed.state;
    r.correction_applied = needs_correction(*r.parity);
    r.final_state = r.correction_applied ? pi_phase(*collapsed.state, l.correction_mode) : *collapsed.state;
    // An incomplete transfer leaves resonator modes behind; score the
    // reduced state of the target modes then.
    r.target_fidelity = r.final_state->same_modes(l.target) ? fidelity(*r.final_state, l.target)
                                                            : project(*r.final_state, l.target).probability;
}

EcpEnumeration enumerate(const Layout& l, const SystemParams& p, double t, const EcpOptions& opt) {
    p.validate();
    if (!(t >= 0)) throw InvalidParameter("interaction time must be nonnegative");
    EcpEnumeration e;
    e.pipeline = l.pipeline;
    e.analytic_probability = success_probability(p.alpha, p.beta, p.g, t);
    auto herald = dark_port_postselect(evolve(l, p, t), l.photon_a, l.photon_b);
    e.herald_probability = herald.probability;
    e.herald_fail_probability = 1 - herald.probability;
    if (!herald.heralded() || herald.probability < herald_floor)
        throw HeraldFailed("the dark port cannot click (herald probability " + std::to_string(herald.probability) +
                           ")");
    auto pre = transfer_and_rotate(l, *herald.state, opt);
    for (const auto& [outcome, prob] : outcome_distribution(pre, std::span<const std::string>(l.measured))) {
        ProtocolReport r;
        r.pipeline = l.pipeline;
        r.heralded = true;
        r.herald_probability = e.herald_probability;
        r.analytic_probability = e.analytic_probability;
        finish(l, outcome, project_outcome(pre, std::span<const std::string>(l.measured), outcome), r);
        e.class_probabilities[*r.parity] += r.outcome_probability;
        e.outcomes.push_back(std::move(r));
    }
    return e;
}

// Sampled run: the dark-port click is drawn by measuring both outputs of
// the second beam splitter, whose second output is the dark port.
struct SampledStages {
    FockVectord after_bs2;
    std::vector<std::string> ports;
    Occupation dark_click{0, 1};
};

SampledStages sampled_stages(const Layout& l, const SystemParams& p, double t) {
    return {beam_splitter(evolve(l, p, t), l.photon_a, l.photon_b), {l.photon_a, l.photon_b}};
}

ProtocolReport sample_run(const Layout& l, const SystemParams& p, double t, std::uint64_t seed,
                          const EcpOptions& opt) {
    p.validate();
    if (!(t >= 0)) throw InvalidParameter("interaction time must be nonnegative");
    std::mt19937_64 rng(seed);
    ProtocolReport r;
    r.pipeline = l.pipeline;
    r.seed = seed;
    r.analytic_probability = success_probability(p.alpha, p.beta, p.g, t);
    auto stages = sampled_stages(l, p, t);
    MeasurementSampler<double> ports(stages.after_bs2, stages.ports);
    for (const auto& [occ, prob] : ports.distribution())
        if (occ == stages.dark_click) r.herald_probability = prob;
    auto click = ports.sample(rng);
    if (click.outcome != stages.dark_click || r.herald_probability < herald_floor) return r;
    r.heralded = true;
    auto pre = transfer_and_rotate(l, *click.herald.state, opt);
    auto m = sample_measurement(pre, l.measured, rng);
    finish(l, m.outcome, m.herald, r);
    return r;
}

std::string outcome_key(const Occupation& o) {
    std::string s;
    for (int n : o) s += std::to_string(n);
    return s;
}

}  // namespace

FockVectord bell_target() {
    ModeRegistry reg{mechanical("u1", Owner::alice), mechanical("u2", Owner::bob)};
    return make_state<double>(reg, {{{1, 0}, cd(1)}, {{0, 1}, cd(1)}});
}

FockVectord ghz_target(int parties) {
    ModeRegistry reg;
    for (int j = 1; j <= parties; ++j) reg.add(mechanical("x" + std::to_string(j), party_owner(j)));
    return make_state<double>(reg, {{Occupation(parties, 0), cd(1)}, {Occupation(parties, 1), cd(1)}});
}

FockVectord bell_input(const SystemParams& params, const std::string& first, const std::string& second) {
    ModeRegistry reg{mechanical(first, Owner::alice), mechanical(second, Owner::bob)};
    return make_state<double>(reg, {{{1, 0}, params.alpha}, {{0, 1}, params.beta}});
}

FockVectord ghz_input(const SystemParams& params, const std::string& prefix, int parties) {
    ModeRegistry reg;
    for (int j = 1; j <= parties; ++j) reg.add(mechanical(prefix + std::to_string(j), party_owner(j)));
    return make_state<double>(reg, {{Occupation(parties, 0), params.alpha}, {Occupation(parties, 1), params.beta}});
}

double step1_herald_probability(Pipeline pipeline, const SystemParams& params, double t, const EcpOptions& options) {
    params.validate();
    if (!(t >= 0)) throw InvalidParameter("interaction time must be nonnegative");
    const Layout l = pipeline == Pipeline::bell ? bell_layout(params) : ghz_layout(params, options.parties);
    return dark_port_postselect(evolve(l, params, t), l.photon_a, l.photon_b).probability;
}

EcpEnumeration run_bell_ecp(const SystemParams& params, double t, Exhaustive, const EcpOptions& options) {
    params.validate();
    return enumerate(bell_layout(params), params, t, options);
}

ProtocolReport run_bell_ecp(const SystemParams& params, double t, std::uint64_t seed, const EcpOptions& options) {
    params.validate();
    return sample_run(bell_layout(params), params, t, seed, options);
}

EcpEnumeration run_ghz_ecp(const SystemParams& params, double t, Exhaustive, const EcpOptions& options) {
    params.validate();
    return enumerate(ghz_layout(params, options.parties), params, t, options);
}

ProtocolReport run_ghz_ecp(const SystemParams& params, double t, std::uint64_t seed, const EcpOptions& options) {
    params.validate();
    return sample_run(ghz_layout(params, options.parties), params, t, seed, options);
}

FockVectord remote_bell_target(Detector d) {
    ModeRegistry reg{mechanical("b1", Owner::alice), mechanical("b2", Owner::bob)};
    return make_state<double>(reg, {{{1, 0}, cd(1)}, {{0, 1}, cd(d == Detector::d6 ? 1.0 : -1.0)}});
}

namespace {

FockVectord remote_bell_outputs(const SystemParams& params, bool second_order) {
    params.validate();
    if (params.p_p > 0.1) throw InvalidParameter("remote Bell generation needs p_p <= 0.1");
    // Second order keeps |2,2> per node, so the beam splitter may see up to four photons.
    const int cutoff = second_order ? 4 : default_cutoff;
    ModeRegistry reg{optical("c1", Owner::alice), mechanical("b1", Owner::alice), optical("c2", Owner::bob),
                     mechanical("b2", Owner::bob)};
    auto s = vacuum<double>(reg, cutoff);
    s = two_mode_squeeze_weak(s, "c1", "b1", params.p_p, second_order);
    s = two_mode_squeeze_weak(s, "c2", "b2", params.p_p, second_order);
    if (!second_order) {
        // First order: drop the double-pair term p c1'b1'c2'b2'|0>.
        const auto i1 = s.index("c1"), i2 = s.index("c2");
        auto amps = s.amplitudes();
        std::erase_if(amps, [&](const auto& kv) { return s.occupation(kv.first, i1) + s.occupation(kv.first, i2) > 1; });
        s = FockVectord::from_unnormalized(s.modes(), cutoff, std::move(amps));
    }
    return beam_splitter(s, "c1", "c2");
}

RemoteBellReport remote_bell_report(const FockVectord& outputs, Detector d, bool second_order, double p_p) {
    RemoteBellReport r;
    r.detector = d;
    r.second_order = second_order;
    r.first_order_probability = p_p / (1 + 2 * p_p);
    const std::vector<std::string> ports{"c1", "c2"};
    const std::size_t hit = d == Detector::d6 ? 0 : 1;
    r.herald = project_outcome(outputs, std::span<const std::string>(ports), hit == 0 ? Occupation{1, 0} : Occupation{0, 1});
    const auto target = remote_bell_target(d);
    if (r.herald.heralded()) r.target_fidelity = fidelity(*r.herald.state, target);
    double weighted = 0;
    for (const auto& [occ, prob] : outcome_distribution(outputs, std::span<const std::string>(ports))) {
        if (occ[hit] < 1 || occ[1 - hit] != 0) continue;
        r.click_probability += prob;
        auto branch = project_outcome(outputs, std::span<const std::string>(ports), occ);
        if (branch.heralded()) weighted += prob * fidelity(*branch.state, target);
    }
    r.heralded_fidelity = r.click_probability > 0 ? weighted / r.click_probability : 0.0;
    return r;
}

}  // namespace

RemoteBellReport generate_remote_bell(const SystemParams& params, Detector detector, bool second_order) {
    return remote_bell_report(remote_bell_outputs(params, second_order), detector, second_order, params.p_p);
}

RemoteBellReport generate_remote_bell(const SystemParams& params, std::uint64_t seed, bool second_order) {
    auto outputs = remote_bell_outputs(params, second_order);
    std::mt19937_64 rng(seed);
    MeasurementSampler<double> sampler(outputs, {"c1", "c2"});
    const auto& occ = sampler.distribution()[sampler.sample_index(rng)].first;
    RemoteBellReport r;
    if (occ[0] >= 1 && occ[1] == 0) r = remote_bell_report(outputs, Detector::d6, second_order, params.p_p);
    else if (occ[1] >= 1 && occ[0] == 0) r = remote_bell_report(outputs, Detector::d7, second_order, params.p_p);
    else {
        r.second_order = second_order;
        r.first_order_probability = params.p_p / (1 + 2 * params.p_p);
    }
    r.seed = seed;
    return r;
}

MonteCarloStats monte_carlo(Pipeline pipeline, const SystemParams& params, double t, std::size_t trials,
                            std::uint64_t seed, const NoiseModel& noise, const EcpOptions& options) {
    if (trials == 0) throw InvalidParameter("monte carlo needs at least one trial");
    params.validate();
    if (!(t >= 0)) throw InvalidParameter("interaction time must be nonnegative");
    const Layout l = pipeline == Pipeline::bell ? bell_layout(params) : ghz_layout(params, options.parties);

    MonteCarloStats st;
    st.pipeline = pipeline;
    st.trials = trials;
    st.seed = seed;
    st.noise = noise;
    st.p_dark = noise.p_dark(params.kappa);
    st.analytic_probability = success_probability(params.alpha, params.beta, params.g, t);
    st.false_herald_fidelity = fidelity(l.unconcentrated, l.target);

    // Deterministic stages are computed once; trials only draw outcomes.
    auto stages = sampled_stages(l, params, t);
    MeasurementSampler<double> ports(stages.after_bs2, stages.ports);
    std::size_t dark_index = ports.distribution().size();
    for (std::size_t i = 0; i < ports.distribution().size(); ++i)
        if (ports.distribution()[i].first == stages.dark_click && ports.distribution()[i].second >= herald_floor)
            dark_index = i;

    std::optional<MeasurementSampler<double>> detectors;
    std::vector<double> branch_fidelity;
    std::vector<std::string> branch_key;
    if (dark_index < ports.distribution().size()) {
        auto click = ports.collapse(dark_index);
        detectors.emplace(transfer_and_rotate(l, *click.herald.state, options), l.measured);
        for (std::size_t b = 0; b < detectors->distribution().size(); ++b) {
            const auto& [occ, prob] = detectors->distribution()[b];
            ProtocolReport r;
            r.pipeline = pipeline;
            finish(l, occ, detectors->collapse(b).herald, r);
            branch_fidelity.push_back(r.target_fidelity);
            branch_key.push_back(outcome_key(occ));
            st.outcome_expected[branch_key.back()] = prob;
        }
    }

    struct Partial {
        std::size_t true_heralds = 0, false_heralds = 0;
        std::vector<std::size_t> counts;
        double fidelity_sum = 0;
    };
    constexpr std::size_t chunk = 4096;
    const std::size_t nchunks = (trials + chunk - 1) / chunk;
    std::vector<Partial> partials(nchunks);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t c; (c = next.fetch_add(1)) < nchunks;) {
            Partial& part = partials[c];
            part.counts.assign(branch_fidelity.size(), 0);
            const std::size_t end = std::min(trials, (c + 1) * chunk);
            for (std::size_t i = c * chunk; i < end; ++i) {
                std::mt19937_64 rng(trial_seed(seed, i));
                if (ports.sample_index(rng) == dark_index) {
                    const std::size_t b = detectors->sample_index(rng);
                    ++part.true_heralds;
                    ++part.counts[b];
                    part.fidelity_sum += branch_fidelity[b];
                } else if (st.p_dark > 0 && uniform01(rng) < st.p_dark) {
                    ++part.false_heralds;
                }
            }
        }
    };
    const std::size_t nthreads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, nchunks);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    double fidelity_sum = 0;
    std::vector<std::size_t> counts(branch_fidelity.size(), 0);
    for (const auto& part : partials) {
        st.true_heralds += part.true_heralds;
        st.false_heralds += part.false_heralds;
        fidelity_sum += part.fidelity_sum;
        for (std::size_t b = 0; b < counts.size(); ++b) counts[b] += part.counts[b];
    }
    for (std::size_t b = 0; b < counts.size(); ++b) st.outcome_counts[branch_key[b]] = counts[b];

    const double n = static_cast<double>(trials);
    const std::size_t heralds = st.true_heralds + st.false_heralds;
    st.herald_rate = static_cast<double>(heralds) / n;
    st.true_herald_rate = static_cast<double>(st.true_heralds) / n;
    st.herald_rate_stderr = std::sqrt(st.herald_rate * (1 - st.herald_rate) / n);
    st.mean_fidelity = st.true_heralds ? fidelity_sum / static_cast<double>(st.true_heralds) : 0.0;
    st.effective_heralded_fidelity =
        heralds ? (fidelity_sum + static_cast<double>(st.false_heralds) * st.false_herald_fidelity) /
                      static_cast<double>(heralds)
                : 0.0;
    return st;
}

}  // namespace phecp

#include "phecp/serialize.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include "phecp/errors.hpp"

namespace phecp {

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

namespace {

std::string outcome_string(const Occupation& occ) {
    std::string s;
    for (int n : occ) s += std::to_string(n);
    return s;
}

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

template <typename T>
const Json& field(const Json& j, const char* name) {
    if (!j.contains(name)) throw ParseError(std::string("state JSON: missing \"") + name + "\"");
    const Json& v = j.at(name);
    bool ok = false;
    if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
    else if constexpr (std::is_same_v<T, int>) ok = v.is_number_integer();
    else ok = v.is_array();
    if (!ok) throw ParseError(std::string("state JSON: \"") + name + "\" has the wrong type");
    return v;
}

}  // namespace

Json state_to_json(const FockVectord& state) {
    Json modes = Json::array();
    for (const auto& m : state.modes())
        modes.push_back({{"name", m.name}, {"kind", to_string(m.kind)}, {"owner", to_string(m.owner)}});
    Json amps = Json::array();
    for (const auto& [key, a] : state) amps.push_back(Json::array({state.unpack(key), a.real(), a.imag()}));
    return {{"modes", modes}, {"cutoff", state.cutoff()}, {"amplitudes", amps}};
}

FockVectord state_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("state JSON must be an object");
    std::vector<ModeLabel> modes;
    for (const auto& m : field<Json>(j, "modes")) {
        if (!m.is_object()) throw ParseError("state JSON: mode entries must be objects");
        try {
            modes.push_back({field<std::string>(m, "name").get<std::string>(),
                             mode_kind_from_string(field<std::string>(m, "kind").get<std::string>()),
                             owner_from_string(field<std::string>(m, "owner").get<std::string>())});
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(std::string("state JSON: ") + e.what());
        }
    }
    const int cutoff = field<int>(j, "cutoff").get<int>();
    if (cutoff < 1 || cutoff > max_cutoff) throw ParseError("state JSON: cutoff out of range");
    FockVectord::AmplitudeMap amps;
    for (const auto& entry : field<Json>(j, "amplitudes")) {
        if (!entry.is_array() || entry.size() != 3 || !entry[0].is_array() || !entry[1].is_number() ||
            !entry[2].is_number())
            throw ParseError("state JSON: amplitudes must be [[occupations], re, im]");
        if (entry[0].size() != modes.size()) throw ParseError("state JSON: occupation length differs from mode count");
        FockVectord::Key key = 0;
        for (const auto& n : entry[0]) {
            if (!n.is_number_integer() || n.get<int>() < 0 || n.get<int>() > cutoff)
                throw ParseError("state JSON: occupation outside [0, cutoff]");
            key = (key << 4) | FockVectord::Key(n.get<int>());
        }
        if (!amps.emplace(key, std::complex<double>(entry[1].get<double>(), entry[2].get<double>())).second)
            throw ParseError("state JSON: repeated occupation");
    }
    return FockVectord::from_normalized(std::move(modes), cutoff, std::move(amps));
}

std::string state_to_text(const FockVectord& state) {
    std::string out;
    for (const auto& [key, a] : state) {
        if (!out.empty()) out += " + ";
        if (a.imag() == 0) out += format_double(a.real());
        else out += "(" + format_double(a.real()) + (a.imag() < 0 ? "" : "+") + format_double(a.imag()) + "i)";
        out += "|" + outcome_string(state.unpack(key)) + ">";
    }
    out += "  [";
    for (std::size_t i = 0; i < state.num_modes(); ++i) out += (i ? " " : "") + state.modes()[i].name;
    return out + "]";
}

Json to_json(const SystemParams& p) {
    return {{"omega_m", p.omega_m}, {"delta", p.delta},         {"g", p.g},
            {"kappa", p.kappa},     {"G", p.G},                 {"alpha", complex_json(p.alpha)},
            {"beta", complex_json(p.beta)}, {"p_p", p.p_p},     {"dark_rate", p.dark_rate}};
}

Json to_json(const NoiseModel& n) {
    Json j{{"enabled", n.enabled}, {"dark_rate", n.dark_rate}};
    j["window"] = n.window ? Json(*n.window) : Json(nullptr);
    return j;
}

Json to_json(const ProtocolReport& r) {
    Json j;
    j["pipeline"] = to_string(r.pipeline);
    j["heralded"] = r.heralded;
    j["false_herald"] = r.false_herald;
    j["herald_probability"] = r.herald_probability;
    j["analytic_probability"] = r.analytic_probability;
    j["detector_modes"] = r.detector_modes;
    j["detector_outcomes"] = r.detector_outcomes;
    j["outcome_probability"] = r.outcome_probability;
    j["parity"] = r.parity ? Json(to_string(*r.parity)) : Json(nullptr);
    j["correction_applied"] = r.correction_applied;
    j["pre_correction_state"] = r.pre_correction_state ? state_to_json(*r.pre_correction_state) : Json(nullptr);
    j["final_state"] = r.final_state ? state_to_json(*r.final_state) : Json(nullptr);
    j["target_fidelity"] = r.target_fidelity;
    j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
    return j;
}

Json to_json(const EcpEnumeration& e) {
    Json classes = Json::object();
    for (const auto& [parity, p] : e.class_probabilities) classes[to_string(parity)] = p;
    Json outcomes = Json::array();
    for (const auto& r : e.outcomes) outcomes.push_back(to_json(r));
    return {{"pipeline", to_string(e.pipeline)},
            {"herald_probability", e.herald_probability},
            {"analytic_probability", e.analytic_probability},
            {"herald_fail_probability", e.herald_fail_probability},
            {"class_probabilities", classes},
            {"outcomes", outcomes}};
}

Json to_json(const RemoteBellReport& r) {
    Json j;
    j["detector"] = r.detector ? Json(to_string(*r.detector)) : Json(nullptr);
    j["second_order"] = r.second_order;
    j["herald_probability"] = r.herald.probability;
    j["click_probability"] = r.click_probability;
    j["first_order_probability"] = r.first_order_probability;
    j["heralded_fidelity"] = r.heralded_fidelity;
    j["target_fidelity"] = r.target_fidelity;
    j["state"] = r.herald.state ? state_to_json(*r.herald.state) : Json(nullptr);
    j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
    return j;
}

Json to_json(const MonteCarloStats& s) {
    Json outcomes = Json::array();
    for (const auto& [key, expected] : s.outcome_expected) {
        const auto it = s.outcome_counts.find(key);
        const std::size_t count = it == s.outcome_counts.end() ? 0 : it->second;
        outcomes.push_back({{"outcome", key},
                            {"count", count},
                            {"frequency", s.true_heralds ? double(count) / double(s.true_heralds) : 0.0},
                            {"expected", expected}});
    }
    return {{"pipeline", to_string(s.pipeline)},
            {"trials", s.trials},
            {"seed", s.seed},
            {"noise", to_json(s.noise)},
            {"p_dark", s.p_dark},
            {"true_heralds", s.true_heralds},
            {"false_heralds", s.false_heralds},
            {"herald_rate", s.herald_rate},
            {"herald_rate_stderr", s.herald_rate_stderr},
            {"true_herald_rate", s.true_herald_rate},
            {"analytic_probability", s.analytic_probability},
            {"mean_fidelity", s.mean_fidelity},
            {"effective_heralded_fidelity", s.effective_heralded_fidelity},
            {"false_herald_fidelity", s.false_herald_fidelity},
            {"outcomes", outcomes}};
}

Json to_json(const FeasibilityReport& f) {
    return {{"p_tot_coefficient", f.p_tot_coefficient}, {"window", f.window},
            {"max_dark_rate", f.max_dark_rate},         {"min_alpha_beta_sq", f.min_alpha_beta_sq},
            {"alpha_beta_sq", f.alpha_beta_sq},         {"dark_rate", f.dark_rate},
            {"feasible", f.feasible}};
}

Json to_json(const CurveFeatures& f) {
    return {{"minima_tp", f.minima_tp},
            {"peak_tp", f.peak_tp},
            {"peak_values", f.peak_values},
            {"expected_peak_ratio", f.expected_peak_ratio},
            {"second_peak_ratio", f.second_peak_ratio},
            {"visible_peaks", f.visible_peaks},
            {"sampled_integral", f.sampled_integral}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_enumeration_csv(std::ostream& os, const EcpEnumeration& e) {
    os << "outcome,probability,parity,correction_applied,target_fidelity\n";
    for (const auto& r : e.outcomes)
        os << outcome_string(r.detector_outcomes) << ',' << format_double(r.outcome_probability) << ','
           << (r.parity ? to_string(*r.parity) : "") << ',' << (r.correction_applied ? "true" : "false") << ','
           << format_double(r.target_fidelity) << '\n';
}

void write_montecarlo_csv(std::ostream& os, const MonteCarloStats& s) {
    os << "outcome,count,frequency,expected\n";
    for (const auto& [key, expected] : s.outcome_expected) {
        const auto it = s.outcome_counts.find(key);
        const std::size_t count = it == s.outcome_counts.end() ? 0 : it->second;
        os << key << ',' << count << ','
           << format_double(s.true_heralds ? double(count) / double(s.true_heralds) : 0.0) << ','
           << format_double(expected) << '\n';
    }
}

}  // namespace phecp

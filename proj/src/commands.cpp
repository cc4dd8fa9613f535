#include "phecp/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "phecp/analysis.hpp"
#include "phecp/errors.hpp"
#include "phecp/protocol.hpp"

namespace phecp {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

Json config_json(const RunConfig& c) {
    Json j;
    j["params"] = to_json(c.params);
    j["gt"] = c.gt ? Json(*c.gt) : Json(nullptr);
    j["t"] = c.t;
    j["seed"] = c.seed;
    j["exhaustive"] = c.exhaustive;
    j["input_norm_sq"] = c.input_norm_sq;
    j["renormalized"] = c.renormalized;
    return j;
}

Json envelope(const RunConfig& c, Json result) {
    return {{"command", to_string(c.command)}, {"config", config_json(c)}, {"result", std::move(result)}};
}

const char* transfer_name(const EcpOptions& o) {
    return o.transfer.variant == TransferMode<double>::Variant::ideal_map ? "ideal" : "unitary";
}

CommandOutput concentration(const RunConfig& c, Pipeline pipeline) {
    CommandOutput o;
    const char* name = to_string(pipeline);
    if (c.exhaustive) {
        auto e = pipeline == Pipeline::bell ? run_bell_ecp(c.params, c.t, exhaustive, c.options)
                                            : run_ghz_ecp(c.params, c.t, exhaustive, c.options);
        Json r = to_json(e);
        r["transfer"] = transfer_name(c.options);
        if (pipeline == Pipeline::ghz) r["parties"] = c.options.parties;
        o.json = envelope(c, std::move(r));
        std::ostringstream csv;
        write_enumeration_csv(csv, e);
        o.csv = csv.str();
        double worst = 1;
        for (const auto& r : e.outcomes) worst = std::min(worst, r.target_fidelity);
        o.summary = std::string(name) + ": herald probability " + fmt(e.herald_probability) + " (closed form " +
                    fmt(e.analytic_probability) + "), " + std::to_string(e.outcomes.size()) +
                    " outcomes, lowest fidelity " + fmt(worst);
        return o;
    }
    auto r = pipeline == Pipeline::bell ? run_bell_ecp(c.params, c.t, c.seed, c.options)
                                        : run_ghz_ecp(c.params, c.t, c.seed, c.options);
    Json j = to_json(r);
    j["transfer"] = transfer_name(c.options);
    if (pipeline == Pipeline::ghz) j["parties"] = c.options.parties;
    o.json = envelope(c, std::move(j));
    EcpEnumeration single;
    single.pipeline = pipeline;
    if (r.heralded) single.outcomes.push_back(r);
    std::ostringstream csv;
    write_enumeration_csv(csv, single);
    o.csv = csv.str();
    if (!r.heralded) {
        o.exit_code = exit_herald_failed;
        o.summary = std::string(name) + ": no dark-port click (herald probability " + fmt(r.herald_probability) +
                    ", seed " + std::to_string(c.seed) + ")";
        return o;
    }
    std::string outcome;
    for (int n : r.detector_outcomes) outcome += std::to_string(n);
    o.summary = std::string(name) + ": heralded, outcome " + outcome + " (" + to_string(*r.parity) + "), " +
                (r.correction_applied ? "pi phase applied, " : "") + "fidelity " + fmt(r.target_fidelity);
    return o;
}

CommandOutput generate(const RunConfig& c) {
    CommandOutput o;
    std::vector<RemoteBellReport> reports;
    if (c.exhaustive) {
        reports.push_back(generate_remote_bell(c.params, Detector::d6, c.second_order));
        reports.push_back(generate_remote_bell(c.params, Detector::d7, c.second_order));
    } else if (c.detector == DetectorChoice::sample) {
        reports.push_back(generate_remote_bell(c.params, c.seed, c.second_order));
    } else {
        const auto d = c.detector == DetectorChoice::d6 ? Detector::d6 : Detector::d7;
        reports.push_back(generate_remote_bell(c.params, d, c.second_order));
    }
    Json list = Json::array();
    std::ostringstream csv;
    csv << "detector,herald_probability,click_probability,first_order_probability,heralded_fidelity,"
           "target_fidelity\n";
    for (const auto& r : reports) {
        list.push_back(to_json(r));
        csv << (r.detector ? to_string(*r.detector) : "") << ',' << format_double(r.herald.probability) << ','
            << format_double(r.click_probability) << ',' << format_double(r.first_order_probability) << ','
            << format_double(r.heralded_fidelity) << ',' << format_double(r.target_fidelity) << '\n';
    }
    o.json = envelope(c, {{"p_p", c.params.p_p}, {"second_order", c.second_order}, {"reports", list}});
    o.csv = csv.str();
    const auto& first = reports.front();
    if (!first.detector) {
        o.exit_code = exit_herald_failed;
        o.summary = "generate: no single-detector click (seed " + std::to_string(c.seed) + ")";
        return o;
    }
    o.summary = std::string("generate: ") + to_string(*first.detector) + " herald probability " +
                fmt(first.herald.probability) + ", heralded fidelity " + fmt(first.heralded_fidelity) +
                (c.second_order ? " (second order)" : " (first order)");
    return o;
}

CommandOutput papd_command(const RunConfig& c) {
    CommandOutput o;
    const auto grid = tp_grid(0, c.tp_max, c.tp_step);
    const auto curves = papd_sweep(c.ratios, grid, c.params);
    Json list = Json::array();
    std::string visible;
    for (const auto& curve : curves) {
        const auto features = curve_features(curve);
        const auto check = total_probability_check(c.params.alpha, c.params.beta, curve.params_used.g,
                                                   curve.params_used.kappa);
        Json points = Json::array();
        for (const auto& pt : curve.points)
            points.push_back(Json::array({pt.t_p, pt.papd_per_s, pt.papd_per_s / curve.params_used.kappa}));
        list.push_back({{"ratio", curve.ratio},
                        {"kappa", curve.params_used.kappa},
                        {"p_tot_coefficient", p_tot_coefficient(curve.params_used.g, curve.params_used.kappa)},
                        {"total_probability", check.closed_form},
                        {"total_probability_quadrature", check.quadrature.value},
                        {"quadrature_relative_error", check.relative_error},
                        {"papd_integral", papd_integral(curve.params_used).value},
                        {"features", to_json(features)},
                        {"points", points}});
        visible += (visible.empty() ? "" : ", ") + fmt(curve.ratio) + ": " + std::to_string(features.visible_peaks);
    }
    Json result{{"t_p_max", c.tp_max}, {"t_p_step", c.tp_step}, {"curves", list}};
    if (c.params.kappa > 0) result["feasibility"] = to_json(dark_count_threshold(c.params));
    o.json = envelope(c, std::move(result));
    std::ostringstream csv;
    write_papd_csv(csv, curves);
    o.csv = csv.str();
    o.summary = "papd: " + std::to_string(curves.size()) + " curves x " + std::to_string(grid.size()) +
                " points; visible peaks per ratio {" + visible + "}";
    return o;
}

CommandOutput sweep(const RunConfig& c) {
    CommandOutput o;
    Json points = Json::array();
    std::ostringstream csv;
    csv << "alpha_sq,gt,simulated,closed_form,abs_error\n";
    double worst = 0;
    std::size_t n = 0;
    for (double a2 : c.sweep_alpha_sq)
        for (double gt : c.sweep_gt) {
            SystemParams p = c.params;
            p.alpha = std::sqrt(a2);
            p.beta = std::sqrt(1 - a2);
            const double t = gt / p.g;
            const double sim = step1_herald_probability(Pipeline::bell, p, t, c.options);
            const double exact = success_probability(p.alpha, p.beta, p.g, t);
            const double err = std::abs(sim - exact);
            worst = std::max(worst, err);
            ++n;
            points.push_back({{"alpha_sq", a2}, {"gt", gt}, {"simulated", sim}, {"closed_form", exact},
                              {"abs_error", err}});
            csv << format_double(a2) << ',' << format_double(gt) << ',' << format_double(sim) << ','
                << format_double(exact) << ',' << format_double(err) << '\n';
        }
    o.json = envelope(c, {{"points", points}, {"max_abs_error", worst}});
    o.csv = csv.str();
    o.summary = "sweep: " + std::to_string(n) + " points, max |simulated - closed form| = " + fmt(worst);
    return o;
}

CommandOutput montecarlo(const RunConfig& c) {
    CommandOutput o;
    const auto s = monte_carlo(c.pipeline, c.params, c.t, c.trials, c.seed, c.noise, c.options);
    Json r = to_json(s);
    r["transfer"] = transfer_name(c.options);
    if (c.pipeline == Pipeline::ghz) r["parties"] = c.options.parties;
    o.json = envelope(c, std::move(r));
    std::ostringstream csv;
    write_montecarlo_csv(csv, s);
    o.csv = csv.str();
    o.summary = std::string("montecarlo ") + to_string(s.pipeline) + ": herald rate " + fmt(s.herald_rate) +
                " +- " + fmt(s.herald_rate_stderr) + " (closed form " + fmt(s.analytic_probability) + "), " +
                std::to_string(s.false_heralds) + " false heralds, effective fidelity " +
                fmt(s.effective_heralded_fidelity);
    return o;
}

int run_as(Command command, RunConfig config, std::ostream& out, std::ostream& err) {
    config.command = command;
    return run_command(config, out, err);
}

}  // namespace

CommandOutput execute(const RunConfig& c) {
    switch (c.command) {
        case Command::bell: return concentration(c, Pipeline::bell);
        case Command::ghz: return concentration(c, Pipeline::ghz);
        case Command::generate: return generate(c);
        case Command::papd: return papd_command(c);
        case Command::sweep: return sweep(c);
        case Command::montecarlo: return montecarlo(c);
    }
    throw InvalidParameter("unknown command");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const HeraldFailed*>(&e)) return exit_herald_failed;
    if (dynamic_cast<const IoError*>(&e)) return exit_io;
    if (dynamic_cast<const Error*>(&e)) return exit_config;
    return 1;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const auto result = execute(config);
        const auto text = result.artifact(config.format);
        const auto path = config.output_path();
        if (path == "-") {
            out << text;
        } else {
            std::ofstream file(path, std::ios::binary | std::ios::trunc);
            if (!file) throw IoError("cannot open '" + path + "' for writing");
            file << text;
            file.close();
            if (!file) throw IoError("error while writing '" + path + "'");
        }
        // Keep stdout parseable when it carries the artifact.
        (path == "-" ? err : out) << result.summary << '\n';
        return result.exit_code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

int cmd_bell(const RunConfig& c, std::ostream& out, std::ostream& err) { return run_as(Command::bell, c, out, err); }
int cmd_ghz(const RunConfig& c, std::ostream& out, std::ostream& err) { return run_as(Command::ghz, c, out, err); }
int cmd_generate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    return run_as(Command::generate, c, out, err);
}
int cmd_papd(const RunConfig& c, std::ostream& out, std::ostream& err) { return run_as(Command::papd, c, out, err); }
int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) { return run_as(Command::sweep, c, out, err); }
int cmd_montecarlo(const RunConfig& c, std::ostream& out, std::ostream& err) {
    return run_as(Command::montecarlo, c, out, err);
}

}  // namespace phecp

// phecp: command-line front end for the phonon entanglement concentration
// pipelines and their analysis.
//
//   phecp bell --gt 3.14159265 --alpha 0.70710678 --exhaustive
//   phecp papd --ratios 30,90,150
//   phecp montecarlo --pipeline ghz --trials 100000 --dark-rate 2

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phecp/commands.hpp"
#include "phecp/config.hpp"
#include "phecp/errors.hpp"

namespace {

struct Flags {
    std::optional<std::string> config;
    std::vector<std::pair<std::string, std::optional<std::string>>> values;
    bool exhaustive = false;
    bool second_order = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App& sub, Flags& f) {
    sub.add_option("--config", f.config, "key=value configuration file");
    auto value = [&](const std::string& flag, const std::string& key, const std::string& help) {
        f.values.emplace_back(key, std::nullopt);
        sub.add_option(flag, f.values.back().second, help);
    };
    f.values.reserve(16);
    value("--seed", "seed", "64-bit RNG seed");
    value("--out", "out", "output file ('-' for stdout)");
    value("--format", "format", "json or csv");
    value("--trials", "trials", "Monte Carlo trials");
    value("--gt", "gt", "interaction strength g*t (overrides t)");
    value("--time", "t", "interaction time in seconds");
    value("--alpha", "alpha", "input amplitude alpha");
    value("--beta", "beta", "input amplitude beta (default sqrt(1-|alpha|^2))");
    value("--ratios", "ratios", "comma-separated omega_m/kappa ratios");
    value("--dark-rate", "dark_rate", "detector dark-count rate in Hz");
    value("--pipeline", "pipeline", "bell or ghz (montecarlo)");
    value("--parties", "parties", "GHZ parties, 2 to 6");
    value("--detector", "detector", "d6, d7 or sample (generate)");
    value("--p-p", "p_p", "pump excitation probability (generate)");
    sub.add_flag("--exhaustive", f.exhaustive, "enumerate every measurement outcome");
    sub.add_flag("--second-order", f.second_order, "keep second-order pair terms (generate)");
    sub.add_option("--set", f.sets, "extra key=value override (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phonon entanglement concentration: pipelines, analysis and Monte Carlo"};
    app.require_subcommand(1);
    const std::vector<std::pair<std::string, std::string>> commands{
        {"bell", "concentrate two less-entangled phonon Bell pairs"},
        {"ghz", "concentrate two less-entangled phonon GHZ states"},
        {"generate", "herald a remote phonon Bell pair"},
        {"papd", "photon arrival density curves (CSV by default)"},
        {"sweep", "herald probability grid: simulation vs closed form"},
        {"montecarlo", "sampled runs with optional dark counts"}};
    std::vector<Flags> flags(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        subs.push_back(app.add_subcommand(commands[i].first, commands[i].second));
        add_common(*subs.back(), flags[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return phecp::exit_config;
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        const Flags& f = flags[i];
        phecp::Overrides overrides;
        for (const auto& [key, value] : f.values)
            if (value) overrides.emplace_back(key, *value);
        if (f.exhaustive) overrides.emplace_back("exhaustive", "true");
        if (f.second_order) overrides.emplace_back("second_order", "true");
        try {
            for (const auto& s : f.sets) {
                const auto eq = s.find('=');
                if (eq == std::string::npos) throw phecp::ParseError("--set expects key=value, got '" + s + "'");
                overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
            }
            const auto config = phecp::parse_config(phecp::command_from_string(commands[i].first), f.config, overrides);
            return phecp::run_command(config, std::cout, std::cerr);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return phecp::exit_code_for(e);
        }
    }
    return phecp::exit_config;
}

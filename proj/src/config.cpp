#include "phecp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "phecp/errors.hpp"

namespace phecp {

const char* to_string(Command c) {
    switch (c) {
        case Command::bell: return "bell";
        case Command::ghz: return "ghz";
        case Command::generate: return "generate";
        case Command::papd: return "papd";
        case Command::sweep: return "sweep";
        case Command::montecarlo: return "montecarlo";
    }
    return "?";
}

const char* to_string(Format f) { return f == Format::json ? "json" : "csv"; }

Command command_from_string(std::string_view s) {
    for (Command c : {Command::bell, Command::ghz, Command::generate, Command::papd, Command::sweep,
                      Command::montecarlo})
        if (s == to_string(c)) return c;
    throw ParseError("unknown command '" + std::string(s) + "'");
}

std::string RunConfig::output_path() const {
    return out.empty() ? std::string(to_string(command)) + "." + to_string(format) : out;
}

namespace {

struct Entry {
    std::string value;
    std::string origin;  // "file:line" or "--flag"
};

const std::vector<std::string_view> known_keys{
    "omega_m", "delta",     "g",          "kappa",       "G",         "alpha",         "beta",
    "alpha_phase", "beta_phase", "p_p",   "dark_rate",   "gt",        "t",             "trials",
    "seed",    "pipeline",  "out",        "format",      "ratios",    "exhaustive",    "detector",
    "second_order", "noise", "window",    "transfer",    "transfer_gt", "parties",     "tp_max",
    "tp_step", "sweep_alpha_sq", "sweep_gt"};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const Entry& e, const std::string& key, const std::string& why) {
    throw ParseError(e.origin + ": " + key + " = '" + e.value + "': " + why);
}

[[noreturn]] void invalid(const Entry& e, const std::string& key, const std::string& why) {
    throw ValidationError(e.origin + ": " + key + ": " + why);
}

class Values {
public:
    explicit Values(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const Entry& entry(const std::string& key) const { return entries_.at(key); }

    std::optional<double> number(const std::string& key, std::optional<double> omega_m = {}) const {
        if (!has(key)) return std::nullopt;
        return eval(entry(key), key, entry(key).value, omega_m);
    }

    std::optional<std::uint64_t> unsigned_int(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const auto& e = entry(key);
        const auto v = trim(e.value);
        std::uint64_t out = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
            parse_fail(e, key, "expected a nonnegative integer");
        return out;
    }

    std::optional<bool> flag(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const auto v = trim(entry(key).value);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        parse_fail(entry(key), key, "expected true or false");
    }

    std::optional<std::string> word(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return std::string(trim(entry(key).value));
    }

    std::optional<std::vector<double>> list(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const auto& e = entry(key);
        std::vector<double> out;
        std::string_view rest = e.value;
        while (true) {
            const auto comma = rest.find(',');
            out.push_back(eval(e, key, rest.substr(0, comma), std::nullopt));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return out;
    }

private:
    static double eval(const Entry& e, const std::string& key, std::string_view text, std::optional<double> omega_m) {
        text = trim(text);
        if (text.empty()) parse_fail(e, key, "empty value");
        double value = 1;
        char op = '*';
        while (true) {
            const auto pos = text.find_first_of("*/");
            const auto factor = trim(text.substr(0, pos));
            const double f = eval_factor(e, key, factor, omega_m);
            value = op == '*' ? value * f : value / f;
            if (pos == std::string_view::npos) break;
            op = text[pos];
            text.remove_prefix(pos + 1);
        }
        if (!std::isfinite(value)) parse_fail(e, key, "value is not finite");
        return value;
    }

    static double eval_factor(const Entry& e, const std::string& key, std::string_view f,
                              std::optional<double> omega_m) {
        if (f.empty()) parse_fail(e, key, "malformed number");
        if (f == "omega_m") {
            if (!omega_m) parse_fail(e, key, "omega_m is not allowed here");
            return *omega_m;
        }
        double scale = 1;
        if (f.size() >= 2 && f.substr(f.size() - 2) == "pi") {
            scale = std::numbers::pi;
            f.remove_suffix(2);
            if (f.empty()) return scale;
        }
        double x = 0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
        if (ec != std::errc{} || ptr != f.data() + f.size()) parse_fail(e, key, "malformed number");
        return x * scale;
    }

    std::map<std::string, Entry> entries_;
};

std::map<std::string, Entry> read_entries(std::string_view text, const std::string& source,
                                          const Overrides& overrides) {
    std::map<std::string, Entry> entries;
    auto check_key = [](const std::string& key, const std::string& origin) {
        for (auto k : known_keys)
            if (k == key) return;
        throw ParseError(origin + ": unknown key '" + key + "'");
    };
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const std::string origin = source + ":" + std::to_string(line_no);
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError(origin + ": expected key = value");
        const std::string key(trim(body.substr(0, eq)));
        if (key.empty()) throw ParseError(origin + ": missing key before '='");
        check_key(key, origin);
        if (entries.count(key)) throw ParseError(origin + ": '" + key + "' already set at " + entries[key].origin);
        entries[key] = {std::string(trim(body.substr(eq + 1))), origin};
    }
    for (const auto& [key, value] : overrides) {
        std::string origin = "--" + key;
        std::replace(origin.begin(), origin.end(), '_', '-');
        check_key(key, origin);
        entries[key] = {value, origin};
    }
    return entries;
}

void resolve_amplitudes(const Values& v, RunConfig& cfg) {
    auto amplitude = [&](const std::string& key) -> std::optional<double> {
        auto x = v.number(key);
        if (x && std::abs(*x) > 1) invalid(v.entry(key), key, "|" + key + "| must not exceed 1");
        return x;
    };
    const auto a = amplitude("alpha");
    const auto b = amplitude("beta");
    const double pa = v.number("alpha_phase").value_or(0);
    const double pb = v.number("beta_phase").value_or(0);
    double ma = 1 / std::numbers::sqrt2, mb = 1 / std::numbers::sqrt2;
    if (a && b) {
        ma = *a;
        mb = *b;
    } else if (a) {
        ma = *a;
        mb = std::sqrt(std::max(0.0, 1 - ma * ma));
    } else if (b) {
        mb = *b;
        ma = std::sqrt(std::max(0.0, 1 - mb * mb));
    }
    const double n2 = ma * ma + mb * mb;
    cfg.input_norm_sq = n2;
    if (std::abs(n2 - 1) > 1e-3) {
        const auto& e = v.has("beta") ? v.entry("beta") : v.entry("alpha");
        invalid(e, "alpha, beta", "|alpha|^2 + |beta|^2 = " + std::to_string(n2) + " differs from 1 by more than 1e-3");
    }
    const double n = std::sqrt(n2);
    cfg.renormalized = n2 != 1;
    // A negative magnitude is a sign flip: polar() needs a nonnegative radius.
    cfg.params.alpha = std::copysign(1.0, ma) * std::polar(std::abs(ma) / n, pa);
    cfg.params.beta = std::copysign(1.0, mb) * std::polar(std::abs(mb) / n, pb);
}

}  // namespace

RunConfig parse_config_text(Command command, std::string_view text, const std::string& source,
                            const Overrides& overrides) {
    const Values v(read_entries(text, source, overrides));
    RunConfig cfg;
    cfg.command = command;
    auto& p = cfg.params;

    auto require = [&](const std::string& key, bool ok, const std::string& why) {
        if (!ok) invalid(v.entry(key), key, why);
    };

    if (auto x = v.number("omega_m")) {
        require("omega_m", *x > 0, "must be positive");
        // Keep the default coupling and decay proportional to omega_m.
        p.g = p.g / p.omega_m * *x;
        p.kappa = p.kappa / p.omega_m * *x;
        p.omega_m = *x;
    }
    for (const auto& [key, slot] : {std::pair<std::string, double*>{"delta", &p.delta}, {"g", &p.g},
                                    {"kappa", &p.kappa}, {"G", &p.G}}) {
        if (auto x = v.number(key, p.omega_m)) {
            require(key, key == "delta" || *x >= 0, "must be nonnegative");
            *slot = *x;
        }
    }
    if (auto x = v.number("p_p")) {
        require("p_p", *x >= 0 && *x < 1, "must lie in [0, 1)");
        p.p_p = *x;
    }
    if (auto x = v.number("dark_rate")) {
        require("dark_rate", *x >= 0, "must be nonnegative");
        p.dark_rate = *x;
    }
    resolve_amplitudes(v, cfg);

    if (auto x = v.number("gt")) {
        require("gt", *x >= 0, "must be nonnegative");
        require("gt", p.g > 0, "gt needs g > 0 to convert to a time");
        cfg.gt = *x;
    }
    if (auto x = v.number("t")) {
        require("t", *x >= 0, "must be nonnegative");
        cfg.t_seconds = *x;
    }
    if (cfg.gt) cfg.t = *cfg.gt / p.g;
    else if (cfg.t_seconds) cfg.t = *cfg.t_seconds;
    else if (p.g > 0) cfg.t = (cfg.gt = std::numbers::pi, std::numbers::pi / p.g);

    if (auto x = v.unsigned_int("trials")) {
        require("trials", *x >= 1, "needs at least one trial");
        cfg.trials = *x;
    }
    if (auto x = v.unsigned_int("seed")) cfg.seed = *x;
    if (auto x = v.word("out")) {
        require("out", !x->empty(), "empty path");
        cfg.out = *x;
    }
    cfg.format = command == Command::papd ? Format::csv : Format::json;
    if (auto x = v.word("format")) {
        if (*x == "json") cfg.format = Format::json;
        else if (*x == "csv") cfg.format = Format::csv;
        else parse_fail(v.entry("format"), "format", "expected json or csv");
    }
    if (auto x = v.flag("exhaustive")) cfg.exhaustive = *x;
    if (auto x = v.word("pipeline")) {
        if (*x == "bell") cfg.pipeline = Pipeline::bell;
        else if (*x == "ghz") cfg.pipeline = Pipeline::ghz;
        else parse_fail(v.entry("pipeline"), "pipeline", "expected bell or ghz");
    }
    if (auto x = v.unsigned_int("parties")) {
        require("parties", *x >= 2 && *x <= 6, "must be between 2 and 6");
        cfg.options.parties = static_cast<int>(*x);
    }
    if (auto x = v.number("transfer_gt")) {
        require("transfer_gt", *x >= 0, "must be nonnegative");
        cfg.transfer_gt = *x;
    }
    if (auto x = v.word("transfer")) {
        if (*x == "ideal") cfg.options.transfer = TransferMode<double>::ideal();
        else if (*x == "unitary") {
            require("transfer", p.G > 0, "the unitary transfer needs G > 0");
            cfg.options.transfer = TransferMode<double>::unitary(p.G, cfg.transfer_gt / p.G);
        } else parse_fail(v.entry("transfer"), "transfer", "expected ideal or unitary");
    }
    if (auto x = v.word("detector")) {
        if (*x == "d6" || *x == "D6") cfg.detector = DetectorChoice::d6;
        else if (*x == "d7" || *x == "D7") cfg.detector = DetectorChoice::d7;
        else if (*x == "sample") cfg.detector = DetectorChoice::sample;
        else parse_fail(v.entry("detector"), "detector", "expected d6, d7 or sample");
    }
    if (auto x = v.flag("second_order")) cfg.second_order = *x;

    cfg.noise.dark_rate = p.dark_rate;
    cfg.noise.enabled = p.dark_rate > 0;
    if (auto x = v.flag("noise")) cfg.noise.enabled = *x;
    if (auto x = v.number("window")) {
        require("window", *x > 0, "must be positive");
        cfg.noise.window = *x;
    }
    if (cfg.noise.enabled && !cfg.noise.window && !(p.kappa > 0))
        invalid(v.has("noise") ? v.entry("noise") : v.entry("dark_rate"), "noise",
                "the default window 1/kappa needs kappa > 0");

    if (auto x = v.list("ratios")) {
        for (double r : *x) require("ratios", r > 0, "every ratio must be positive");
        cfg.ratios = *x;
    }
    if (auto x = v.number("tp_max")) {
        require("tp_max", *x > 0, "must be positive");
        cfg.tp_max = *x;
    }
    if (auto x = v.number("tp_step")) {
        require("tp_step", *x > 0 && *x <= cfg.tp_max, "must lie in (0, tp_max]");
        cfg.tp_step = *x;
    }
    if (auto x = v.list("sweep_alpha_sq")) {
        for (double a : *x) require("sweep_alpha_sq", a >= 0 && a <= 1, "values must lie in [0, 1]");
        cfg.sweep_alpha_sq = *x;
    }
    if (auto x = v.list("sweep_gt")) {
        for (double a : *x) require("sweep_gt", a >= 0, "values must be nonnegative");
        cfg.sweep_gt = *x;
    }
    if (cfg.sweep_gt.empty())
        for (int i = 0; i < 10; ++i) cfg.sweep_gt.push_back(0.1 + i * (2 * std::numbers::pi - 0.1) / 9);

    try {
        p.validate();
    } catch (const Error& e) {
        throw ValidationError(std::string("parameters: ") + e.what());
    }
    return cfg;
}

RunConfig parse_config(Command command, const std::optional<std::string>& path, const Overrides& overrides) {
    if (!path) return parse_config_text(command, "", "<none>", overrides);
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + *path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) throw IoError("error while reading config file '" + *path + "'");
    return parse_config_text(command, text.str(), *path, overrides);
}

}  // namespace phecp

// config.hpp
// Run configuration: a flat key=value file plus command-line overrides.
//
// File syntax: one `key = value` per line; blank lines and lines starting
// with '#' are ignored. Numeric values may be products/quotients of
// numbers, `pi`, `<number>pi` and (for rates) `omega_m`, e.g.
//     omega_m = 2pi*1e9
//     g = 3.33e-2*omega_m
//     kappa = omega_m/90
// Every diagnostic names the file line (or flag) that caused it.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phecp/protocol.hpp"

namespace phecp {

enum class Command { bell, ghz, generate, papd, sweep, montecarlo };
enum class Format { json, csv };
enum class DetectorChoice { d6, d7, sample };

const char* to_string(Command c);
const char* to_string(Format f);
Command command_from_string(std::string_view s);

// Seed used when none is given, so bare runs are reproducible.
inline constexpr std::uint64_t default_seed = 20180711;

struct RunConfig {
    Command command = Command::bell;
    SystemParams params;

    // Interaction time: gt wins over t; the default is gt = pi.
    std::optional<double> gt;
    std::optional<double> t_seconds;
    double t = 0;  // resolved, in s

    std::size_t trials = 100000;
    std::uint64_t seed = default_seed;
    std::string out;  // empty: <command>.<format>
    Format format = Format::json;
    bool exhaustive = false;
    NoiseModel noise;

    Pipeline pipeline = Pipeline::bell;  // montecarlo only
    EcpOptions options;
    double transfer_gt = std::numbers::pi / 2;  // G t of the unitary transfer

    DetectorChoice detector = DetectorChoice::d6;  // generate only
    bool second_order = false;

    std::vector<double> ratios{30, 90, 150};  // papd
    double tp_max = 40;
    double tp_step = 0.01;

    std::vector<double> sweep_alpha_sq{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> sweep_gt;  // empty: 0.1 ... 2 pi in ten steps

    // Input-state normalization as given, before exact renormalization.
    double input_norm_sq = 1;
    bool renormalized = false;

    std::string output_path() const;
};

// (key, value) pairs from the command line, applied after the file.
using Overrides = std::vector<std::pair<std::string, std::string>>;

// Throws ParseError for malformed lines or values and ValidationError for
// values that parse but violate a constraint; IoError if the file cannot
// be read.
RunConfig parse_config(Command command, const std::optional<std::string>& path, const Overrides& overrides = {});
RunConfig parse_config_text(Command command, std::string_view text, const std::string& source,
                            const Overrides& overrides = {});

}  // namespace phecp

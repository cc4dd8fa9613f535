// ops.hpp
// Physical primitives acting on FockVectors: cross-Kerr phase evolution,
// beam splitters, single-photon Hadamard, anti-Stokes phonon-to-photon
// transfer, pi-phase flips, dark-port postselection and the weak two-mode
// (Stokes) squeezer.
//
// Every operation takes its state by const reference and returns a new one.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "phecp/fock.hpp"

namespace phecp {

using WarningHandler = std::function<void(std::string_view)>;

inline WarningHandler& warning_handler() {
    static WarningHandler handler = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return handler;
}

inline void set_warning_handler(WarningHandler handler) { warning_handler() = std::move(handler); }

inline void warn(std::string_view msg) {
    if (warning_handler()) warning_handler()(msg);
}

// Parameters of H = delta c'c + omega_m b'b - g c'c b'b, all in rad/s.
template <typename Scalar = double>
struct CrossKerrParams {
    Scalar delta = 0;
    Scalar omega_m = 1;
    Scalar g = 0;
    Scalar t = 0;

    void validate() const {
        if (!(omega_m > 0)) throw InvalidParameter("cross-Kerr: omega_m must be positive");
        if (!(g >= 0)) throw InvalidParameter("cross-Kerr: g must be nonnegative");
        if (!(t >= 0)) throw InvalidParameter("cross-Kerr: t must be nonnegative");
        if (!std::isfinite(delta)) throw InvalidParameter("cross-Kerr: delta must be finite");
    }
};

template <typename Scalar = double>
struct TransferMode {
    enum class Variant { ideal_map, unitary };

    Variant variant = Variant::ideal_map;
    Scalar G = 0;  // rad/s
    Scalar t = 0;  // s

    static TransferMode ideal() { return {}; }
    static TransferMode unitary(Scalar coupling, Scalar time) { return {Variant::unitary, coupling, time}; }

    // Gt = pi/2 moves the whole phonon into the cavity.
    bool complete() const {
        return variant == Variant::ideal_map || std::abs(G * t - std::numbers::pi_v<Scalar> / 2) < Scalar(1e-9);
    }
};

namespace detail {

template <typename Scalar>
using LocalMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
const ModeLabel& require_kind(const FockVector<Scalar>& s, std::string_view name, ModeKind kind) {
    const auto& m = s.mode(name);
    if (m.kind != kind)
        throw KindMismatch("mode '" + m.name + "' is " + to_string(m.kind) + ", expected " + to_string(kind));
    return m;
}

// Applies U on the (cutoff+1)^k local space spanned by modes `idx`
// (mixed radix, first index most significant). Only unitary-on-support
// operators may go through here: the result is not rescaled.
template <typename Scalar>
FockVector<Scalar> apply_local(const FockVector<Scalar>& s, const std::vector<std::size_t>& idx,
                               const LocalMatrix<Scalar>& U) {
    using Key = typename FockVector<Scalar>::Key;
    const int d = s.cutoff() + 1;
    typename FockVector<Scalar>::AmplitudeMap out;
    for (const auto& [k, a] : s) {
        Eigen::Index col = 0;
        for (std::size_t i : idx) col = col * d + s.occupation(k, i);
        for (Eigen::Index row = 0; row < U.rows(); ++row) {
            const auto u = U(row, col);
            if (u == std::complex<Scalar>(0)) continue;
            Key nk = k;
            Eigen::Index r = row;
            for (std::size_t j = idx.size(); j-- > 0;) {
                nk = s.with_occupation(nk, idx[j], int(r % d));
                r /= d;
            }
            out[nk] += u * a;
        }
    }
    return FockVector<Scalar>::from_normalized(s.modes(), s.cutoff(), std::move(out));
}

inline double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// a' -> (a' + b')/sqrt2, b' -> (a' - b')/sqrt2 on every |na, nb> with
// na + nb <= cutoff. Columns outside that sector stay zero.
template <typename Scalar>
LocalMatrix<Scalar> beam_splitter_matrix(int cutoff) {
    const int d = cutoff + 1;
    LocalMatrix<Scalar> U = LocalMatrix<Scalar>::Zero(d * d, d * d);
    for (int na = 0; na <= cutoff; ++na) {
        for (int nb = 0; na + nb <= cutoff; ++nb) {
            const int total = na + nb;
            const double pre = std::pow(2.0, -0.5 * total) / std::sqrt(factorial(na) * factorial(nb));
            for (int j = 0; j <= na; ++j) {
                for (int k = 0; k <= nb; ++k) {
                    const int m = j + k;  // photons leaving in mode a
                    const double sign = ((nb - k) % 2) ? -1.0 : 1.0;
                    const double c = pre * binomial(na, j) * binomial(nb, k) * sign *
                                     std::sqrt(factorial(m) * factorial(total - m));
                    U(m * d + (total - m), na * d + nb) += std::complex<Scalar>(Scalar(c));
                }
            }
        }
    }
    return U;
}

}  // namespace detail

// Multiplies each component by exp(-i (delta n_c + omega_m n_b - g n_c n_b) t).
template <typename Scalar>
FockVector<Scalar> cross_kerr_evolve(const FockVector<Scalar>& state, std::string_view cavity, std::string_view mech,
                                     const CrossKerrParams<Scalar>& p) {
    p.validate();
    detail::require_kind(state, cavity, ModeKind::optical);
    detail::require_kind(state, mech, ModeKind::mechanical);
    const auto ic = state.index(cavity);
    const auto ib = state.index(mech);
    typename FockVector<Scalar>::AmplitudeMap out;
    for (const auto& [k, a] : state) {
        const Scalar nc = Scalar(state.occupation(k, ic));
        const Scalar nb = Scalar(state.occupation(k, ib));
        const Scalar theta = (p.delta * nc + p.omega_m * nb - p.g * nc * nb) * p.t;
        out.emplace(k, a * std::polar(Scalar(1), -theta));
    }
    return FockVector<Scalar>::from_normalized(state.modes(), state.cutoff(), std::move(out));
}

template <typename Scalar>
FockVector<Scalar> beam_splitter(const FockVector<Scalar>& state, std::string_view a, std::string_view b) {
    detail::require_kind(state, a, ModeKind::optical);
    detail::require_kind(state, b, ModeKind::optical);
    const auto ia = state.index(a);
    const auto ib = state.index(b);
    if (ia == ib) throw ModeMismatch("beam splitter needs two distinct modes");
    for (const auto& [k, v] : state)
        if (state.occupation(k, ia) + state.occupation(k, ib) > state.cutoff())
            throw CutoffOverflow("beam splitter output would exceed cutoff " + std::to_string(state.cutoff()));
    return detail::apply_local(state, {ia, ib}, detail::beam_splitter_matrix<Scalar>(state.cutoff()));
}

// (|10> - |01>)/sqrt2 on (a, b): the antisymmetric single photon that exits
// the dark port of the interferometer.
template <typename Scalar>
FockVector<Scalar> dark_port_state(const FockVector<Scalar>& state, std::string_view a, std::string_view b) {
    ModeRegistry reg{state.mode(a), state.mode(b)};
    return make_state<Scalar>(reg, {{{1, 0}, {1, 0}}, {{0, 1}, {-1, 0}}}, state.cutoff());
}

template <typename Scalar>
HeraldResult<Scalar> dark_port_postselect(const FockVector<Scalar>& state, std::string_view a, std::string_view b) {
    detail::require_kind(state, a, ModeKind::optical);
    detail::require_kind(state, b, ModeKind::optical);
    return project(state, dark_port_state(state, a, b));
}

// |0> -> (|0> + |1>)/sqrt2, |1> -> (|0> - |1>)/sqrt2.
template <typename Scalar>
FockVector<Scalar> hadamard_photon(const FockVector<Scalar>& state, std::string_view m) {
    detail::require_kind(state, m, ModeKind::optical);
    const auto im = state.index(m);
    for (const auto& [k, v] : state)
        if (state.occupation(k, im) > 1)
            throw QubitViolation("Hadamard on mode '" + std::string(m) + "' with more than one photon");
    const int d = state.cutoff() + 1;
    const Scalar h = Scalar(1) / std::sqrt(Scalar(2));
    detail::LocalMatrix<Scalar> H = detail::LocalMatrix<Scalar>::Identity(d, d);
    H(0, 0) = h;
    H(1, 0) = h;
    H(0, 1) = h;
    H(1, 1) = -h;
    return detail::apply_local(state, {im}, H);
}

// Maps the phonon in `mech` onto the empty cavity `cav` via
// H = G (c v' + c' v).
template <typename Scalar>
FockVector<Scalar> anti_stokes_transfer(const FockVector<Scalar>& state, std::string_view mech, std::string_view cav,
                                        const TransferMode<Scalar>& mode = TransferMode<Scalar>::ideal()) {
    detail::require_kind(state, mech, ModeKind::mechanical);
    detail::require_kind(state, cav, ModeKind::optical);
    const auto im = state.index(mech);
    const auto ic = state.index(cav);
    for (const auto& [k, v] : state) {
        if (state.occupation(k, ic) != 0)
            throw CavityNotEmpty("anti-Stokes transfer into occupied cavity '" + std::string(cav) + "'");
        if (state.occupation(k, im) > 1)
            throw QubitViolation("anti-Stokes transfer of more than one phonon from '" + std::string(mech) + "'");
    }
    const int d = state.cutoff() + 1;
    detail::LocalMatrix<Scalar> U = detail::LocalMatrix<Scalar>::Zero(d * d, d * d);
    const Eigen::Index vac = 0, phonon = 1 * d + 0, photon = 0 * d + 1;
    U(vac, vac) = 1;
    if (mode.variant == TransferMode<Scalar>::Variant::ideal_map) {
        U(photon, phonon) = 1;
    } else {
        if (!(mode.G >= 0) || !(mode.t >= 0)) throw InvalidParameter("anti-Stokes: G and t must be nonnegative");
        if (!mode.complete()) warn("anti-Stokes transfer with G*t != pi/2 leaves part of the phonon behind");
        const Scalar x = mode.G * mode.t;
        U(phonon, phonon) = std::cos(x);
        U(photon, phonon) = std::complex<Scalar>(0, -std::sin(x));
    }
    return detail::apply_local(state, {im, ic}, U);
}

// Flips the sign of every component with odd occupation on `mode`.
template <typename Scalar>
FockVector<Scalar> pi_phase(const FockVector<Scalar>& state, std::string_view mode) {
    const auto im = state.index(mode);
    typename FockVector<Scalar>::AmplitudeMap out;
    for (const auto& [k, a] : state) out.emplace(k, state.occupation(k, im) % 2 ? -a : a);
    return FockVector<Scalar>::from_normalized(state.modes(), state.cutoff(), std::move(out));
}

// Weak blue-sideband pulse on a vacuum (cav, mech) pair:
// |0,0> -> |0,0> + sqrt(p) |1,1> [+ p |2,2>], renormalized.
template <typename Scalar>
FockVector<Scalar> two_mode_squeeze_weak(const FockVector<Scalar>& state, std::string_view cav, std::string_view mech,
                                         Scalar p_p, bool second_order = false) {
    detail::require_kind(state, cav, ModeKind::optical);
    detail::require_kind(state, mech, ModeKind::mechanical);
    if (!(p_p >= 0) || !(p_p < 1)) throw InvalidParameter("two-mode squeeze: p_p must lie in [0, 1)");
    if (p_p > Scalar(0.1)) warn("two-mode squeeze: p_p > 0.1 is outside the weak-pump regime");
    if (second_order && state.cutoff() < 2)
        throw CutoffOverflow("second-order squeezing needs cutoff >= 2");
    const auto ic = state.index(cav);
    const auto ib = state.index(mech);
    const Scalar amp1 = std::sqrt(p_p);
    typename FockVector<Scalar>::AmplitudeMap out;
    for (const auto& [k, a] : state) {
        if (state.occupation(k, ic) != 0 || state.occupation(k, ib) != 0)
            throw ModesNotVacuum("two-mode squeeze needs '" + std::string(cav) + "' and '" + std::string(mech) +
                                 "' in vacuum");
        out[k] += a;
        out[state.with_occupation(state.with_occupation(k, ic, 1), ib, 1)] += amp1 * a;
        if (second_order) out[state.with_occupation(state.with_occupation(k, ic, 2), ib, 2)] += p_p * a;
    }
    return FockVector<Scalar>::from_unnormalized(state.modes(), state.cutoff(), std::move(out));
}

}  // namespace phecp

// fock.hpp
// Sparse multimode Fock-space state vectors.
//
// A FockVector is an immutable, normalized superposition over occupation
// tuples of an ordered list of labeled bosonic modes. Occupations are packed
// four bits per mode into a 64-bit key (mode 0 in the most significant
// nibble), so the amplitude map iterates in lexicographic tuple order.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phecp/errors.hpp"

namespace phecp {

enum class ModeKind { optical, mechanical };
enum class Owner { alice, bob, charlie, none };

struct ModeLabel {
    std::string name;
    ModeKind kind = ModeKind::optical;
    Owner owner = Owner::none;

    friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

inline ModeLabel optical(std::string name, Owner owner = Owner::none) {
    return {std::move(name), ModeKind::optical, owner};
}

inline ModeLabel mechanical(std::string name, Owner owner = Owner::none) {
    return {std::move(name), ModeKind::mechanical, owner};
}

inline const char* to_string(ModeKind kind) {
    return kind == ModeKind::optical ? "optical" : "mechanical";
}

inline const char* to_string(Owner owner) {
    switch (owner) {
        case Owner::alice: return "alice";
        case Owner::bob: return "bob";
        case Owner::charlie: return "charlie";
        case Owner::none: break;
    }
    return "none";
}

inline ModeKind mode_kind_from_string(std::string_view s) {
    if (s == "optical") return ModeKind::optical;
    if (s == "mechanical") return ModeKind::mechanical;
    throw BadOccupation("unknown mode kind '" + std::string(s) + "'");
}

inline Owner owner_from_string(std::string_view s) {
    if (s == "alice") return Owner::alice;
    if (s == "bob") return Owner::bob;
    if (s == "charlie") return Owner::charlie;
    if (s == "none") return Owner::none;
    throw BadOccupation("unknown owner '" + std::string(s) + "'");
}

// Ordered set of uniquely named modes. Insertion order is the register order.
class ModeRegistry {
public:
    ModeRegistry() = default;
    ModeRegistry(std::initializer_list<ModeLabel> modes) {
        for (const auto& m : modes) add(m);
    }
    explicit ModeRegistry(std::span<const ModeLabel> modes) {
        for (const auto& m : modes) add(m);
    }

    const ModeLabel& add(ModeLabel mode) {
        if (index_of(mode.name)) throw ModeCollision("mode '" + mode.name + "' already registered");
        modes_.push_back(std::move(mode));
        return modes_.back();
    }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < modes_.size(); ++i)
            if (modes_[i].name == name) return i;
        return std::nullopt;
    }

    const ModeLabel& at(std::string_view name) const {
        auto i = index_of(name);
        if (!i) throw ModeMismatch("unknown mode '" + std::string(name) + "'");
        return modes_[*i];
    }

    std::size_t size() const { return modes_.size(); }
    const std::vector<ModeLabel>& modes() const { return modes_; }
    auto begin() const { return modes_.begin(); }
    auto end() const { return modes_.end(); }

private:
    std::vector<ModeLabel> modes_;
};

using Occupation = std::vector<int>;

inline constexpr std::size_t max_modes = 16;
inline constexpr int max_cutoff = 15;
inline constexpr int default_cutoff = 2;

template <typename Scalar = double>
class FockVector {
public:
    using Complex = std::complex<Scalar>;
    using Key = std::uint64_t;
    using AmplitudeMap = std::map<Key, Complex>;
    using DenseVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

    static constexpr Scalar prune_epsilon = Scalar(1e-14);
    static constexpr Scalar norm_tolerance = Scalar(1e-12);

    // Normalizes `amps`; throws ZeroVector when nothing survives pruning.
    static FockVector from_unnormalized(std::vector<ModeLabel> modes, int cutoff, AmplitudeMap amps) {
        FockVector v(std::move(modes), cutoff);
        v.amps_ = std::move(amps);
        v.prune();
        Scalar n2 = v.squared_norm();
        if (v.amps_.empty() || !(n2 > Scalar(0))) throw ZeroVector("state has no nonzero amplitude");
        const Scalar inv = Scalar(1) / std::sqrt(n2);
        for (auto& [k, a] : v.amps_) a *= inv;
        return v;
    }

    // Accepts `amps` as-is after checking the norm; no rescaling, so the
    // amplitudes are kept bit for bit.
    static FockVector from_normalized(std::vector<ModeLabel> modes, int cutoff, AmplitudeMap amps) {
        FockVector v(std::move(modes), cutoff);
        v.amps_ = std::move(amps);
        v.prune();
        if (std::abs(v.squared_norm() - Scalar(1)) > norm_tolerance)
            throw NotNormalized("state is not normalized (|psi|^2 = " + std::to_string(double(v.squared_norm())) + ")");
        return v;
    }

    const std::vector<ModeLabel>& modes() const { return modes_; }
    std::size_t num_modes() const { return modes_.size(); }
    int cutoff() const { return cutoff_; }
    const AmplitudeMap& amplitudes() const { return amps_; }
    std::size_t size() const { return amps_.size(); }
    auto begin() const { return amps_.begin(); }
    auto end() const { return amps_.end(); }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < modes_.size(); ++i)
            if (modes_[i].name == name) return i;
        return std::nullopt;
    }

    std::size_t index(std::string_view name) const {
        auto i = index_of(name);
        if (!i) throw ModeMismatch("mode '" + std::string(name) + "' is not in the register");
        return *i;
    }

    const ModeLabel& mode(std::string_view name) const { return modes_[index(name)]; }

    bool same_modes(const FockVector& other) const { return modes_ == other.modes_; }

    int occupation(Key key, std::size_t mode) const {
        return int((key >> shift(mode)) & Key(0xF));
    }

    Key with_occupation(Key key, std::size_t mode, int n) const {
        const unsigned s = shift(mode);
        return (key & ~(Key(0xF) << s)) | (Key(n) << s);
    }

    Key pack(const Occupation& occ) const {
        if (occ.size() != modes_.size())
            throw BadOccupation("occupation tuple has " + std::to_string(occ.size()) + " entries, register has " +
                                std::to_string(modes_.size()) + " modes");
        Key key = 0;
        for (std::size_t i = 0; i < occ.size(); ++i) {
            if (occ[i] < 0 || occ[i] > cutoff_)
                throw BadOccupation("occupation " + std::to_string(occ[i]) + " of mode '" + modes_[i].name +
                                    "' outside [0, " + std::to_string(cutoff_) + "]");
            key |= Key(occ[i]) << shift(i);
        }
        return key;
    }

    Occupation unpack(Key key) const {
        Occupation occ(modes_.size());
        for (std::size_t i = 0; i < modes_.size(); ++i) occ[i] = occupation(key, i);
        return occ;
    }

    Complex amplitude(Key key) const {
        auto it = amps_.find(key);
        return it == amps_.end() ? Complex(0) : it->second;
    }

    Complex amplitude(const Occupation& occ) const { return amplitude(pack(occ)); }

    Scalar squared_norm() const {
        Scalar s = 0;
        for (const auto& [k, a] : amps_) s += std::norm(a);
        return s;
    }

    // Dense vector in mixed-radix order (base cutoff+1, mode 0 most significant).
    DenseVector to_dense() const {
        const Key d = Key(cutoff_) + 1;
        Key dim = 1;
        for (std::size_t i = 0; i < modes_.size(); ++i) dim *= d;
        DenseVector v = DenseVector::Zero(Eigen::Index(dim));
        for (const auto& [k, a] : amps_) {
            Key idx = 0;
            for (std::size_t i = 0; i < modes_.size(); ++i) idx = idx * d + Key(occupation(k, i));
            v(Eigen::Index(idx)) = a;
        }
        return v;
    }

    template <typename Other>
    FockVector<Other> cast() const {
        typename FockVector<Other>::AmplitudeMap m;
        for (const auto& [k, a] : amps_) m.emplace(k, std::complex<Other>(Other(a.real()), Other(a.imag())));
        return FockVector<Other>::from_unnormalized(modes_, cutoff_, std::move(m));
    }

private:
    FockVector(std::vector<ModeLabel> modes, int cutoff) : modes_(std::move(modes)), cutoff_(cutoff) {
        if (modes_.size() > max_modes)
            throw BadOccupation("at most " + std::to_string(max_modes) + " modes are supported");
        if (cutoff_ < 1 || cutoff_ > max_cutoff)
            throw BadOccupation("cutoff must lie in [1, " + std::to_string(max_cutoff) + "]");
        for (std::size_t i = 0; i < modes_.size(); ++i)
            for (std::size_t j = i + 1; j < modes_.size(); ++j)
                if (modes_[i].name == modes_[j].name)
                    throw ModeCollision("mode '" + modes_[i].name + "' appears twice");
    }

    unsigned shift(std::size_t mode) const { return unsigned(4 * (modes_.size() - 1 - mode)); }

    void prune() {
        std::erase_if(amps_, [](const auto& kv) { return std::abs(kv.second) < prune_epsilon; });
    }

    std::vector<ModeLabel> modes_;
    int cutoff_ = default_cutoff;
    AmplitudeMap amps_;
};

using FockVectord = FockVector<double>;

template <typename Scalar = double>
struct HeraldResult {
    Scalar probability = 0;
    std::optional<FockVector<Scalar>> state;  // absent iff probability == 0

    bool heralded() const { return state.has_value(); }
};

template <typename Scalar>
using Term = std::pair<Occupation, std::complex<Scalar>>;

template <typename Scalar = double>
FockVector<Scalar> make_state(const ModeRegistry& registry, const std::vector<Term<Scalar>>& terms,
                              int cutoff = default_cutoff) {
    // The pack() below needs a register to validate against; build it on a
    // throwaway basis vector first.
    typename FockVector<Scalar>::AmplitudeMap seed{{0, std::complex<Scalar>(1)}};
    auto proto = FockVector<Scalar>::from_normalized(registry.modes(), cutoff, std::move(seed));
    typename FockVector<Scalar>::AmplitudeMap amps;
    for (const auto& [occ, a] : terms) amps[proto.pack(occ)] += a;
    return FockVector<Scalar>::from_unnormalized(registry.modes(), cutoff, std::move(amps));
}

template <typename Scalar = double>
FockVector<Scalar> basis_state(const ModeRegistry& registry, const Occupation& occ, int cutoff = default_cutoff) {
    return make_state<Scalar>(registry, {{occ, std::complex<Scalar>(1)}}, cutoff);
}

template <typename Scalar = double>
FockVector<Scalar> vacuum(const ModeRegistry& registry, int cutoff = default_cutoff) {
    return basis_state<Scalar>(registry, Occupation(registry.size(), 0), cutoff);
}

template <typename Scalar>
FockVector<Scalar> tensor(const FockVector<Scalar>& a, const FockVector<Scalar>& b) {
    std::vector<ModeLabel> modes = a.modes();
    for (const auto& m : b.modes()) {
        if (a.index_of(m.name)) throw ModeCollision("mode '" + m.name + "' appears in both factors");
        modes.push_back(m);
    }
    if (modes.size() > max_modes) throw BadOccupation("tensor product exceeds the supported mode count");
    const unsigned s = unsigned(4 * b.num_modes());
    typename FockVector<Scalar>::AmplitudeMap amps;
    for (const auto& [ka, va] : a)
        for (const auto& [kb, vb] : b) amps.emplace((ka << s) | kb, va * vb);
    return FockVector<Scalar>::from_unnormalized(std::move(modes), std::max(a.cutoff(), b.cutoff()), std::move(amps));
}

// <a|b>
template <typename Scalar>
std::complex<Scalar> inner(const FockVector<Scalar>& a, const FockVector<Scalar>& b) {
    if (!a.same_modes(b)) throw ModeMismatch("inner product of states on different registers");
    std::complex<Scalar> s(0);
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    for (const auto& [k, v] : small) {
        auto w = large.amplitude(k);
        s += &small == &a ? std::conj(v) * w : std::conj(w) * v;
    }
    return s;
}

template <typename Scalar>
Scalar fidelity(const FockVector<Scalar>& a, const FockVector<Scalar>& b) {
    return std::min(Scalar(1), std::norm(inner(a, b)));
}

namespace detail {

// Packs the occupations of `idx` (in that order) into a fresh key.
template <typename Scalar>
typename FockVector<Scalar>::Key extract(const FockVector<Scalar>& v, typename FockVector<Scalar>::Key key,
                                         std::span<const std::size_t> idx) {
    typename FockVector<Scalar>::Key out = 0;
    for (std::size_t i : idx) out = (out << 4) | typename FockVector<Scalar>::Key(v.occupation(key, i));
    return out;
}

template <typename Scalar>
std::vector<std::size_t> indices_of(const FockVector<Scalar>& v, std::span<const std::string> names) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
        auto i = v.index(n);
        if (std::find(idx.begin(), idx.end(), i) != idx.end())
            throw ModeMismatch("mode '" + n + "' listed twice");
        idx.push_back(i);
    }
    return idx;
}

template <typename Scalar>
std::vector<std::size_t> complement(const FockVector<Scalar>& v, std::span<const std::size_t> idx) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < v.num_modes(); ++i)
        if (std::find(idx.begin(), idx.end(), i) == idx.end()) rest.push_back(i);
    return rest;
}

template <typename Scalar>
std::vector<ModeLabel> labels(const FockVector<Scalar>& v, std::span<const std::size_t> idx) {
    std::vector<ModeLabel> out;
    for (std::size_t i : idx) out.push_back(v.modes()[i]);
    return out;
}

// Contracts `state` with the conjugated subset amplitudes `bra` and
// renormalizes the residual on the complementary modes.
template <typename Scalar>
HeraldResult<Scalar> contract(const FockVector<Scalar>& state, std::span<const std::size_t> idx,
                              const std::map<typename FockVector<Scalar>::Key, std::complex<Scalar>>& bra) {
    auto rest = complement(state, idx);
    typename FockVector<Scalar>::AmplitudeMap residual;
    for (const auto& [k, a] : state) {
        auto it = bra.find(extract(state, k, idx));
        if (it == bra.end()) continue;
        residual[extract(state, k, std::span<const std::size_t>(rest))] += std::conj(it->second) * a;
    }
    std::erase_if(residual,
                  [](const auto& kv) { return std::abs(kv.second) < FockVector<Scalar>::prune_epsilon; });
    HeraldResult<Scalar> out;
    for (const auto& [k, a] : residual) out.probability += std::norm(a);
    if (residual.empty()) {
        out.probability = 0;
        return out;
    }
    out.probability = std::min(out.probability, Scalar(1));
    out.state = FockVector<Scalar>::from_unnormalized(labels(state, rest), state.cutoff(), std::move(residual));
    return out;
}

}  // namespace detail

// Projects the modes of `target` (a subset of `state`'s modes, any order)
// onto `target` and returns the collapsed state on the remaining modes.
template <typename Scalar>
HeraldResult<Scalar> project(const FockVector<Scalar>& state, const FockVector<Scalar>& target) {
    std::vector<std::string> names;
    for (const auto& m : target.modes()) {
        auto i = state.index_of(m.name);
        if (!i) throw ModeMismatch("projection target mode '" + m.name + "' is not in the state");
        if (state.modes()[*i].kind != m.kind) throw ModeMismatch("projection target mode '" + m.name + "' kind differs");
        names.push_back(m.name);
    }
    auto idx = detail::indices_of(state, std::span<const std::string>(names));
    std::map<typename FockVector<Scalar>::Key, std::complex<Scalar>> bra(target.begin(), target.end());
    return detail::contract(state, std::span<const std::size_t>(idx), bra);
}

// Projects `modes` onto the basis occupation `outcome`.
template <typename Scalar>
HeraldResult<Scalar> project_outcome(const FockVector<Scalar>& state, std::span<const std::string> modes,
                                     const Occupation& outcome) {
    auto idx = detail::indices_of(state, modes);
    if (outcome.size() != idx.size()) throw BadOccupation("outcome length does not match the measured modes");
    typename FockVector<Scalar>::Key key = 0;
    for (int n : outcome) {
        if (n < 0 || n > state.cutoff()) throw BadOccupation("outcome occupation outside the cutoff");
        key = (key << 4) | typename FockVector<Scalar>::Key(n);
    }
    std::map<typename FockVector<Scalar>::Key, std::complex<Scalar>> bra{{key, std::complex<Scalar>(1)}};
    return detail::contract(state, std::span<const std::size_t>(idx), bra);
}

// Removes `modes`, which must be in vacuum on every component.
template <typename Scalar>
FockVector<Scalar> drop_vacuum_modes(const FockVector<Scalar>& state, std::span<const std::string> modes) {
    auto idx = detail::indices_of(state, modes);
    for (const auto& [k, a] : state)
        if (detail::extract(state, k, std::span<const std::size_t>(idx)) != 0)
            throw ModesNotVacuum("cannot drop modes that carry excitations");
    auto r = project_outcome(state, modes, Occupation(modes.size(), 0));
    return std::move(*r.state);
}

// Exact Born distribution over the occupations of `modes`, in lexicographic
// outcome order.
template <typename Scalar>
std::vector<std::pair<Occupation, Scalar>> outcome_distribution(const FockVector<Scalar>& state,
                                                                 std::span<const std::string> modes) {
    if (modes.empty()) throw ModeMismatch("measurement needs at least one mode");
    auto idx = detail::indices_of(state, modes);
    std::map<typename FockVector<Scalar>::Key, Scalar> probs;
    for (const auto& [k, a] : state) probs[detail::extract(state, k, std::span<const std::size_t>(idx))] += std::norm(a);
    std::vector<std::pair<Occupation, Scalar>> out;
    for (const auto& [k, p] : probs) {
        Occupation occ(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) occ[j] = int((k >> (4 * (idx.size() - 1 - j))) & 0xF);
        out.emplace_back(std::move(occ), p);
    }
    return out;
}

// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine draw.
template <typename Rng>
double uniform01(Rng& rng) {
    static_assert(Rng::min() == 0 && Rng::max() == std::numeric_limits<std::uint64_t>::max(),
                  "uniform01 needs a full-range 64-bit engine");
    return double(rng() >> 11) * 0x1.0p-53;
}

template <typename Scalar = double>
struct Measurement {
    Occupation outcome;
    HeraldResult<Scalar> herald;
};

// Precomputes the Born distribution of `modes` once so repeated draws only
// cost one uniform variate.
template <typename Scalar = double>
class MeasurementSampler {
public:
    MeasurementSampler(const FockVector<Scalar>& state, std::vector<std::string> modes)
        : state_(state), modes_(std::move(modes)), dist_(outcome_distribution(state_, std::span<const std::string>(modes_))) {
        Scalar acc = 0;
        for (const auto& [occ, p] : dist_) cumulative_.push_back(acc += p);
    }

    const std::vector<std::pair<Occupation, Scalar>>& distribution() const { return dist_; }

    template <typename Rng>
    std::size_t sample_index(Rng& rng) const {
        const Scalar u = Scalar(uniform01(rng)) * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(std::size_t(it - cumulative_.begin()), cumulative_.size() - 1);
    }

    Measurement<Scalar> collapse(std::size_t index) const {
        const auto& occ = dist_.at(index).first;
        return {occ, project_outcome(state_, std::span<const std::string>(modes_), occ)};
    }

    template <typename Rng>
    Measurement<Scalar> sample(Rng& rng) const {
        return collapse(sample_index(rng));
    }

private:
    FockVector<Scalar> state_;
    std::vector<std::string> modes_;
    std::vector<std::pair<Occupation, Scalar>> dist_;
    std::vector<Scalar> cumulative_;
};

template <typename Scalar, typename Rng>
Measurement<Scalar> sample_measurement(const FockVector<Scalar>& state, std::vector<std::string> modes, Rng& rng) {
    return MeasurementSampler<Scalar>(state, std::move(modes)).sample(rng);
}

}  // namespace phecp

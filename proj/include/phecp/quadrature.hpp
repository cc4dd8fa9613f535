// quadrature.hpp
// Globally adaptive 7/15-point Gauss-Kronrod integration.

#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace phecp {

template <typename Scalar = double>
struct QuadratureResult {
    Scalar value = 0;
    Scalar abs_error = 0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

template <typename Scalar>
struct KronrodRule {
    static constexpr std::array<Scalar, 8> nodes{
        Scalar(0.991455371120812639206854697526329), Scalar(0.949107912342758524526189684047851),
        Scalar(0.864864423359769072789712788640926), Scalar(0.741531185599394439863864773280788),
        Scalar(0.586087235467691130294144845693013), Scalar(0.405845151377397166906606412076961),
        Scalar(0.207784955007898467600689403773245), Scalar(0)};
    static constexpr std::array<Scalar, 8> kronrod_weights{
        Scalar(0.022935322010529224963732008058970), Scalar(0.063092092629978553290700663189204),
        Scalar(0.104790010322250183839876322541518), Scalar(0.140653259715525918745189590510238),
        Scalar(0.169004726639267902826583426598550), Scalar(0.190350578064785409913256402421014),
        Scalar(0.204432940075298892414161999234649), Scalar(0.209482141084727828012999174891714)};
    // Gauss weights for nodes[1], nodes[3], nodes[5], nodes[7].
    static constexpr std::array<Scalar, 4> gauss_weights{
        Scalar(0.129484966168869693270611432679082), Scalar(0.279705391489276667901467771423780),
        Scalar(0.381830050505118944950369775488975), Scalar(0.417959183673469387755102040816327)};
};

template <typename Scalar>
struct Segment {
    Scalar a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename Scalar, typename F>
Segment<Scalar> gauss_kronrod_15(const F& f, Scalar a, Scalar b) {
    using R = KronrodRule<Scalar>;
    const Scalar center = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    const Scalar fc = f(center);
    Scalar kronrod = R::kronrod_weights[7] * fc;
    Scalar gauss = R::gauss_weights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const Scalar dx = half * R::nodes[i];
        const Scalar pair = f(center - dx) + f(center + dx);
        kronrod += R::kronrod_weights[i] * pair;
        if (i % 2 == 1) gauss += R::gauss_weights[i / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

// Bisects the segment with the largest error estimate until the summed
// estimate drops below max(abs_tol, rel_tol * |value|).
template <typename Scalar = double, typename F>
QuadratureResult<Scalar> integrate_adaptive(const F& f, Scalar a, Scalar b, Scalar abs_tol = Scalar(1e-12),
                                            Scalar rel_tol = Scalar(1e-13), int max_intervals = 4000) {
    std::priority_queue<detail::Segment<Scalar>> heap;
    QuadratureResult<Scalar> out;
    auto first = detail::gauss_kronrod_15<Scalar>(f, a, b);
    out.evaluations = 15;
    heap.push(first);
    Scalar value = first.value, error = first.error;
    while (static_cast<int>(heap.size()) < max_intervals) {
        if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
            out.converged = true;
            break;
        }
        auto worst = heap.top();
        heap.pop();
        const Scalar mid = (worst.a + worst.b) / 2;
        auto left = detail::gauss_kronrod_15<Scalar>(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15<Scalar>(f, mid, worst.b);
        out.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum from the leaves so the running updates leave no drift.
    value = 0;
    error = 0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = value;
    out.abs_error = error;
    if (!out.converged) out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
    return out;
}

}  // namespace phecp

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptbsim::engine {

/// 1 on [start, start + width), 0 elsewhere.
[[nodiscard]] inline double pulse(double t, double start, double width) noexcept {
    return (t >= start && t < start + width) ? 1.0 : 0.0;
}

enum class FirstOrderKind { MaterialDelay, InformationSmooth };

/// State of a DELAY1I-style material delay or a SMOOTH-style exponential
/// smoother. A delay stores the material in transit (output × tau); a smooth
/// stores its output directly. Both have the same output dynamics.
struct FirstOrderState {
    double level = 0.0;
    double tau = 1.0;
    FirstOrderKind kind = FirstOrderKind::InformationSmooth;

    [[nodiscard]] double output() const noexcept {
        return kind == FirstOrderKind::MaterialDelay ? level / tau : level;
    }

    [[nodiscard]] double derivative(double input) const noexcept {
        return kind == FirstOrderKind::MaterialDelay ? input - output() : (input - level) / tau;
    }

    friend bool operator==(const FirstOrderState&, const FirstOrderState&) = default;
};

[[nodiscard]] inline FirstOrderState first_order_init(FirstOrderKind kind, double init_output, double tau) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("first-order time constant must be positive, got " + std::to_string(tau));
    }
    const double level = kind == FirstOrderKind::MaterialDelay ? init_output * tau : init_output;
    return FirstOrderState{level, tau, kind};
}

struct FirstOrderStep {
    FirstOrderState state;
    double output;  // output before the step
};

/// One explicit Euler step. Returns the advanced state together with the
/// output that was in effect during the step.
[[nodiscard]] inline FirstOrderStep first_order_step(FirstOrderState state, double input, double dt) noexcept {
    const double out = state.output();
    state.level += dt * state.derivative(input);
    return {state, out};
}

[[nodiscard]] inline std::vector<double> euler_step(std::span<const double> stocks,
                                                    std::span<const double> net_flows, double dt) {
    if (stocks.size() != net_flows.size()) {
        throw std::invalid_argument("euler_step: " + std::to_string(stocks.size()) + " stocks but " +
                                    std::to_string(net_flows.size()) + " flows");
    }
    std::vector<double> next(stocks.begin(), stocks.end());
    for (std::size_t i = 0; i < next.size(); ++i) {
        next[i] += dt * net_flows[i];
    }
    return next;
}

}  // namespace ptbsim::engine

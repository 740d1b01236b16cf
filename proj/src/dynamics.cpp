#include "spotsim/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace spotsim {

CriticalParams critical_params(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("critical_params: tau must be positive");
    // k derived from lambda so lambda^2 == 4k holds bit-exactly.
    const double lambda = 2.0 / tau;
    return {lambda, 0.25 * lambda * lambda};
}

OscillatorState make_oscillator(std::vector<double> value, std::vector<double> equilibrium,
                                double tau) {
    if (value.size() != equilibrium.size())
        throw std::invalid_argument("make_oscillator: value/equilibrium size mismatch");
    critical_params(tau);  // validates tau
    OscillatorState s;
    s.velocity.assign(value.size(), 0.0);
    s.value = std::move(value);
    s.equilibrium = std::move(equilibrium);
    s.tau = tau;
    return s;
}

void oscillator_step(OscillatorState& state, std::span<const double> force, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("oscillator_step: dt must be positive");
    if (force.size() != state.value.size())
        throw std::invalid_argument("oscillator_step: force dimensionality mismatch");
    const auto [lambda, k] = critical_params(state.tau);
    for (std::size_t i = 0; i < state.value.size(); ++i) {
        const double accel =
            force[i] - lambda * state.velocity[i] - k * (state.value[i] - state.equilibrium[i]);
        state.velocity[i] += dt * accel;
        state.value[i] += dt * state.velocity[i];
    }
}

namespace {

// State transition of the displacement/velocity pair (x - eq, v) for one
// semi-implicit Euler step, plus the force injection vector b.
void step_matrices(double tau, double dt, Eigen::Matrix2d& a, Eigen::Vector2d& b) {
    const auto [lambda, k] = critical_params(tau);
    a(0, 0) = 1.0 - dt * dt * k;
    a(0, 1) = dt * (1.0 - dt * lambda);
    a(1, 0) = -dt * k;
    a(1, 1) = 1.0 - dt * lambda;
    b(0) = dt * dt;
    b(1) = dt;
}

}  // namespace

double stationary_value_std(double sigma_f, double tau, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("stationary_value_std: dt must be positive");
    Eigen::Matrix2d a;
    Eigen::Vector2d b;
    step_matrices(tau, dt, a, b);
    if (std::abs(a.eigenvalues()(0)) >= 1.0 || std::abs(a.eigenvalues()(1)) >= 1.0)
        throw std::invalid_argument("stationary_value_std: recurrence unstable for this tau/dt");

    // Solve P = A P A^T + sigma_f^2 b b^T for the three unknowns of the
    // symmetric stationary covariance P = [[pxx, pxv], [pxv, pvv]].
    Eigen::Matrix3d m;
    m << a(0, 0) * a(0, 0) - 1.0, 2.0 * a(0, 0) * a(0, 1), a(0, 1) * a(0, 1),
        a(0, 0) * a(1, 0), a(0, 0) * a(1, 1) + a(0, 1) * a(1, 0) - 1.0, a(0, 1) * a(1, 1),
        a(1, 0) * a(1, 0), 2.0 * a(1, 0) * a(1, 1), a(1, 1) * a(1, 1) - 1.0;
    Eigen::Vector3d rhs;
    const double q = sigma_f * sigma_f;
    rhs << -q * b(0) * b(0), -q * b(0) * b(1), -q * b(1) * b(1);
    const Eigen::Vector3d p = m.fullPivLu().solve(rhs);
    if (!(p(0) >= 0.0) || !std::isfinite(p(0)))
        throw std::runtime_error("stationary_value_std: Lyapunov solve failed");
    return std::sqrt(p(0));
}

double calibrate_force_std(double target_std, double tau, double dt) {
    if (!(target_std >= 0.0))
        throw std::invalid_argument("calibrate_force_std: target_std must be non-negative");
    if (target_std == 0.0) return 0.0;
    return target_std / stationary_value_std(1.0, tau, dt);
}

double oscillator_energy(const OscillatorState& state) {
    const auto [lambda, k] = critical_params(state.tau);
    (void)lambda;
    double e = 0.0;
    for (std::size_t i = 0; i < state.value.size(); ++i) {
        const double x = state.value[i] - state.equilibrium[i];
        e += 0.5 * state.velocity[i] * state.velocity[i] + 0.5 * k * x * x;
    }
    return e;
}

}  // namespace spotsim

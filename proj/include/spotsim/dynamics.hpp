#pragma once

#include <span>
#include <vector>

namespace spotsim {

/// Damping and stiffness of a critically damped unit-mass oscillator with
/// relaxation time tau (frames): lambda = 2/tau, k = 1/tau^2, lambda^2 = 4k.
struct CriticalParams {
    double lambda;
    double k;
};

CriticalParams critical_params(double tau);

/// One critically damped harmonic oscillator over a small real vector.
/// value, velocity and equilibrium share dimensionality; tau is in frames.
struct OscillatorState {
    std::vector<double> value;
    std::vector<double> velocity;
    std::vector<double> equilibrium;
    double tau = 10.0;
};

/// Oscillator at rest at `value`, relaxing toward `equilibrium`.
OscillatorState make_oscillator(std::vector<double> value, std::vector<double> equilibrium,
                                double tau);

/// One semi-implicit Euler step: acceleration from the current state, then
/// velocity, then position. `force` must match the state dimensionality.
void oscillator_step(OscillatorState& state, std::span<const double> force, double dt);

/// Stationary std of (value - equilibrium) when the oscillator is driven by
/// i.i.d. zero-mean Gaussian forces of std sigma_f. Exact for the discrete
/// recurrence (2x2 discrete-time Lyapunov solve).
double stationary_value_std(double sigma_f, double tau, double dt);

/// Force std such that the driven stationary std of (value - equilibrium)
/// equals target_std. Linear in target_std.
double calibrate_force_std(double target_std, double tau, double dt);

/// Transient energy 0.5*|v|^2 + 0.5*k*|x - eq|^2 of the unit-mass system.
double oscillator_energy(const OscillatorState& state);

}  // namespace spotsim

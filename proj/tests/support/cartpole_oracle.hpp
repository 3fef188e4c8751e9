#pragma once

// Independent transcription of the classic-control cart-pole equations (Euler integrator).

#include <array>
#include <cmath>

namespace oracle {

struct PoleState {
    double x, x_dot, theta, theta_dot;
};

inline PoleState cartpole_reference_step(PoleState s, int action, double force_scale = 1.0, double length_scale = 1.0) {
    const double gravity = 9.8, masscart = 1.0, masspole = 0.1;
    const double total_mass = masspole + masscart;
    const double length = 0.5 * length_scale;
    const double polemass_length = masspole * length;
    const double force_mag = 10.0 * force_scale;
    const double tau = 0.02;

    const double force = action == 1 ? force_mag : -force_mag;
    const double costheta = std::cos(s.theta);
    const double sintheta = std::sin(s.theta);
    const double temp = (force + polemass_length * s.theta_dot * s.theta_dot * sintheta) / total_mass;
    const double thetaacc =
        (gravity * sintheta - costheta * temp) /
        (length * (4.0 / 3.0 - masspole * costheta * costheta / total_mass));
    const double xacc = temp - polemass_length * thetaacc * costheta / total_mass;

    s.x = s.x + tau * s.x_dot;
    s.x_dot = s.x_dot + tau * xacc;
    s.theta = s.theta + tau * s.theta_dot;
    s.theta_dot = s.theta_dot + tau * thetaacc;
    return s;
}

inline bool reference_done(const PoleState& s) {
    const double theta_limit = 12.0 * 2.0 * M_PI / 360.0;
    return s.x < -2.4 || s.x > 2.4 || s.theta < -theta_limit || s.theta > theta_limit;
}

} // namespace oracle

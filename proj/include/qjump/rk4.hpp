#pragma once

namespace qjump {

// Classic fixed-step RK4 for any state supporting state + state and
// state * double. The right-hand side is called as f(t, y).
template <class State, class Rhs>
State rk4_step(Rhs&& f, double t, const State& y, double dt) {
    State k1 = f(t, y);
    State k2 = f(t + 0.5 * dt, y + k1 * (0.5 * dt));
    State k3 = f(t + 0.5 * dt, y + k2 * (0.5 * dt));
    State k4 = f(t + dt, y + k3 * dt);
    return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
}

} // namespace qjump

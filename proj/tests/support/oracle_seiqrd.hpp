#pragma once

// Straight-line reimplementation of the six SEIQRD update equations, written
// directly from their definitions as an independent oracle. Deliberately
// shares no code with epiflow::step: plain arrays, explicit double loops,
// no outflow capping, no screening.

#include <array>
#include <vector>

namespace oracle {

struct Params {
    double beta_I, beta_Q, sigma, delta, gamma, mu;
};

// state[i] = {S, E, I, Q, R, D}; flows[i][j] = persons moving i -> j that day.
inline std::vector<std::array<double, 6>> step(
    const std::vector<std::array<double, 6>>& state,
    const std::vector<std::vector<double>>& flows, const std::vector<Params>& p) {
    const int n = static_cast<int>(state.size());
    std::vector<double> N(n), lam(n);
    for (int i = 0; i < n; ++i) {
        N[i] = state[i][0] + state[i][1] + state[i][2] + state[i][3] + state[i][4];
        lam[i] = p[i].beta_I * state[i][2] / N[i] + p[i].beta_Q * state[i][3] / N[i];
    }
    std::vector<std::array<double, 6>> next(n);
    for (int i = 0; i < n; ++i) {
        const double S = state[i][0], E = state[i][1], I = state[i][2], Q = state[i][3],
                     R = state[i][4], D = state[i][5];
        double mig_S = 0, mig_E = 0, mig_I = 0, mig_R = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            mig_S += flows[j][i] * state[j][0] / N[j] - flows[i][j] * S / N[i];
            mig_E += flows[j][i] * state[j][1] / N[j] - flows[i][j] * E / N[i];
            mig_I += flows[j][i] * state[j][2] / N[j] - flows[i][j] * I / N[i];
            mig_R += flows[j][i] * state[j][4] / N[j] - flows[i][j] * R / N[i];
        }
        next[i][0] = S - lam[i] * S + mig_S;
        next[i][1] = E + lam[i] * S - p[i].sigma * E + mig_E;
        next[i][2] = I + p[i].sigma * E - (p[i].delta + p[i].gamma + p[i].mu) * I + mig_I;
        next[i][3] = Q + p[i].delta * I - (p[i].gamma + p[i].mu) * Q;
        next[i][4] = R + p[i].gamma * I + p[i].gamma * Q + mig_R;
        next[i][5] = D + p[i].mu * I + p[i].mu * Q;
    }
    return next;
}

inline std::vector<std::vector<std::array<double, 6>>> simulate(
    std::vector<std::array<double, 6>> state,
    const std::vector<std::vector<std::vector<double>>>& daily_flows,
    const std::vector<Params>& p, int days) {
    std::vector<std::vector<std::array<double, 6>>> traj{state};
    for (int t = 0; t < days; ++t) {
        state = step(state, daily_flows[t], p);
        traj.push_back(state);
    }
    return traj;
}

}  // namespace oracle

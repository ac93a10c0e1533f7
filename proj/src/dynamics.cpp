#include "epiflow/dynamics.hpp"

#include <cmath>
#include <string>

namespace epiflow {

void ScreeningCalendar::add(Date day, int origin, int dest, double eta) {
    auto& orders = by_day_[day.days_since_epoch()];
    for (const auto& o : orders) {
        if (o.origin == origin && o.dest == dest) {
            if (o.eta != eta)
                throw ValidationError("conflicting screening orders for the same pair on " +
                                      day.to_string());
            return;  // identical duplicate is a no-op
        }
    }
    orders.push_back({origin, dest, eta});
}

std::span<const ScreeningOrder> ScreeningCalendar::at(Date day) const {
    const auto it = by_day_.find(day.days_since_epoch());
    if (it == by_day_.end()) return {};
    return it->second;
}

double force_of_infection(const CompartmentState& state, const ParamSet& params) {
    const double n = state.living();
    if (!(n > 0.0))
        throw InstabilityError("force of infection undefined: living population is zero");
    return params.beta_I * state.I / n + params.beta_Q * state.Q / n;
}

StepResult step(const std::vector<CompartmentState>& states, const FlowMatrix& flows,
                const std::vector<ParamSet>& params, std::span<const ScreeningOrder> screening,
                double tolerance) {
    const int n = static_cast<int>(states.size());
    StepResult out;
    out.next.resize(n);
    out.new_confirmed.assign(n, 0.0);

    std::vector<double> living(n), lambda(n);
    for (int i = 0; i < n; ++i) {
        living[i] = states[i].living();
        lambda[i] = force_of_infection(states[i], params[i]);
    }

    // Mobility outflow guard: if a region's total outflow would overdraw a
    // migrating compartment beyond what internal transitions leave behind,
    // scale that region-day's outflows uniformly so the compartment lands
    // exactly at zero. The equations assume flows small against populations
    // and do not cover this corner.
    std::vector<double> scale(n, 1.0);
    for (int j = 0; j < n; ++j) {
        const double m_out = flows.row_sum(j);
        if (m_out <= 0.0) continue;
        const auto& s = states[j];
        const ParamSet& p = params[j];
        const double avail[4] = {
            s.S - lambda[j] * s.S,
            s.E - p.sigma * s.E,
            s.I - (p.delta + p.gamma + p.mu) * s.I,
            s.R,
        };
        const double mass[4] = {s.S, s.E, s.I, s.R};
        for (int c = 0; c < 4; ++c) {
            const double outflow = mass[c] * m_out / living[j];
            if (outflow > avail[c] && outflow > 0.0) {
                const double cap = std::max(avail[c], 0.0) / outflow;
                if (cap < scale[j]) scale[j] = cap;
            }
        }
    }

    int capped = 0;
    for (int j = 0; j < n; ++j)
        if (scale[j] < 1.0) ++capped;
    out.capped_outflows = capped;

    // Screening lookup per (origin, dest).
    std::vector<double> eta(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& o : screening) eta[static_cast<std::size_t>(o.origin) * n + o.dest] = o.eta;

    for (int i = 0; i < n; ++i) {
        const auto& s = states[i];
        const ParamSet& p = params[i];
        const double lam = lambda[i];

        double dS = -lam * s.S;
        double dE = lam * s.S - p.sigma * s.E;
        double dI = p.sigma * s.E - (p.delta + p.gamma + p.mu) * s.I;
        double dQ = p.delta * s.I - (p.gamma + p.mu) * s.Q;
        double dR = p.gamma * s.I + p.gamma * s.Q;
        double dD = p.mu * s.I + p.mu * s.Q;
        out.new_confirmed[i] = p.delta * s.I;

        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double in = flows.at(j, i) * scale[j];
            const double outf = flows.at(i, j) * scale[i];
            if (in > 0.0) {
                const double nj = living[j];
                const double e_in = in * states[j].E / nj;
                const double i_in = in * states[j].I / nj;
                const double h = eta[static_cast<std::size_t>(j) * n + i];
                dS += in * states[j].S / nj;
                dE += e_in * (1.0 - h);
                dI += i_in * (1.0 - h);
                dQ += (e_in + i_in) * h;
                dR += in * states[j].R / nj;
                out.new_confirmed[i] += (e_in + i_in) * h;
            }
            if (outf > 0.0) {
                const double ni = living[i];
                dS -= outf * s.S / ni;
                dE -= outf * s.E / ni;
                dI -= outf * s.I / ni;
                dR -= outf * s.R / ni;
            }
        }

        CompartmentState next{s.S + dS, s.E + dE, s.I + dI, s.Q + dQ, s.R + dR, s.D + dD};
        double* fields[] = {&next.S, &next.E, &next.I, &next.Q, &next.R, &next.D};
        const char* names[] = {"S", "E", "I", "Q", "R", "D"};
        for (int c = 0; c < 6; ++c) {
            if (*fields[c] < -tolerance)
                throw InstabilityError("compartment " + std::string(names[c]) + " of region " +
                                       std::to_string(i) + " driven to " +
                                       std::to_string(*fields[c]) + " (below -tolerance)");
            if (*fields[c] < 0.0) *fields[c] = 0.0;
        }
        out.next[i] = next;
    }
    return out;
}

Simulator::Simulator(const ScenarioConfig& config, MobilitySchedule realized,
                     ScreeningCalendar screening)
    : config_(config), screening_(std::move(screening)) {
    traj_.start = config.start_date;
    traj_.realized = std::move(realized);
    std::vector<CompartmentState> init;
    std::vector<double> cq;
    for (const auto& r : config.regions) {
        init.push_back(r.initial);
        cq.push_back(r.initial.Q);  // initially confirmed mass counts as recorded cases
    }
    traj_.days.push_back(std::move(init));
    traj_.cum_q.push_back(std::move(cq));
}

void Simulator::advance_to(Date target) {
    if (target > config_.end_date) target = config_.end_date;
    const int n = config_.num_regions();
    while (current() < target) {
        const Date today = current();
        std::vector<ParamSet> params(n);
        for (int i = 0; i < n; ++i) params[i] = config_.regions[i].params.at(today);
        StepResult r;
        try {
            r = step(traj_.days.back(), traj_.realized.on(today), params, screening_.at(today));
        } catch (const InstabilityError& e) {
            throw InstabilityError(std::string(e.what()) + " on " + today.to_string());
        }
        capped_ += r.capped_outflows;
        std::vector<double> cq = traj_.cum_q.back();
        for (int i = 0; i < n; ++i) cq[i] += r.new_confirmed[i];
        traj_.days.push_back(std::move(r.next));
        traj_.cum_q.push_back(std::move(cq));
    }
}

Trajectory simulate(const ScenarioConfig& config, const MobilitySchedule& realized,
                    const ScreeningCalendar& screening) {
    Simulator sim(config, realized, screening);
    sim.advance_to(config.end_date);
    return sim.trajectory();
}

}  // namespace epiflow

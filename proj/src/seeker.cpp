#include "odvs/seeker.hpp"

#include <algorithm>
#include <cmath>

namespace odvs {

double stepsize(const StepSchedule& schedule, int k) { return schedule.lambda / std::pow(k, schedule.p); }

int update_direction(double v_now, double v_prev, int direction) {
    return (v_now - v_prev) >= 0.0 ? direction : -direction;
}

SeekerState po_step(const SeekerState& state, double v_now, const StepSchedule& schedule,
                    const Bounds1D& bounds) {
    SeekerState next = state;
    next.direction = update_direction(v_now, state.v_prev, state.direction);
    next.x = std::clamp(state.x + stepsize(schedule, state.k) * next.direction, bounds.lo, bounds.hi);
    next.k = state.k + 1;
    next.v_prev = v_now;
    return next;
}

std::vector<double> run_seek(const std::function<double(double)>& oracle, double x0, int d0,
                             const StepSchedule& schedule, const Bounds1D& bounds, int n_iters) {
    SeekerState st{std::clamp(x0, bounds.lo, bounds.hi), d0, 0, 0.0};
    std::vector<double> trajectory;
    trajectory.reserve(static_cast<size_t>(n_iters) + 1);
    trajectory.push_back(st.x);
    st.v_prev = oracle(st.x);  // warm-up observation, no move
    st.k = 1;
    for (int i = 0; i < n_iters; ++i) {
        st = po_step(st, oracle(st.x), schedule, bounds);
        trajectory.push_back(st.x);
    }
    return trajectory;
}

}  // namespace odvs

#pragma once

#include <functional>
#include <vector>

#include "odvs/reduction.hpp"

namespace odvs {

// Diminishing stepsize alpha_k = lambda / k^p, k >= 1; non-summable for p <= 1.
struct StepSchedule {
    double lambda = 1.0;
    double p = 1.0;
};

double stepsize(const StepSchedule& schedule, int k);

// Keeps the direction on improvement, flips on worsening; a tie counts as
// improvement.
int update_direction(double v_now, double v_prev, int direction);

// Perturb-and-observe iterate. k == 0 marks a seeker that still needs its
// warm-up observation before the first move.
struct SeekerState {
    double x = 0.0;
    int direction = -1;
    int k = 0;
    double v_prev = 0.0;
};

// One projected perturb-and-observe update: flip or keep the direction based
// on the new observation, move by the k-th stepsize, clamp to the bounds.
SeekerState po_step(const SeekerState& state, double v_now, const StepSchedule& schedule,
                    const Bounds1D& bounds);

// Open-loop seek against a voltage oracle; returns the iterate trajectory
// (x0 first, then one entry per step).
std::vector<double> run_seek(const std::function<double(double)>& oracle, double x0, int d0,
                             const StepSchedule& schedule, const Bounds1D& bounds, int n_iters);

}  // namespace odvs

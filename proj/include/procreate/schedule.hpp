#ifndef PROCREATE_SCHEDULE_HPP
#define PROCREATE_SCHEDULE_HPP

#include <vector>

#include "procreate/common.hpp"

namespace procreate {

// Cumulative signal-retention schedule for the forward noising process.
// alpha_bar[0] = 1 by convention; alpha_bar[t] = prod_{u<=t} (1 - beta_u)
// with beta linearly spaced over [beta_start, beta_end].
struct NoiseSchedule {
    int total_steps = 0;
    std::vector<double> alpha_bar;  // size total_steps + 1
    double beta_start = 0.0;
    double beta_end = 0.0;

    double alpha_bar_at(int t) const;
};

NoiseSchedule make_linear_schedule(int total_steps, double beta_start, double beta_end);

// Evenly spaced decreasing timestep grid from `from` down to 0 inclusive,
// `steps` transitions. Rounding collisions are collapsed so the grid is
// strictly decreasing; grid.front() == from, grid.back() == 0.
std::vector<int> timestep_grid(int from, int steps);

}  // namespace procreate

#endif

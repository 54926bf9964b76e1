#include "procreate/schedule.hpp"

#include <cmath>
#include <string>

namespace procreate {

double NoiseSchedule::alpha_bar_at(int t) const {
    if (t < 0 || t > total_steps)
        throw ConfigError("timestep " + std::to_string(t) + " outside schedule range [0, " +
                          std::to_string(total_steps) + "]");
    return alpha_bar[static_cast<std::size_t>(t)];
}

NoiseSchedule make_linear_schedule(int total_steps, double beta_start, double beta_end) {
    if (total_steps < 1)
        throw ConfigError("schedule needs total_steps >= 1, got " + std::to_string(total_steps));
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
        throw ConfigError("schedule needs 0 < beta_start <= beta_end < 1");

    NoiseSchedule s;
    s.total_steps = total_steps;
    s.beta_start = beta_start;
    s.beta_end = beta_end;
    s.alpha_bar.resize(static_cast<std::size_t>(total_steps) + 1);
    s.alpha_bar[0] = 1.0;
    double prod = 1.0;
    for (int t = 1; t <= total_steps; ++t) {
        double frac = total_steps == 1 ? 0.0 : double(t - 1) / double(total_steps - 1);
        double beta = beta_start + frac * (beta_end - beta_start);
        prod *= 1.0 - beta;
        s.alpha_bar[static_cast<std::size_t>(t)] = prod;
    }
    return s;
}

std::vector<int> timestep_grid(int from, int steps) {
    if (steps < 1) throw ConfigError("timestep grid needs steps >= 1");
    if (steps > from) throw ConfigError("steps (" + std::to_string(steps) +
                                        ") exceeds starting timestep " + std::to_string(from));
    std::vector<int> grid;
    grid.push_back(from);
    for (int i = 1; i <= steps; ++i) {
        int t = static_cast<int>(std::llround(double(from) * double(steps - i) / double(steps)));
        if (t < grid.back()) grid.push_back(t);
    }
    if (grid.back() != 0) grid.push_back(0);
    return grid;
}

}  // namespace procreate

#include "procreate/diffusion.hpp"

#include <algorithm>

namespace procreate {

SamplerKind parse_sampler_kind(const std::string& name) {
    if (name == "ddim") return SamplerKind::ddim;
    if (name == "ddpm") return SamplerKind::ddpm;
    throw ConfigError("unknown sampler kind '" + name + "' (expected ddim or ddpm)");
}

Vec ddpm_step(const Vec& x, const Vec& eps, int t, int t_next, const NoiseSchedule& schedule,
              GaussianRng& rng) {
    if (t_next >= t) throw ConfigError("ddpm_step requires t_next < t");
    const double ab_t = schedule.alpha_bar_at(t);
    const double ab_s = schedule.alpha_bar_at(t_next);
    double var = (1.0 - ab_s) / (1.0 - ab_t) * (1.0 - ab_t / ab_s);
    var = std::max(var, 0.0);
    const double sigma = std::sqrt(var);
    const double sa = std::sqrt(ab_s);
    const double sb = std::sqrt(std::max(1.0 - ab_s - var, 0.0));

    auto x0 = predict_x0_one_step(x, eps, t, schedule);
    Vec out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
        out[d] = sa * x0[d] + sb * eps[d];
        if (sigma > 0.0) out[d] += sigma * rng.gaussian();
    }
    return out;
}

Vec run_sampler(SamplerKind kind, int steps, const NoiseSchedule& schedule,
                const GaussianMixture& mixture, const EpsilonHook& hook, std::uint64_t rng_seed) {
    if (steps < 1 || steps > schedule.total_steps)
        throw ConfigError("sampler steps must satisfy 1 <= steps <= total_steps");
    mixture.validate();

    GaussianRng init_rng(derive_seed(rng_seed, seed_tag::init_noise));
    GaussianRng step_rng(derive_seed(rng_seed, seed_tag::ddpm_noise));

    Vec x = init_rng.gaussian_vector(static_cast<std::size_t>(mixture.dim()));
    const auto grid = timestep_grid(schedule.total_steps, steps);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const int t = grid[i];
        const int t_next = grid[i + 1];
        Vec eps = epsilon_gmm(x, t, schedule, mixture);
        if (hook) eps = hook(x, t, t_next, eps);
        x = kind == SamplerKind::ddim ? ddim_step(x, eps, t, t_next, schedule)
                                      : ddpm_step(x, eps, t, t_next, schedule, step_rng);
    }
    return x;
}

}  // namespace procreate

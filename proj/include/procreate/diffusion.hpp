#ifndef PROCREATE_DIFFUSION_HPP
#define PROCREATE_DIFFUSION_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "procreate/autodiff.hpp"
#include "procreate/mixture.hpp"
#include "procreate/rng.hpp"
#include "procreate/schedule.hpp"

namespace procreate {

// Noisy state plus its position on the schedule.
struct StatePoint {
    Vec coords;
    int t = 0;
};

enum class SamplerKind { ddim, ddpm };

SamplerKind parse_sampler_kind(const std::string& name);

inline double scalar_value(double v) { return v; }
inline double scalar_value(const autodiff::Rev& r) { return r.value(); }

// Log responsibilities log p(k | x_t) of the noised mixture. The marginal at
// timestep t has component means sqrt(ab)*mu_k and variances ab*sigma_k^2 + (1-ab).
// Zero-weight components are assigned -inf by convention (skipped downstream).
template <class S>
std::vector<S> component_log_posterior(const std::vector<S>& x, int t,
                                       const NoiseSchedule& schedule,
                                       const GaussianMixture& mixture) {
    using std::exp;
    using std::log;
    if (t < 1) throw ConfigError("noised-mixture posterior requires t >= 1");
    const double ab = schedule.alpha_bar_at(t);
    const double sqrt_ab = std::sqrt(ab);
    const std::size_t K = mixture.weights.size();
    const std::size_t D = x.size();
    if (D != static_cast<std::size_t>(mixture.dim()))
        throw ConfigError("state dimension does not match mixture dimension");

    std::vector<S> lp(K, S(0));
    for (std::size_t k = 0; k < K; ++k) {
        const double w = mixture.weights[k];
        if (w <= 0.0) continue;
        const double var = ab * mixture.component_std[k] * mixture.component_std[k] + (1.0 - ab);
        S sq = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
            S diff = x[d] - sqrt_ab * mixture.means[k][d];
            sq += diff * diff;
        }
        lp[k] = std::log(w) - 0.5 * double(D) * std::log(var) - S(0.5) * sq / var;
    }
    // normalize: lp - logsumexp(lp)
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k)
        if (mixture.weights[k] > 0.0 &&
            (mixture.weights[best] <= 0.0 || scalar_value(lp[k]) > scalar_value(lp[best])))
            best = k;
    S m = lp[best];
    S denom = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        if (mixture.weights[k] <= 0.0) continue;
        denom += exp(lp[k] - m);
    }
    S lse = m + log(denom);
    std::vector<S> out(K, S(-std::numeric_limits<double>::infinity()));
    for (std::size_t k = 0; k < K; ++k)
        if (mixture.weights[k] > 0.0) out[k] = lp[k] - lse;
    return out;
}

// Exact noise prediction for the mixture: eps(x,t) = -sqrt(1-ab) * score of
// the noised marginal, computed with softmax responsibilities for stability.
template <class S>
std::vector<S> epsilon_gmm(const std::vector<S>& x, int t, const NoiseSchedule& schedule,
                           const GaussianMixture& mixture) {
    using std::exp;
    if (t < 1) throw ConfigError("epsilon is undefined at t = 0 (no noise to predict)");
    const double ab = schedule.alpha_bar_at(t);
    const double sqrt_ab = std::sqrt(ab);
    const double sqrt_omb = std::sqrt(1.0 - ab);
    const std::size_t K = mixture.weights.size();
    const std::size_t D = x.size();

    auto lp = component_log_posterior(x, t, schedule, mixture);
    std::vector<S> eps(D, S(0.0));
    for (std::size_t k = 0; k < K; ++k) {
        if (mixture.weights[k] <= 0.0) continue;
        const double var = ab * mixture.component_std[k] * mixture.component_std[k] + (1.0 - ab);
        S resp = exp(lp[k]);
        for (std::size_t d = 0; d < D; ++d)
            eps[d] += resp * (x[d] - sqrt_ab * mixture.means[k][d]) / var;
    }
    for (auto& e : eps) e *= S(sqrt_omb);
    return eps;
}

// One-step clean prediction: (x - sqrt(1-ab_t) eps) / sqrt(ab_t).
template <class S>
std::vector<S> predict_x0_one_step(const std::vector<S>& x, const std::vector<S>& eps, int t,
                                   const NoiseSchedule& schedule) {
    if (t < 1 || t > schedule.total_steps)
        throw ConfigError("predict_x0 requires 1 <= t <= total_steps");
    const double ab = schedule.alpha_bar_at(t);
    const double sqrt_ab = std::sqrt(ab);
    const double sqrt_omb = std::sqrt(1.0 - ab);
    std::vector<S> x0(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) x0[d] = (x[d] - sqrt_omb * eps[d]) / sqrt_ab;
    return x0;
}

// Deterministic reverse update to t_next.
template <class S>
std::vector<S> ddim_step(const std::vector<S>& x, const std::vector<S>& eps, int t, int t_next,
                         const NoiseSchedule& schedule) {
    if (t_next >= t)
        throw ConfigError("ddim_step requires t_next < t (got t=" + std::to_string(t) +
                          ", t_next=" + std::to_string(t_next) + ")");
    auto x0 = predict_x0_one_step(x, eps, t, schedule);
    const double ab_next = schedule.alpha_bar_at(t_next);
    const double sa = std::sqrt(ab_next);
    const double sb = std::sqrt(1.0 - ab_next);
    std::vector<S> out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) out[d] = sa * x0[d] + sb * eps[d];
    return out;
}

// Ancestral update to t_next with the posterior variance; the noise term
// vanishes at t_next = 0 where the update coincides with DDIM.
Vec ddpm_step(const Vec& x, const Vec& eps, int t, int t_next, const NoiseSchedule& schedule,
              GaussianRng& rng);

// Modifies the raw noise prediction at one denoising step.
using EpsilonHook = std::function<Vec(const Vec& x, int t, int t_next, const Vec& eps)>;

// Full reverse rollout from seeded x_T ~ N(0, I) along an evenly spaced grid
// of `steps` transitions ending at t = 0. Returns x_0.
Vec run_sampler(SamplerKind kind, int steps, const NoiseSchedule& schedule,
                const GaussianMixture& mixture, const EpsilonHook& hook, std::uint64_t rng_seed);

}  // namespace procreate

#endif

#ifndef PROCREATE_GUIDANCE_HPP
#define PROCREATE_GUIDANCE_HPP

#include <optional>
#include <vector>

#include "procreate/diffusion.hpp"
#include "procreate/embedding.hpp"
#include "procreate/refstore.hpp"

namespace procreate {

struct GuidanceConfig {
    double gamma = 0.0;           // energy strength; 0 disables the gradient term
    int n_step = 5;               // look-ahead steps; 0 means no guidance at all
    std::optional<double> clip_norm;  // cap on |grad| before the sqrt(1-ab) scaling
    bool dynamic_growth = false;  // append generated batches to the reference set
    int batch_size = 1;

    void validate() const;
};

struct ClassifierGuidanceConfig {
    int target_component = 0;
    double scale = 0.0;
};

// Multi-step look-ahead clean prediction: n_step DDIM transitions along
// timesteps evenly spaced from t down to 0. n_step = 1 coincides with the
// one-step prediction. Rounding collisions on short grids collapse, so the
// effective step count is min(n_step, t).
template <class S>
std::vector<S> msla_predict_x0(const std::vector<S>& x, int t, int n_step,
                               const NoiseSchedule& schedule, const GaussianMixture& mixture) {
    if (t < 1) throw ConfigError("msla_predict_x0 requires t >= 1");
    if (n_step < 1) throw ConfigError("msla_predict_x0 requires n_step >= 1");
    const auto grid = timestep_grid(t, std::min(n_step, t));
    std::vector<S> cur = x;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        auto eps = epsilon_gmm(cur, grid[i], schedule, mixture);
        cur = ddim_step(cur, eps, grid[i], grid[i + 1], schedule);
    }
    return cur;
}

struct EnergyResult {
    double value = 0.0;
    std::size_t argmax = 0;   // index of the closest reference
    bool disabled = false;    // empty reference set: guidance is a no-op
};

// Propulsive log energy: gamma * max_i cos(f(msla_x0(x)), f(ref_i)).
EnergyResult energy(const Vec& x, int t, const RefSnapshot& refs, const GuidanceConfig& cfg,
                    const Embedder& embedder, const NoiseSchedule& schedule,
                    const GaussianMixture& mixture);

// The same energy as a differentiable program of x (reference embeddings are
// constants).
autodiff::Program make_energy_program(int t, const RefSnapshot& refs, const GuidanceConfig& cfg,
                                      const Embedder& embedder, const NoiseSchedule& schedule,
                                      const GaussianMixture& mixture);

Vec clip_gradient(const Vec& gvec, double clip_norm);

// Guided noise prediction: eps + sqrt(1 - ab_{t_next}) * clip(grad energy).
// gamma = 0 or an empty reference set returns the base eps untouched.
Vec guided_epsilon(const Vec& x, int t, int t_next, const RefSnapshot& refs,
                   const GuidanceConfig& cfg, const Embedder& embedder,
                   const NoiseSchedule& schedule, const GaussianMixture& mixture);

// Classifier-guidance baseline against the exact noised-mixture posterior:
// eps + scale * sqrt(1 - ab_{t_next}) * grad_x (-log p(c | x_t)).
Vec classifier_guided_epsilon(const Vec& x, int t, int t_next,
                              const ClassifierGuidanceConfig& cfg, const NoiseSchedule& schedule,
                              const GaussianMixture& mixture);

// Seed for the i-th sample of a batch run; shared between guided and baseline
// runs so the two are pairable.
std::uint64_t per_sample_seed(std::uint64_t master, std::size_t index);

// Batched ProCreate sampling. All samples in a batch are guided against one
// frozen snapshot; with dynamic_growth the batch outputs are appended to the
// store before the next batch starts. base_hook (when set) transforms the raw
// eps before the propulsive term is added, on guided and unguided paths alike.
std::vector<Vec> sample_batch_procreate(int count, ReferenceStore& refs,
                                        const GuidanceConfig& cfg, SamplerKind kind, int steps,
                                        const Embedder& embedder, const NoiseSchedule& schedule,
                                        const GaussianMixture& mixture, std::uint64_t rng_seed,
                                        const EpsilonHook& base_hook = {});

}  // namespace procreate

#endif

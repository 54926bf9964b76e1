#include "procreate/guidance.hpp"

#include <cmath>

namespace procreate {

void GuidanceConfig::validate() const {
    if (gamma < 0.0) throw ConfigError("guidance gamma must be >= 0");
    if (n_step < 0) throw ConfigError("guidance n_step must be >= 0");
    if (clip_norm && !(*clip_norm > 0.0)) throw ConfigError("guidance clip_norm must be > 0");
    if (batch_size < 1) throw ConfigError("guidance batch_size must be >= 1");
}

EnergyResult energy(const Vec& x, int t, const RefSnapshot& refs, const GuidanceConfig& cfg,
                    const Embedder& embedder, const NoiseSchedule& schedule,
                    const GaussianMixture& mixture) {
    if (refs.empty()) return {0.0, 0, true};
    auto x0 = msla_predict_x0(x, t, cfg.n_step, schedule, mixture);
    auto emb = embedder.embed(x0);
    EnergyResult res;
    double best = -2.0;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const double s = cosine_similarity(emb, refs.embeddings[i]);
        if (s > best) {
            best = s;
            res.argmax = i;
        }
    }
    res.value = cfg.gamma * best;
    return res;
}

autodiff::Program make_energy_program(int t, const RefSnapshot& refs, const GuidanceConfig& cfg,
                                      const Embedder& embedder, const NoiseSchedule& schedule,
                                      const GaussianMixture& mixture) {
    if (refs.empty()) throw ConfigError("energy program needs a nonempty reference set");
    // Copies keep the program self-contained.
    auto ref_embeddings = refs.embeddings;
    const double gamma = cfg.gamma;
    const int n_step = cfg.n_step;
    return [=, &schedule](autodiff::Tape&, std::span<const autodiff::Rev> x) -> autodiff::Rev {
        std::vector<autodiff::Rev> xv(x.begin(), x.end());
        auto x0 = msla_predict_x0(xv, t, n_step, schedule, mixture);
        auto emb = embedder.embed(x0);
        std::vector<autodiff::Rev> sims;
        sims.reserve(ref_embeddings.size());
        for (const auto& r : ref_embeddings) sims.push_back(cosine_similarity_rev(emb, r));
        return autodiff::Rev(gamma) * autodiff::vmax(sims);
    };
}

Vec clip_gradient(const Vec& gvec, double clip_norm) {
    if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be > 0");
    double sq = 0.0;
    for (double g : gvec) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm <= clip_norm) return gvec;
    Vec out(gvec);
    const double scale = clip_norm / norm;
    for (auto& g : out) g *= scale;
    return out;
}

Vec guided_epsilon(const Vec& x, int t, int t_next, const RefSnapshot& refs,
                   const GuidanceConfig& cfg, const Embedder& embedder,
                   const NoiseSchedule& schedule, const GaussianMixture& mixture) {
    if (t_next >= t) throw ConfigError("guided_epsilon requires t_next < t");
    Vec eps = epsilon_gmm(x, t, schedule, mixture);
    if (cfg.gamma == 0.0 || refs.empty()) return eps;

    auto program = make_energy_program(t, refs, cfg, embedder, schedule, mixture);
    Vec grad = autodiff::gradient(program, x);
    if (cfg.clip_norm) grad = clip_gradient(grad, *cfg.clip_norm);

    const double scale = std::sqrt(1.0 - schedule.alpha_bar_at(t_next));
    for (std::size_t d = 0; d < eps.size(); ++d) eps[d] += scale * grad[d];
    return eps;
}

Vec classifier_guided_epsilon(const Vec& x, int t, int t_next,
                              const ClassifierGuidanceConfig& cfg, const NoiseSchedule& schedule,
                              const GaussianMixture& mixture) {
    if (cfg.scale < 0.0) throw ConfigError("classifier guidance scale must be >= 0");
    if (cfg.target_component < 0 || cfg.target_component >= mixture.component_count())
        throw ConfigError("classifier guidance target component out of range");
    Vec eps = epsilon_gmm(x, t, schedule, mixture);
    if (cfg.scale == 0.0) return eps;

    const int target = cfg.target_component;
    autodiff::Program loss = [&, target](autodiff::Tape&,
                                         std::span<const autodiff::Rev> in) -> autodiff::Rev {
        std::vector<autodiff::Rev> xv(in.begin(), in.end());
        auto lp = component_log_posterior(xv, t, schedule, mixture);
        return -lp[static_cast<std::size_t>(target)];
    };
    Vec grad = autodiff::gradient(loss, x);
    const double scale = cfg.scale * std::sqrt(1.0 - schedule.alpha_bar_at(t_next));
    for (std::size_t d = 0; d < eps.size(); ++d) eps[d] += scale * grad[d];
    return eps;
}

std::uint64_t per_sample_seed(std::uint64_t master, std::size_t index) {
    return derive_seed(master, 0x73616d706cULL, index);
}

std::vector<Vec> sample_batch_procreate(int count, ReferenceStore& refs,
                                        const GuidanceConfig& cfg, SamplerKind kind, int steps,
                                        const Embedder& embedder, const NoiseSchedule& schedule,
                                        const GaussianMixture& mixture, std::uint64_t rng_seed,
                                        const EpsilonHook& base_hook) {
    cfg.validate();
    if (count < 1) throw ConfigError("sample count must be >= 1");
    const bool guided = cfg.gamma > 0.0 && cfg.n_step > 0;
    if (guided && refs.size() == 0 && !cfg.dynamic_growth)
        throw ConfigError("guidance with an empty reference set requires dynamic_growth");

    std::vector<Vec> outputs;
    outputs.reserve(static_cast<std::size_t>(count));
    int produced = 0;
    while (produced < count) {
        const int batch = std::min(cfg.batch_size, count - produced);
        const RefSnapshot snapshot = refs.snapshot();  // frozen for the whole batch

        EpsilonHook hook = base_hook;
        if (guided && !snapshot.empty()) {
            hook = [&, snapshot](const Vec& x, int t, int t_next, const Vec& eps) -> Vec {
                Vec base = base_hook ? base_hook(x, t, t_next, eps) : eps;
                auto program = make_energy_program(t, snapshot, cfg, embedder, schedule, mixture);
                Vec grad = autodiff::gradient(program, x);
                if (cfg.clip_norm) grad = clip_gradient(grad, *cfg.clip_norm);
                const double scale = std::sqrt(1.0 - schedule.alpha_bar_at(t_next));
                for (std::size_t d = 0; d < base.size(); ++d) base[d] += scale * grad[d];
                return base;
            };
        }

        std::vector<Vec> batch_out;
        for (int i = 0; i < batch; ++i) {
            const auto seed = per_sample_seed(rng_seed, static_cast<std::size_t>(produced + i));
            batch_out.push_back(run_sampler(kind, steps, schedule, mixture, hook, seed));
        }
        if (cfg.dynamic_growth) refs.add_batch(batch_out, RefOrigin::generated);
        for (auto& s : batch_out) outputs.push_back(std::move(s));
        produced += batch;
    }
    return outputs;
}

}  // namespace procreate

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "procreate/guidance.hpp"

using namespace procreate;

namespace {

NoiseSchedule sched() { return make_linear_schedule(1000, 1e-4, 0.02); }

GaussianMixture ring_mixture(int K, double radius, double sd) {
    GaussianMixture m;
    for (int k = 0; k < K; ++k) {
        double angle = 2.0 * M_PI * k / K;
        m.weights.push_back(1.0 / K);
        m.means.push_back({radius * std::cos(angle), radius * std::sin(angle)});
        m.component_std.push_back(sd);
    }
    double s = 0.0;
    for (double w : m.weights) s += w;
    m.weights[0] += 1.0 - s;
    return m;
}

RefSnapshot snapshot_from_points(const Embedder& e, const std::vector<Vec>& pts) {
    RefSnapshot s;
    for (const auto& p : pts) {
        s.points.push_back(p);
        s.embeddings.push_back(e.embed(p));
        s.origins.push_back(RefOrigin::original);
    }
    return s;
}

}  // namespace

TEST_CASE("msla n_step=1 equals the one-step prediction") {
    auto sc = sched();
    auto mix = ring_mixture(4, 1.0, 0.3);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int t : {5, 100, 500, 1000}) {
        Vec x = {unif(gen), unif(gen)};
        auto eps = epsilon_gmm(x, t, sc, mix);
        auto one = predict_x0_one_step(x, eps, t, sc);
        auto msla = msla_predict_x0(x, t, 1, sc, mix);
        CHECK(msla[0] == doctest::Approx(one[0]).epsilon(1e-14));
        CHECK(msla[1] == doctest::Approx(one[1]).epsilon(1e-14));
    }
}

TEST_CASE("msla on a point mass returns mu for every n_step") {
    auto sc = sched();
    GaussianMixture mix{{1.0}, {{0.8, -0.6}}, {0.0}};
    Vec x = {2.5, 1.0};
    for (int n : {1, 3, 5}) {
        auto x0 = msla_predict_x0(x, 700, n, sc, mix);
        CHECK(x0[0] == doctest::Approx(0.8).epsilon(1e-9));
        CHECK(x0[1] == doctest::Approx(-0.6).epsilon(1e-9));
    }
    CHECK_THROWS_AS(msla_predict_x0(x, 700, 0, sc, mix), ConfigError);
    CHECK_THROWS_AS(msla_predict_x0(x, 0, 1, sc, mix), ConfigError);
}

TEST_CASE("msla sharpens toward the full rollout as n_step grows") {
    auto sc = sched();
    GaussianMixture mix{{1.0}, {{0.5, -0.25}}, {1.0}};
    GuidanceConfig cfg;
    std::map<int, double> sqdist;  // n_step -> mean squared distance to full rollout x0
    const int draws = 100;
    for (int n : {1, 3, 5}) sqdist[n] = 0.0;
    for (int i = 0; i < draws; ++i) {
        GaussianRng rng(10'000 + (uint64_t)i);
        Vec xt = rng.gaussian_vector(2);
        const int t = 800;
        // reference: full 50-step rollout from (xt, t)
        Vec full = xt;
        auto grid = timestep_grid(t, 50);
        for (size_t g = 0; g + 1 < grid.size(); ++g) {
            auto eps = epsilon_gmm(full, grid[g], sc, mix);
            full = ddim_step(full, eps, grid[g], grid[g + 1], sc);
        }
        for (int n : {1, 3, 5}) {
            auto pred = msla_predict_x0(xt, t, n, sc, mix);
            double d = 0.0;
            for (size_t k = 0; k < 2; ++k) d += (pred[k] - full[k]) * (pred[k] - full[k]);
            sqdist[n] += d / draws;
        }
    }
    CHECK(sqdist[3] <= sqdist[1] + 1e-12);
    CHECK(sqdist[5] <= sqdist[3] + 1e-12);
}

TEST_CASE("energy closed forms") {
    auto sc = sched();
    GaussianMixture mix{{1.0}, {{1.0, 0.5}}, {0.0}};
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.n_step = 1;
    Vec x = {0.3, 0.9};

    // gamma = 0 -> 0 regardless of refs
    cfg.gamma = 0.0;
    auto snap = snapshot_from_points(e, {{2.0, 2.0}});
    CHECK(energy(x, 400, snap, cfg, e, sc, mix).value == 0.0);

    // single reference equal to the prediction -> gamma * 1
    cfg.gamma = 2.5;
    auto pred = msla_predict_x0(x, 400, 1, sc, mix);
    auto self_snap = snapshot_from_points(e, {pred});
    CHECK(energy(x, 400, self_snap, cfg, e, sc, mix).value == doctest::Approx(2.5));

    // empty refs -> disabled signal, not an exception
    auto disabled = energy(x, 400, RefSnapshot{}, cfg, e, sc, mix);
    CHECK(disabled.disabled);
    CHECK(disabled.value == 0.0);
}

TEST_CASE("energy argmax picks the exact match") {
    auto sc = sched();
    // point mass at (1, 0): the msla prediction embedding is (1, 0)
    GaussianMixture mix{{1.0}, {{1.0, 0.0}}, {0.0}};
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.n_step = 1;
    cfg.gamma = 3.0;
    auto snap = snapshot_from_points(e, {{1.0, 0.0}, {0.0, 1.0}});
    auto res = energy({0.5, 0.0}, 300, snap, cfg, e, sc, mix);
    CHECK(res.argmax == 0);
    CHECK(res.value == doctest::Approx(3.0));
}

TEST_CASE("energy equals brute-force max over references") {
    auto sc = sched();
    auto mix = ring_mixture(5, 1.0, 0.4);
    Embedder e(EmbedderKind::random_linear_tanh, 11, 2, 8);
    GuidanceConfig cfg;
    cfg.n_step = 3;
    cfg.gamma = 1.7;
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec> refs;
        for (int i = 0; i < 7; ++i) refs.push_back({unif(gen), unif(gen)});
        auto snap = snapshot_from_points(e, refs);
        Vec x = {unif(gen), unif(gen)};
        int t = 1 + int(gen() % 1000);

        auto res = energy(x, t, snap, cfg, e, sc, mix);
        auto emb = e.embed(msla_predict_x0(x, t, cfg.n_step, sc, mix));
        double best = -2.0;
        for (const auto& r : snap.embeddings) best = std::max(best, cosine_similarity(emb, r));
        CHECK(res.value == doctest::Approx(cfg.gamma * best).epsilon(1e-12));
    }
}

TEST_CASE("energy gradient matches finite differences through the rollout") {
    auto sc = sched();
    auto mix = ring_mixture(3, 1.0, 0.5);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.n_step = 3;
    cfg.gamma = 1.0;
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    std::vector<Vec> refs = {{1.2, 0.1}, {-0.5, 0.8}};
    auto snap = snapshot_from_points(e, refs);

    for (int trial = 0; trial < 10; ++trial) {
        Vec x = {unif(gen), unif(gen)};
        int t = 100 + int(gen() % 900);
        auto program = make_energy_program(t, snap, cfg, e, sc, mix);
        auto grad = autodiff::gradient(program, x);
        double norm = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        auto fd = autodiff::finite_diff(program, x, 1e-5 * (1.0 + norm));
        double num = 0.0, den = 0.0;
        for (size_t d = 0; d < 2; ++d) {
            num += (grad[d] - fd[d]) * (grad[d] - fd[d]);
            den += fd[d] * fd[d];
        }
        CHECK(std::sqrt(num) < 1e-4 * std::max(std::sqrt(den), 1e-8));
    }
}

TEST_CASE("clip_gradient") {
    CHECK(clip_gradient({0.3, 0.4}, 1.0) == Vec{0.3, 0.4});
    auto clipped = clip_gradient({3.0, 4.0}, 1.0);
    CHECK(clipped[0] == doctest::Approx(0.6));
    CHECK(clipped[1] == doctest::Approx(0.8));

    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        Vec g = {unif(gen), unif(gen), unif(gen)};
        auto c = clip_gradient(g, 2.5);
        double n = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
        CHECK(n <= 2.5 * (1.0 + 1e-12));
    }
    CHECK_THROWS_AS(clip_gradient({1.0}, 0.0), ConfigError);
}

TEST_CASE("guided_epsilon gamma=0 returns the base epsilon bitwise") {
    auto sc = sched();
    auto mix = ring_mixture(4, 1.0, 0.3);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 0.0;
    cfg.n_step = 5;
    auto snap = snapshot_from_points(e, {{1.0, 0.0}});
    Vec x = {0.4, -1.1};
    CHECK(guided_epsilon(x, 500, 400, snap, cfg, e, sc, mix) == epsilon_gmm(x, 500, sc, mix));
}

TEST_CASE("guided_epsilon stationary point leaves epsilon unchanged") {
    auto sc = sched();
    GaussianMixture mix{{1.0}, {{1.0, 0.0}}, {0.0}};  // x0 prediction is always mu
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 2.0;
    cfg.n_step = 1;
    // reference parallel to the prediction embedding: cosine is at its max
    auto snap = snapshot_from_points(e, {{2.0, 0.0}});
    Vec x = {0.9, 0.7};
    auto base = epsilon_gmm(x, 600, sc, mix);
    auto guided = guided_epsilon(x, 600, 500, snap, cfg, e, sc, mix);
    CHECK(guided[0] == doctest::Approx(base[0]).epsilon(1e-10));
    CHECK(guided[1] == doctest::Approx(base[1]).epsilon(1e-10));
}

TEST_CASE("guided_epsilon recomposes from the energy gradient") {
    auto sc = sched();
    auto mix = ring_mixture(6, 1.0, 0.25);
    Embedder e(EmbedderKind::random_linear, 13, 2, 5);
    GuidanceConfig cfg;
    cfg.gamma = 1.3;
    cfg.n_step = 3;
    cfg.clip_norm = 0.75;
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::vector<Vec> refs;
    for (int i = 0; i < 5; ++i) refs.push_back({unif(gen), unif(gen)});
    auto snap = snapshot_from_points(e, refs);

    for (int trial = 0; trial < 10; ++trial) {
        Vec x = {unif(gen), unif(gen)};
        int t = 200 + int(gen() % 800);
        int t_next = t - 20;
        auto base = epsilon_gmm(x, t, sc, mix);
        auto guided = guided_epsilon(x, t, t_next, snap, cfg, e, sc, mix);

        auto program = make_energy_program(t, snap, cfg, e, sc, mix);
        auto grad = clip_gradient(autodiff::gradient(program, x), *cfg.clip_norm);
        const double scale = std::sqrt(1.0 - sc.alpha_bar_at(t_next));
        for (size_t d = 0; d < 2; ++d)
            CHECK(guided[d] - base[d] == doctest::Approx(scale * grad[d]).epsilon(1e-12));
    }
}

TEST_CASE("additive term norm bounded by sqrt(1-ab) * clip_norm") {
    auto sc = sched();
    auto mix = ring_mixture(4, 1.0, 0.2);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 50.0;  // large so clipping is active
    cfg.n_step = 1;
    cfg.clip_norm = 0.5;
    auto snap = snapshot_from_points(e, {{1.0, 0.2}, {-0.3, 0.8}});
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        Vec x = {unif(gen), unif(gen)};
        int t = 100 + int(gen() % 900);
        int t_next = t / 2;
        auto base = epsilon_gmm(x, t, sc, mix);
        auto guided = guided_epsilon(x, t, t_next, snap, cfg, e, sc, mix);
        double n = 0.0;
        for (size_t d = 0; d < 2; ++d) n += (guided[d] - base[d]) * (guided[d] - base[d]);
        double cap = std::sqrt(1.0 - sc.alpha_bar_at(t_next)) * (*cfg.clip_norm);
        CHECK(std::sqrt(n) <= cap * (1.0 + 1e-12));
    }
}

TEST_CASE("doubling gamma doubles the pre-clip additive term") {
    auto sc = sched();
    auto mix = ring_mixture(4, 1.0, 0.3);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 0.4;
    cfg.n_step = 2;
    auto snap = snapshot_from_points(e, {{1.0, -0.5}, {0.2, 0.9}});
    Vec x = {1.1, -0.3};
    int t = 640, t_next = 600;
    auto base = epsilon_gmm(x, t, sc, mix);
    auto g1 = guided_epsilon(x, t, t_next, snap, cfg, e, sc, mix);
    cfg.gamma = 0.8;
    auto g2 = guided_epsilon(x, t, t_next, snap, cfg, e, sc, mix);
    for (size_t d = 0; d < 2; ++d)
        CHECK(g2[d] - base[d] == doctest::Approx(2.0 * (g1[d] - base[d])).epsilon(1e-10));
}

TEST_CASE("energy is invariant to positive rescaling of a reference embedding") {
    auto sc = sched();
    auto mix = ring_mixture(4, 1.0, 0.3);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 1.0;
    cfg.n_step = 1;
    auto snap = snapshot_from_points(e, {{0.9, 0.1}, {-0.4, 0.7}});
    Vec x = {0.8, 0.2};
    auto before = energy(x, 350, snap, cfg, e, sc, mix);
    for (auto& v : snap.embeddings[0]) v *= 17.0;
    auto after = energy(x, 350, snap, cfg, e, sc, mix);
    CHECK(after.value == doctest::Approx(before.value).epsilon(1e-12));
    CHECK(after.argmax == before.argmax);
}

TEST_CASE("classifier guidance basics") {
    auto sc = sched();
    GaussianMixture mix{{0.5, 0.5}, {{2.0, 0.0}, {-2.0, 0.0}}, {0.3, 0.3}};
    ClassifierGuidanceConfig cfg;
    cfg.target_component = 0;
    cfg.scale = 0.0;
    Vec x = {0.1, 0.5};
    CHECK(classifier_guided_epsilon(x, 500, 400, cfg, sc, mix) == epsilon_gmm(x, 500, sc, mix));

    // equidistant point: posterior 0.5 each, gradient pushes toward target
    cfg.scale = 1.0;
    Vec mid = {0.0, 0.7};
    auto lp = component_log_posterior(mid, 500, sc, mix);
    CHECK(std::exp(lp[0]) == doctest::Approx(0.5).epsilon(1e-10));
    auto base = epsilon_gmm(mid, 500, sc, mix);
    auto guided = classifier_guided_epsilon(mid, 500, 400, cfg, sc, mix);
    // along the mean axis the epsilon shift must point away from the target
    // mean (larger predicted noise on the +x side pulls x0 toward component 0
    // is wrong; the -log p(c|x) gradient decreases toward the target), so the
    // delta must be negative along +x for target 0 at x=0:
    CHECK(guided[0] < base[0]);
    CHECK(guided[1] == doctest::Approx(base[1]).epsilon(1e-9));

    cfg.target_component = 5;
    CHECK_THROWS_AS(classifier_guided_epsilon(mid, 500, 400, cfg, sc, mix), ConfigError);
}

TEST_CASE("full classifier-guided run lands in the target component") {
    auto sc = sched();
    GaussianMixture mix{{0.5, 0.5}, {{2.0, 0.0}, {-2.0, 0.0}}, {0.3, 0.3}};
    ClassifierGuidanceConfig cfg;
    cfg.target_component = 1;
    cfg.scale = 8.0;
    int hits = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        EpsilonHook hook = [&](const Vec& x, int t, int t_next, const Vec&) {
            return classifier_guided_epsilon(x, t, t_next, cfg, sc, mix);
        };
        auto x0 = run_sampler(SamplerKind::ddim, 50, sc, mix, hook, 40'000 + (uint64_t)i);
        auto lp = component_log_posterior(x0, 1, sc, mix);
        if (lp[1] > lp[0]) ++hits;
    }
    CHECK(double(hits) / n >= 0.9);
}

TEST_CASE("sample_batch gamma=0 is bitwise the unguided sampler") {
    auto sc = sched();
    auto mix = ring_mixture(4, 1.0, 0.3);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 0.0;
    cfg.n_step = 5;
    cfg.batch_size = 3;
    ReferenceStore store(e);
    store.add_batch({{1.0, 0.0}}, RefOrigin::original);
    const uint64_t seed = 777;
    auto out = sample_batch_procreate(7, store, cfg, SamplerKind::ddim, 50, e, sc, mix, seed);
    REQUIRE(out.size() == 7);
    for (size_t i = 0; i < out.size(); ++i)
        CHECK(out[i] == run_sampler(SamplerKind::ddim, 50, sc, mix, {}, per_sample_seed(seed, i)));
}

TEST_CASE("dynamic growth bookkeeping") {
    auto sc = sched();
    auto mix = ring_mixture(4, 1.0, 0.3);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 0.5;
    cfg.n_step = 1;
    cfg.dynamic_growth = true;
    cfg.batch_size = 4;
    ReferenceStore store(e);
    std::vector<Vec> refs;
    for (int i = 0; i < 6; ++i) refs.push_back({0.5 + 0.1 * i, -0.2});
    store.add_batch(refs, RefOrigin::original);
    sample_batch_procreate(4, store, cfg, SamplerKind::ddim, 50, e, sc, mix, 3);
    CHECK(store.size() == 10);
    for (int i = 0; i < 6; ++i) CHECK(store.snapshot().origins[(size_t)i] == RefOrigin::original);
    for (int i = 6; i < 10; ++i) CHECK(store.snapshot().origins[(size_t)i] == RefOrigin::generated);
}

TEST_CASE("empty refs with gamma>0 and no growth is a configuration error") {
    auto sc = sched();
    auto mix = ring_mixture(4, 1.0, 0.3);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 1.0;
    cfg.n_step = 1;
    cfg.dynamic_growth = false;
    ReferenceStore store(e);
    CHECK_THROWS_AS(sample_batch_procreate(2, store, cfg, SamplerKind::ddim, 50, e, sc, mix, 1),
                    ConfigError);
    cfg.dynamic_growth = true;  // allowed: first batch runs unguided
    auto out = sample_batch_procreate(2, store, cfg, SamplerKind::ddim, 50, e, sc, mix, 1);
    CHECK(out.size() == 2);
    CHECK(store.size() == 2);
}

TEST_CASE("growth lets the argmax select a generated reference") {
    auto sc = sched();
    auto mix = ring_mixture(8, 1.0, 0.15);
    auto e = Embedder::identity(2);
    GuidanceConfig cfg;
    cfg.gamma = 0.2;
    cfg.n_step = 1;
    cfg.dynamic_growth = true;
    cfg.batch_size = 1;  // singleton batches: each sample sees all previous outputs
    ReferenceStore store(e);
    store.add_batch({{5.0, 5.0}}, RefOrigin::original);  // far away, rarely the argmax
    auto out = sample_batch_procreate(6, store, cfg, SamplerKind::ddim, 50, e, sc, mix, 21);
    REQUIRE(store.size() == 7);

    bool generated_argmax = false;
    for (size_t i = 1; i < out.size(); ++i) {
        RefSnapshot prior;
        for (size_t j = 0; j < 1 + i; ++j) {
            prior.points.push_back(store.snapshot().points[j]);
            prior.embeddings.push_back(store.snapshot().embeddings[j]);
            prior.origins.push_back(store.snapshot().origins[j]);
        }
        auto nr = nearest_reference(prior, e.embed(out[i]));
        if (store.snapshot().origins[nr.index] == RefOrigin::generated) generated_argmax = true;
    }
    CHECK(generated_argmax);
}

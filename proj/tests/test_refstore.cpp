#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>

#include "procreate/refstore.hpp"

using namespace procreate;

namespace {

RefSnapshot snapshot_of(const std::vector<Vec>& embeddings) {
    RefSnapshot s;
    for (const auto& e : embeddings) {
        s.points.push_back(e);
        s.embeddings.push_back(e);
        s.origins.push_back(RefOrigin::original);
    }
    return s;
}

}  // namespace

TEST_CASE("add_batch counts and append-only order") {
    ReferenceStore store(Embedder::identity(2));
    std::vector<Vec> first;
    for (int i = 0; i < 10; ++i) first.push_back({double(i), 0.0});
    CHECK(store.add_batch(first, RefOrigin::original) == 10);

    auto before = store.snapshot().points;
    CHECK(store.add_batch({{100.0, 1.0}, {101.0, 1.0}}, RefOrigin::generated) == 12);
    for (size_t i = 0; i < before.size(); ++i) CHECK(store.snapshot().points[i] == before[i]);
    CHECK(store.snapshot().origins[11] == RefOrigin::generated);
}

TEST_CASE("cached embedding equals a fresh embed call") {
    Embedder e(EmbedderKind::random_linear_tanh, 3, 2, 4);
    ReferenceStore store(e);
    Vec p = {0.25, -1.5};
    store.add_batch({p}, RefOrigin::original);
    CHECK(store.snapshot().embeddings[0] == e.embed(p));
}

TEST_CASE("add_batch rejects dimension mismatch") {
    ReferenceStore store(Embedder::identity(2));
    CHECK_THROWS_AS(store.add_batch({{1.0, 2.0, 3.0}}, RefOrigin::original), ConfigError);
}

TEST_CASE("nearest_reference exact match and tie break") {
    auto snap = snapshot_of({{1.0, 0.0}, {0.0, 1.0}});
    auto res = nearest_reference(snap, {1.0, 0.0});
    CHECK(res.index == 0);
    CHECK(res.similarity == doctest::Approx(1.0));

    auto tie = nearest_reference(snap, {std::sqrt(0.5), std::sqrt(0.5)});
    CHECK(tie.index == 0);  // lowest index wins
    CHECK(tie.similarity == doctest::Approx(std::sqrt(0.5)));

    CHECK_THROWS_AS(nearest_reference(RefSnapshot{}, {1.0, 0.0}), ConfigError);
}

TEST_CASE("nearest_reference agrees with exhaustive scan on 1000 random refs") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Vec> embs;
    for (int i = 0; i < 1000; ++i) embs.push_back({unif(gen), unif(gen), unif(gen)});
    auto snap = snapshot_of(embs);
    for (int q = 0; q < 20; ++q) {
        Vec query = {unif(gen), unif(gen), unif(gen)};
        auto got = nearest_reference(snap, query);
        size_t best = 0;
        double best_sim = -2.0;
        for (size_t i = 0; i < embs.size(); ++i) {
            double s = cosine_similarity(embs[i], query);
            if (s > best_sim) {
                best_sim = s;
                best = i;
            }
        }
        CHECK(got.index == best);
        CHECK(got.similarity == doctest::Approx(best_sim));
    }
}

TEST_CASE("prefilter_topk basics") {
    auto snap = snapshot_of({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}});
    Vec q = {1.0, 0.1};
    CHECK(prefilter_topk(snap, q, 10).size() == 3);
    auto top1 = prefilter_topk(snap, q, 1);
    REQUIRE(top1.size() == 1);
    CHECK(top1.embeddings[0] == snap.embeddings[nearest_reference(snap, q).index]);
}

TEST_CASE("prefilter_topk matches a sort-based oracle and preserves the argmax") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Vec> embs;
    for (int i = 0; i < 200; ++i) embs.push_back({unif(gen), unif(gen), unif(gen), unif(gen)});
    auto snap = snapshot_of(embs);
    Vec q = {unif(gen), unif(gen), unif(gen), unif(gen)};

    for (unsigned k : {1u, 5u, 10u, 50u, 400u}) {
        auto sub = prefilter_topk(snap, q, k);
        // the true max always survives the filter
        CHECK(nearest_reference(sub, q).similarity ==
              doctest::Approx(nearest_reference(snap, q).similarity));
    }

    // set equality with full sort at k = 10
    auto sub = prefilter_topk(snap, q, 10);
    std::vector<std::pair<double, size_t>> ranked;
    for (size_t i = 0; i < embs.size(); ++i)
        ranked.push_back({-cosine_similarity(embs[i], q), i});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<Vec> expected;
    for (size_t i = 0; i < 10; ++i) expected.push_back(embs[ranked[i].second]);
    for (const auto& e : expected)
        CHECK(std::find(sub.embeddings.begin(), sub.embeddings.end(), e) != sub.embeddings.end());
}

TEST_CASE("csv round trip reproduces the store") {
    namespace fs = std::filesystem;
    Embedder e(EmbedderKind::random_linear, 7, 2, 3);
    ReferenceStore store(e);
    store.add_batch({{0.5, -1.25}, {2.0, 3.0}}, RefOrigin::original);
    store.add_batch({{-0.125, 0.0625}}, RefOrigin::generated);

    const auto path = (fs::temp_directory_path() / "procreate_refs_test.csv").string();
    store.save_csv(path);
    auto loaded = ReferenceStore::load_csv(path, e);
    CHECK(loaded.snapshot().points == store.snapshot().points);
    CHECK(loaded.snapshot().embeddings == store.snapshot().embeddings);
    CHECK(loaded.snapshot().origins == store.snapshot().origins);
    std::remove(path.c_str());
}

#include "procreate/refstore.hpp"

#include <algorithm>
#include <numeric>

#include "procreate/csv.hpp"

namespace procreate {

NearestRef nearest_reference(const RefSnapshot& snapshot, const Vec& query_embedding) {
    if (snapshot.empty()) throw ConfigError("nearest_reference over an empty snapshot");
    NearestRef best{0, cosine_similarity(snapshot.embeddings[0], query_embedding)};
    for (std::size_t i = 1; i < snapshot.size(); ++i) {
        const double s = cosine_similarity(snapshot.embeddings[i], query_embedding);
        if (s > best.similarity) best = {i, s};
    }
    return best;
}

RefSnapshot prefilter_topk(const RefSnapshot& snapshot, const Vec& query_embedding,
                           std::size_t k) {
    if (k < 1) throw ConfigError("prefilter_topk requires k >= 1");
    std::vector<std::size_t> order(snapshot.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> sims(snapshot.size());
    for (std::size_t i = 0; i < snapshot.size(); ++i)
        sims[i] = cosine_similarity(snapshot.embeddings[i], query_embedding);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sims[a] > sims[b]; });
    if (k < order.size()) order.resize(k);
    std::sort(order.begin(), order.end());  // keep original index order in the sub-snapshot

    RefSnapshot out;
    for (std::size_t i : order) {
        out.points.push_back(snapshot.points[i]);
        out.embeddings.push_back(snapshot.embeddings[i]);
        out.origins.push_back(snapshot.origins[i]);
    }
    return out;
}

std::size_t ReferenceStore::add_batch(const std::vector<Vec>& points, RefOrigin origin) {
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != embedder_.in_dim())
            throw ConfigError("reference point dimension " + std::to_string(p.size()) +
                              " does not match embedder input dimension " +
                              std::to_string(embedder_.in_dim()));
        snapshot_.points.push_back(p);
        snapshot_.embeddings.push_back(embedder_.embed(p));
        snapshot_.origins.push_back(origin);
    }
    return snapshot_.size();
}

void ReferenceStore::save_csv(const std::string& path) const {
    std::vector<std::string> labels;
    labels.reserve(snapshot_.size());
    for (auto o : snapshot_.origins)
        labels.emplace_back(o == RefOrigin::original ? "original" : "generated");
    csv::write_points(path, snapshot_.points, "origin", labels);
}

ReferenceStore ReferenceStore::load_csv(const std::string& path, Embedder embedder) {
    auto table = csv::read_points(path);
    ReferenceStore store(std::move(embedder));
    for (std::size_t i = 0; i < table.points.size(); ++i) {
        RefOrigin origin = RefOrigin::original;
        if (table.has_label) {
            const std::string& label = table.labels[i];
            if (label == "generated") origin = RefOrigin::generated;
            else if (label != "original")
                throw IoError("'" + path + "': unknown origin '" + label + "'");
        }
        store.add_batch({table.points[i]}, origin);
    }
    return store;
}

}  // namespace procreate

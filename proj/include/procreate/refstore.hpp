#ifndef PROCREATE_REFSTORE_HPP
#define PROCREATE_REFSTORE_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "procreate/embedding.hpp"

namespace procreate {

enum class RefOrigin { original, generated };

// Immutable view used during a sampling batch; queries never observe appends
// that happen after the snapshot is taken.
struct RefSnapshot {
    std::vector<Vec> points;
    std::vector<Vec> embeddings;
    std::vector<RefOrigin> origins;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

// Index of the most-similar reference plus its cosine similarity.
struct NearestRef {
    std::size_t index = 0;
    double similarity = 0.0;
};

NearestRef nearest_reference(const RefSnapshot& snapshot, const Vec& query_embedding);

// The k most-similar items (all of them when k >= size), original order
// preserved within the selection.
RefSnapshot prefilter_topk(const RefSnapshot& snapshot, const Vec& query_embedding, std::size_t k);

// Append-only reference set with embeddings cached at insert time.
class ReferenceStore {
public:
    explicit ReferenceStore(Embedder embedder) : embedder_(std::move(embedder)) {}

    std::size_t add_batch(const std::vector<Vec>& points, RefOrigin origin);

    std::size_t size() const { return snapshot_.size(); }
    const Embedder& embedder() const { return embedder_; }
    const RefSnapshot& snapshot() const { return snapshot_; }

    void save_csv(const std::string& path) const;
    static ReferenceStore load_csv(const std::string& path, Embedder embedder);

private:
    Embedder embedder_;
    RefSnapshot snapshot_;
};

}  // namespace procreate

#endif

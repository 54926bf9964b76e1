#include "procreate/embedding.hpp"

#include "procreate/rng.hpp"

namespace procreate {

EmbedderKind parse_embedder_kind(const std::string& name) {
    if (name == "identity") return EmbedderKind::identity;
    if (name == "random_linear") return EmbedderKind::random_linear;
    if (name == "random_linear_tanh") return EmbedderKind::random_linear_tanh;
    throw ConfigError("unknown embedder kind '" + name + "'");
}

std::string embedder_kind_name(EmbedderKind kind) {
    switch (kind) {
        case EmbedderKind::identity: return "identity";
        case EmbedderKind::random_linear: return "random_linear";
        case EmbedderKind::random_linear_tanh: return "random_linear_tanh";
    }
    throw ConfigError("invalid embedder kind");
}

Embedder::Embedder(EmbedderKind kind, std::uint64_t seed, int in_dim, int out_dim)
    : kind_(kind), seed_(seed), in_dim_(in_dim), out_dim_(out_dim) {
    if (in_dim < 1 || out_dim < 1) throw ConfigError("embedder dimensions must be >= 1");
    if (kind == EmbedderKind::identity) {
        out_dim_ = in_dim_;
        return;
    }
    GaussianRng rng(derive_seed(seed, seed_tag::embedder));
    const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
    projection_.resize(static_cast<std::size_t>(in_dim) * static_cast<std::size_t>(out_dim));
    for (auto& p : projection_) p = scale * rng.gaussian();
}

std::string Embedder::id() const {
    return embedder_kind_name(kind_) + ":" + std::to_string(seed_) + ":" +
           std::to_string(in_dim_) + ":" + std::to_string(out_dim_);
}

double cosine_similarity(const Vec& a, const Vec& b, bool* degenerate) {
    if (a.size() != b.size()) throw ConfigError("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double denom = std::sqrt(na) * std::sqrt(nb);
    if (degenerate) *degenerate = denom < kCosineDenomFloor;
    if (denom < kCosineDenomFloor) return dot / kCosineDenomFloor;
    return dot / denom;
}

autodiff::Rev cosine_similarity_rev(const std::vector<autodiff::Rev>& a, const Vec& b) {
    using autodiff::Rev;
    if (a.size() != b.size()) throw ConfigError("cosine_similarity: dimension mismatch");
    Rev dot = 0.0, na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * Rev(b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    Rev denom = autodiff::floor_at(autodiff::sqrt(na) * std::sqrt(nb), kCosineDenomFloor);
    return dot / denom;
}

}  // namespace procreate

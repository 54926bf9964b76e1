#ifndef PROCREATE_EMBEDDING_HPP
#define PROCREATE_EMBEDDING_HPP

#include <cmath>
#include <string>
#include <vector>

#include "procreate/autodiff.hpp"
#include "procreate/common.hpp"

namespace procreate {

enum class EmbedderKind { identity, random_linear, random_linear_tanh };

EmbedderKind parse_embedder_kind(const std::string& name);
std::string embedder_kind_name(EmbedderKind kind);

// Deterministic similarity embedding f. Non-identity kinds apply a seeded
// random projection (standard normal entries scaled by 1/sqrt(D)), optionally
// followed by elementwise tanh. Fully determined by (kind, seed, dims).
class Embedder {
public:
    Embedder() = default;
    Embedder(EmbedderKind kind, std::uint64_t seed, int in_dim, int out_dim);

    static Embedder identity(int dim) { return Embedder(EmbedderKind::identity, 0, dim, dim); }

    EmbedderKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }

    // Stable identifier for embedding caches.
    std::string id() const;

    template <class S>
    std::vector<S> embed(const std::vector<S>& x) const {
        using std::tanh;
        if (static_cast<int>(x.size()) != in_dim_)
            throw ConfigError("embed: input has dimension " + std::to_string(x.size()) +
                              ", embedder expects " + std::to_string(in_dim_));
        if (kind_ == EmbedderKind::identity) return x;
        std::vector<S> out(static_cast<std::size_t>(out_dim_), S(0.0));
        for (int e = 0; e < out_dim_; ++e) {
            S acc = 0.0;
            const double* row = &projection_[static_cast<std::size_t>(e * in_dim_)];
            for (int d = 0; d < in_dim_; ++d) acc += row[d] * x[static_cast<std::size_t>(d)];
            out[static_cast<std::size_t>(e)] =
                kind_ == EmbedderKind::random_linear_tanh ? tanh(acc) : acc;
        }
        return out;
    }

private:
    EmbedderKind kind_ = EmbedderKind::identity;
    std::uint64_t seed_ = 0;
    int in_dim_ = 0;
    int out_dim_ = 0;
    std::vector<double> projection_;  // row-major out_dim x in_dim
};

// a.b / max(|a||b|, 1e-12). Both-zero input yields 0; `degenerate` (when
// non-null) reports whether the denominator floor kicked in.
double cosine_similarity(const Vec& a, const Vec& b, bool* degenerate = nullptr);

// Tape-recorded cosine between a tracked vector and a constant reference.
autodiff::Rev cosine_similarity_rev(const std::vector<autodiff::Rev>& a, const Vec& b);

inline constexpr double kCosineDenomFloor = 1e-12;

}  // namespace procreate

#endif

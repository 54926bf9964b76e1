#ifndef PROCREATE_MIXTURE_HPP
#define PROCREATE_MIXTURE_HPP

#include <cstdint>
#include <vector>

#include "procreate/common.hpp"

namespace procreate {

// Isotropic Gaussian mixture data distribution q(x0). component_std entries
// may be zero (point masses); the noised marginal at t >= 1 is still a proper
// mixture of Gaussians.
struct GaussianMixture {
    std::vector<double> weights;     // K, sums to 1
    std::vector<Vec> means;          // K points in R^D
    std::vector<double> component_std;  // K, >= 0

    int component_count() const { return static_cast<int>(weights.size()); }
    int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }

    void validate() const;

    // Exact draw from q(x0).
    Vec sample(class GaussianRng& rng) const;
};

}  // namespace procreate

#endif

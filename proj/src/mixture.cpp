#include "procreate/mixture.hpp"

#include <cmath>
#include <string>

#include "procreate/rng.hpp"

namespace procreate {

void GaussianMixture::validate() const {
    const std::size_t k = weights.size();
    if (k == 0) throw ConfigError("mixture needs at least one component");
    if (means.size() != k || component_std.size() != k)
        throw ConfigError("mixture weights/means/stds length mismatch");
    const std::size_t d = means[0].size();
    if (d == 0) throw ConfigError("mixture dimension must be >= 1");
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (weights[i] < 0.0) throw ConfigError("mixture weight " + std::to_string(i) + " negative");
        if (component_std[i] < 0.0)
            throw ConfigError("mixture std " + std::to_string(i) + " negative");
        if (means[i].size() != d) throw ConfigError("mixture means have inconsistent dimension");
        for (double m : means[i])
            if (!std::isfinite(m)) throw ConfigError("mixture mean not finite");
        total += weights[i];
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw ConfigError("mixture weights sum to " + format_double(total) + ", expected 1");
}

Vec GaussianMixture::sample(GaussianRng& rng) const {
    // Inverse-CDF component pick, then an isotropic Gaussian around its mean.
    double u = rng.uniform();
    std::size_t k = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u <= acc) { k = i; break; }
        k = i;
    }
    Vec x = means[k];
    const double sd = component_std[k];
    for (auto& xi : x) xi += sd * rng.gaussian();
    return x;
}

}  // namespace procreate

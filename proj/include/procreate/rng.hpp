#ifndef PROCREATE_RNG_HPP
#define PROCREATE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include "procreate/common.hpp"

namespace procreate {

// Seeded Gaussian stream. Box-Muller over a splitmix64 counter so draws are
// reproducible bit-for-bit regardless of the standard library in use.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : state_(seed) {}

    double uniform() {
        state_ = splitmix64(state_);
        // 53-bit mantissa in (0, 1]; never returns 0 so log() below is safe.
        return static_cast<double>((state_ >> 11) + 1) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    Vec gaussian_vector(std::size_t dim) {
        Vec v(dim);
        for (auto& x : v) x = gaussian();
        return v;
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace procreate

#endif

#ifndef PROCREATE_METRICS_HPP
#define PROCREATE_METRICS_HPP

#include <map>
#include <utility>
#include <vector>

#include "procreate/common.hpp"

namespace procreate::metrics {

// All desk metrics for one generated set. top1_fractions maps threshold ->
// fraction of samples whose Top-1 reference similarity exceeds it.
struct MetricsReport {
    double fid = 0.0;
    double kid = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double mss = 0.0;
    double vendi = 1.0;
    std::map<double, double> top1_fractions;
};

// Frechet distance between Gaussians fitted to the two embedded sets
// (sample covariance, n-1 normalization).
double fid(const std::vector<Vec>& generated, const std::vector<Vec>& real);

// Closed-form Frechet distance from population moments (row-major covariances).
double fid_gaussian(const Vec& mean1, const std::vector<Vec>& cov1, const Vec& mean2,
                    const std::vector<Vec>& cov2);

// Unbiased squared MMD with the polynomial kernel (x.y/E + 1)^degree.
double kid(const std::vector<Vec>& generated, const std::vector<Vec>& real, int degree = 3);

double kid_kernel(const Vec& x, const Vec& y, int degree = 3);

// k-NN manifold precision/recall.
std::pair<double, double> precision_recall(const std::vector<Vec>& generated,
                                           const std::vector<Vec>& real, int k = 5);

// Mean pairwise cosine similarity over unordered pairs.
double mss(const std::vector<Vec>& samples);

// Effective sample diversity: exp of the von Neumann entropy of the
// normalized cosine-kernel spectrum.
double vendi(const std::vector<Vec>& samples);

std::map<double, double> top1_fractions(const std::vector<Vec>& generated,
                                        const std::vector<Vec>& ref_embeddings,
                                        const std::vector<double>& thresholds);

}  // namespace procreate::metrics

#endif

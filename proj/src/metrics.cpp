#include "procreate/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "procreate/embedding.hpp"

namespace procreate::metrics {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<Vec>& rows) {
    if (rows.empty()) throw ConfigError("metric input set is empty");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d)
            throw ConfigError("metric input set has ragged dimensions");
        for (Eigen::Index j = 0; j < d; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

double frechet(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& s1, const Eigen::VectorXd& mu2,
               const Eigen::MatrixXd& s2) {
    const Eigen::MatrixXd root1 = psd_sqrt(s1);
    // Tr((s1 s2)^{1/2}) via the symmetric product root1 s2 root1; negative
    // numerical eigenvalues floored (eigen-floor at 1e-10 scale).
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(root1 * s2 * root1);
    const double cross = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    const double d = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross;
    return std::max(d, 0.0);
}

}  // namespace

double fid(const std::vector<Vec>& generated, const std::vector<Vec>& real) {
    const Eigen::MatrixXd g = to_matrix(generated);
    const Eigen::MatrixXd r = to_matrix(real);
    if (g.rows() < 2 || r.rows() < 2) throw ConfigError("fid needs at least 2 points per set");
    if (g.cols() != r.cols()) throw ConfigError("fid: embedding dimension mismatch");

    const Eigen::VectorXd mu_g = g.colwise().mean();
    const Eigen::VectorXd mu_r = r.colwise().mean();
    const Eigen::MatrixXd cg = (g.rowwise() - mu_g.transpose()).transpose() *
                               (g.rowwise() - mu_g.transpose()) / double(g.rows() - 1);
    const Eigen::MatrixXd cr = (r.rowwise() - mu_r.transpose()).transpose() *
                               (r.rowwise() - mu_r.transpose()) / double(r.rows() - 1);
    return frechet(mu_g, cg, mu_r, cr);
}

double fid_gaussian(const Vec& mean1, const std::vector<Vec>& cov1, const Vec& mean2,
                    const std::vector<Vec>& cov2) {
    const auto d = static_cast<Eigen::Index>(mean1.size());
    Eigen::VectorXd m1(d), m2(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        m1(i) = mean1[static_cast<std::size_t>(i)];
        m2(i) = mean2[static_cast<std::size_t>(i)];
    }
    return frechet(m1, to_matrix(cov1), m2, to_matrix(cov2));
}

double kid_kernel(const Vec& x, const Vec& y, int degree) {
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    return std::pow(dot / double(x.size()) + 1.0, degree);
}

double kid(const std::vector<Vec>& generated, const std::vector<Vec>& real, int degree) {
    const std::size_t m = generated.size();
    const std::size_t n = real.size();
    if (m < 2 || n < 2) throw ConfigError("kid needs at least 2 points per set");

    double kxx = 0.0, kyy = 0.0, kxy = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) kxx += kid_kernel(generated[i], generated[j], degree);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) kyy += kid_kernel(real[i], real[j], degree);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) kxy += kid_kernel(generated[i], real[j], degree);

    return kxx / double(m * (m - 1)) + kyy / double(n * (n - 1)) - 2.0 * kxy / double(m * n);
}

std::pair<double, double> precision_recall(const std::vector<Vec>& generated,
                                           const std::vector<Vec>& real, int k) {
    if (k < 1) throw ConfigError("precision_recall needs k >= 1");
    const auto need = static_cast<std::size_t>(k) + 1;
    if (generated.size() < need || real.size() < need)
        throw ConfigError("precision_recall needs at least k+1 points per set");

    auto radii = [k](const std::vector<Vec>& set) {
        std::vector<double> r(set.size());
        std::vector<double> dists;
        for (std::size_t i = 0; i < set.size(); ++i) {
            dists.clear();
            for (std::size_t j = 0; j < set.size(); ++j) {
                if (i == j) continue;
                double sq = 0.0;
                for (std::size_t d = 0; d < set[i].size(); ++d) {
                    const double diff = set[i][d] - set[j][d];
                    sq += diff * diff;
                }
                dists.push_back(std::sqrt(sq));
            }
            std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
            r[i] = dists[static_cast<std::size_t>(k - 1)];
        }
        return r;
    };

    auto covered_fraction = [](const std::vector<Vec>& queries, const std::vector<Vec>& manifold,
                               const std::vector<double>& radii) {
        std::size_t covered = 0;
        for (const auto& q : queries) {
            for (std::size_t i = 0; i < manifold.size(); ++i) {
                double sq = 0.0;
                for (std::size_t d = 0; d < q.size(); ++d) {
                    const double diff = q[d] - manifold[i][d];
                    sq += diff * diff;
                }
                if (std::sqrt(sq) <= radii[i]) {
                    ++covered;
                    break;
                }
            }
        }
        return double(covered) / double(queries.size());
    };

    const auto real_radii = radii(real);
    const auto gen_radii = radii(generated);
    const double precision = covered_fraction(generated, real, real_radii);
    const double recall = covered_fraction(real, generated, gen_radii);
    return {precision, recall};
}

double mss(const std::vector<Vec>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw ConfigError("mss needs at least 2 samples");
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            acc += cosine_similarity(samples[i], samples[j]);
            ++pairs;
        }
    return acc / double(pairs);
}

double vendi(const std::vector<Vec>& samples) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    if (n < 1) throw ConfigError("vendi needs at least 1 sample");
    Eigen::MatrixXd kernel(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double s = cosine_similarity(samples[static_cast<std::size_t>(i)],
                                               samples[static_cast<std::size_t>(j)]);
            kernel(i, j) = s;
            kernel(j, i) = s;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel / double(n));
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lam = std::max(es.eigenvalues()(i), 0.0);
        if (lam > 0.0) entropy -= lam * std::log(lam);
    }
    return std::exp(entropy);
}

std::map<double, double> top1_fractions(const std::vector<Vec>& generated,
                                        const std::vector<Vec>& ref_embeddings,
                                        const std::vector<double>& thresholds) {
    if (ref_embeddings.empty()) throw ConfigError("top1_fractions needs a nonempty reference set");
    std::vector<double> top1;
    top1.reserve(generated.size());
    for (const auto& g : generated) {
        double best = -2.0;
        for (const auto& r : ref_embeddings) best = std::max(best, cosine_similarity(g, r));
        top1.push_back(best);
    }
    std::map<double, double> out;
    for (double th : thresholds) {
        std::size_t over = 0;
        for (double s : top1)
            if (s > th) ++over;
        out[th] = generated.empty() ? 0.0 : double(over) / double(generated.size());
    }
    return out;
}

}  // namespace procreate::metrics

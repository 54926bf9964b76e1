#ifndef PROCREATE_HARNESS_HPP
#define PROCREATE_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "procreate/guidance.hpp"
#include "procreate/metrics.hpp"

namespace procreate::harness {

struct ScheduleSpec {
    int total_steps = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
};

struct SamplerSpec {
    SamplerKind kind = SamplerKind::ddim;
    int steps = 50;
};

struct EmbedderSpec {
    EmbedderKind kind = EmbedderKind::identity;
    std::uint64_t seed = 0;
    int in_dim = 0;
    int out_dim = 0;

    Embedder build() const { return Embedder(kind, seed, in_dim, out_dim); }
};

struct MetricsSpec {
    int k = 5;
    std::vector<double> thresholds = {0.4, 0.5, 0.6};
    int real_count = 500;
};

struct ReferenceSpec {
    enum class Source { mixture, csv, inline_points };
    Source source = Source::mixture;
    int count = 10;                 // mixture source
    std::string path;               // csv source
    std::vector<Vec> points;        // inline source
};

// One experiment, fully determined by a single seed.
struct RunConfig {
    std::uint64_t seed = 0;
    GaussianMixture mixture;
    ScheduleSpec schedule;
    SamplerSpec sampler;
    EmbedderSpec embedder;
    std::optional<EmbedderSpec> metrics_embedder;  // override for guidance/metric decoupling
    GuidanceConfig guidance;
    std::optional<ClassifierGuidanceConfig> classifier_guidance;
    MetricsSpec metrics;
    ReferenceSpec references;
    int sample_count = 40;
    std::string output_dir = "out";
    std::vector<double> ablation_gammas;
    bool quiet = false;

    static RunConfig from_json_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
    void validate() const;
};

struct ExperimentResult {
    std::vector<Vec> baseline_samples;
    std::vector<Vec> guided_samples;
    RefSnapshot initial_refs;
    RefSnapshot final_refs;   // after dynamic growth
    metrics::MetricsReport baseline;
    metrics::MetricsReport guided;
};

// Runs the paired baseline / ProCreate experiment without touching disk.
ExperimentResult run_experiment_in_memory(const RunConfig& config);

// run_experiment_in_memory plus samples.csv, refs.csv, metrics.json and (for
// D = 2) scatter.svg under config.output_dir.
ExperimentResult run_experiment(const RunConfig& config);

// One guided-metrics row per axis value into output_dir/ablation.csv.
// Axes: n_step {0,1,3,5}, sampler {ddim,ddpm}, gamma (config.ablation_gammas).
void run_ablation(const RunConfig& config, const std::string& axis);

// Fixed-order baseline-vs-guided table from <run_dir>/metrics.json.
std::string render_report(const std::string& run_dir);

// Metrics between two point CSVs (identity embedding); JSON text.
std::string render_metrics_files(const std::string& generated_csv, const std::string& real_csv);

std::string metrics_report_json(const metrics::MetricsReport& report);

}  // namespace procreate::harness

#endif

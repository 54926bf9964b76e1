#include "procreate/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "procreate/csv.hpp"

namespace procreate::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("malformed JSON in " + what);
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw IoError("write to '" + path + "' failed");
}

template <class T>
T field(const json& j, const std::string& name, const T& fallback) {
    if (!j.contains(name)) return fallback;
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + name + "' has the wrong type");
    }
}

template <class T>
T required_field(const json& j, const std::string& name) {
    if (!j.contains(name)) throw ConfigError("config field '" + name + "' is missing");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + name + "' has the wrong type");
    }
}

EmbedderSpec parse_embedder(const json& j, int default_in_dim) {
    EmbedderSpec e;
    e.kind = parse_embedder_kind(field<std::string>(j, "kind", "identity"));
    e.seed = field<std::uint64_t>(j, "seed", 0);
    e.in_dim = field<int>(j, "in_dim", default_in_dim);
    e.out_dim = field<int>(j, "out_dim", e.in_dim);
    return e;
}

json embedder_json(const EmbedderSpec& e) {
    return json{{"kind", embedder_kind_name(e.kind)},
                {"seed", e.seed},
                {"in_dim", e.in_dim},
                {"out_dim", e.out_dim}};
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
    return from_json_text(read_file(path));
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    const json j = parse_json(text, "run config");
    RunConfig c;
    c.seed = required_field<std::uint64_t>(j, "seed");

    const json jm = required_field<json>(j, "mixture");
    c.mixture.weights = required_field<std::vector<double>>(jm, "weights");
    c.mixture.means = required_field<std::vector<Vec>>(jm, "means");
    c.mixture.component_std = required_field<std::vector<double>>(jm, "stds");

    if (j.contains("schedule")) {
        const json js = j.at("schedule");
        c.schedule.total_steps = field<int>(js, "total_steps", c.schedule.total_steps);
        c.schedule.beta_start = field<double>(js, "beta_start", c.schedule.beta_start);
        c.schedule.beta_end = field<double>(js, "beta_end", c.schedule.beta_end);
    }
    if (j.contains("sampler")) {
        const json js = j.at("sampler");
        c.sampler.kind = parse_sampler_kind(field<std::string>(js, "kind", "ddim"));
        c.sampler.steps = field<int>(js, "steps", c.sampler.steps);
    }
    const int dim = c.mixture.means.empty() ? 0 : static_cast<int>(c.mixture.means[0].size());
    c.embedder = j.contains("embedder") ? parse_embedder(j.at("embedder"), dim)
                                        : EmbedderSpec{EmbedderKind::identity, 0, dim, dim};
    if (j.contains("metrics_embedder"))
        c.metrics_embedder = parse_embedder(j.at("metrics_embedder"), dim);

    if (j.contains("guidance")) {
        const json jg = j.at("guidance");
        c.guidance.gamma = field<double>(jg, "gamma", 0.0);
        c.guidance.n_step = field<int>(jg, "n_step", 5);
        if (jg.contains("clip_norm") && !jg.at("clip_norm").is_null())
            c.guidance.clip_norm = field<double>(jg, "clip_norm", 1.0);
        c.guidance.dynamic_growth = field<bool>(jg, "dynamic_growth", false);
        c.guidance.batch_size = field<int>(jg, "batch_size", 1);
    }
    if (j.contains("classifier_guidance") && !j.at("classifier_guidance").is_null()) {
        const json jc = j.at("classifier_guidance");
        ClassifierGuidanceConfig cg;
        cg.target_component = required_field<int>(jc, "target_component");
        cg.scale = required_field<double>(jc, "scale");
        c.classifier_guidance = cg;
    }
    if (j.contains("metrics")) {
        const json jk = j.at("metrics");
        c.metrics.k = field<int>(jk, "k", 5);
        c.metrics.thresholds = field<std::vector<double>>(jk, "thresholds", c.metrics.thresholds);
        c.metrics.real_count = field<int>(jk, "real_count", 500);
    }
    if (j.contains("references")) {
        const json jr = j.at("references");
        const std::string source = field<std::string>(jr, "source", "mixture");
        if (source == "mixture") {
            c.references.source = ReferenceSpec::Source::mixture;
            c.references.count = field<int>(jr, "count", 10);
        } else if (source == "csv") {
            c.references.source = ReferenceSpec::Source::csv;
            c.references.path = required_field<std::string>(jr, "path");
        } else if (source == "inline") {
            c.references.source = ReferenceSpec::Source::inline_points;
            c.references.points = required_field<std::vector<Vec>>(jr, "points");
        } else {
            throw ConfigError("config field 'references.source' must be mixture, csv or inline");
        }
    }
    c.sample_count = field<int>(j, "sample_count", 40);
    c.output_dir = field<std::string>(j, "output_dir", "out");
    c.ablation_gammas = field<std::vector<double>>(j, "ablation_gammas", {});
    return c;
}

std::string RunConfig::to_json_text() const {
    json j;
    j["seed"] = seed;
    j["mixture"] = {{"weights", mixture.weights},
                    {"means", mixture.means},
                    {"stds", mixture.component_std}};
    j["schedule"] = {{"total_steps", schedule.total_steps},
                     {"beta_start", schedule.beta_start},
                     {"beta_end", schedule.beta_end}};
    j["sampler"] = {{"kind", sampler.kind == SamplerKind::ddim ? "ddim" : "ddpm"},
                    {"steps", sampler.steps}};
    j["embedder"] = embedder_json(embedder);
    if (metrics_embedder) j["metrics_embedder"] = embedder_json(*metrics_embedder);
    j["guidance"] = {{"gamma", guidance.gamma},
                     {"n_step", guidance.n_step},
                     {"dynamic_growth", guidance.dynamic_growth},
                     {"batch_size", guidance.batch_size}};
    if (guidance.clip_norm) j["guidance"]["clip_norm"] = *guidance.clip_norm;
    if (classifier_guidance)
        j["classifier_guidance"] = {{"target_component", classifier_guidance->target_component},
                                    {"scale", classifier_guidance->scale}};
    j["metrics"] = {{"k", metrics.k},
                    {"thresholds", metrics.thresholds},
                    {"real_count", metrics.real_count}};
    switch (references.source) {
        case ReferenceSpec::Source::mixture:
            j["references"] = {{"source", "mixture"}, {"count", references.count}};
            break;
        case ReferenceSpec::Source::csv:
            j["references"] = {{"source", "csv"}, {"path", references.path}};
            break;
        case ReferenceSpec::Source::inline_points:
            j["references"] = {{"source", "inline"}, {"points", references.points}};
            break;
    }
    j["sample_count"] = sample_count;
    j["output_dir"] = output_dir;
    if (!ablation_gammas.empty()) j["ablation_gammas"] = ablation_gammas;
    return j.dump(2) + "\n";
}

void RunConfig::validate() const {
    mixture.validate();
    const int dim = mixture.dim();
    if (schedule.total_steps < 1) throw ConfigError("config field 'schedule.total_steps' must be >= 1");
    if (sampler.steps < 1 || sampler.steps > schedule.total_steps)
        throw ConfigError("config field 'sampler.steps' must be in [1, total_steps]");
    if (embedder.in_dim != dim)
        throw ConfigError("config field 'embedder.in_dim' (" + std::to_string(embedder.in_dim) +
                          ") does not match mixture dimension " + std::to_string(dim));
    if (metrics_embedder && metrics_embedder->in_dim != dim)
        throw ConfigError("config field 'metrics_embedder.in_dim' does not match mixture dimension");
    guidance.validate();
    if (classifier_guidance &&
        (classifier_guidance->target_component < 0 ||
         classifier_guidance->target_component >= mixture.component_count()))
        throw ConfigError("config field 'classifier_guidance.target_component' out of range");
    if (sample_count < 1) throw ConfigError("config field 'sample_count' must be >= 1");
    if (metrics.k < 1) throw ConfigError("config field 'metrics.k' must be >= 1");
    if (sample_count < metrics.k + 1)
        throw ConfigError("config field 'metrics.k' too large for sample_count");
    if (metrics.real_count < metrics.k + 1)
        throw ConfigError("config field 'metrics.real_count' too small for metrics.k");
    if (references.source == ReferenceSpec::Source::mixture && references.count < 0)
        throw ConfigError("config field 'references.count' must be >= 0");
    if (references.source == ReferenceSpec::Source::inline_points)
        for (const auto& p : references.points)
            if (static_cast<int>(p.size()) != dim)
                throw ConfigError("config field 'references.points' has wrong dimension entries");
}

namespace {

std::vector<Vec> initial_references(const RunConfig& c) {
    switch (c.references.source) {
        case ReferenceSpec::Source::mixture: {
            GaussianRng rng(derive_seed(c.seed, seed_tag::references));
            std::vector<Vec> pts;
            pts.reserve(static_cast<std::size_t>(c.references.count));
            for (int i = 0; i < c.references.count; ++i) pts.push_back(c.mixture.sample(rng));
            return pts;
        }
        case ReferenceSpec::Source::csv: {
            auto table = csv::read_points(c.references.path);
            for (const auto& p : table.points)
                if (static_cast<int>(p.size()) != c.mixture.dim())
                    throw ConfigError("reference CSV '" + c.references.path +
                                      "' dimension does not match mixture");
            return table.points;
        }
        case ReferenceSpec::Source::inline_points:
            return c.references.points;
    }
    throw ConfigError("invalid reference source");
}

std::vector<Vec> embed_all(const Embedder& e, const std::vector<Vec>& pts) {
    std::vector<Vec> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(e.embed(p));
    return out;
}

metrics::MetricsReport compute_report(const std::vector<Vec>& samples,
                                      const std::vector<Vec>& real,
                                      const std::vector<Vec>& ref_points, const Embedder& e,
                                      const MetricsSpec& spec) {
    const auto gen_e = embed_all(e, samples);
    const auto real_e = embed_all(e, real);
    const auto refs_e = embed_all(e, ref_points);
    metrics::MetricsReport r;
    r.fid = metrics::fid(gen_e, real_e);
    r.kid = metrics::kid(gen_e, real_e);
    std::tie(r.precision, r.recall) = metrics::precision_recall(gen_e, real_e, spec.k);
    r.mss = metrics::mss(gen_e);
    r.vendi = metrics::vendi(gen_e);
    r.top1_fractions = metrics::top1_fractions(gen_e, refs_e, spec.thresholds);
    return r;
}

void write_scatter_svg(const std::string& path, const ExperimentResult& res) {
    // 2D quick-look plot; best effort, excluded from reproducibility checks.
    const double w = 640, h = 640, margin = 40;
    double lo = 1e300, hi = -1e300;
    auto extend = [&](const std::vector<Vec>& pts) {
        for (const auto& p : pts)
            for (double v : p) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    };
    extend(res.baseline_samples);
    extend(res.guided_samples);
    extend(res.initial_refs.points);
    if (!(hi > lo)) { lo -= 1.0; hi += 1.0; }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto sx = [&](double v) { return margin + (v - lo) / (hi - lo) * (w - 2 * margin); };
    auto sy = [&](double v) { return h - margin - (v - lo) / (hi - lo) * (h - 2 * margin); };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    auto dots = [&](const std::vector<Vec>& pts, const char* color, double r, const char* shape) {
        for (const auto& p : pts) {
            if (std::string(shape) == "rect")
                svg << "<rect x='" << sx(p[0]) - r << "' y='" << sy(p[1]) - r << "' width='"
                    << 2 * r << "' height='" << 2 * r << "' fill='" << color << "'/>\n";
            else
                svg << "<circle cx='" << sx(p[0]) << "' cy='" << sy(p[1]) << "' r='" << r
                    << "' fill='" << color << "' fill-opacity='0.7'/>\n";
        }
    };
    dots(res.initial_refs.points, "black", 5.0, "rect");
    dots(res.baseline_samples, "#1f77b4", 4.0, "circle");
    dots(res.guided_samples, "#d62728", 4.0, "circle");
    svg << "<text x='" << margin << "' y='20'>black = references, blue = baseline, "
           "red = guided</text>\n";
    svg << "</svg>\n";
    write_file(path, svg.str());
}

}  // namespace

std::string metrics_report_json(const metrics::MetricsReport& report) {
    json j;
    j["fid"] = report.fid;
    j["kid"] = report.kid;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["mss"] = report.mss;
    j["vendi"] = report.vendi;
    json t = json::object();
    for (const auto& [th, frac] : report.top1_fractions) t[format_double(th)] = frac;
    j["top1_fractions"] = t;
    return j.dump();
}

ExperimentResult run_experiment_in_memory(const RunConfig& config) {
    config.validate();
    const auto schedule =
        make_linear_schedule(config.schedule.total_steps, config.schedule.beta_start,
                             config.schedule.beta_end);
    const Embedder guide_embedder = config.embedder.build();
    const Embedder metric_embedder =
        config.metrics_embedder ? config.metrics_embedder->build() : guide_embedder;

    ExperimentResult res;
    const auto ref_points = initial_references(config);

    EpsilonHook base_hook;
    if (config.classifier_guidance) {
        const auto cg = *config.classifier_guidance;
        base_hook = [cg, &schedule, &config](const Vec& x, int t, int t_next,
                                             const Vec& eps) -> Vec {
            Vec guided = classifier_guided_epsilon(x, t, t_next, cg, schedule, config.mixture);
            (void)eps;  // recomputed inside; identical by construction
            return guided;
        };
    }

    // Baseline: plain sampler, same per-sample seeds as the guided run.
    for (int i = 0; i < config.sample_count; ++i)
        res.baseline_samples.push_back(
            run_sampler(config.sampler.kind, config.sampler.steps, schedule, config.mixture,
                        base_hook, per_sample_seed(config.seed, static_cast<std::size_t>(i))));

    ReferenceStore store(guide_embedder);
    store.add_batch(ref_points, RefOrigin::original);
    res.initial_refs = store.snapshot();
    res.guided_samples = sample_batch_procreate(
        config.sample_count, store, config.guidance, config.sampler.kind, config.sampler.steps,
        guide_embedder, schedule, config.mixture, config.seed, base_hook);
    res.final_refs = store.snapshot();

    // Held-out draws from the data distribution for FID/KID/PR.
    GaussianRng real_rng(derive_seed(config.seed, seed_tag::real_set));
    std::vector<Vec> real;
    real.reserve(static_cast<std::size_t>(config.metrics.real_count));
    for (int i = 0; i < config.metrics.real_count; ++i) real.push_back(config.mixture.sample(real_rng));

    res.baseline = compute_report(res.baseline_samples, real, ref_points, metric_embedder,
                                  config.metrics);
    res.guided = compute_report(res.guided_samples, real, ref_points, metric_embedder,
                                config.metrics);
    return res;
}

ExperimentResult run_experiment(const RunConfig& config) {
    auto res = run_experiment_in_memory(config);

    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.output_dir + "'");
    const fs::path out(config.output_dir);

    std::vector<Vec> all_samples;
    std::vector<std::string> variants;
    for (const auto& s : res.baseline_samples) {
        all_samples.push_back(s);
        variants.emplace_back("baseline");
    }
    for (const auto& s : res.guided_samples) {
        all_samples.push_back(s);
        variants.emplace_back("guided");
    }
    csv::write_points((out / "samples.csv").string(), all_samples, "variant", variants);

    {
        std::vector<std::string> origins;
        for (auto o : res.final_refs.origins)
            origins.emplace_back(o == RefOrigin::original ? "original" : "generated");
        csv::write_points((out / "refs.csv").string(), res.final_refs.points, "origin", origins);
    }

    json jm;
    jm["baseline"] = json::parse(metrics_report_json(res.baseline));
    jm["guided"] = json::parse(metrics_report_json(res.guided));
    write_file((out / "metrics.json").string(), jm.dump(2) + "\n");

    if (config.mixture.dim() == 2) write_scatter_svg((out / "scatter.svg").string(), res);
    return res;
}

void run_ablation(const RunConfig& config, const std::string& axis) {
    config.validate();
    std::vector<std::pair<std::string, RunConfig>> rows;
    if (axis == "n_step") {
        for (int n : {0, 1, 3, 5}) {
            RunConfig c = config;
            c.guidance.n_step = n;
            rows.emplace_back(std::to_string(n), c);
        }
    } else if (axis == "sampler") {
        for (auto kind : {SamplerKind::ddim, SamplerKind::ddpm}) {
            RunConfig c = config;
            c.sampler.kind = kind;
            rows.emplace_back(kind == SamplerKind::ddim ? "ddim" : "ddpm", c);
        }
    } else if (axis == "gamma") {
        std::vector<double> gammas = config.ablation_gammas;
        if (gammas.empty()) gammas = {0.0, config.guidance.gamma};
        for (double g : gammas) {
            RunConfig c = config;
            c.guidance.gamma = g;
            rows.emplace_back(format_double(g), c);
        }
    } else {
        throw ConfigError("unknown ablation axis '" + axis + "' (n_step, sampler, gamma)");
    }

    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.output_dir + "'");

    std::ostringstream csv_out;
    csv_out << "axis,value,fid,kid,precision,recall,mss,vendi";
    for (double th : config.metrics.thresholds) csv_out << ",top1_" << format_double(th);
    csv_out << "\n";
    for (const auto& [value, row_config] : rows) {
        const auto res = run_experiment_in_memory(row_config);
        const auto& r = res.guided;
        csv_out << axis << ',' << value << ',' << format_double(r.fid) << ','
                << format_double(r.kid) << ',' << format_double(r.precision) << ','
                << format_double(r.recall) << ',' << format_double(r.mss) << ','
                << format_double(r.vendi);
        for (double th : config.metrics.thresholds)
            csv_out << ',' << format_double(r.top1_fractions.at(th));
        csv_out << "\n";
    }
    write_file((fs::path(config.output_dir) / "ablation.csv").string(), csv_out.str());
}

std::string render_report(const std::string& run_dir) {
    const fs::path path = fs::path(run_dir) / "metrics.json";
    if (!fs::exists(path)) throw IoError("no metrics.json in '" + run_dir + "'");
    json j = json::parse(read_file(path.string()), nullptr, false);
    if (j.is_discarded() || !j.contains("baseline") || !j.contains("guided"))
        throw IoError("corrupt metrics.json in '" + run_dir + "'");

    const json& b = j["baseline"];
    const json& g = j["guided"];
    std::ostringstream out;
    out << "metric            baseline        guided         delta\n";
    auto row = [&](const std::string& name, double bv, double gv) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-16s %13.6f %13.6f %13.6f\n", name.c_str(), bv, gv,
                      gv - bv);
        out << line;
    };
    for (const char* m : {"fid", "kid", "precision", "recall", "mss", "vendi"})
        row(m, b.at(m).get<double>(), g.at(m).get<double>());
    for (const auto& [th, frac] : b.at("top1_fractions").items())
        row("top1>" + th, frac.get<double>(), g.at("top1_fractions").at(th).get<double>());
    return out.str();
}

std::string render_metrics_files(const std::string& generated_csv, const std::string& real_csv) {
    const auto gen = csv::read_points(generated_csv).points;
    const auto real = csv::read_points(real_csv).points;
    if (gen.empty() || real.empty()) throw ConfigError("metrics: input CSV has no points");
    if (gen[0].size() != real[0].size())
        throw ConfigError("metrics: generated and real sets have different dimensions");

    MetricsSpec spec;
    if (static_cast<int>(gen.size()) < spec.k + 1 || static_cast<int>(real.size()) < spec.k + 1)
        throw ConfigError("metrics: sets must have at least k+1 = " + std::to_string(spec.k + 1) +
                          " points");
    const Embedder e = Embedder::identity(static_cast<int>(gen[0].size()));
    const auto report = compute_report(gen, real, real, e, spec);
    return metrics_report_json(report) + "\n";
}

}  // namespace procreate::harness

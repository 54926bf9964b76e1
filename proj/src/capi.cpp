#include "procreate/procreate.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "procreate/harness.hpp"

using procreate::ConfigError;
using procreate::IoError;
using procreate::harness::RunConfig;

struct pc_experiment {
    RunConfig config;
    std::string last_error;
};

namespace {

constexpr const char* kVersion = "0.1.0";

int classify(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return PC_ERR_CONFIG;
    if (dynamic_cast<const IoError*>(&e)) return PC_ERR_IO;
    return PC_ERR;
}

void fill_errbuf(char* errbuf, size_t errcap, const char* msg) {
    if (!errbuf || errcap == 0) return;
    std::strncpy(errbuf, msg, errcap - 1);
    errbuf[errcap - 1] = '\0';
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* pc_version(void) { return kVersion; }

int pc_experiment_open(const char* config_path, pc_experiment** out) {
    if (!config_path || !out) return PC_ERR_CONFIG;
    *out = nullptr;
    try {
        auto* exp = new pc_experiment{RunConfig::from_json_file(config_path), {}};
        exp->config.validate();
        *out = exp;
        return PC_OK;
    } catch (const std::exception& e) {
        // No handle survives to carry the message; the status code is the contract.
        return classify(e);
    }
}

int pc_experiment_set_seed(pc_experiment* exp, unsigned long long seed) {
    if (!exp) return PC_ERR_CONFIG;
    exp->config.seed = seed;
    return PC_OK;
}

int pc_experiment_set_output_dir(pc_experiment* exp, const char* dir) {
    if (!exp || !dir) return PC_ERR_CONFIG;
    exp->config.output_dir = dir;
    return PC_OK;
}

int pc_experiment_run(pc_experiment* exp) {
    if (!exp) return PC_ERR_CONFIG;
    try {
        exp->last_error.clear();
        procreate::harness::run_experiment(exp->config);
        return PC_OK;
    } catch (const std::exception& e) {
        exp->last_error = e.what();
        return classify(e);
    }
}

int pc_experiment_ablate(pc_experiment* exp, const char* axis) {
    if (!exp || !axis) return PC_ERR_CONFIG;
    try {
        exp->last_error.clear();
        procreate::harness::run_ablation(exp->config, axis);
        return PC_OK;
    } catch (const std::exception& e) {
        exp->last_error = e.what();
        return classify(e);
    }
}

const char* pc_experiment_error(const pc_experiment* exp) {
    return exp ? exp->last_error.c_str() : "";
}

void pc_experiment_close(pc_experiment* exp) { delete exp; }

int pc_report_render(const char* run_dir, char** out, char* errbuf, size_t errcap) {
    if (!run_dir || !out) return PC_ERR_CONFIG;
    *out = nullptr;
    try {
        *out = dup_string(procreate::harness::render_report(run_dir));
        return *out ? PC_OK : PC_ERR;
    } catch (const std::exception& e) {
        fill_errbuf(errbuf, errcap, e.what());
        return classify(e);
    }
}

int pc_metrics_render(const char* generated_csv, const char* real_csv, char** out, char* errbuf,
                      size_t errcap) {
    if (!generated_csv || !real_csv || !out) return PC_ERR_CONFIG;
    *out = nullptr;
    try {
        *out = dup_string(procreate::harness::render_metrics_files(generated_csv, real_csv));
        return *out ? PC_OK : PC_ERR;
    } catch (const std::exception& e) {
        fill_errbuf(errbuf, errcap, e.what());
        return classify(e);
    }
}

void pc_string_free(char* s) { std::free(s); }

}  // extern "C"

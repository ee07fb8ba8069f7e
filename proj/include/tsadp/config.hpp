#ifndef TSADP_CONFIG_HPP
#define TSADP_CONFIG_HPP

#include <string>

#include "tsadp/model.hpp"
#include "tsadp/synth.hpp"
#include "tsadp/trainer.hpp"

namespace tsadp {

/// Gradient-check run parameters. Builds a small random model and batch
/// from the seeds below.
struct GradCheckConfig {
    int d = 8;
    int T = 6;
    int k = 1;
    int batch = 2;
    double mask_rate = 0.25;
    double epsilon = 1e-6;
    double tolerance = 1e-5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Paths {
    std::string dataset;
    std::string checkpoint;
    std::string metrics;
    std::string eval_out;
};

/// Union of all tool configuration, parsed from one INI-style file with
/// sections [synth], [model], [window], [loss], [train], [gradcheck],
/// [eval] and [paths]. Unknown keys are hard errors. Every random choice
/// flows from seeds in this file; no hidden entropy.
struct CliConfig {
    SynthConfig synth;
    ModelDims dims;
    TrainConfig train;
    GradCheckConfig gradcheck;
    std::uint64_t eval_seed = 0;
    std::uint64_t model_seed = 0;
    Paths paths;
};

/// Parse `path`. Lines are `key = value`; `[section]` headers scope the
/// keys; `#` and `;` start comments.
CliConfig load_config(const std::string& path);

/// Parse from an in-memory string (used by tests).
CliConfig parse_config(const std::string& text);

}  // namespace tsadp

#endif  // TSADP_CONFIG_HPP

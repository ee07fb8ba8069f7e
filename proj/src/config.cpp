#include "tsadp/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tsadp {

void GradCheckConfig::validate() const {
    if (d < 1 || T < 1 || batch < 1) {
        throw ValidationError("gradcheck: d, T and batch must be >= 1");
    }
    if (k < 0) throw ValidationError("gradcheck: k must be >= 0");
    if (mask_rate < 0.0 || mask_rate >= 1.0) {
        throw ValidationError("gradcheck: mask_rate must be in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ValidationError("gradcheck: epsilon must be > 0");
    if (!(tolerance > 0.0)) {
        throw ValidationError("gradcheck: tolerance must be > 0");
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config key \"" + key +
                              "\": invalid integer \"" + v + "\"");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config key \"" + key +
                              "\": invalid number \"" + v + "\"");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw ValidationError("config key \"" + key +
                              "\": invalid unsigned integer \"" + v + "\"");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config key \"" + key + "\": invalid boolean \"" +
                          v + "\"");
}

}  // namespace

CliConfig parse_config(const std::string& text) {
    CliConfig cfg;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"synth.num_sequences",
         [&](const std::string& k, const std::string& v) {
             cfg.synth.num_sequences = to_int(k, v);
         }},
        {"synth.T",
         [&](const std::string& k, const std::string& v) {
             cfg.synth.T = to_int(k, v);
         }},
        {"synth.d_visual",
         [&](const std::string& k, const std::string& v) {
             cfg.synth.d_visual = to_int(k, v);
         }},
        {"synth.d_language",
         [&](const std::string& k, const std::string& v) {
             cfg.synth.d_language = to_int(k, v);
         }},
        {"synth.latent_dim",
         [&](const std::string& k, const std::string& v) {
             cfg.synth.latent_dim = to_int(k, v);
         }},
        {"synth.drift_scale",
         [&](const std::string& k, const std::string& v) {
             cfg.synth.drift_scale = to_double(k, v);
         }},
        {"synth.noise_scale",
         [&](const std::string& k, const std::string& v) {
             cfg.synth.noise_scale = to_double(k, v);
         }},
        {"synth.seed",
         [&](const std::string& k, const std::string& v) {
             cfg.synth.seed = to_u64(k, v);
         }},
        {"model.d_proj",
         [&](const std::string& k, const std::string& v) {
             cfg.dims.d_proj = to_int(k, v);
         }},
        {"model.d_out",
         [&](const std::string& k, const std::string& v) {
             cfg.dims.d_out = to_int(k, v);
         }},
        {"model.d_prompt",
         [&](const std::string& k, const std::string& v) {
             cfg.dims.d_prompt = to_int(k, v);
         }},
        {"model.d_emb",
         [&](const std::string& k, const std::string& v) {
             cfg.dims.d_emb = to_int(k, v);
         }},
        {"model.seed",
         [&](const std::string& k, const std::string& v) {
             cfg.model_seed = to_u64(k, v);
         }},
        {"window.k",
         [&](const std::string& k, const std::string& v) {
             cfg.train.window.k = to_int(k, v);
         }},
        {"window.heads",
         [&](const std::string& k, const std::string& v) {
             cfg.train.window.heads = to_int(k, v);
         }},
        {"loss.tau",
         [&](const std::string& k, const std::string& v) {
             cfg.train.loss.tau = to_double(k, v);
         }},
        {"loss.lambda1",
         [&](const std::string& k, const std::string& v) {
             cfg.train.loss.lambda1 = to_double(k, v);
         }},
        {"loss.lambda2",
         [&](const std::string& k, const std::string& v) {
             cfg.train.loss.lambda2 = to_double(k, v);
         }},
        {"loss.mask_rate",
         [&](const std::string& k, const std::string& v) {
             cfg.train.loss.mask_rate = to_double(k, v);
         }},
        {"loss.symmetric",
         [&](const std::string& k, const std::string& v) {
             cfg.train.loss.symmetric = to_bool(k, v);
         }},
        {"train.seed",
         [&](const std::string& k, const std::string& v) {
             cfg.train.seed = to_u64(k, v);
         }},
        {"train.epochs",
         [&](const std::string& k, const std::string& v) {
             cfg.train.epochs = to_int(k, v);
         }},
        {"train.batch_size",
         [&](const std::string& k, const std::string& v) {
             cfg.train.batch_size = to_int(k, v);
         }},
        {"train.learning_rate",
         [&](const std::string& k, const std::string& v) {
             cfg.train.learning_rate = to_double(k, v);
         }},
        {"train.optimizer",
         [&](const std::string&, const std::string& v) {
             cfg.train.optimizer = parse_optimizer(v);
         }},
        {"train.beta1",
         [&](const std::string& k, const std::string& v) {
             cfg.train.beta1 = to_double(k, v);
         }},
        {"train.beta2",
         [&](const std::string& k, const std::string& v) {
             cfg.train.beta2 = to_double(k, v);
         }},
        {"train.adam_eps",
         [&](const std::string& k, const std::string& v) {
             cfg.train.adam_eps = to_double(k, v);
         }},
        {"train.ablation",
         [&](const std::string&, const std::string& v) {
             cfg.train.ablation = parse_ablation(v);
         }},
        {"gradcheck.d",
         [&](const std::string& k, const std::string& v) {
             cfg.gradcheck.d = to_int(k, v);
         }},
        {"gradcheck.T",
         [&](const std::string& k, const std::string& v) {
             cfg.gradcheck.T = to_int(k, v);
         }},
        {"gradcheck.k",
         [&](const std::string& k, const std::string& v) {
             cfg.gradcheck.k = to_int(k, v);
         }},
        {"gradcheck.batch",
         [&](const std::string& k, const std::string& v) {
             cfg.gradcheck.batch = to_int(k, v);
         }},
        {"gradcheck.mask_rate",
         [&](const std::string& k, const std::string& v) {
             cfg.gradcheck.mask_rate = to_double(k, v);
         }},
        {"gradcheck.epsilon",
         [&](const std::string& k, const std::string& v) {
             cfg.gradcheck.epsilon = to_double(k, v);
         }},
        {"gradcheck.tolerance",
         [&](const std::string& k, const std::string& v) {
             cfg.gradcheck.tolerance = to_double(k, v);
         }},
        {"gradcheck.seed",
         [&](const std::string& k, const std::string& v) {
             cfg.gradcheck.seed = to_u64(k, v);
         }},
        {"eval.seed",
         [&](const std::string& k, const std::string& v) {
             cfg.eval_seed = to_u64(k, v);
         }},
        {"paths.dataset",
         [&](const std::string&, const std::string& v) {
             cfg.paths.dataset = v;
         }},
        {"paths.checkpoint",
         [&](const std::string&, const std::string& v) {
             cfg.paths.checkpoint = v;
         }},
        {"paths.metrics",
         [&](const std::string&, const std::string& v) {
             cfg.paths.metrics = v;
         }},
        {"paths.eval_out",
         [&](const std::string&, const std::string& v) {
             cfg.paths.eval_out = v;
         }},
    };

    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ValidationError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full =
            section.empty() ? key : section + "." + key;
        const auto it = setters.find(full);
        if (it == setters.end()) {
            throw ValidationError("unknown config key \"" + full + "\"");
        }
        it->second(full, value);
    }

    // The model consumes dataset feature dims directly.
    cfg.dims.d = cfg.synth.d_visual;
    cfg.dims.d_lang = cfg.synth.d_language;
    return cfg;
}

CliConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

}  // namespace tsadp

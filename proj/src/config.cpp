#include "episcan/config.hpp"

#include <cmath>
#include <set>

#include "episcan/error.hpp"

namespace episcan {
namespace {

template <class T>
std::vector<T> scalar_or_list(const Json& v, const char* key) {
    try {
        if (v.is_array()) return v.get<std::vector<T>>();
        return {v.get<T>()};
    } catch (const Json::exception&) {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
T get_as(const Json& v, const char* key) {
    try {
        return v.get<T>();
    } catch (const Json::exception&) {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {
        "model", "innovation", "epidemic", "alpha", "n", "reps", "level", "seed", "out", "threads", "mode", "p",
        "b_n", "k_min", "calibration", "table", "beta", "theta", "amplitude", "k_star_fraction", "comment"};
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");

    ExperimentConfig c;
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    if (j.contains("innovation")) c.innovation = innovation_from_json(j.at("innovation"));
    if (j.contains("epidemic")) c.epidemic = epidemic_from_json(j.at("epidemic"));
    if (j.contains("alpha")) c.alphas = scalar_or_list<double>(j.at("alpha"), "alpha");
    if (j.contains("n")) c.ns = scalar_or_list<std::size_t>(j.at("n"), "n");
    if (j.contains("reps")) c.reps = get_as<std::size_t>(j.at("reps"), "reps");
    if (j.contains("level")) c.level = get_as<double>(j.at("level"), "level");
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j.at("seed"), "seed");
    if (j.contains("out")) c.out = get_as<std::string>(j.at("out"), "out");
    if (j.contains("threads")) c.threads = get_as<int>(j.at("threads"), "threads");
    if (j.contains("mode")) {
        const auto mode = get_as<std::string>(j.at("mode"), "mode");
        if (mode != "light" && mode != "heavy") throw ConfigError("mode must be 'light' or 'heavy'");
        c.heavy_tail = mode == "heavy";
    }
    if (j.contains("p")) c.p = get_as<double>(j.at("p"), "p");
    if (j.contains("b_n")) c.b_n = get_as<double>(j.at("b_n"), "b_n");
    if (j.contains("k_min")) c.k_min = get_as<std::size_t>(j.at("k_min"), "k_min");
    if (j.contains("calibration")) {
        const Json& cal = j.at("calibration");
        if (!cal.is_object()) throw ConfigError("calibration must be an object");
        if (cal.contains("grid_n")) c.calibration.grid_n = get_as<std::size_t>(cal.at("grid_n"), "calibration.grid_n");
        if (cal.contains("reps")) c.calibration.reps = get_as<std::size_t>(cal.at("reps"), "calibration.reps");
        if (cal.contains("seed")) c.calibration.seed = get_as<std::uint64_t>(cal.at("seed"), "calibration.seed");
        if (cal.contains("cache_dir"))
            c.calibration.cache_dir = get_as<std::string>(cal.at("cache_dir"), "calibration.cache_dir");
    }
    if (j.contains("table")) c.tables = scalar_or_list<std::string>(j.at("table"), "table");
    if (j.contains("beta")) c.betas = scalar_or_list<double>(j.at("beta"), "beta");
    if (j.contains("theta")) c.thetas = scalar_or_list<double>(j.at("theta"), "theta");
    if (j.contains("amplitude")) c.amplitudes = scalar_or_list<double>(j.at("amplitude"), "amplitude");
    if (j.contains("k_star_fraction")) c.k_star_fraction = get_as<double>(j.at("k_star_fraction"), "k_star_fraction");
    return c;
}

double declared_p(const ExperimentConfig& cfg) {
    if (cfg.p) return *cfg.p;
    return tail_index(cfg.innovation);
}

TestMode make_mode(const ExperimentConfig& cfg) {
    const double p = declared_p(cfg);
    if (!cfg.heavy_tail) return LightTailMode{p};
    HeavyTailMode heavy;
    heavy.p = p;
    heavy.b_n = cfg.b_n;
    heavy.spec = cfg.innovation;
    return heavy;
}

void validate_test_settings(const ExperimentConfig& cfg) {
    if (cfg.alphas.empty()) throw ConfigError("at least one alpha is required");
    if (cfg.ns.empty()) throw ConfigError("at least one n is required");
    if (cfg.reps == 0) throw ConfigError("reps must be positive");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("level must lie in (0, 1)");
    if (cfg.k_min > 1) throw ConfigError("k_min must be 0 or 1");
    if (cfg.calibration.grid_n < 2 || cfg.calibration.reps == 0)
        throw ConfigError("calibration needs grid_n >= 2 and reps >= 1");
    const TestMode mode = make_mode(cfg);
    for (double a : cfg.alphas) check_mode(a, mode);
    for (std::size_t n : cfg.ns) {
        if (n < 2) throw ConfigError("every n must be at least 2");
        try {
            (void)resolve_phi(cfg.model, n);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
}

}  // namespace episcan

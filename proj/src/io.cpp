#include "episcan/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "episcan/error.hpp"

namespace episcan {
namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
    if (field.empty()) throw DataError("empty numeric field");
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw DataError("malformed number '" + std::string(field) + "'");
    if (!std::isfinite(v)) throw DataError("non-finite number '" + std::string(field) + "'");
    return v;
}

std::string csv_banner(const std::string& command) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return "# episcan " + command + " generated_at=" + stamp;
}

namespace {

double number_at(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be numeric");
    return j.at(key).get<double>();
}

std::size_t count_at(const Json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    if (quoted) throw DataError("unterminated quoted CSV field");
    out.push_back(std::move(cur));
    return out;
}

}  // namespace

Json to_json(const InnovationSpec& spec) {
    Json j;
    j["kind"] = kind_name(spec);
    if (const auto* g = std::get_if<Gaussian>(&spec)) j["params"] = {{"sigma", g->sigma}};
    if (const auto* p = std::get_if<SymmetricPareto>(&spec)) j["params"] = {{"p", p->p}, {"a", p->a}};
    if (const auto* t = std::get_if<StudentT>(&spec)) j["params"] = {{"nu", t->nu}};
    if (const auto* q = std::get_if<TruncatedPolyTail>(&spec)) j["params"] = {{"p", q->p}};
    return j;
}

InnovationSpec innovation_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("innovation spec needs a string 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    const Json params = j.value("params", Json::object());
    InnovationSpec spec;
    if (kind == "gaussian")
        spec = Gaussian{number_or(params, "sigma", 1.0)};
    else if (kind == "symmetric_pareto")
        spec = SymmetricPareto{number_at(params, "p"), number_or(params, "a", 0.5)};
    else if (kind == "student_t")
        spec = StudentT{number_at(params, "nu")};
    else if (kind == "truncated_poly_tail")
        spec = TruncatedPolyTail{number_at(params, "p")};
    else
        throw ConfigError("unknown innovation kind '" + kind + "'");
    try {
        validate(spec);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

Json to_json(const ModelSpec& model) {
    if (const auto* f = std::get_if<FixedPhi>(&model)) return {{"regime", "fixed"}, {"phi", f->phi}};
    const auto& m = std::get<NearUnit>(model);
    if (m.schedule == NearUnit::Schedule::PowerLaw)
        return {{"regime", "near_unit"}, {"schedule", "power_law"}, {"c", m.c}, {"d", m.d}};
    return {{"regime", "near_unit"}, {"schedule", "logarithmic"}, {"c", m.c}};
}

ModelSpec model_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("model spec must be an object");
    const auto regime = j.value("regime", std::string("fixed"));
    ModelSpec model;
    if (regime == "fixed") {
        model = FixedPhi{number_at(j, "phi")};
    } else if (regime == "near_unit") {
        NearUnit m;
        const auto schedule = j.value("schedule", std::string("power_law"));
        if (schedule == "power_law") {
            m.schedule = NearUnit::Schedule::PowerLaw;
            m.d = number_or(j, "d", 0.5);
        } else if (schedule == "logarithmic") {
            m.schedule = NearUnit::Schedule::Logarithmic;
        } else {
            throw ConfigError("unknown near-unit schedule '" + schedule + "'");
        }
        m.c = number_or(j, "c", 1.0);
        model = m;
    } else {
        throw ConfigError("unknown model regime '" + regime + "'");
    }
    try {
        validate(model);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return model;
}

Json to_json(const EpidemicSpec& e) {
    return {{"k_star", e.k_star}, {"ell_star", e.ell_star}, {"amplitude", e.amplitude}};
}

EpidemicSpec epidemic_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("epidemic spec must be an object");
    EpidemicSpec e;
    e.k_star = count_at(j, "k_star", 0);
    e.ell_star = count_at(j, "ell_star", 1);
    e.amplitude = number_or(j, "amplitude", 0.0);
    return e;
}

Json to_json(const ScanResult& r) {
    Json j{{"value", r.value}, {"k_hat", r.k_hat}, {"ell_hat", r.ell_hat}, {"alpha", r.alpha}, {"k_min", r.k_min}};
    if (!r.exact) j["exact"] = false;
    return j;
}

Json to_json(const TestReport& r) {
    Json j;
    j["statistic"] = to_json(r.statistic);
    j["normalized"] = r.normalized;
    j["critical_value"] = r.critical_value;
    j["p_value"] = r.p_value;
    j["decision"] = r.decision == Decision::Reject ? "reject" : "accept";
    j["mode"] = r.heavy_tail ? "heavy_tail" : "light_tail";
    j["level"] = r.level;
    j["n"] = r.n;
    j["phi_hat"] = r.phi_hat;
    j["sigma_hat"] = r.sigma_hat;
    j["normalizer"] = r.normalizer;
    j["tail_p"] = std::isfinite(r.tail_p) ? Json(r.tail_p) : Json("inf");
    j["localization"] = {{"k_hat", r.statistic.k_hat},
                         {"ell_hat", r.statistic.ell_hat},
                         {"note", "informal window estimate, not an inferential quantity"}};
    j["assumptions"] = {{"sigma", r.heavy_tail ? "not used" : "residual sample standard deviation"},
                        {"p", "declared by the user"}};
    if (r.calibration) {
        j["calibration"] = {{"alpha", r.calibration->alpha},
                            {"grid_n", r.calibration->grid_n},
                            {"reps", r.calibration->reps},
                            {"master_seed", r.calibration->master_seed}};
    }
    return j;
}

std::string test_report_csv_header() {
    return "n,alpha,mode,statistic,normalized,critical_value,p_value,decision,k_hat,ell_hat,phi_hat";
}

std::string test_report_csv_row(const TestReport& r) {
    std::ostringstream os;
    os << r.n << ',' << format_double(r.statistic.alpha) << ',' << (r.heavy_tail ? "heavy_tail" : "light_tail") << ','
       << format_double(r.statistic.value) << ',' << format_double(r.normalized) << ','
       << format_double(r.critical_value) << ',' << format_double(r.p_value) << ','
       << (r.decision == Decision::Reject ? "reject" : "accept") << ',' << r.statistic.k_hat << ','
       << r.statistic.ell_hat << ',' << format_double(r.phi_hat);
    return os.str();
}

Json to_json(const CalibrationEntry& e, bool include_sample) {
    Json quantiles = Json::object();
    for (double q : CalibrationEntry::kSummaryLevels) quantiles[format_double(q)] = e.quantile(q);
    Json j{{"format_version", CalibrationEntry::kFormatVersion},
           {"alpha", e.key.alpha},
           {"grid_n", e.key.grid_n},
           {"reps", e.key.reps},
           {"master_seed", e.key.master_seed},
           {"quantiles", quantiles},
           {"sample_digest", e.digest()}};
    if (include_sample) j["sample"] = e.sample;
    return j;
}

CalibrationEntry calibration_from_json(const Json& j) {
    try {
        if (j.at("format_version").get<int>() != CalibrationEntry::kFormatVersion)
            throw DataError("unsupported calibration format_version");
        CalibrationEntry e;
        e.key.alpha = j.at("alpha").get<double>();
        e.key.grid_n = j.at("grid_n").get<std::size_t>();
        e.key.reps = j.at("reps").get<std::size_t>();
        e.key.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (!j.contains("sample"))
            throw CalibrationRequired("calibration file carries no sample; rerun calibrate");
        e.sample = j.at("sample").get<std::vector<double>>();
        if (e.sample.size() != e.key.reps) throw DataError("calibration sample length differs from reps");
        if (!std::is_sorted(e.sample.begin(), e.sample.end())) throw DataError("calibration sample is not sorted");
        if (e.digest() != j.at("sample_digest").get<std::string>())
            throw DataError("calibration sample digest mismatch");
        return e;
    } catch (const Json::exception& ex) {
        throw DataError(std::string("malformed calibration file: ") + ex.what());
    }
}

Json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& ex) {
        throw DataError("malformed JSON in " + path.string() + ": " + ex.what());
    }
}

void save_calibration(const CalibrationEntry& e, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << to_json(e).dump(1) << '\n';
    }
    fs::rename(tmp, path);
}

CalibrationEntry load_calibration(const fs::path& path) { return calibration_from_json(read_json_file(path)); }

fs::path calibration_cache_path(const fs::path& dir, const CalibrationKey& key) {
    std::ostringstream name;
    name << "cv_a" << format_double(key.alpha) << "_g" << key.grid_n << "_r" << key.reps << "_s" << key.master_seed
         << ".json";
    return dir / name.str();
}

CalibrationEntry load_or_calibrate(const CalibrationKey& key, const fs::path& cache_dir) {
    if (!cache_dir.empty()) {
        const fs::path path = calibration_cache_path(cache_dir, key);
        if (fs::exists(path)) {
            try {
                CalibrationEntry cached = load_calibration(path);
                if (cached.key.matches(key)) return cached;
            } catch (const Error&) {
                // stale or corrupt: fall through and recompute
            }
        }
    }
    CalibrationEntry e = calibrate(key.alpha, key.grid_n, key.reps, key.master_seed);
    if (!cache_dir.empty()) save_calibration(e, calibration_cache_path(cache_dir, key));
    return e;
}

void write_sample_csv(std::ostream& os, const CalibrationEntry& e) {
    os << "rank,value\n";
    for (std::size_t i = 0; i < e.sample.size(); ++i) os << (i + 1) << ',' << format_double(e.sample[i]) << '\n';
}

void write_series_csv(std::ostream& os, const SeriesBundle& b, const std::string& banner) {
    if (!banner.empty()) os << banner << '\n';
    os << "index,y,eps,tau,z\n";
    const std::size_t n = b.n();
    for (std::size_t k = 0; k <= n; ++k) {
        os << k << ',' << format_double(b.y[k]) << ',';
        if (k > 0 && !b.eps.empty()) os << format_double(b.eps[k - 1]);
        os << ',' << format_double(b.tau[k]) << ',' << format_double(b.z[k]) << '\n';
    }
}

SeriesFile read_series_csv(std::istream& is) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        header = split_csv(line);
        break;
    }
    if (header.empty()) throw DataError("series CSV has no header row");
    auto column = [&](const std::string& name) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
        return -1;
    };
    const auto idx_col = column("index");
    const auto y_col = column("y");
    if (idx_col < 0 || y_col < 0) throw DataError("series CSV needs 'index' and 'y' columns");
    const std::ptrdiff_t opt_cols[3] = {column("eps"), column("tau"), column("z")};

    SeriesFile file;
    std::vector<double> optional_data[3];
    bool optional_complete[3] = {opt_cols[0] >= 0, opt_cols[1] >= 0, opt_cols[2] >= 0};
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw DataError("series CSV row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(header.size()));
        const double index = parse_double(fields[static_cast<std::size_t>(idx_col)]);
        if (index != static_cast<double>(row))
            throw DataError("series CSV index column must count 0, 1, 2, ...; row " + std::to_string(row));
        file.y.push_back(parse_double(fields[static_cast<std::size_t>(y_col)]));
        for (int c = 0; c < 3; ++c) {
            if (!optional_complete[c]) continue;
            const auto& f = fields[static_cast<std::size_t>(opt_cols[c])];
            if (c == 0 && row == 0) continue;  // eps has no entry at index 0
            if (f.empty()) {
                optional_complete[c] = false;
                continue;
            }
            optional_data[c].push_back(parse_double(f));
        }
        ++row;
    }
    if (file.y.empty()) throw DataError("series CSV has no data rows");
    if (file.y.front() != 0.0) throw DataError("series must start at y_0 = 0");
    if (optional_complete[0]) file.eps = std::move(optional_data[0]);
    if (optional_complete[1]) file.tau = std::move(optional_data[1]);
    if (optional_complete[2]) file.z = std::move(optional_data[2]);
    return file;
}

SeriesFile read_series_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_series_csv(in);
}

}  // namespace episcan

#include "carma_hawkes/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "carma_hawkes/errors.hpp"

namespace carma_hawkes {

namespace {

using nlohmann::json;

std::vector<double> number_array(const json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw FormatError(std::string("model spec is missing \"") + key + "\"");
    }
    const json& v = doc.at(key);
    if (!v.is_array()) {
        throw FormatError(std::string("\"") + key + "\" must be an array of numbers");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) {
            throw FormatError(std::string("\"") + key + "\" must be an array of numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

double number(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc.at(key).is_number()) {
        throw FormatError(std::string("model spec needs a numeric \"") + key + "\"");
    }
    return doc.at(key).get<double>();
}

// Strips trailing zero padding so that a written spec reads back unchanged.
std::vector<double> unpadded(std::vector<double> b) {
    while (b.size() > 1 && b.back() == 0.0) b.pop_back();
    return b;
}

json nullable(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw FormatError("bad time value on line " + std::to_string(line));
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

}  // namespace

ModelSpec parse_model_spec(const json& doc) {
    if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string()) {
        throw FormatError("model spec needs a \"type\" of \"univariate\" or \"bivariate\"");
    }
    const auto type = doc.at("type").get<std::string>();
    if (type == "univariate") {
        return make_univariate_spec(number(doc, "mu"), number_array(doc, "a"), number_array(doc, "b"));
    }
    if (type == "bivariate") {
        const auto mu = number_array(doc, "mu");
        if (mu.size() != 2) {
            throw FormatError("bivariate \"mu\" must have two entries");
        }
        return make_bivariate_spec({mu[0], mu[1]}, number_array(doc, "a1"), number_array(doc, "a2"),
                                   number_array(doc, "b11"), number_array(doc, "b12"), number_array(doc, "b21"),
                                   number_array(doc, "b22"));
    }
    throw FormatError("unknown model type \"" + type + "\"");
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
    return parse_model_spec(read_json_file(path));
}

json to_json(const ModelSpec& spec) {
    if (const auto* u = std::get_if<UnivariateSpec>(&spec)) {
        return {{"type", "univariate"}, {"mu", u->mu}, {"a", u->a.values()}, {"b", unpadded(u->b)}};
    }
    const auto& s = std::get<BivariateSpec>(spec);
    return {{"type", "bivariate"},       {"mu", {s.mu[0], s.mu[1]}}, {"a1", s.a1.values()},
            {"a2", s.a2.values()},       {"b11", unpadded(s.b11)},   {"b12", unpadded(s.b12)},
            {"b21", unpadded(s.b21)},    {"b22", unpadded(s.b22)}};
}

std::string hash_to_hex(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::uint64_t hex_to_hash(const std::string& hex) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
    if (ec != std::errc() || ptr != hex.data() + hex.size()) {
        throw FormatError("spec_hash must be a hexadecimal string");
    }
    return v;
}

void write_events_csv(std::ostream& out, const EventLog& log) {
    out << "time,mark\n";
    char buf[64];
    for (std::size_t i = 0; i < log.times.size(); ++i) {
        const int n = std::snprintf(buf, sizeof buf, "%.15g,%d\n", log.times[i], log.marks[i]);
        out.write(buf, n);
    }
}

EventLog read_events_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "time,mark") {
        throw FormatError("events CSV must start with the header \"time,mark\"");
    }
    EventLog log;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos) {
            throw FormatError("expected \"time,mark\" on line " + std::to_string(lineno));
        }
        log.times.push_back(parse_double(trim(row.substr(0, comma)), lineno));
        const std::string_view m = trim(row.substr(comma + 1));
        int mark = 0;
        const auto [ptr, ec] = std::from_chars(m.data(), m.data() + m.size(), mark);
        if (ec != std::errc() || ptr != m.data() + m.size()) {
            throw FormatError("bad mark on line " + std::to_string(lineno));
        }
        log.marks.push_back(mark);
    }
    return log;
}

json to_json(const RunMetadata& meta) {
    return {{"seed", meta.seed},
            {"horizon", meta.horizon},
            {"proposed", meta.proposed},
            {"accepted", meta.accepted},
            {"acceptance_ratio", meta.acceptance_ratio()},
            {"wall_time_seconds", meta.wall_time_seconds},
            {"spec_hash", hash_to_hex(meta.spec_hash)},
            {"components", meta.components}};
}

RunMetadata metadata_from_json(const json& doc) {
    try {
        RunMetadata meta;
        meta.seed = doc.at("seed").get<std::uint64_t>();
        meta.horizon = doc.at("horizon").get<double>();
        meta.proposed = doc.at("proposed").get<std::uint64_t>();
        meta.accepted = doc.at("accepted").get<std::uint64_t>();
        meta.wall_time_seconds = doc.value("wall_time_seconds", 0.0);
        meta.spec_hash = hex_to_hash(doc.at("spec_hash").get<std::string>());
        meta.components = doc.value("components", 1);
        return meta;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad run metadata: ") + e.what());
    }
}

json to_json(const ValidationReport& report) {
    json issues = json::array();
    for (const auto& i : report.issues) {
        issues.push_back({{"kind", std::string(to_string(i.kind))}, {"detail", i.detail}});
    }
    json kernels = json::array();
    for (const auto& k : report.kernels) {
        kernels.push_back({{"name", k.name},
                           {"branching", nullable(k.branching)},
                           {"branching_quadrature", nullable(k.branching_quadrature)},
                           {"kernel_min", nullable(k.kernel_min)}});
    }
    json doc = {{"admissible", report.admissible()},
                {"branching", nullable(report.branching)},
                {"decay", nullable(report.decay)},
                {"kernel_min", nullable(report.kernel_min)},
                {"kernels", kernels},
                {"issues", issues}};
    if (report.branching_matrix) {
        const auto& h = *report.branching_matrix;
        doc["branching_matrix"] = {{h(0, 0), h(0, 1)}, {h(1, 0), h(1, 1)}};
    }
    return doc;
}

json to_json(const DiagnosticsReport& report) {
    json components = json::array();
    for (const auto& c : report.components) {
        components.push_back({{"component", c.component},
                              {"n_events", c.n_events},
                              {"empirical_rate", nullable(c.empirical_rate)},
                              {"theoretical_rate", nullable(c.theoretical_rate)},
                              {"ks_statistic", c.ks ? json(c.ks->statistic) : json(nullptr)},
                              {"ks_p_value", c.ks ? json(c.ks->p_value) : json(nullptr)},
                              {"ks_n", c.ks ? c.ks->n : 0},
                              {"residual_mean", nullable(c.residual_mean)},
                              {"acceptance_ratio", nullable(c.acceptance_ratio)}});
    }
    return {{"components", components}};
}

void write_residuals_csv(std::ostream& out, const ResidualSeries& residuals) {
    out << "tau\n";
    char buf[64];
    for (double tau : residuals.taus) {
        const int n = std::snprintf(buf, sizeof buf, "%.17g\n", tau);
        out.write(buf, n);
    }
}

void write_qq_csv(std::ostream& out, const ResidualSeries& residuals) {
    std::vector<double> x = residuals.taus;
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    out << "empirical,theoretical\n";
    char buf[96];
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double q = -std::log1p(-(static_cast<double>(i) + 0.5) / n);
        const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x[i], q);
        out.write(buf, len);
    }
}

void write_trace_csv(std::ostream& out, const std::vector<IntensitySample>& samples, int components) {
    out << (components == 2 ? "time,lambda_1,lambda_2,lambda_bar\n" : "time,lambda,lambda_bar\n");
    char buf[128];
    for (const auto& s : samples) {
        int n = 0;
        if (components == 2) {
            n = std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g\n", s.t, s.lambda[0], s.lambda[1],
                              s.lambda_bar);
        } else {
            n = std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g\n", s.t, s.lambda[0], s.lambda_bar);
        }
        out.write(buf, n);
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

}  // namespace carma_hawkes

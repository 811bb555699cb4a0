#include "carma_hawkes/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "carma_hawkes/diagnostics.hpp"
#include "carma_hawkes/errors.hpp"
#include "carma_hawkes/io.hpp"
#include "carma_hawkes/replicate.hpp"

namespace carma_hawkes::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::string model;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::size_t replications = 1;
    std::string output_dir = ".";
    bool override_validation = false;
    std::optional<double> trace_dt;
};

struct DiagnoseConfig {
    std::string model;
    std::string events;
    std::string meta;
    std::optional<double> horizon;
    std::string output_dir = ".";
};

struct BenchConfig {
    std::vector<std::string> models;
    double horizon = 10000.0;
    std::size_t replications = 5;
    std::uint64_t seed = 0;
    bool override_validation = false;
};

// Thrown for bad flag values; mapped to kInvalidConfig.
struct ConfigError : Error {
    using Error::Error;
};

json complex_list(const Eigen::VectorXcd& v) {
    json out = json::array();
    for (const auto& z : v) out.push_back({z.real(), z.imag()});
    return out;
}

json describe_model(const Model& model) {
    json doc;
    if (const auto* u = std::get_if<UnivariateModel>(&model)) {
        const auto forms = u->bound_constant_forms();
        doc["type"] = "univariate";
        doc["eigenvalues"] = complex_list(u->spectral().eigenvalues);
        doc["bound_constant"] = u->bound_constant();
        doc["bound_constant_forms"] = {{"norm_product", forms.norm_product}, {"spectral", forms.spectral}};
        const double rate = u->stationary_rate();
        doc["stationary_rate"] = std::isfinite(rate) ? json(rate) : json(nullptr);
    } else {
        const auto& b = std::get<BivariateModel>(model);
        doc["type"] = "bivariate";
        doc["eigenvalues"] = {complex_list(b.spectral(1).eigenvalues), complex_list(b.spectral(2).eigenvalues)};
        doc["bound_constants"] = {b.bound_constant(1), b.bound_constant(2)};
        json rates = json::array();
        for (double r : b.stationary_rates()) rates.push_back(std::isfinite(r) ? json(r) : json(nullptr));
        doc["stationary_rates"] = rates;
    }
    return doc;
}

const ValidationReport& report_of(const Model& model) {
    return std::visit([](const auto& m) -> const ValidationReport& { return m.validation(); }, model);
}

void write_text(const fs::path& path, const auto& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    writer(out);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw ConfigError("--horizon must be positive");
    if (cfg.replications < 1) throw ConfigError("--reps must be at least 1");
    if (cfg.trace_dt && !(*cfg.trace_dt > 0.0)) throw ConfigError("--trace-intensity must be positive");

    const Model model = make_model(load_model_spec(cfg.model));
    const auto& report = report_of(model);
    if (!report.admissible() && !cfg.override_validation) {
        err << "model failed validation (use --force to simulate anyway):\n" << to_json(report).dump(2) << '\n';
        return kValidationFailure;
    }

    fs::create_directories(cfg.output_dir);
    SimulationOptions options;
    options.override_validation = cfg.override_validation;
    const auto logs = simulate_replications(model, cfg.horizon, cfg.seed, cfg.replications,
                                            default_thread_count(), options);

    const auto& process = std::visit([](const auto& m) -> const ModalProcess& { return m.process(); }, model);
    json summary = json::array();
    for (std::size_t k = 0; k < logs.size(); ++k) {
        const auto& log = logs[k];
        const fs::path dir(cfg.output_dir);
        const std::string stem = "events_" + std::to_string(k);
        write_text(dir / (stem + ".csv"), [&](std::ostream& o) { write_events_csv(o, log); });
        write_json_file(dir / (stem + ".json"), to_json(log.meta));
        if (cfg.trace_dt) {
            const auto grid = uniform_grid(cfg.horizon, *cfg.trace_dt);
            const auto samples = trace_path(process, log, grid);
            write_text(dir / ("intensity_" + std::to_string(k) + ".csv"),
                       [&](std::ostream& o) { write_trace_csv(o, samples, log.meta.components); });
        }
        summary.push_back({{"replication", k},
                           {"seed", log.meta.seed},
                           {"events", log.size()},
                           {"acceptance_ratio", log.meta.acceptance_ratio()}});
    }
    out << summary.dump(2) << '\n';
    return kOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
    const ModelSpec spec = load_model_spec(path);
    const ValidationReport report = validate(spec);
    json doc = to_json(report);
    if (report.admissible() || (!report.has(IssueKind::DegenerateEigenvalues) &&
                                !report.has(IssueKind::RootFindingFailure))) {
        try {
            doc["model"] = describe_model(make_model(spec));
        } catch (const SpectralError& e) {
            doc["model_error"] = e.what();
        }
    }
    out << doc.dump(2) << '\n';
    return report.admissible() ? kOk : kValidationFailure;
}

int cmd_diagnose(const DiagnoseConfig& cfg, std::ostream& out) {
    const Model model = make_model(load_model_spec(cfg.model));

    EventLog log;
    {
        std::ifstream in(cfg.events, std::ios::binary);
        if (!in) throw ConfigError("cannot open events file " + cfg.events);
        log = read_events_csv(in);
    }
    fs::path meta_path = cfg.meta.empty() ? fs::path(cfg.events).replace_extension(".json") : fs::path(cfg.meta);
    if (fs::exists(meta_path)) {
        log.meta = metadata_from_json(read_json_file(meta_path));
    } else if (!cfg.meta.empty()) {
        throw ConfigError("cannot open metadata file " + cfg.meta);
    } else if (!cfg.horizon) {
        throw ConfigError("no metadata sidecar found; pass --horizon");
    }
    if (cfg.horizon) {
        if (!(*cfg.horizon > 0.0)) throw ConfigError("--horizon must be positive");
        log.meta.horizon = *cfg.horizon;
    }

    const DiagnosticsReport report = summarize(model, log);
    json doc = to_json(report);
    doc["spec_hash"] = hash_to_hex(std::visit([](const auto& m) { return m.hash(); }, model));

    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    write_json_file(dir / "report.json", doc);
    for (const auto& c : report.components) {
        const auto residuals = residual_transform(model, log, c.component);
        const std::string suffix = std::to_string(c.component) + ".csv";
        write_text(dir / ("residuals_" + suffix), [&](std::ostream& o) { write_residuals_csv(o, residuals); });
        write_text(dir / ("qq_" + suffix), [&](std::ostream& o) { write_qq_csv(o, residuals); });
    }
    out << doc.dump(2) << '\n';
    return kOk;
}

int cmd_bench(const BenchConfig& cfg, std::ostream& out) {
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw ConfigError("--horizon must be positive");
    if (cfg.replications < 1) throw ConfigError("--reps must be at least 1");

    SimulationOptions options;
    options.override_validation = cfg.override_validation;
    json rows = json::array();
    for (const auto& path : cfg.models) {
        const Model model = make_model(load_model_spec(path));
        std::uint64_t events = 0;
        std::uint64_t proposed = 0;
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t k = 0; k < cfg.replications; ++k) {
            const EventLog log = simulate(model, cfg.horizon, cfg.seed + k, options);
            events += log.meta.accepted;
            proposed += log.meta.proposed;
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double ratio = proposed == 0 ? 1.0 : static_cast<double>(events) / static_cast<double>(proposed);
        rows.push_back({{"model", path},
                        {"replications", cfg.replications},
                        {"events", events},
                        {"proposed", proposed},
                        {"seconds", seconds},
                        {"events_per_sec", static_cast<double>(events) / seconds},
                        {"proposals_per_sec", static_cast<double>(proposed) / seconds},
                        {"acceptance_ratio", ratio}});
    }
    out << rows.dump(2) << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Thinning simulation of univariate and bivariate CARMA(p,q)-Hawkes processes", "carma-hawkes"};
    app.require_subcommand(1);

    RunConfig sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate event paths");
    simulate_cmd->add_option("--model", sim.model, "Model spec JSON")->required();
    simulate_cmd->add_option("--horizon", sim.horizon, "Simulation horizon")->required();
    simulate_cmd->add_option("--seed", sim.seed, "Base seed; replication k uses seed + k");
    simulate_cmd->add_option("--reps", sim.replications, "Number of replications");
    simulate_cmd->add_option("--out", sim.output_dir, "Output directory");
    simulate_cmd->add_flag("--force", sim.override_validation, "Simulate even if validation fails");
    simulate_cmd->add_option("--trace-intensity", sim.trace_dt, "Also write lambda and envelope on a grid of this step");

    std::string validate_model;
    auto* validate_cmd = app.add_subcommand("validate", "Check stationarity, kernel sign and spectral constants");
    validate_cmd->add_option("--model", validate_model, "Model spec JSON")->required();

    DiagnoseConfig diag;
    auto* diagnose_cmd = app.add_subcommand("diagnose", "Residual analysis and KS test of an event file");
    diagnose_cmd->add_option("--model", diag.model, "Model spec JSON")->required();
    diagnose_cmd->add_option("--events", diag.events, "Events CSV")->required();
    diagnose_cmd->add_option("--meta", diag.meta, "Run metadata JSON (default: events path with .json)");
    diagnose_cmd->add_option("--horizon", diag.horizon, "Observation horizon (overrides metadata)");
    diagnose_cmd->add_option("--out", diag.output_dir, "Output directory");

    BenchConfig bench;
    auto* bench_cmd = app.add_subcommand("bench", "Throughput of the thinning loop");
    bench_cmd->add_option("--model", bench.models, "Model spec JSON (repeatable)")->required();
    bench_cmd->add_option("--horizon", bench.horizon, "Simulation horizon");
    bench_cmd->add_option("--reps", bench.replications, "Replications per model");
    bench_cmd->add_option("--seed", bench.seed, "Base seed");
    bench_cmd->add_flag("--force", bench.override_validation, "Simulate even if validation fails");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kInvalidConfig;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(sim, out, err);
        if (*validate_cmd) return cmd_validate(validate_model, out);
        if (*diagnose_cmd) return cmd_diagnose(diag, out);
        if (*bench_cmd) return cmd_bench(bench, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const InvalidSpec& e) {
        err << "invalid model spec: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const SpecLogMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const HorizonNonPositive& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const SpectralError& e) {
        err << "model failed validation: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const NonStationarySpec& e) {
        err << "model failed validation: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const BoundViolation& e) {
        err << "internal assertion failed: " << e.what() << '\n';
        return kRuntimeAssertion;
    } catch (const NegativeIntensity& e) {
        err << "internal assertion failed: " << e.what() << '\n';
        return kRuntimeAssertion;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kInvalidConfig;
}

}  // namespace carma_hawkes::cli

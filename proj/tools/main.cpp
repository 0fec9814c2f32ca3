// ancsim: feedforward active-noise-control simulator and step-size trainer.
//
// Subcommands: gen-paths, gen-noise, train, simulate, compare, perturb,
// loss-scan. Exit codes: 0 success, 1 validation/format error, 2 divergence
// detected. Every failure prints one machine-parseable line to stderr:
//   error: <kind>: <message>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anc/errors.hpp"
#include "anc/fxlms.hpp"
#include "anc/harness.hpp"
#include "anc/io.hpp"
#include "anc/kernels.hpp"
#include "anc/plant.hpp"
#include "anc/signal.hpp"
#include "anc/trainer.hpp"

namespace fs = std::filesystem;
using namespace anc;

namespace {

io::RunConfig load_config(const std::string& config_path) {
    if (config_path.empty()) return io::RunConfig{};
    return io::load_run_config(config_path);
}

Plant build_plant(const io::RunConfig& config) {
    ImpulseResponse primary;
    ImpulseResponse secondary;
    std::optional<ImpulseResponse> estimate;

    if (!config.primary_path_file.empty()) {
        primary = io::read_impulse_response(config.primary_path_file);
    } else {
        primary = generate_synthetic_path(config.primary_length, config.primary_delay_samples,
                                          config.primary_decay, config.paths_seed,
                                          PathLabel::primary);
    }
    if (!config.secondary_path_file.empty()) {
        secondary = io::read_impulse_response(config.secondary_path_file);
    } else {
        secondary = generate_synthetic_path(config.secondary_length,
                                            config.secondary_delay_samples,
                                            config.secondary_decay, config.paths_seed + 1,
                                            PathLabel::secondary);
    }
    if (!config.secondary_estimate_file.empty())
        estimate = io::read_impulse_response(config.secondary_estimate_file);

    return make_plant(std::move(primary), std::move(secondary), std::move(estimate),
                      config.sample_rate_hz);
}

std::vector<Signal> build_noise_signals(const io::RunConfig& config) {
    if (!config.noise_wav_files.empty()) {
        std::vector<Signal> signals;
        for (const std::string& file : config.noise_wav_files) {
            Signal s = io::read_wav(file);
            if (s.sample_rate_hz != config.sample_rate_hz)
                throw std::invalid_argument("noise file sample rate does not match config: " +
                                            file);
            const double level = rms(s.samples);
            if (level == 0.0) throw std::invalid_argument("noise file is silent: " + file);
            for (double& v : s.samples) v /= level;
            signals.push_back(std::move(s));
        }
        return signals;
    }
    return broadband_dataset(config.sample_rate_hz, config.bands_hz, config.noise_seconds,
                             config.noise_seed, config.bandpass_taps);
}

std::vector<NoisePair> make_pairs(const Plant& plant, const std::vector<Signal>& refs) {
    std::vector<NoisePair> pairs;
    pairs.reserve(refs.size());
    for (const Signal& x : refs) pairs.emplace_back(x, disturbance(plant, x));
    return pairs;
}

Signal concat_signals(const std::vector<Signal>& signals) {
    Signal out;
    out.sample_rate_hz = signals.front().sample_rate_hz;
    for (const Signal& s : signals)
        out.samples.insert(out.samples.end(), s.samples.begin(), s.samples.end());
    return out;
}

NamedStrategy parse_strategy(const std::string& text, const Plant& plant) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (kind == "fixed") {
        if (args.empty()) throw std::invalid_argument("strategy fixed needs a step size");
        return {text, FixedStep{std::stod(args)}};
    }
    if (kind == "theoretical") {
        std::size_t delay = args.empty() ? secondary_delay_estimate(plant.secondary_estimate)
                                         : static_cast<std::size_t>(std::stoull(args));
        return {"theoretical", TheoreticalStep{delay}};
    }
    if (kind == "normalized") {
        NormalizedStep step;
        if (!args.empty()) {
            const auto second = args.find(':');
            step.mu_bar = std::stod(args.substr(0, second));
            if (second != std::string::npos) step.epsilon = std::stod(args.substr(second + 1));
        }
        return {"normalized", step};
    }
    if (kind == "trained") {
        if (args.empty()) throw std::invalid_argument("strategy trained needs an artifact path");
        const io::LearnedMu artifact = io::read_learned_mu(args);
        return {"trained", FixedStep{artifact.mu}};
    }
    throw std::invalid_argument(
        "unknown strategy '" + text +
        "' (expected fixed:<mu>, theoretical[:<delay>], normalized[:<mu_bar>[:<eps>]], "
        "trained:<artifact>)");
}

void write_report_csv(const ComparisonReport& report, const fs::path& path,
                      std::vector<std::string> comments) {
    for (std::size_t i = 0; i < report.strategies.size(); ++i) {
        const auto& s = report.strategies[i];
        std::string line = "strategy " + std::to_string(i) + " = " + s.name;
        if (s.diverged)
            line += " (diverged at sample " + std::to_string(s.divergence_index) + ")";
        comments.push_back(line);
    }
    io::CsvTable table;
    table.names = {"strategy_index", "window_index", "window_start_s", "nr_db"};
    table.columns.resize(4);
    for (std::size_t i = 0; i < report.strategies.size(); ++i) {
        const auto& series = report.strategies[i].nr;
        for (std::size_t w = 0; w < series.values_db.size(); ++w) {
            table.columns[0].push_back(static_cast<double>(i));
            table.columns[1].push_back(static_cast<double>(w));
            table.columns[2].push_back(static_cast<double>(w) * series.window_seconds);
            table.columns[3].push_back(series.values_db[w]);
        }
    }
    io::emit_csv(table, path, comments);
}

void write_report_summary(const ComparisonReport& report, const fs::path& path,
                          const std::vector<std::string>& echo) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& line : echo) out << "# " << line << "\n";
    if (report.perturb_amount != 0.0)
        out << "secondary_path_perturbation = " << io::format_double(report.perturb_amount)
            << "\n";
    for (const auto& s : report.strategies) {
        out << "strategy " << s.name << ": windows=" << s.nr.values_db.size();
        if (const auto first = first_window_db(s.nr))
            out << " first_db=" << io::format_double(*first);
        if (const auto last = final_window_db(s.nr))
            out << " final_db=" << io::format_double(*last);
        out << (s.diverged ? " DIVERGED at sample " + std::to_string(s.divergence_index)
                           : " stable");
        out << "\n";
    }
}

std::string band_file_name(const Band& band) {
    auto hz = [](double v) { return std::to_string(static_cast<long long>(std::llround(v))); };
    return "band_" + hz(band.low_hz) + "_" + hz(band.high_hz) + ".wav";
}

// ------------------------------------------------------- subcommands ----

int cmd_gen_paths(const io::RunConfig& config, const fs::path& out_dir) {
    const Plant plant = build_plant(config);
    const auto echo = io::config_echo_lines(config);
    io::write_impulse_response(plant.primary, out_dir / "primary.csv", echo);
    io::write_impulse_response(plant.secondary, out_dir / "secondary.csv", echo);
    std::cout << "wrote " << (out_dir / "primary.csv").string() << " ("
              << plant.primary.size() << " taps), "
              << (out_dir / "secondary.csv").string() << " (" << plant.secondary.size()
              << " taps)\n";
    return 0;
}

int cmd_gen_noise(const io::RunConfig& config, const fs::path& out_dir) {
    const std::vector<Signal> bands = broadband_dataset(
        config.sample_rate_hz, config.bands_hz, config.noise_seconds, config.noise_seed,
        config.bandpass_taps);
    for (std::size_t i = 0; i < bands.size(); ++i) {
        Signal scaled = bands[i];
        double peak = 0.0;
        for (double v : scaled.samples) peak = std::max(peak, std::abs(v));
        const double gain = peak > 0.0 ? 0.999 / peak : 1.0;
        for (double& v : scaled.samples) v *= gain;
        const fs::path file = out_dir / band_file_name(config.bands_hz[i]);
        io::write_wav(scaled, file);
        std::cout << "wrote " << file.string() << " (" << scaled.size() << " samples)\n";
    }
    return 0;
}

int cmd_train(const io::RunConfig& config, const fs::path& out_dir) {
    const Plant plant = build_plant(config);
    const auto [train_split, test_split] =
        split_dataset(build_noise_signals(config), config.train_fraction);
    (void)test_split;
    const std::vector<NoisePair> pairs = make_pairs(plant, train_split);

    const TrainerResult result = train(pairs, plant, config.trainer);

    const auto echo = io::config_echo_lines(config);
    io::LearnedMu artifact;
    artifact.mu = result.mu_final;
    artifact.epochs = config.trainer.epochs;
    artifact.forgetting = config.trainer.forgetting;
    artifact.learning_rate = config.trainer.learning_rate;
    artifact.num_taps = config.trainer.num_taps;
    artifact.seed = config.trainer.seed;
    artifact.dataset_digest = io::dataset_digest(pairs);
    io::write_learned_mu(artifact, out_dir / "learned_mu.txt", echo);

    io::CsvTable mu_curve;
    mu_curve.names = {"epoch", "mu"};
    mu_curve.columns.resize(2);
    for (std::size_t k = 0; k < result.mu_curve.size(); ++k) {
        mu_curve.columns[0].push_back(static_cast<double>(k));
        mu_curve.columns[1].push_back(result.mu_curve[k]);
    }
    io::emit_csv(mu_curve, out_dir / "mu_curve.csv", echo);

    io::CsvTable loss_curve;
    loss_curve.names = {"epoch", "loss"};
    loss_curve.columns.resize(2);
    for (std::size_t k = 0; k < result.loss_curve.size(); ++k) {
        loss_curve.columns[0].push_back(static_cast<double>(k));
        loss_curve.columns[1].push_back(result.loss_curve[k]);
    }
    io::emit_csv(loss_curve, out_dir / "loss_curve.csv", echo);

    std::cout << "learned mu = " << io::format_double(result.mu_final) << " over "
              << config.trainer.epochs << " tasks\n";
    return 0;
}

int cmd_simulate(const io::RunConfig& config, const fs::path& out_dir,
                 const std::string& strategy_text, bool write_wav_trace) {
    const Plant plant = build_plant(config);
    const auto [train_split, test_split] =
        split_dataset(build_noise_signals(config), config.train_fraction);
    (void)train_split;
    const Signal test_signal = concat_signals(test_split);
    const NamedStrategy strategy = parse_strategy(strategy_text, plant);

    auto echo = io::config_echo_lines(config);
    echo.push_back("strategy = " + strategy.name);

    auto write_trace = [&](const RunTrace& trace) {
        io::CsvTable table;
        table.names = {"sample_index", "disturbance", "control_output", "error"};
        table.columns.resize(4);
        for (std::size_t n = 0; n < trace.error.size(); ++n) {
            table.columns[0].push_back(static_cast<double>(n));
            table.columns[1].push_back(trace.disturbance.samples[n]);
            table.columns[2].push_back(trace.control_output.samples[n]);
            table.columns[3].push_back(trace.error.samples[n]);
        }
        io::emit_csv(table, out_dir / "trace.csv", echo);
        if (write_wav_trace && trace.error.size() > 0) {
            Signal scaled = trace.error;
            double peak = 0.0;
            for (double v : scaled.samples) peak = std::max(peak, std::abs(v));
            const double gain = peak > 0.0 ? 0.999 / peak : 1.0;
            for (double& v : scaled.samples) v *= gain;
            io::write_wav(scaled, out_dir / "error.wav");
        }
    };

    try {
        const RunTrace trace = run_fxlms(plant, test_signal, strategy.strategy, config.num_taps);
        write_trace(trace);
        const NrSeries nr =
            noise_reduction_level(trace.disturbance, trace.error, config.nr_window_seconds);
        std::cout << "simulated " << trace.error.size() << " samples";
        if (const auto last = final_window_db(nr))
            std::cout << ", final-window NR = " << io::format_double(*last) << " dB";
        std::cout << "\n";
    } catch (const DivergenceError& diverged) {
        write_trace(diverged.partial_trace());
        std::cerr << "error: divergence: strategy " << strategy.name << " diverged at sample "
                  << diverged.sample_index() << "\n";
        return 2;
    }
    return 0;
}

int cmd_compare(const io::RunConfig& config, const fs::path& out_dir,
                std::vector<std::string> strategy_texts) {
    const Plant plant = build_plant(config);
    const auto [train_split, test_split] =
        split_dataset(build_noise_signals(config), config.train_fraction);
    (void)train_split;
    const Signal test_signal = concat_signals(test_split);

    if (strategy_texts.empty()) strategy_texts = config.strategies;
    std::vector<NamedStrategy> strategies;
    for (const std::string& text : strategy_texts)
        strategies.push_back(parse_strategy(text, plant));

    const ComparisonReport report =
        compare_strategies(plant, test_signal, strategies, config.num_taps,
                           config.nr_window_seconds);

    const auto echo = io::config_echo_lines(config);
    write_report_csv(report, out_dir / "comparison.csv", echo);
    write_report_summary(report, out_dir / "comparison_summary.txt", echo);
    std::cout << "compared " << report.strategies.size() << " strategies over "
              << test_signal.size() << " samples\n";

    for (const auto& s : report.strategies) {
        if (s.diverged) {
            std::cerr << "error: divergence: strategy " << s.name << " diverged at sample "
                      << s.divergence_index << "\n";
            return 2;
        }
    }
    return 0;
}

int cmd_perturb(const io::RunConfig& config, const fs::path& out_dir,
                const std::string& strategy_text) {
    const Plant plant = build_plant(config);
    const auto [train_split, test_split] =
        split_dataset(build_noise_signals(config), config.train_fraction);
    (void)train_split;
    const Signal test_signal = concat_signals(test_split);
    const NamedStrategy strategy = parse_strategy(strategy_text, plant);

    const std::vector<ComparisonReport> reports =
        robustness_sweep(plant, test_signal, strategy, config.perturb_amounts,
                         config.perturb_seed, config.num_taps, config.nr_window_seconds);

    auto echo = io::config_echo_lines(config);
    echo.push_back("strategy = " + strategy.name);

    io::CsvTable table;
    table.names = {"perturb_amount", "window_index", "window_start_s", "nr_db"};
    table.columns.resize(4);
    std::vector<std::string> comments = echo;
    bool diverged = false;
    std::string divergence_detail;
    for (const ComparisonReport& report : reports) {
        const StrategyOutcome& outcome = report.strategies.front();
        for (std::size_t w = 0; w < outcome.nr.values_db.size(); ++w) {
            table.columns[0].push_back(report.perturb_amount);
            table.columns[1].push_back(static_cast<double>(w));
            table.columns[2].push_back(static_cast<double>(w) * outcome.nr.window_seconds);
            table.columns[3].push_back(outcome.nr.values_db[w]);
        }
        std::string line = "amount " + io::format_double(report.perturb_amount) + ": " +
                           (outcome.diverged ? "diverged at sample " +
                                                   std::to_string(outcome.divergence_index)
                                             : "stable");
        if (const auto last = final_window_db(outcome.nr))
            line += ", final_db=" + io::format_double(*last);
        comments.push_back(line);
        if (outcome.diverged && !diverged) {
            diverged = true;
            divergence_detail = "strategy " + outcome.name + " diverged at sample " +
                                std::to_string(outcome.divergence_index) + " (amount " +
                                io::format_double(report.perturb_amount) + ")";
        }
    }
    io::emit_csv(table, out_dir / "robustness.csv", comments);

    std::ofstream summary(out_dir / "robustness_summary.txt",
                          std::ios::binary | std::ios::trunc);
    for (const auto& line : echo) summary << "# " << line << "\n";
    for (std::size_t i = echo.size(); i < comments.size(); ++i)
        summary << comments[i] << "\n";
    std::cout << "swept " << reports.size() << " perturbation amounts\n";

    if (diverged) {
        std::cerr << "error: divergence: " << divergence_detail << "\n";
        return 2;
    }
    return 0;
}

int cmd_loss_scan(const io::RunConfig& config, const fs::path& out_dir, double mu_min,
                  double mu_max, std::size_t steps, std::size_t tasks) {
    const Plant plant = build_plant(config);
    const auto [train_split, test_split] =
        split_dataset(build_noise_signals(config), config.train_fraction);
    (void)test_split;
    const std::vector<NoisePair> pairs = make_pairs(plant, train_split);

    if (steps < 2) throw std::invalid_argument("loss-scan needs at least 2 grid points");
    std::vector<double> grid(steps);
    for (std::size_t i = 0; i < steps; ++i)
        grid[i] = mu_min + (mu_max - mu_min) * static_cast<double>(i) /
                               static_cast<double>(steps - 1);

    const auto scan = loss_scan(pairs, plant, grid, config.trainer.forgetting,
                                config.num_taps, tasks, config.trainer.seed);

    std::vector<double> losses;
    losses.reserve(scan.size());
    for (const auto& [mu, loss] : scan) losses.push_back(loss);
    const bool unimodal = is_unimodal(losses, 1e-9);

    auto echo = io::config_echo_lines(config);
    echo.push_back(std::string("unimodal_over_grid = ") + (unimodal ? "yes" : "no"));

    io::CsvTable table;
    table.names = {"mu", "mean_loss"};
    table.columns.resize(2);
    for (const auto& [mu, loss] : scan) {
        table.columns[0].push_back(mu);
        table.columns[1].push_back(loss);
    }
    io::emit_csv(table, out_dir / "loss_scan.csv", echo);
    std::cout << "scanned " << steps << " step sizes over " << tasks
              << " tasks; unimodal over grid: " << (unimodal ? "yes" : "no") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feedforward ANC simulator with a meta-learned FxLMS step size"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string kernel_choice = "auto";
    app.add_option("--config", config_path, "flat key-value config file");
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--kernels", kernel_choice, "kernel backend: auto|scalar|avx2|neon");

    auto* gen_paths = app.add_subcommand("gen-paths", "synthesize and save impulse responses");
    auto* gen_noise = app.add_subcommand("gen-noise", "write the broadband dataset as WAV");
    auto* train_cmd = app.add_subcommand("train", "learn a step size from the noise dataset");

    std::string sim_strategy = "theoretical";
    bool sim_wav = false;
    auto* simulate = app.add_subcommand("simulate", "one control run, traces to CSV/WAV");
    simulate->add_option("--strategy", sim_strategy, "step-size strategy");
    simulate->add_flag("--wav", sim_wav, "also write the error trace as WAV");

    std::vector<std::string> cmp_strategies;
    auto* compare = app.add_subcommand("compare", "run several strategies on the test data");
    compare->add_option("--strategy", cmp_strategies,
                        "step-size strategies (repeatable; default from config)");

    std::string perturb_strategy = "theoretical";
    auto* perturb = app.add_subcommand("perturb", "secondary-path robustness sweep");
    perturb->add_option("--strategy", perturb_strategy, "step-size strategy");

    double scan_mu_min = 0.0, scan_mu_max = 2e-3;
    std::size_t scan_steps = 41, scan_tasks = 100;
    auto* scan = app.add_subcommand("loss-scan", "mean task loss over a step-size grid");
    scan->add_option("--mu-min", scan_mu_min, "grid start");
    scan->add_option("--mu-max", scan_mu_max, "grid end");
    scan->add_option("--steps", scan_steps, "grid points");
    scan->add_option("--tasks", scan_tasks, "tasks averaged per grid point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code != 0) std::cerr << "error: usage: invalid arguments\n";
        return code == 0 ? 0 : 1;
    }

    try {
        if (kernel_choice != "auto") {
            bool ok = false;
            for (kernels::Backend b : kernels::available_backends()) {
                if (kernel_choice == kernels::backend_name(b)) ok = kernels::set_backend(b);
            }
            if (!ok)
                throw std::invalid_argument("kernel backend not available: " + kernel_choice);
        }

        const io::RunConfig config = load_config(config_path);
        const fs::path out(out_dir);
        std::filesystem::create_directories(out);

        if (gen_paths->parsed()) return cmd_gen_paths(config, out);
        if (gen_noise->parsed()) return cmd_gen_noise(config, out);
        if (train_cmd->parsed()) return cmd_train(config, out);
        if (simulate->parsed()) return cmd_simulate(config, out, sim_strategy, sim_wav);
        if (compare->parsed()) return cmd_compare(config, out, cmp_strategies);
        if (perturb->parsed()) return cmd_perturb(config, out, perturb_strategy);
        if (scan->parsed())
            return cmd_loss_scan(config, out, scan_mu_min, scan_mu_max, scan_steps, scan_tasks);
        std::cerr << "error: usage: no subcommand given\n";
        return 1;
    } catch (const DivergenceError& e) {
        std::cerr << "error: divergence: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error: format: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return 1;
    }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anc/harness.hpp"
#include "anc/signal.hpp"
#include "anc/trainer.hpp"

namespace anc::io {

/// Reads a RIFF/WAVE file. Only 16-bit PCM mono is accepted; anything else
/// raises FormatError naming the offending field. Samples map to [-1, 1) by
/// division by 32768.
Signal read_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono. Quantization rounds half away from zero; samples
/// outside [-1, 1] are hard-clipped and counted. Returns the clip count.
std::size_t write_wav(const Signal& signal, const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
};

/// Writes a CSV table: optional '#'-prefixed comment lines, a header row of
/// column names, then values with 17 significant digits (round-trip exact
/// for 64-bit floats) and LF line endings. Columns must have equal length.
void emit_csv(const CsvTable& table, const std::filesystem::path& path,
              const std::vector<std::string>& comment_lines = {});

/// Reads a CSV produced by emit_csv, skipping '#' comments.
CsvTable read_csv(const std::filesystem::path& path);

/// Impulse responses persist as single-column CSV with a two-line header
/// carrying the label and tap count, preceded by '#' comment lines.
void write_impulse_response(const ImpulseResponse& h, const std::filesystem::path& path,
                            const std::vector<std::string>& comment_lines = {});
ImpulseResponse read_impulse_response(const std::filesystem::path& path);

/// Flat "key = value" text file; '#' starts a comment, order is preserved.
struct KeyValueFile {
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // throws FormatError if absent
    std::string get_or(const std::string& key, const std::string& fallback) const;
    void set(const std::string& key, const std::string& value);
};

KeyValueFile read_key_value(const std::filesystem::path& path);
void write_key_value(const KeyValueFile& kv, const std::filesystem::path& path,
                     const std::vector<std::string>& comment_lines = {});

/// The learned step size plus everything needed to reproduce it.
struct LearnedMu {
    double mu = 0.0;
    std::size_t epochs = 0;
    double forgetting = 0.0;
    double learning_rate = 0.0;
    std::size_t num_taps = 0;
    std::uint64_t seed = 0;
    std::uint64_t dataset_digest = 0;
};

void write_learned_mu(const LearnedMu& artifact, const std::filesystem::path& path,
                      const std::vector<std::string>& comment_lines = {});
LearnedMu read_learned_mu(const std::filesystem::path& path);

/// FNV-1a over the raw sample bytes and lengths of every pair, in order.
std::uint64_t dataset_digest(const std::vector<NoisePair>& dataset);

/// Exact decimal formatting used by every text artifact (17 significant
/// digits, round-trip exact).
std::string format_double(double v);

/// Experiment configuration: flat key-value file with explicit units in key
/// names. Unknown keys are rejected. Defaults reproduce the stock desk-scale
/// experiment.
struct RunConfig {
    double sample_rate_hz = 16000.0;
    std::size_t num_taps = 512;

    // Acoustic paths: loaded from files when set, synthesized otherwise.
    std::string primary_path_file;
    std::string secondary_path_file;
    std::string secondary_estimate_file;
    std::size_t primary_length = 512;
    std::size_t primary_delay_samples = 64;
    double primary_decay = 0.985;
    std::size_t secondary_length = 256;
    std::size_t secondary_delay_samples = 16;
    double secondary_decay = 0.5;
    std::uint64_t paths_seed = 101;

    // Noise dataset: synthetic bands, or WAV recordings when files are given.
    std::vector<Band> bands_hz = {{600.0, 1800.0},
                                  {1500.0, 4000.0},
                                  {3500.0, 5000.0},
                                  {4400.0, 6000.0}};
    double noise_seconds = 10.0;
    std::uint64_t noise_seed = 202;
    std::size_t bandpass_taps = 255;
    std::vector<std::string> noise_wav_files;
    double train_fraction = 0.7;

    // The stock experiment clamps the step size at a stability margin for
    // the synthetic desk-scale paths; the trainer type itself defaults to
    // the permissive [0, 1] clamp.
    TrainerConfig trainer{.epochs = 2000,
                          .forgetting = 0.5,
                          .learning_rate = 1e-9,
                          .mu_init = 0.0,
                          .mu_min = 0.0,
                          .mu_max = 1.5e-4,
                          .num_taps = 512,
                          .seed = 7,
                          .gradient_mode = GradientMode::first_order};

    double nr_window_seconds = 0.5;
    std::vector<double> perturb_amounts = {0.1, 0.2, 0.3};
    std::uint64_t perturb_seed = 404;
    std::vector<std::string> strategies = {"trained:out/learned_mu.txt", "theoretical",
                                           "normalized"};
    std::string output_dir = "out";
};

/// Parses and validates a config file; missing file raises IoError, bad
/// values raise FormatError. Referenced path/WAV files must exist.
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical '# key = value' echo lines for artifact headers.
std::vector<std::string> config_echo_lines(const RunConfig& config);

}  // namespace anc::io

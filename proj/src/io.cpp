#include "anc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "anc/errors.hpp"

namespace anc::io {

namespace {

// ---------------------------------------------------------------- wav ----

std::uint32_t read_u32le(std::istream& in, const char* field) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw FormatError(std::string("wav: truncated ") + field);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16le(std::istream& in, const char* field) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2))
        throw FormatError(std::string("wav: truncated ") + field);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32le(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff),
                       static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void write_u16le(std::ostream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

std::string read_tag(std::istream& in, const char* field) {
    char tag[4];
    if (!in.read(tag, 4)) throw FormatError(std::string("wav: truncated ") + field);
    return std::string(tag, 4);
}

}  // namespace

Signal read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    if (read_tag(in, "riff_tag") != "RIFF") throw FormatError("wav: bad riff_tag");
    read_u32le(in, "riff_size");
    if (read_tag(in, "wave_tag") != "WAVE") throw FormatError("wav: bad wave_tag");

    bool have_fmt = false;
    std::uint32_t sample_rate = 0;
    Signal out;
    bool have_data = false;

    while (true) {
        char tag_buf[4];
        if (!in.read(tag_buf, 4)) break;  // clean end of chunk list
        const std::string tag(tag_buf, 4);
        const std::uint32_t size = read_u32le(in, "chunk_size");

        if (tag == "fmt ") {
            if (size < 16) throw FormatError("wav: truncated fmt_chunk");
            const std::uint16_t audio_format = read_u16le(in, "audio_format");
            if (audio_format != 1) throw FormatError("wav: unsupported audio_format (PCM only)");
            const std::uint16_t channels = read_u16le(in, "num_channels");
            if (channels != 1) throw FormatError("wav: unsupported num_channels (mono only)");
            sample_rate = read_u32le(in, "sample_rate");
            if (sample_rate == 0) throw FormatError("wav: bad sample_rate");
            read_u32le(in, "byte_rate");
            read_u16le(in, "block_align");
            const std::uint16_t bits = read_u16le(in, "bits_per_sample");
            if (bits != 16) throw FormatError("wav: unsupported bits_per_sample (16 only)");
            if (size > 16) in.seekg(size - 16 + (size % 2), std::ios::cur);
            have_fmt = true;
        } else if (tag == "data") {
            if (!have_fmt) throw FormatError("wav: data before fmt_chunk");
            if (size % 2 != 0) throw FormatError("wav: odd data_size for 16-bit samples");
            const std::size_t count = size / 2;
            out.samples.resize(count);
            std::vector<char> raw(size);
            if (!in.read(raw.data(), static_cast<std::streamsize>(size)))
                throw FormatError("wav: truncated data_chunk");
            for (std::size_t i = 0; i < count; ++i) {
                const auto lo = static_cast<unsigned char>(raw[2 * i]);
                const auto hi = static_cast<unsigned char>(raw[2 * i + 1]);
                const auto v = static_cast<std::int16_t>(
                    static_cast<std::uint16_t>(lo | (hi << 8)));
                out.samples[i] = static_cast<double>(v) / 32768.0;
            }
            have_data = true;
        } else {
            in.seekg(size + (size % 2), std::ios::cur);
            if (!in) throw FormatError("wav: truncated chunk_body");
        }
    }

    if (!have_fmt) throw FormatError("wav: missing fmt_chunk");
    if (!have_data) throw FormatError("wav: missing data_chunk");
    out.sample_rate_hz = static_cast<double>(sample_rate);
    return out;
}

std::size_t write_wav(const Signal& signal, const std::filesystem::path& path) {
    if (!(signal.sample_rate_hz > 0.0))
        throw std::invalid_argument("write_wav: sample rate must be positive");
    for (double v : signal.samples)
        if (!std::isfinite(v)) throw std::invalid_argument("write_wav: non-finite sample");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());

    const auto rate = static_cast<std::uint32_t>(std::llround(signal.sample_rate_hz));
    const auto data_bytes = static_cast<std::uint32_t>(signal.size() * 2);

    out.write("RIFF", 4);
    write_u32le(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32le(out, 16);
    write_u16le(out, 1);  // PCM
    write_u16le(out, 1);  // mono
    write_u32le(out, rate);
    write_u32le(out, rate * 2);
    write_u16le(out, 2);
    write_u16le(out, 16);
    out.write("data", 4);
    write_u32le(out, data_bytes);

    std::size_t clipped = 0;
    for (double v : signal.samples) {
        // Round half away from zero at 16-bit scale.
        const double q = (v >= 0.0) ? std::floor(v * 32768.0 + 0.5)
                                    : std::ceil(v * 32768.0 - 0.5);
        double clamped = q;
        if (q > 32767.0) {
            clamped = 32767.0;
            ++clipped;
        } else if (q < -32768.0) {
            clamped = -32768.0;
            ++clipped;
        }
        write_u16le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(clamped)));
    }
    if (!out) throw IoError("write failed for " + path.string());
    return clipped;
}

// ---------------------------------------------------------------- csv ----

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& text, const char* context) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw FormatError(std::string(context) + ": bad number '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text, const char* context) {
    std::uint64_t v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw FormatError(std::string(context) + ": bad integer '" + text + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

void emit_csv(const CsvTable& table, const std::filesystem::path& path,
              const std::vector<std::string>& comment_lines) {
    for (const auto& col : table.columns)
        if (col.size() != table.columns.front().size())
            throw std::invalid_argument("emit_csv: ragged columns");
    if (table.names.size() != table.columns.size())
        throw std::invalid_argument("emit_csv: one name per column required");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());

    for (const auto& line : comment_lines) out << "# " << line << "\n";
    for (std::size_t c = 0; c < table.names.size(); ++c)
        out << table.names[c] << (c + 1 < table.names.size() ? "," : "");
    out << "\n";

    const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out << format_double(table.columns[c][r])
                << (c + 1 < table.columns.size() ? "," : "");
        out << "\n";
    }
    if (!out) throw IoError("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split(line, ',');
        if (!have_header) {
            table.names.assign(cells.begin(), cells.end());
            table.columns.resize(cells.size());
            have_header = true;
            continue;
        }
        if (cells.size() != table.names.size()) throw FormatError("csv: ragged row");
        for (std::size_t c = 0; c < cells.size(); ++c)
            table.columns[c].push_back(parse_double(cells[c], "csv"));
    }
    if (!have_header) throw FormatError("csv: missing header row");
    return table;
}

// ------------------------------------------------- impulse responses ----

void write_impulse_response(const ImpulseResponse& h, const std::filesystem::path& path,
                            const std::vector<std::string>& comment_lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    out << "label," << to_string(h.label) << "\n";
    out << "length," << h.taps.size() << "\n";
    for (double tap : h.taps) out << format_double(tap) << "\n";
    if (!out) throw IoError("write failed for " + path.string());
}

ImpulseResponse read_impulse_response(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    ImpulseResponse h;
    std::string line;
    int header_lines = 0;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (header_lines == 0) {
            const auto cells = split(line, ',');
            if (cells.size() != 2 || cells[0] != "label")
                throw FormatError("impulse response: missing label header");
            h.label = parse_path_label(cells[1]);
            header_lines = 1;
        } else if (header_lines == 1) {
            const auto cells = split(line, ',');
            if (cells.size() != 2 || cells[0] != "length")
                throw FormatError("impulse response: missing length header");
            expected = parse_u64(cells[1], "impulse response length");
            h.taps.reserve(expected);
            header_lines = 2;
        } else {
            h.taps.push_back(parse_double(line, "impulse response tap"));
        }
    }
    if (header_lines < 2) throw FormatError("impulse response: incomplete header");
    if (h.taps.size() != expected)
        throw FormatError("impulse response: tap count does not match length header");
    if (h.taps.empty()) throw FormatError("impulse response: no taps");
    return h;
}

// --------------------------------------------------------- key-value ----

bool KeyValueFile::has(const std::string& key) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const auto& kv) { return kv.first == key; });
}

const std::string& KeyValueFile::get(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    throw FormatError("missing key: " + key);
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    return fallback;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

KeyValueFile read_key_value(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    KeyValueFile kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw FormatError("key-value: line without '=': " + trimmed);
        kv.entries.emplace_back(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    }
    return kv;
}

void write_key_value(const KeyValueFile& kv, const std::filesystem::path& path,
                     const std::vector<std::string>& comment_lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    for (const auto& [k, v] : kv.entries) out << k << " = " << v << "\n";
    if (!out) throw IoError("write failed for " + path.string());
}

// --------------------------------------------------- learned-mu file ----

void write_learned_mu(const LearnedMu& artifact, const std::filesystem::path& path,
                      const std::vector<std::string>& comment_lines) {
    KeyValueFile kv;
    kv.set("mu", format_double(artifact.mu));
    kv.set("epochs", std::to_string(artifact.epochs));
    kv.set("forgetting_factor", format_double(artifact.forgetting));
    kv.set("learning_rate", format_double(artifact.learning_rate));
    kv.set("num_taps", std::to_string(artifact.num_taps));
    kv.set("seed", std::to_string(artifact.seed));
    kv.set("dataset_digest", std::to_string(artifact.dataset_digest));
    write_key_value(kv, path, comment_lines);
}

LearnedMu read_learned_mu(const std::filesystem::path& path) {
    const KeyValueFile kv = read_key_value(path);
    LearnedMu artifact;
    artifact.mu = parse_double(kv.get("mu"), "learned mu");
    artifact.epochs = parse_u64(kv.get("epochs"), "learned mu epochs");
    artifact.forgetting = parse_double(kv.get("forgetting_factor"), "forgetting factor");
    artifact.learning_rate = parse_double(kv.get("learning_rate"), "learning rate");
    artifact.num_taps = parse_u64(kv.get("num_taps"), "num_taps");
    artifact.seed = parse_u64(kv.get("seed"), "seed");
    artifact.dataset_digest = parse_u64(kv.get("dataset_digest"), "dataset digest");
    return artifact;
}

std::uint64_t dataset_digest(const std::vector<NoisePair>& dataset) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&hash](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash ^= bytes[i];
            hash *= 0x100000001b3ULL;
        }
    };
    for (const auto& [x, d] : dataset) {
        const std::uint64_t nx = x.size();
        mix_bytes(&nx, sizeof nx);
        mix_bytes(x.samples.data(), x.samples.size() * sizeof(double));
        mix_bytes(d.samples.data(), d.samples.size() * sizeof(double));
    }
    return hash;
}

// ------------------------------------------------------------ config ----

namespace {

std::vector<Band> parse_bands(const std::string& text) {
    std::vector<Band> bands;
    for (const std::string& part : split(text, ',')) {
        const std::string item = trim(part);
        if (item.empty()) continue;
        const auto dash = item.find('-');
        if (dash == std::string::npos)
            throw FormatError("config: band must look like '600-1800': " + item);
        bands.push_back(Band{parse_double(trim(item.substr(0, dash)), "band low edge"),
                             parse_double(trim(item.substr(dash + 1)), "band high edge")});
    }
    if (bands.empty()) throw FormatError("config: empty band list");
    return bands;
}

std::vector<std::string> parse_list(const std::string& text) {
    std::vector<std::string> items;
    for (const std::string& part : split(text, ',')) {
        const std::string item = trim(part);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::vector<double> parse_double_list(const std::string& text, const char* context) {
    std::vector<double> values;
    for (const std::string& item : parse_list(text)) values.push_back(parse_double(item, context));
    return values;
}

std::string format_bands(const std::vector<Band>& bands) {
    std::string out;
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (i) out += ",";
        out += format_double(bands[i].low_hz) + "-" + format_double(bands[i].high_hz);
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += items[i];
    }
    return out;
}

std::string format_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_double(values[i]);
    }
    return out;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    const KeyValueFile kv = read_key_value(path);
    RunConfig config;

    for (const auto& [key, value] : kv.entries) {
        if (key == "sample_rate_hz") config.sample_rate_hz = parse_double(value, key.c_str());
        else if (key == "num_taps") config.num_taps = parse_u64(value, key.c_str());
        else if (key == "primary_path_file") config.primary_path_file = value;
        else if (key == "secondary_path_file") config.secondary_path_file = value;
        else if (key == "secondary_estimate_file") config.secondary_estimate_file = value;
        else if (key == "primary_length") config.primary_length = parse_u64(value, key.c_str());
        else if (key == "primary_delay_samples")
            config.primary_delay_samples = parse_u64(value, key.c_str());
        else if (key == "primary_decay") config.primary_decay = parse_double(value, key.c_str());
        else if (key == "secondary_length")
            config.secondary_length = parse_u64(value, key.c_str());
        else if (key == "secondary_delay_samples")
            config.secondary_delay_samples = parse_u64(value, key.c_str());
        else if (key == "secondary_decay")
            config.secondary_decay = parse_double(value, key.c_str());
        else if (key == "paths_seed") config.paths_seed = parse_u64(value, key.c_str());
        else if (key == "bands_hz") config.bands_hz = parse_bands(value);
        else if (key == "noise_seconds") config.noise_seconds = parse_double(value, key.c_str());
        else if (key == "noise_seed") config.noise_seed = parse_u64(value, key.c_str());
        else if (key == "bandpass_taps") config.bandpass_taps = parse_u64(value, key.c_str());
        else if (key == "noise_wav_files") config.noise_wav_files = parse_list(value);
        else if (key == "train_fraction")
            config.train_fraction = parse_double(value, key.c_str());
        else if (key == "train_epochs") config.trainer.epochs = parse_u64(value, key.c_str());
        else if (key == "forgetting_factor")
            config.trainer.forgetting = parse_double(value, key.c_str());
        else if (key == "learning_rate")
            config.trainer.learning_rate = parse_double(value, key.c_str());
        else if (key == "mu_init") config.trainer.mu_init = parse_double(value, key.c_str());
        else if (key == "mu_min") config.trainer.mu_min = parse_double(value, key.c_str());
        else if (key == "mu_max") config.trainer.mu_max = parse_double(value, key.c_str());
        else if (key == "train_seed") config.trainer.seed = parse_u64(value, key.c_str());
        else if (key == "nr_window_seconds")
            config.nr_window_seconds = parse_double(value, key.c_str());
        else if (key == "perturb_amounts")
            config.perturb_amounts = parse_double_list(value, key.c_str());
        else if (key == "perturb_seed") config.perturb_seed = parse_u64(value, key.c_str());
        else if (key == "strategies") config.strategies = parse_list(value);
        else if (key == "output_dir") config.output_dir = value;
        else throw FormatError("config: unknown key '" + key + "'");
    }
    config.trainer.num_taps = config.num_taps;

    for (const std::string* file :
         {&config.primary_path_file, &config.secondary_path_file,
          &config.secondary_estimate_file}) {
        if (!file->empty() && !std::filesystem::exists(*file))
            throw IoError("config: referenced file does not exist: " + *file);
    }
    for (const std::string& file : config.noise_wav_files) {
        if (!std::filesystem::exists(file))
            throw IoError("config: referenced file does not exist: " + file);
    }
    return config;
}

std::vector<std::string> config_echo_lines(const RunConfig& config) {
    std::vector<std::string> lines;
    auto add = [&lines](const std::string& k, const std::string& v) {
        lines.push_back(k + " = " + v);
    };
    add("sample_rate_hz", format_double(config.sample_rate_hz));
    add("num_taps", std::to_string(config.num_taps));
    if (!config.primary_path_file.empty()) add("primary_path_file", config.primary_path_file);
    if (!config.secondary_path_file.empty())
        add("secondary_path_file", config.secondary_path_file);
    if (!config.secondary_estimate_file.empty())
        add("secondary_estimate_file", config.secondary_estimate_file);
    add("primary_length", std::to_string(config.primary_length));
    add("primary_delay_samples", std::to_string(config.primary_delay_samples));
    add("primary_decay", format_double(config.primary_decay));
    add("secondary_length", std::to_string(config.secondary_length));
    add("secondary_delay_samples", std::to_string(config.secondary_delay_samples));
    add("secondary_decay", format_double(config.secondary_decay));
    add("paths_seed", std::to_string(config.paths_seed));
    add("bands_hz", format_bands(config.bands_hz));
    add("noise_seconds", format_double(config.noise_seconds));
    add("noise_seed", std::to_string(config.noise_seed));
    add("bandpass_taps", std::to_string(config.bandpass_taps));
    if (!config.noise_wav_files.empty()) add("noise_wav_files", join(config.noise_wav_files));
    add("train_fraction", format_double(config.train_fraction));
    add("train_epochs", std::to_string(config.trainer.epochs));
    add("forgetting_factor", format_double(config.trainer.forgetting));
    add("learning_rate", format_double(config.trainer.learning_rate));
    add("mu_init", format_double(config.trainer.mu_init));
    add("mu_min", format_double(config.trainer.mu_min));
    add("mu_max", format_double(config.trainer.mu_max));
    add("train_seed", std::to_string(config.trainer.seed));
    add("nr_window_seconds", format_double(config.nr_window_seconds));
    add("perturb_amounts", format_doubles(config.perturb_amounts));
    add("perturb_seed", std::to_string(config.perturb_seed));
    add("strategies", join(config.strategies));
    add("output_dir", config.output_dir);
    return lines;
}

}  // namespace anc::io

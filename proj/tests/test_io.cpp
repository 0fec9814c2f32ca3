#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "anc/errors.hpp"
#include "anc/io.hpp"
#include "test_util.hpp"

using namespace anc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ancsim_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::vector<char> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("wav round-trip is bit-exact at 16-bit resolution") {
    TempDir dir;
    Xoshiro256 rng(81);
    Signal s;
    s.sample_rate_hz = 16000.0;
    for (int i = 0; i < 4000; ++i) {
        const auto q = static_cast<std::int16_t>(rng.next_below(65536) - 32768);
        s.samples.push_back(static_cast<double>(q) / 32768.0);
    }

    const fs::path file = dir.path / "roundtrip.wav";
    CHECK(io::write_wav(s, file) == 0);
    const Signal back = io::read_wav(file);
    CHECK(back.sample_rate_hz == 16000.0);
    CHECK(back.samples == s.samples);

    const fs::path file2 = dir.path / "again.wav";
    io::write_wav(back, file2);
    CHECK(read_bytes(file) == read_bytes(file2));
}

TEST_CASE("wav scaling rules at the extremes") {
    TempDir dir;
    const fs::path file = dir.path / "extremes.wav";

    Signal s{{-1.0, 1.0, 0.0}, 16000.0};
    CHECK(io::write_wav(s, file) == 1);  // +1.0 clips to 32767

    const Signal back = io::read_wav(file);
    CHECK(back.samples[0] == -1.0);  // 0x8000 maps to exactly -1.0
    CHECK(back.samples[1] == 32767.0 / 32768.0);
    CHECK(back.samples[2] == 0.0);
}

TEST_CASE("wav writer output is deterministic and zero stays zero") {
    TempDir dir;
    const Signal s{std::vector<double>(100, 0.0), 8000.0};
    io::write_wav(s, dir.path / "a.wav");
    io::write_wav(s, dir.path / "b.wav");
    const auto a = read_bytes(dir.path / "a.wav");
    CHECK(a == read_bytes(dir.path / "b.wav"));
    // payload after the 44-byte header is all zeros
    for (std::size_t i = 44; i < a.size(); ++i) CHECK(a[i] == 0);
}

TEST_CASE("wav reader rejects stereo and truncated files by field") {
    TempDir dir;
    const fs::path mono = dir.path / "mono.wav";
    io::write_wav({std::vector<double>(16, 0.25), 16000.0}, mono);

    auto bytes = read_bytes(mono);
    // channel count lives at offset 22 in the canonical header
    bytes[22] = 2;
    const fs::path stereo = dir.path / "stereo.wav";
    std::ofstream(stereo, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_WITH_AS(io::read_wav(stereo), doctest::Contains("num_channels"), FormatError);

    auto cut = read_bytes(mono);
    cut.resize(cut.size() - 10);
    const fs::path trunc = dir.path / "trunc.wav";
    std::ofstream(trunc, std::ios::binary).write(cut.data(), cut.size());
    CHECK_THROWS_WITH_AS(io::read_wav(trunc), doctest::Contains("data"), FormatError);

    CHECK_THROWS_AS(io::read_wav(dir.path / "absent.wav"), IoError);
}

TEST_CASE("csv: header-only table, exact cells, byte determinism") {
    TempDir dir;
    io::CsvTable empty;
    empty.names = {"a", "b"};
    empty.columns = {{}, {}};
    io::emit_csv(empty, dir.path / "empty.csv");
    {
        std::ifstream in(dir.path / "empty.csv");
        std::string line;
        CHECK(std::getline(in, line));
        CHECK(line == "a,b");
        CHECK_FALSE(std::getline(in, line));
    }

    io::CsvTable one;
    one.names = {"v"};
    one.columns = {{0.5}};
    io::emit_csv(one, dir.path / "one.csv");
    {
        std::ifstream in(dir.path / "one.csv");
        std::string line;
        std::getline(in, line);
        std::getline(in, line);
        CHECK(line == "0.5");
    }

    io::emit_csv(one, dir.path / "one2.csv");
    CHECK(read_bytes(dir.path / "one.csv") == read_bytes(dir.path / "one2.csv"));
}

TEST_CASE("csv round-trips doubles exactly") {
    TempDir dir;
    Xoshiro256 rng(82);
    io::CsvTable table;
    table.names = {"x", "y"};
    table.columns = {testutil::random_vector(64, rng, 1e3),
                     testutil::random_vector(64, rng, 1e-7)};
    io::emit_csv(table, dir.path / "t.csv", {"comment line", "another"});

    const io::CsvTable back = io::read_csv(dir.path / "t.csv");
    CHECK(back.names == table.names);
    CHECK(back.columns == table.columns);
}

TEST_CASE("csv rejects ragged input") {
    TempDir dir;
    io::CsvTable bad;
    bad.names = {"x", "y"};
    bad.columns = {{1.0, 2.0}, {1.0}};
    CHECK_THROWS_AS(io::emit_csv(bad, dir.path / "bad.csv"), std::invalid_argument);
}

TEST_CASE("impulse responses survive the single-column CSV format") {
    TempDir dir;
    Xoshiro256 rng(83);
    ImpulseResponse h{testutil::random_vector(96, rng), PathLabel::secondary};
    const fs::path file = dir.path / "path.csv";
    io::write_impulse_response(h, file, {"config echo"});

    const ImpulseResponse back = io::read_impulse_response(file);
    CHECK(back.label == PathLabel::secondary);
    CHECK(back.taps == h.taps);

    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# config echo");
    std::getline(in, line);
    CHECK(line == "label,secondary");
    std::getline(in, line);
    CHECK(line == "length,96");
}

TEST_CASE("key-value files: parsing, comments, ordering") {
    TempDir dir;
    const fs::path file = dir.path / "kv.txt";
    std::ofstream(file) << "# header\nalpha = 1\n beta=two words \n\ngamma = 3 # trailing\n";

    const io::KeyValueFile kv = io::read_key_value(file);
    REQUIRE(kv.entries.size() == 3);
    CHECK(kv.get("alpha") == "1");
    CHECK(kv.get("beta") == "two words");
    CHECK(kv.get("gamma") == "3");
    CHECK(kv.get_or("missing", "fallback") == "fallback");
    CHECK_THROWS_AS(kv.get("missing"), FormatError);
}

TEST_CASE("learned-mu artifact round-trips") {
    TempDir dir;
    io::LearnedMu artifact;
    artifact.mu = 1.5e-4;
    artifact.epochs = 2000;
    artifact.forgetting = 0.5;
    artifact.learning_rate = 1e-9;
    artifact.num_taps = 512;
    artifact.seed = 7;
    artifact.dataset_digest = 0xabcdef0123456789ULL;

    const fs::path file = dir.path / "mu.txt";
    io::write_learned_mu(artifact, file, {"echo"});
    const io::LearnedMu back = io::read_learned_mu(file);
    CHECK(back.mu == artifact.mu);
    CHECK(back.epochs == artifact.epochs);
    CHECK(back.forgetting == artifact.forgetting);
    CHECK(back.learning_rate == artifact.learning_rate);
    CHECK(back.num_taps == artifact.num_taps);
    CHECK(back.seed == artifact.seed);
    CHECK(back.dataset_digest == artifact.dataset_digest);
}

TEST_CASE("dataset digest reacts to any sample change") {
    const Signal a{{0.1, 0.2, 0.3}, 16000.0};
    const Signal b{{0.4, 0.5, 0.6}, 16000.0};
    const std::uint64_t d1 = io::dataset_digest({{a, b}});
    Signal a2 = a;
    a2.samples[1] += 1e-12;
    CHECK(io::dataset_digest({{a2, b}}) != d1);
    CHECK(io::dataset_digest({{a, b}}) == d1);
}

TEST_CASE("run config: defaults, overrides, and strict keys") {
    TempDir dir;
    const fs::path file = dir.path / "config.txt";
    std::ofstream(file) << "train_epochs = 10\nbands_hz = 1000-2000,2500-3000\n"
                        << "perturb_amounts = 0.05, 0.15\n";

    const io::RunConfig config = io::load_run_config(file);
    CHECK(config.trainer.epochs == 10);
    CHECK(config.sample_rate_hz == 16000.0);
    REQUIRE(config.bands_hz.size() == 2);
    CHECK(config.bands_hz[1].low_hz == 2500.0);
    CHECK(config.perturb_amounts == std::vector<double>{0.05, 0.15});

    std::ofstream(file) << "no_such_key = 1\n";
    CHECK_THROWS_AS(io::load_run_config(file), FormatError);

    std::ofstream(file) << "primary_path_file = /nonexistent/path.csv\n";
    CHECK_THROWS_AS(io::load_run_config(file), IoError);

    CHECK_THROWS_AS(io::load_run_config(dir.path / "missing.txt"), IoError);
}

TEST_CASE("config echo is stable") {
    const io::RunConfig config;
    const auto a = io::config_echo_lines(config);
    const auto b = io::config_echo_lines(config);
    CHECK(a == b);
    CHECK_FALSE(a.empty());
}

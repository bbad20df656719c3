#include "eegemo/ingest.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "eegemo/rng.hpp"

using namespace eegemo;
namespace fs = std::filesystem;

namespace {

const std::string kFullFile =
    "# muse-eeg v1, rate=256\n"
    "0,1.5,2.5,3.5,4.5\n"
    "1,1.6,2.6,3.6,4.6\n"
    "2,1.7,2.7,3.7,4.7\n"
    "3,1.8,2.8,3.8,4.8\n";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool bits_equal(double a, double b) {
  return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

Recording random_recording(uint64_t seed, std::size_t n, double missing_rate) {
  Recording rec = Recording::zeros(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < rec.data.size(); ++i) {
    if (rng.uniform01() < missing_rate) {
      rec.data[i] = std::numeric_limits<double>::quiet_NaN();
      rec.missing[i] = 1;
    } else {
      rec.data[i] = rng.normal() * std::exp(10.0 * rng.uniform(-1.0, 1.0));
    }
  }
  return rec;
}

}  // namespace

TEST_CASE("a complete 4-row file parses with an all-false mask") {
  const Recording rec = parse_recording_text(kFullFile);
  REQUIRE(rec.n_samples() == 4);
  REQUIRE(rec.sample_rate_hz == 256.0);
  REQUIRE_FALSE(rec.has_missing());
  REQUIRE(rec.at(0, 0) == 1.5);
  REQUIRE(rec.at(3, 3) == 4.8);
  REQUIRE(validate_recording(rec, true).empty());
}

TEST_CASE("an empty field marks exactly that cell missing") {
  const std::string text =
      "# muse-eeg v1, rate=256\n"
      "0,1.0,2.0,,4.0\n"
      "1,1.1,2.1,3.1,4.1\n";
  const Recording rec = parse_recording_text(text);
  REQUIRE(rec.is_missing(0, 2));
  REQUIRE(std::isnan(rec.at(0, 2)));
  std::size_t missing = 0;
  for (uint8_t m : rec.missing) missing += m;
  REQUIRE(missing == 1);
}

TEST_CASE("non-numeric tokens also read as missing") {
  const std::string text =
      "# muse-eeg v1, rate=256\n"
      "0,1.0,oops,3.0,4.0\n";
  const Recording rec = parse_recording_text(text);
  REQUIRE(rec.is_missing(0, 1));
  REQUIRE_FALSE(rec.is_missing(0, 0));
}

TEST_CASE("the header rate is echoed into the recording") {
  const std::string text =
      "# muse-eeg v1, rate=512\n"
      "0,1,2,3,4\n";
  REQUIRE(parse_recording_text(text).sample_rate_hz == 512.0);
}

TEST_CASE("extra comment lines are skipped") {
  const std::string text =
      "# muse-eeg v1, rate=256\n"
      "# generator: whatever, extra metadata\n"
      "0,1,2,3,4\n"
      "# trailing note\n"
      "1,5,6,7,8\n";
  const Recording rec = parse_recording_text(text);
  REQUIRE(rec.n_samples() == 2);
  REQUIRE(rec.at(1, 0) == 5.0);
}

TEST_CASE("parse errors carry the offending line number") {
  const auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_recording_text(text);
    } catch (const ParseError& e) {
      return e.line;
    }
    return 0;
  };

  REQUIRE(line_of("nonsense\n") == 1);
  REQUIRE(line_of("# muse-eeg v1, rate=abc\n0,1,2,3,4\n") == 1);
  REQUIRE(line_of("# muse-eeg v1, rate=-5\n0,1,2,3,4\n") == 1);
  REQUIRE(line_of("# muse-eeg v1, rate=256\n0,1,2,3\n") == 2);
  REQUIRE(line_of("# muse-eeg v1, rate=256\n0,1,2,3,4,5\n") == 2);
  REQUIRE(line_of("# muse-eeg v1, rate=256\n0,1,2,3,4\n0,1,2,3,4\n") == 3);
  REQUIRE(line_of("# muse-eeg v1, rate=256\n5,1,2,3,4\n2,1,2,3,4\n") == 3);
  REQUIRE(line_of("# muse-eeg v1, rate=256\nx,1,2,3,4\n") == 2);
  REQUIRE(line_of("# muse-eeg v1, rate=256\n\n0,1,2,3,4\n") == 2);
  REQUIRE(line_of("# muse-eeg v1, rate=256\r\n0,1,2,3,4\n") == 1);
  REQUIRE(line_of("# muse-eeg v1, rate=256\n") == 2);

  try {
    parse_recording_text("# muse-eeg v1, rate=256\n0,1,2,3\n", "somefile.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(std::string(e.what()).find("somefile.csv:2") != std::string::npos);
  }
}

TEST_CASE("serialize then parse is the identity, bit for bit") {
  Recording rec = Recording::zeros(3, 300.5);
  const std::vector<double> tricky = {
      0.0, -0.0, 0.1, 1.0 / 3.0, std::numbers::pi, 1e-300, -1e300,
      5e-324, 123456789.123456789, -2.5e-17, 42.0, -7.125};
  for (std::size_t i = 0; i < rec.data.size(); ++i) rec.data[i] = tricky[i];

  const Recording back = parse_recording_text(serialize_recording(rec));
  REQUIRE(back.sample_rate_hz == rec.sample_rate_hz);
  REQUIRE(back.n_samples() == rec.n_samples());
  for (std::size_t i = 0; i < rec.data.size(); ++i)
    REQUIRE(bits_equal(back.data[i], rec.data[i]));

  for (int rep = 0; rep < 10; ++rep) {
    const Recording r = random_recording(1000 + rep, 64, 0.05);
    const Recording p = parse_recording_text(serialize_recording(r));
    REQUIRE(p.missing == r.missing);
    for (std::size_t i = 0; i < r.data.size(); ++i)
      if (!r.missing[i]) REQUIRE(bits_equal(p.data[i], r.data[i]));
  }
}

TEST_CASE("truncate_to_stimulus arithmetic") {
  Recording rec = Recording::zeros(1024);
  for (std::size_t i = 0; i < 1024; ++i)
    for (int c = 0; c < kNumChannels; ++c)
      rec.at(i, c) = static_cast<double>(i * 10 + c);

  const Recording full = truncate_to_stimulus(rec, 0, 4.0);
  REQUIRE(full.n_samples() == 1024);
  REQUIRE(full.data == rec.data);

  const Recording mid = truncate_to_stimulus(rec, 256, 2.0);
  REQUIRE(mid.n_samples() == 512);
  REQUIRE(mid.at(0, 0) == rec.at(256, 0));
  REQUIRE(mid.at(511, 3) == rec.at(767, 3));

  REQUIRE_THROWS_AS(truncate_to_stimulus(rec, 900, 2.0), std::out_of_range);
  REQUIRE_THROWS_AS(truncate_to_stimulus(rec, 0, 0.0), std::invalid_argument);

  // Output length depends only on duration and rate.
  REQUIRE(truncate_to_stimulus(rec, 7, 1.5).n_samples() == 384);
  REQUIRE(stimulus_sample_count(1.5, 256.0) == 384);
  REQUIRE(stimulus_sample_count(0.999, 256.0) == 255);
}

TEST_CASE("manifest json round-trips") {
  SessionManifest m;
  m.stage = "raw";
  m.provenance = Provenance::Synthetic;
  m.seed = 987654321;
  m.trials.push_back({"s00", "v03", 2, 256, 30.0, "recordings/s00_v03.csv"});
  m.trials.push_back({"s01", "v00", 1, 0, 12.5, "recordings/s01_v00.csv"});

  const SessionManifest back = manifest_from_json(manifest_to_json(m));
  REQUIRE(back.stage == m.stage);
  REQUIRE(back.provenance == m.provenance);
  REQUIRE(back.seed == m.seed);
  REQUIRE(back.trials.size() == 2);
  REQUIRE(back.trials[0].subject_id == "s00");
  REQUIRE(back.trials[0].quadrant == 2);
  REQUIRE(back.trials[0].onset_sample == 256);
  REQUIRE(back.trials[1].duration_s == 12.5);
  REQUIRE(back.trials[1].path == "recordings/s01_v00.csv");
}

TEST_CASE("manifest validation rejects bad documents") {
  SessionManifest m;
  m.trials.push_back({"s", "v", 1, 0, 1.0, "x.csv"});
  nlohmann::json j = manifest_to_json(m);

  nlohmann::json bad = j;
  bad["format"] = "other";
  REQUIRE_THROWS_AS(manifest_from_json(bad), std::runtime_error);
  bad = j;
  bad["version"] = 99;
  REQUIRE_THROWS_AS(manifest_from_json(bad), std::runtime_error);
  bad = j;
  bad["stage"] = "cooked";
  REQUIRE_THROWS_AS(manifest_from_json(bad), std::runtime_error);
  bad = j;
  bad["trials"][0]["quadrant"] = 5;
  REQUIRE_THROWS_AS(manifest_from_json(bad), std::runtime_error);
  bad = j;
  bad["trials"][0]["onset_sample"] = -1;
  REQUIRE_THROWS_AS(manifest_from_json(bad), std::runtime_error);
  bad = j;
  bad["trials"][0]["duration_s"] = 0.0;
  REQUIRE_THROWS_AS(manifest_from_json(bad), std::runtime_error);
}

TEST_CASE("build_dataset assembles trials in manifest order") {
  TempDir tmp("eegemo_test_ingest_build");
  fs::create_directories(tmp.path / "rec");

  Recording r1 = random_recording(5, 600, 0.0);
  Recording r2 = random_recording(6, 600, 0.01);
  save_recording(r1, (tmp.path / "rec" / "a.csv").string());
  save_recording(r2, (tmp.path / "rec" / "b.csv").string());

  SessionManifest m;
  m.provenance = Provenance::Synthetic;
  m.trials.push_back({"s00", "v00", 1, 0, 2.0, "rec/a.csv"});
  m.trials.push_back({"s01", "v05", 3, 64, 2.0, "rec/b.csv"});

  const TrialSet set = build_dataset(m, tmp.path.string());
  REQUIRE(set.size() == 2);
  REQUIRE(set.trials[0].label == Emotion::Happy);
  REQUIRE(set.trials[1].label == Emotion::Sad);
  REQUIRE(set.trials[0].video_id == "v00");
  REQUIRE(set.trials[1].recording.subject_id == "s01");
  REQUIRE(set.trials[0].recording.n_samples() == 512);
  REQUIRE(set.trials[1].recording.n_samples() == 512);
  REQUIRE(set.subject_ids == std::vector<std::string>{"s00", "s01"});
  REQUIRE(set.provenance == Provenance::Synthetic);
  // Window starts at the onset sample.
  REQUIRE(bits_equal(set.trials[1].recording.at(0, 0), r2.at(64, 0)));
}

TEST_CASE("build_dataset aggregates every bad entry") {
  TempDir tmp("eegemo_test_ingest_errors");
  Recording ok = random_recording(7, 600, 0.0);
  save_recording(ok, (tmp.path / "good.csv").string());

  SessionManifest m;
  m.trials.push_back({"s00", "v00", 1, 0, 2.0, "good.csv"});
  m.trials.push_back({"s01", "v01", 2, 0, 2.0, "absent.csv"});
  m.trials.push_back({"s02", "v02", 3, 500, 2.0, "good.csv"});  // out of range

  try {
    build_dataset(m, tmp.path.string());
    FAIL("expected BuildError");
  } catch (const BuildError& e) {
    REQUIRE(e.errors.size() == 2);
    REQUIRE(e.errors[0].find("entry 1") != std::string::npos);
    REQUIRE(e.errors[0].find("absent.csv") != std::string::npos);
    REQUIRE(e.errors[1].find("entry 2") != std::string::npos);
  }
}

TEST_CASE("a preprocessed-stage manifest rejects unimputed recordings") {
  TempDir tmp("eegemo_test_ingest_stage");
  Recording holey = random_recording(8, 600, 0.05);
  save_recording(holey, (tmp.path / "holey.csv").string());

  SessionManifest m;
  m.stage = "preprocessed";
  m.trials.push_back({"s00", "v00", 1, 0, 2.0, "holey.csv"});
  REQUIRE_THROWS_AS(build_dataset(m, tmp.path.string()), BuildError);

  m.stage = "raw";
  REQUIRE_NOTHROW(build_dataset(m, tmp.path.string()));
}

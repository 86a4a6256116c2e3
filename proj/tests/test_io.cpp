#include <gtest/gtest.h>

#include <filesystem>

#include "hemobnn/csv.hpp"
#include "hemobnn/errors.hpp"
#include "hemobnn/feature_io.hpp"
#include "hemobnn/model_io.hpp"
#include "hemobnn/recording_io.hpp"
#include "hemobnn/synth.hpp"
#include "hemobnn/trainer.hpp"
#include "support.hpp"

using namespace hemobnn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hemobnn_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kNumeric;
}

}  // namespace

TEST(Csv, ExactFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(csv::parse_double(csv::format_exact(v), "t"), v);
  }
  EXPECT_EQ(code_of([] { csv::parse_double("1.5x", "t"); }), ErrorCode::kMalformedFile);
  EXPECT_EQ(code_of([] { csv::parse_double("", "t"); }), ErrorCode::kMalformedFile);
}

TEST(Recording, RoundTripThroughCsv) {
  const auto dir = scratch("rec");
  SynthConfig cfg;
  cfg.trials_per_class = 2;
  cfg.n_channels = 4;
  const auto ts = generate_volunteer(cfg, 0);
  write_recording(ts, dir / "recording.csv");
  write_markers(ts.markers, dir / "markers.csv");
  const auto back = read_recording(dir / "recording.csv", dir / "markers.csv");
  EXPECT_EQ(back.sample_rate_hz, ts.sample_rate_hz);
  ASSERT_EQ(back.n_samples(), ts.n_samples());
  ASSERT_EQ(back.markers.size(), ts.markers.size());
  for (std::size_t i = 0; i < ts.markers.size(); ++i) {
    EXPECT_NEAR(back.markers[i].onset_s, ts.markers[i].onset_s, 1e-9);
    EXPECT_EQ(back.markers[i].label, ts.markers[i].label);
  }
  for (std::size_t k = 0; k < ts.n_samples(); k += 97) EXPECT_NEAR(back.hbo(k, 3), ts.hbo(k, 3), 1e-9);
  const auto header = csv::read(dir / "recording.csv").header;
  EXPECT_EQ(header.front(), "time_s");
  EXPECT_EQ(header[1], "hbo_ch01");
  EXPECT_EQ(header.back(), "hbr_ch04");
}

TEST(Recording, MissingMarkersNamesPath) {
  const auto dir = scratch("missing");
  SynthConfig cfg;
  cfg.trials_per_class = 1;
  cfg.n_channels = 2;
  write_recording(generate_volunteer(cfg, 0), dir / "recording.csv");
  try {
    read_recording(dir / "recording.csv", dir / "markers.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingInput);
    EXPECT_NE(std::string(e.what()).find("markers.csv"), std::string::npos);
  }
}

TEST(Recording, RejectsUnknownLabelAndNonUniformTime) {
  const auto dir = scratch("bad");
  csv::write_text(dir / "r.csv", "time_s,hbo_ch01,hbr_ch01\n0,1,2\n0.1,1,2\n0.2,1,2\n");
  csv::write_text(dir / "m.csv", "onset_s,label\n0.1,FT\n");
  EXPECT_EQ(code_of([&] { read_recording(dir / "r.csv", dir / "m.csv"); }), ErrorCode::kMalformedFile);
  csv::write_text(dir / "m.csv", "onset_s,label\n0.1,RFT\n");
  EXPECT_NO_THROW(read_recording(dir / "r.csv", dir / "m.csv"));
  csv::write_text(dir / "r.csv", "time_s,hbo_ch01,hbr_ch01\n0,1,2\n0.1,1,2\n0.3,1,2\n");
  EXPECT_EQ(code_of([&] { read_recording(dir / "r.csv", dir / "m.csv"); }), ErrorCode::kMalformedFile);
}

TEST(Features, RoundTripWithSidecarAndScaling) {
  const auto dir = scratch("feat");
  auto set = test::blobs(12, 6, 1.0, 3);
  set.layout.windows = {{0.0, 5.0}};
  set.layout.chromophores = {"HbO", "HbR"};
  set.layout.n_channels = 3;
  write_features(set, dir / "features.csv");
  EXPECT_TRUE(fs::exists(dir / "features.layout.json"));
  EXPECT_EQ(read_features(dir / "features.csv").vectors, set.vectors);
  EXPECT_EQ(read_features(dir / "features.csv").layout, set.layout);

  const auto z = apply_standardizer(set, fit_standardizer(set));
  write_features(z, dir / "z.csv");
  const auto back = read_features(dir / "z.csv");
  EXPECT_EQ(back.vectors, z.vectors);
  EXPECT_EQ(back.scaling, z.scaling);
  EXPECT_EQ(csv::read(dir / "z.csv").header[1], "f001");
}

TEST(Model, SerializeRoundTripIsBitFaithful) {
  const auto data = test::blobs(20, 3, 1.0, 4);
  Architecture arch;
  arch.layer_sizes = {3, 2, 1};
  TrainConfig cfg;
  cfg.iterations = 50;
  cfg.seed = 9;
  const auto r = train(apply_standardizer(data, fit_standardizer(data)), arch, Prior{0.0, 1.0}, cfg);
  const auto text = serialize_model(r.model);
  const auto back = deserialize_model(text);
  EXPECT_EQ(back, r.model);
  EXPECT_EQ(serialize_model(back), text);
  EXPECT_EQ(back.config_hash, config_hash(arch, Prior{0.0, 1.0}, cfg));

  const auto dir = scratch("model");
  checkpoint(r.model, dir / "model.json");
  EXPECT_EQ(restore(dir / "model.json"), r.model);
}

TEST(Model, VersionAndFormatChecks) {
  const auto data = test::blobs(6, 2, 1.0, 4);
  Architecture arch;
  arch.layer_sizes = {2, 2, 1};
  TrainConfig cfg;
  cfg.iterations = 5;
  const auto text = serialize_model(train(data, arch, Prior{}, cfg).model);
  auto bump = [&](const std::string& key, const std::string& to) {
    std::string t = text;
    const auto pos = t.find("\"" + key + "\": 1");
    EXPECT_NE(pos, std::string::npos) << key;
    t.replace(pos, key.size() + 5, "\"" + key + "\": " + to);
    return t;
  };
  try {
    deserialize_model(bump("format_version", "2"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVersionMismatch);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  EXPECT_EQ(code_of([&] { deserialize_model(bump("weight_layout_version", "7")); }), ErrorCode::kVersionMismatch);
  EXPECT_EQ(code_of([&] { deserialize_model("{not json"); }), ErrorCode::kMalformedFile);
  EXPECT_EQ(code_of([&] { restore("/nonexistent/model.json"); }), ErrorCode::kMissingInput);
}

// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>

#include "metaseg/error.hpp"
#include "metaseg/model_io.hpp"
#include "metaseg/mst_io.hpp"
#include "metaseg/segment_table.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace metaseg;

namespace {

ErrorKind kind_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

SegmentRecord sample_record(Rng& rng, std::int64_t image, std::int32_t id, std::size_t q) {
  SegmentRecord r;
  r.image_id = image;
  r.segment_id = id;
  r.cls = static_cast<std::int32_t>(rng.index(q));
  for (double& v : r.metrics) v = rng.uniform(0.0, 50.0);
  r.metrics[1] = 1.0 + static_cast<double>(rng.index(40));
  r.mean_probs.assign(q, 0.0);
  double s = 0.0;
  for (double& v : r.mean_probs) s += (v = rng.uniform(0.01, 1.0));
  for (double& v : r.mean_probs) v /= s;
  r.iou = rng.uniform(0.0, 0.5);
  r.iou_adj = r.iou + rng.uniform(0.0, 0.5);
  r.ios = rng.uniform();
  return r;
}

}  // namespace

TEST_CASE("uniform 2x2x2 tensor round-trips byte-identically") {
  testing::TempDir dir("io");
  const ProbTensor t(2, 2, 2, std::vector<float>(8, 0.5f));
  save_tensor(t, dir / "a.mst");
  const ProbTensor back = load_tensor(dir / "a.mst");
  CHECK(back == t);
  save_tensor(back, dir / "b.mst");
  CHECK(testing::read_bytes(dir / "a.mst") == testing::read_bytes(dir / "b.mst"));
  CHECK(testing::read_bytes(dir / "a.mst").size() == 6 + 12 + 32);
}

TEST_CASE("random tensors and label maps round-trip byte-identically") {
  testing::TempDir dir("io");
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t h = 1 + rng.index(20), w = 1 + rng.index(20), q = 2 + rng.index(10);
    const ProbTensor t = oracle::random_tensor(rng, h, w, q);
    save_tensor(t, dir / "t.mst");
    const ProbTensor back = load_tensor(dir / "t.mst");
    CHECK(back == t);
    save_tensor(back, dir / "t2.mst");
    CHECK(testing::read_bytes(dir / "t.mst") == testing::read_bytes(dir / "t2.mst"));

    LabelMap l{h, w, oracle::random_classes(rng, h, w, static_cast<int>(q)), kDefaultIgnore};
    for (auto& v : l.labels)
      if (rng.bernoulli(0.1)) v = kDefaultIgnore;
    save_label_map(l, dir / "l.mst");
    CHECK(load_label_map(dir / "l.mst", q) == l);
  }
}

TEST_CASE("simplex violations are rejected") {
  testing::TempDir dir("io");
  SUBCASE("row sum 0.8") {
    const ProbTensor t(1, 1, 2, {0.4f, 0.4f});
    save_tensor(t, dir / "t.mst");
    CHECK(kind_of([&] { load_tensor(dir / "t.mst"); }) == ErrorKind::NotAProbability);
  }
  SUBCASE("NaN entry") {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const ProbTensor t(1, 2, 2, {0.5f, 0.5f, nan, 1.0f});
    save_tensor(t, dir / "t.mst");
    CHECK(kind_of([&] { load_tensor(dir / "t.mst"); }) == ErrorKind::NotAProbability);
  }
  SUBCASE("negative entry") {
    CHECK(kind_of([] { ProbTensor(1, 1, 2, {-0.1f, 1.1f}).validate(); }) == ErrorKind::NotAProbability);
  }
  SUBCASE("within tolerance") {
    CHECK_NOTHROW(ProbTensor(1, 1, 2, {0.50004f, 0.5f}).validate());
  }
}

TEST_CASE("malformed containers") {
  testing::TempDir dir("io");
  const ProbTensor t(2, 3, 2, std::vector<float>(12, 0.5f));
  save_tensor(t, dir / "good.mst");
  const auto good = testing::read_bytes(dir / "good.mst");

  SUBCASE("bad magic") {
    auto bytes = good;
    bytes[0] = 'X';
    testing::write_bytes(dir / "bad.mst", bytes);
    CHECK(kind_of([&] { load_tensor(dir / "bad.mst"); }) == ErrorKind::MalformedHeader);
  }
  SUBCASE("truncated header") {
    testing::write_bytes(dir / "bad.mst", {good.begin(), good.begin() + 9});
    CHECK(kind_of([&] { load_tensor(dir / "bad.mst"); }) == ErrorKind::MalformedHeader);
  }
  SUBCASE("unknown dtype") {
    auto bytes = good;
    bytes[4] = 7;
    testing::write_bytes(dir / "bad.mst", bytes);
    CHECK(kind_of([&] { load_tensor(dir / "bad.mst"); }) == ErrorKind::MalformedHeader);
  }
  SUBCASE("payload shorter than dimensions") {
    testing::write_bytes(dir / "bad.mst", {good.begin(), good.end() - 4});
    CHECK(kind_of([&] { load_tensor(dir / "bad.mst"); }) == ErrorKind::DimensionMismatch);
  }
  SUBCASE("payload longer than dimensions") {
    auto bytes = good;
    bytes.insert(bytes.end(), 4, 0);
    testing::write_bytes(dir / "bad.mst", bytes);
    CHECK(kind_of([&] { load_tensor(dir / "bad.mst"); }) == ErrorKind::DimensionMismatch);
  }
  SUBCASE("label map read as tensor") {
    save_label_map(LabelMap{2, 2, {0, 1, 0, 1}, kDefaultIgnore}, dir / "l.mst");
    CHECK(kind_of([&] { load_tensor(dir / "l.mst"); }) == ErrorKind::MalformedHeader);
  }
  SUBCASE("missing file") {
    CHECK(kind_of([&] { load_tensor(dir / "nope.mst"); }) == ErrorKind::IoFailure);
  }
}

TEST_CASE("label range and ignore value") {
  testing::TempDir dir("io");
  save_label_map(LabelMap{1, 3, {0, 7, 255}, kDefaultIgnore}, dir / "l.mst");
  CHECK(kind_of([&] { load_label_map(dir / "l.mst", 5); }) == ErrorKind::LabelOutOfRange);
  CHECK_NOTHROW(load_label_map(dir / "l.mst", 8));

  save_label_map(LabelMap{1, 3, {0, 4, 255}, kDefaultIgnore}, dir / "m.mst");
  const LabelMap m = load_label_map(dir / "m.mst", 5);
  CHECK(m.is_ignored(2));
  CHECK_FALSE(m.is_ignored(1));
  CHECK(kind_of([&] { load_label_map(dir / "m.mst", 5, 0); }) == ErrorKind::LabelOutOfRange);

  save_label_map(LabelMap{1, 2, {-1, 0}, kDefaultIgnore}, dir / "n.mst");
  CHECK(kind_of([&] { load_label_map(dir / "n.mst", 5); }) == ErrorKind::LabelOutOfRange);
  CHECK_NOTHROW(load_label_map(dir / "n.mst", 5, -1));
}

TEST_CASE("segment table text format") {
  SUBCASE("empty table is the header alone") {
    SegmentTable t;
    t.num_classes = 3;
    const std::string text = format_segment_table(t);
    CHECK(text == segment_table_header(3) + "\n");
  }
  SUBCASE("header layout") {
    const std::string h = segment_table_header(2);
    CHECK(h.rfind("image_id,segment_id,class,S,S_in,", 0) == 0);
    CHECK(h.find("D_in_rel,P_0,P_1,iou,iou_adj,ios") != std::string::npos);
  }
  SUBCASE("two rows give three lines, values survive to nine digits") {
    testing::TempDir dir("table");
    Rng rng(5);
    SegmentTable t;
    t.num_classes = 4;
    t.rows = {sample_record(rng, 0, 0, 4), sample_record(rng, 1, 3, 4)};
    write_segment_table(t, dir / "s.csv");
    const std::string text = testing::read_text(dir / "s.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);

    const SegmentTable back = read_segment_table(dir / "s.csv");
    REQUIRE(back.rows.size() == 2);
    CHECK(back.num_classes == 4);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& a = t.rows[i];
      const auto& b = back.rows[i];
      CHECK(a.image_id == b.image_id);
      CHECK(a.segment_id == b.segment_id);
      CHECK(a.cls == b.cls);
      for (std::size_t j = 0; j < kNumSegmentMetrics; ++j)
        CHECK(std::abs(a.metrics[j] - b.metrics[j]) <= 5e-9 * std::abs(a.metrics[j]));
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(a.mean_probs[j] - b.mean_probs[j]) <= 5e-9);
      CHECK(std::abs(a.iou - b.iou) <= 5e-9);
      CHECK(std::abs(a.iou_adj - b.iou_adj) <= 5e-9);
      CHECK(std::abs(a.ios - b.ios) <= 5e-9);
    }
    // A second write of the parsed table reproduces the file exactly.
    write_segment_table(back, dir / "s2.csv");
    CHECK(testing::read_text(dir / "s2.csv") == text);
  }
  SUBCASE("comment lines are skipped") {
    testing::TempDir dir("table");
    SegmentTable t;
    t.num_classes = 2;
    write_segment_table(t, dir / "s.csv", "made by a test");
    CHECK(testing::read_text(dir / "s.csv").rfind("# made by a test\n", 0) == 0);
    CHECK(read_segment_table(dir / "s.csv").rows.empty());
  }
  SUBCASE("schema violations") {
    testing::TempDir dir("table");
    std::ofstream(dir / "bad.csv") << "a,b,c\n";
    CHECK(kind_of([&] { read_segment_table(dir / "bad.csv"); }) == ErrorKind::MalformedHeader);
    std::ofstream(dir / "short.csv") << segment_table_header(2) << "\n0,0,1\n";
    CHECK(kind_of([&] { read_segment_table(dir / "short.csv"); }) == ErrorKind::DimensionMismatch);

    Rng rng(3);
    SegmentTable dup;
    dup.num_classes = 2;
    dup.rows = {sample_record(rng, 0, 1, 2), sample_record(rng, 0, 1, 2)};
    CHECK(kind_of([&] { dup.validate(); }) == ErrorKind::DimensionMismatch);

    SegmentTable inverted;
    inverted.num_classes = 2;
    inverted.rows = {sample_record(rng, 0, 0, 2)};
    inverted.rows[0].iou = 0.9;
    inverted.rows[0].iou_adj = 0.5;
    CHECK(kind_of([&] { inverted.validate(); }) == ErrorKind::NotAProbability);
  }
}

TEST_CASE("model JSON round-trips exactly") {
  Rng rng(9);
  for (ModelKind kind : {ModelKind::LogisticL1, ModelKind::LogisticPlain, ModelKind::Linear}) {
    MetaModel m;
    m.kind = kind;
    m.lambda = rng.uniform() * 1e-3;
    m.intercept = rng.normal();
    m.weights = Eigen::VectorXd::Zero(7);
    m.standardizer.means = Eigen::VectorXd::Zero(7);
    m.standardizer.stds = Eigen::VectorXd::Ones(7);
    for (int j = 0; j < 7; ++j) {
      m.weights(j) = rng.bernoulli(0.5) ? 0.0 : rng.normal() / 3.0;
      m.standardizer.means(j) = rng.normal() * 100.0;
      m.standardizer.stds(j) = rng.uniform(0.1, 10.0);
    }
    const std::string text = format_model(m, "provenance");
    const MetaModel back = parse_model(text);
    CHECK(back.kind == m.kind);
    CHECK(back.lambda == m.lambda);
    CHECK(back.intercept == m.intercept);
    CHECK(back.weights == m.weights);
    CHECK(back.standardizer.means == m.standardizer.means);
    CHECK(back.standardizer.stds == m.standardizer.stds);
    CHECK(format_model(back, "provenance") == text);
  }
  CHECK_THROWS_AS(parse_model("{\"kind\": \"linear\"}"), Error);
  CHECK_THROWS_AS(parse_model("not json"), Error);
}

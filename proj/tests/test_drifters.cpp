#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "helmgp/drifters.hpp"
#include "helmgp/grid_io.hpp"
#include "test_support.hpp"

using namespace helmgp;

namespace {

const std::string kFixture =
    std::string(HELMGP_REPO_DIR) + "/tests/fixtures/laser_like.csv";

IngestResult parse(const std::string& text, const ColumnSchema& schema = {}) {
  std::istringstream in(text);
  return read_drifters(in, schema);
}

}  // namespace

TEST_CASE("malformed rows land in the rejects report") {
  const IngestResult r = parse(
      "id,time,lat,lon,u,v\n"
      "a,0,28.5,-87.5,0.1,0.2\n"
      "a,900,28.6,-87.6,oops,0.2\n"
      "b,0,28.7,-87.7,0.3,0.4\n");
  CHECK(r.records.size() == 2);
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects[0].first == 3);
}

TEST_CASE("an empty file with a valid header yields an empty list") {
  const IngestResult r = parse("id,time,lat,lon,u,v\n");
  CHECK(r.records.empty());
  CHECK(r.rejects.empty());
}

TEST_CASE("records come out sorted by buoy and time") {
  const IngestResult r = parse(
      "id,time,lat,lon,u,v\n"
      "b,900,28.0,-87.0,0,0\n"
      "a,900,28.1,-87.1,0,0\n"
      "b,0,28.2,-87.2,0,0\n"
      "a,0,28.3,-87.3,0,0\n");
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[0].buoy_id == "a");
  CHECK(r.records[0].timestamp == 0.0);
  CHECK(r.records[1].buoy_id == "a");
  CHECK(r.records[1].timestamp == 900.0);
  CHECK(r.records[2].buoy_id == "b");
  CHECK(r.records[2].timestamp == 0.0);
}

TEST_CASE("positions map lon to the first coordinate") {
  const IngestResult r = parse(
      "id,time,lat,lon,u,v\n"
      "a,0,28.5,-87.5,0.1,0.2\n");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].position[0] == -87.5);
  CHECK(r.records[0].position[1] == 28.5);
  CHECK(r.records[0].velocity[0] == 0.1);
  CHECK(r.records[0].velocity[1] == 0.2);
}

TEST_CASE("a missing required column is a schema error") {
  CHECK_THROWS_AS(parse("id,time,lat,lon,u\n"), SchemaError);
}

TEST_CASE("mostly-bad input is rejected outright") {
  CHECK_THROWS_AS(parse("id,time,lat,lon,u,v\n"
                        "a,x,28,-87,0,0\n"
                        "a,y,28,-87,0,0\n"
                        "a,0,28,-87,0,0\n"),
                  CorruptInputError);
}

TEST_CASE("column names and delimiter are configurable") {
  ColumnSchema schema;
  schema.id = "spotter";
  schema.time = "posix";
  schema.lat = "latitude";
  schema.lon = "longitude";
  schema.u = "ve";
  schema.v = "vn";
  schema.delimiter = ';';
  const IngestResult r = parse(
      "spotter;posix;latitude;longitude;ve;vn;extra\n"
      "a;0;28.5;-87.5;0.1;0.2;ignored\n",
      schema);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].velocity[1] == 0.2);
}

TEST_CASE("stride keeps every n-th record per buoy, first included") {
  std::string text = "id,time,lat,lon,u,v\n";
  for (int i = 0; i < 9; ++i)
    text += "a," + std::to_string(900 * i) + ",28.5,-87.5,0.1," +
            std::to_string(i) + "\n";
  const IngestResult r = parse(text);

  IngestFilter f;
  f.downsample = 3;
  const VelocityDataset d = apply_filter(r.records, f);
  REQUIRE(d.size() == 3);  // ceil(9/3)
  CHECK(d.velocities[0][1] == 0.0);
  CHECK(d.velocities[1][1] == 3.0);
  CHECK(d.velocities[2][1] == 6.0);

  // n = 1 passes everything through
  IngestFilter all;
  CHECK(apply_filter(r.records, all).size() == 9);
}

TEST_CASE("per-buoy output size is ceil(kept/n)") {
  std::string text = "id,time,lat,lon,u,v\n";
  for (int i = 0; i < 7; ++i)
    text += "a," + std::to_string(i) + ",28.5,-87.5,0,0\n";
  const IngestResult r = parse(text);
  for (int n = 1; n <= 7; ++n) {
    IngestFilter f;
    f.downsample = n;
    CHECK(apply_filter(r.records, f).size() ==
          static_cast<std::size_t>((7 + n - 1) / n));
  }
}

TEST_CASE("selection predicates are idempotent on the record stream") {
  const IngestResult r = read_drifters_file(kFixture);
  IngestFilter f;
  f.box = BoundingBox{Vec2(-87.6, 28.7), Vec2(-87.45, 28.9)};
  f.time_window = {{1454284800.0, 1454289300.0}};
  const auto once = filter_records(r.records, f);
  const auto twice = filter_records(once, f);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].buoy_id == twice[i].buoy_id);
    CHECK(once[i].timestamp == twice[i].timestamp);
  }
}

TEST_CASE("apply_filter is a pure function of its inputs") {
  const IngestResult r = read_drifters_file(kFixture);
  IngestFilter f;
  f.downsample = 3;
  const VelocityDataset a = apply_filter(r.records, f);
  const VelocityDataset b = apply_filter(r.records, f);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.locations[i] == b.locations[i]);
    CHECK(a.velocities[i] == b.velocities[i]);
  }
}

TEST_CASE("the 19-buoy fixture downsampled by 3 gives 57 observations") {
  const IngestResult r = read_drifters_file(kFixture);
  CHECK(r.records.size() == 171);
  CHECK(r.rejects.empty());
  IngestFilter f;
  f.downsample = 3;
  const VelocityDataset d = apply_filter(r.records, f);
  CHECK(d.size() == 57);  // 19 buoys x ceil(9/3)
}

TEST_CASE("an impossible selection raises the empty-selection error") {
  const IngestResult r = read_drifters_file(kFixture);
  IngestFilter f;
  f.box = BoundingBox{Vec2(0, 0), Vec2(1, 1)};
  CHECK_THROWS_AS(apply_filter(r.records, f), EmptySelectionError);
}

TEST_CASE("allowlist restricts to the named buoys") {
  const IngestResult r = read_drifters_file(kFixture);
  IngestFilter f;
  f.allowlist = std::set<std::string>{"b01", "b07"};
  const VelocityDataset d = apply_filter(r.records, f);
  CHECK(d.size() == 18);
}

TEST_CASE("filter validation") {
  IngestFilter f;
  f.downsample = 0;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  IngestFilter g;
  g.box = BoundingBox{Vec2(1, 1), Vec2(0, 2)};
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("dataset csv round-trips bit-identically") {
  const IngestResult r = read_drifters_file(kFixture);
  IngestFilter f;
  f.downsample = 3;
  const VelocityDataset d = apply_filter(r.records, f);

  std::ostringstream out;
  write_dataset_csv(out, d);
  std::istringstream in(out.str());
  const VelocityDataset back = read_dataset_csv(in);

  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.locations[i] == d.locations[i]);
    CHECK(back.velocities[i] == d.velocities[i]);
  }
}

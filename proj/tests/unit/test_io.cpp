#include <doctest.h>

#include <clocale>
#include <cmath>
#include <limits>
#include <string>

#include "salem/error.hpp"
#include "salem/io.hpp"
#include "salem/rng.hpp"

using namespace salem;

TEST_CASE("format_double round-trips exactly") {
  const CounterRng rng(3, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto [a, b] = rng.uniform_pair(i);
    const double v = std::ldexp(a - 0.5, static_cast<int>(b * 200) - 100);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("parse_double is strict") {
  CHECK(parse_double(" 2.5 ") == 2.5);
  CHECK(parse_double("+1e-3") == 1e-3);
  CHECK_THROWS_AS(parse_double("2,5"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
  CHECK_THROWS_AS(parse_double("1.0x"), Error);
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("gap table round trip") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(5));
  const std::string text = gap_table_csv(c.gaps, {{"config_hash", "abc"}});
  CHECK(text.find("# config_hash,abc") != std::string::npos);
  const GapSet back = parse_gap_table(text);
  CHECK(back == c.gaps);
  CHECK(gap_table_csv(back, {{"config_hash", "abc"}}) == text);
}

TEST_CASE("gap tables without generations or header row") {
  const GapSet g = parse_gap_table("# hull,0,3\n1,2\n");
  REQUIRE(g.size() == 1);
  CHECK(!g[0].generation.has_value());
  CHECK(g.hull() == Interval{0.0, 3.0});
}

TEST_CASE("malformed gap tables") {
  auto kind_of = [](const std::string& text) {
    try {
      parse_gap_table(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::domain;
  };
  CHECK(kind_of("lo,hi,generation\n0.1,0.2,1\n") == ErrorKind::parse);        // no hull
  CHECK(kind_of("# hull,0,1\n0.1;0.2\n") == ErrorKind::parse);               // wrong separator
  CHECK(kind_of("# hull,0,1\n0.1,abc,1\n") == ErrorKind::parse);
  CHECK(kind_of("# hull,0,1\n0.1,0.2,one\n") == ErrorKind::parse);
  CHECK(kind_of("# hull,0,1\n0.1,0.5\n0.4,0.6\n") == ErrorKind::construction);  // overlap
}

TEST_CASE("measure round trip") {
  const Construction c = build_ifs(AffineIFSSpec::ternary(4));
  const std::string text = measure_csv(c.measure);
  const DiscreteMeasure back = parse_measure(text);
  REQUIRE(back.size() == c.measure.size());
  CHECK(back.resolution() == c.measure.resolution());
  CHECK(back.provenance() == c.measure.provenance());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.atoms()[i].position == c.measure.atoms()[i].position);
    CHECK(back.atoms()[i].weight == c.measure.atoms()[i].weight);
  }
  CHECK_THROWS_AS(parse_measure("position,weight\n0,1\n"), Error);
}

TEST_CASE("formatting ignores the C locale") {
  const char* previous = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = previous != nullptr ? previous : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") != nullptr) {
    CHECK(format_double(0.25) == "0.25");
    CHECK(parse_double("0.25") == 0.25);
  }
  std::setlocale(LC_NUMERIC, saved.c_str());
}

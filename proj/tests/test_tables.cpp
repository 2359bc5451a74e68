#include <doctest.h>

#include <cmath>
#include <sstream>

#include "metacd/errors.hpp"
#include "metacd/tables.hpp"

using namespace metacd;

namespace {

const char* kHeader =
    "study,n_control,events_control,n_treatment,events_treatment\n";

StudySet parse(const std::string& body, double divisor = 100.0) {
  std::istringstream in(std::string(kHeader) + body);
  return read_csv(in, "test", divisor);
}

}  // namespace

TEST_CASE("row counts turn into exposures and event totals") {
  const StudySet set = parse("1,39,1,43,2\n");
  const StudyTable& s = set[0];
  CHECK(s.control_exposure == doctest::Approx(0.39).epsilon(1e-15));
  CHECK(s.treatment_exposure == doctest::Approx(0.43).epsilon(1e-15));
  CHECK(s.event_total() == 3);
  CHECK(set.divisor() == 100.0);
}

TEST_CASE("all events in one arm is accepted") {
  const StudySet set = parse("1,39,39,43,2\n");
  CHECK(set[0].control_events == 39);
}

TEST_CASE("events exceeding the group size name the study") {
  CHECK_THROWS_WITH_AS(parse("1,39,40,43,2\n"),
                       doctest::Contains("study 1"), InputError);
}

TEST_CASE("column problems are named") {
  std::istringstream missing("study,n_control,events_control,n_treatment\n");
  CHECK_THROWS_WITH_AS(read_csv(missing, "test"),
                       doctest::Contains("events_treatment"), InputError);
  std::istringstream extra(
      "study,n_control,events_control,n_treatment,events_treatment,bonus\n"
      "1,1,0,1,0,0\n");
  CHECK_THROWS_WITH_AS(read_csv(extra, "test"), doctest::Contains("bonus"),
                       InputError);
  std::istringstream renamed(
      "study,n_control,events,n_treatment,events_treatment\n");
  CHECK_THROWS_WITH_AS(read_csv(renamed, "test"),
                       doctest::Contains("events_control"), InputError);
}

TEST_CASE("non-integer cells report the row") {
  CHECK_THROWS_WITH_AS(parse("1,39,x,43,2\n"), doctest::Contains("row 2"),
                       InputError);
  CHECK_THROWS_WITH_AS(parse("1,39,1.5,43,2\n"), doctest::Contains("row 2"),
                       InputError);
}

TEST_CASE("duplicate study ids are rejected") {
  CHECK_THROWS_WITH_AS(parse("1,39,1,43,2\n1,44,4,44,4\n"),
                       doctest::Contains("duplicate"), InputError);
}

TEST_CASE("comments, blank lines and CRLF endings are tolerated") {
  std::istringstream in(
      "# a comment\r\n" + std::string(kHeader) + "\r\n1,39,1,43,2\r\n");
  const StudySet set = read_csv(in, "test");
  CHECK(set.size() == 1);
  CHECK(set[0].treatment_events == 2);
}

TEST_CASE("empty group or negative counts are rejected") {
  CHECK_THROWS_AS(parse("1,0,0,43,2\n"), InputError);
  CHECK_THROWS_AS(parse("1,39,-1,43,2\n"), InputError);
  CHECK_THROWS_AS(make_study("s", 10, 0, 10, 0, 0.0), InputError);
}

TEST_CASE("csv round-trips exactly") {
  const StudySet set =
      parse("a,39,1,43,2\nb,44,4,44,4\nc,154,4,146,11\n", 50.0);
  std::ostringstream out;
  write_csv(set, out);
  std::istringstream in(out.str());
  const StudySet back = read_csv(in, "round", 50.0);
  REQUIRE(back.size() == set.size());
  for (std::size_t i = 0; i < set.size(); ++i) CHECK(back[i] == set[i]);
}

TEST_CASE("exposures reproduce the sizes after scaling back") {
  const StudySet set = parse("1,39,1,43,2\n2,107,4,110,6\n", 100.0);
  for (const auto& s : set.studies()) {
    CHECK(std::llround(s.control_exposure * set.divisor()) == s.control_size);
    CHECK(std::llround(s.treatment_exposure * set.divisor()) ==
          s.treatment_size);
  }
}

TEST_CASE("bundled lidocaine file loads") {
  const StudySet set = load_csv(std::string(METACD_DATA_DIR) + "/lidocaine.csv");
  REQUIRE(set.size() == 6);
  CHECK(set.total_treatment_events() == 37);
  CHECK(set.total_control_events() == 21);
  CHECK(set.index_of("6") == 5);
  std::int64_t z_total = 0;
  for (const auto& s : set.studies()) z_total += s.event_total();
  CHECK(z_total == 58);
}

TEST_CASE("study lookup by unknown id fails") {
  const StudySet set = parse("1,39,1,43,2\n");
  CHECK_THROWS_AS(set.index_of("nope"), InputError);
}

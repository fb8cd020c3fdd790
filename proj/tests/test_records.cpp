// SPDX-License-Identifier: Apache-2.0
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "quantlearn/datagen.hpp"
#include "quantlearn/records.hpp"

using namespace quantlearn;

TEST_CASE("record order follows the key fields and table order") {
  std::vector<AccuracyRecord> recs{
      {'b', 0, 0, 1, Quantifier::AllAB, Split::Test, 0.5},
      {'a', 1, 0, 1, Quantifier::AllAB, Split::Test, 0.5},
      {'a', 0, 2, 1, Quantifier::AllAB, Split::Test, 0.5},
      {'a', 0, 0, 51, Quantifier::AllAB, Split::Test, 0.5},
      {'a', 0, 0, 1, Quantifier::OnlyAB, Split::Test, 0.5},
      {'a', 0, 0, 1, Quantifier::MostAB, Split::Test, 0.5},
      {'a', 0, 0, 1, Quantifier::MostAB, Split::Train, 0.5},
  };
  sort_records(recs);
  CHECK(recs[0].quantifier == Quantifier::MostAB);
  CHECK(recs[0].split == Split::Train);
  CHECK(recs[1].split == Split::Test);
  CHECK(recs[2].quantifier == Quantifier::OnlyAB);
  CHECK(recs[3].step == 51);
  CHECK(recs[4].trial == 2);
  CHECK(recs[5].run == 1);
  CHECK(recs[6].condition == 'b');
}

TEST_CASE("records CSV round trip") {
  const auto dir = testutil::scratch_dir("records");
  const std::vector<AccuracyRecord> recs{
      {'a', 0, 3, 51, Quantifier::OnlyAB, Split::Test, 0.746667},
      {'e', 2, 29, 3001, Quantifier::ExactlyHalfBA, Split::Train, 1.0},
  };
  CHECK(format_record(recs[0]) == "a,0,3,51,only_ab,test,0.746667");
  write_records(dir / "r.csv", recs);
  CHECK(testutil::slurp(dir / "r.csv") ==
        "condition,run,trial,step,quantifier,split,accuracy\n"
        "a,0,3,51,only_ab,test,0.746667\n"
        "e,2,29,3001,exactly_half_ba,train,1.000000\n");
  const auto back = read_records(dir / "r.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].accuracy == 0.746667);
  CHECK(back[1].quantifier == Quantifier::ExactlyHalfBA);
  CHECK(back[1].split == Split::Train);
}

TEST_CASE("malformed records name the line") {
  const auto dir = testutil::scratch_dir("records_bad");
  auto expect_line = [&](const std::string& body, std::size_t line) {
    {
      std::ofstream out(dir / "bad.csv");
      out << body;
    }
    try {
      read_records(dir / "bad.csv");
      FAIL("expected an error for: " << body);
    } catch (const DataError& e) {
      CHECK(e.line() == line);
    }
  };
  const std::string header = "condition,run,trial,step,quantifier,split,accuracy\n";
  expect_line("nope\n", 1);
  expect_line(header + "a,0,0,1,all_ab,test,0.5\na,0,0,1,some_ab,test,0.5\n", 3);
  expect_line(header + "a,0,0,1,all_ab,dev,0.5\n", 2);
  expect_line(header + "a,0,0,1,all_ab,test,1.5\n", 2);
  expect_line(header + "a,0,x,1,all_ab,test,0.5\n", 2);
  expect_line(header + "a,0,0,1,all_ab,test\n", 2);
}

// Copyright 2026 The mixdiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <string>

#include "mixdiv/falsify.hpp"

using namespace mixdiv;

TEST(Falsify, NamesRoundTrip) {
  for (InequalityId id : kAllInequalities) {
    const auto back = inequality_from_string(to_string(id));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, id);
  }
  EXPECT_FALSE(inequality_from_string("nope").has_value());
}

TEST(Falsify, NoViolationsOnSmallRuns) {
  for (InequalityId id : kAllInequalities) {
    const auto rep = falsify(id, 42, 300);
    EXPECT_EQ(rep.violations, 0u) << to_string(id) << "\n" << rep.to_json().dump(2);
    EXPECT_EQ(rep.trials, 300u);
    EXPECT_FALSE(rep.witness.is_null());
  }
}

TEST(Falsify, EndpointTrialsAreAllEqualities) {
  const auto rep = falsify(InequalityId::interpolation_endpoint, 1, 200);
  EXPECT_EQ(rep.equalities, 200u);
}

TEST(Falsify, ReportsAreIdenticalAcrossRunsAndThreadCounts) {
  FalsifyConfig one;
  FalsifyConfig many;
  many.threads = 4;
  const std::string a = falsify(InequalityId::af, 9, 400, one).to_json().dump();
  const std::string b = falsify(InequalityId::af, 9, 400, one).to_json().dump();
  const std::string c = falsify(InequalityId::af, 9, 400, many).to_json().dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_NE(a, falsify(InequalityId::af, 10, 400, one).to_json().dump());
}

TEST(Falsify, WitnessIsTheTightestTrial) {
  const auto rep = falsify(InequalityId::jensen, 3, 100);
  EXPECT_LT(rep.witness_trial, 100u);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_GE(rep.min_relative_slack, -1e-10);
  EXPECT_TRUE(rep.witness.contains("f"));
}

TEST(Falsify, RejectsZeroTrials) { EXPECT_THROW(falsify(InequalityId::af, 1, 0), Error); }

#include <catch2/catch.hpp>

#include "helpers.hpp"

using namespace contentcast;
using test_helpers::error_code_of;
using test_helpers::random_scenario;

TEST_CASE("diversity matrix maps requests to objects") {
  const std::vector<ContentObject> catalog{{0, 100}, {1, 200}};

  SECTION("single user, single object") {
    const std::vector<ServiceRequest> requests{{0, 1.0, {0}}};
    const auto z = build_diversity_matrix(requests, catalog);
    REQUIRE(z.rows == 1);
    REQUIRE(z.cols == 2);
    CHECK(z.at(0, 0));
    CHECK_FALSE(z.at(0, 1));
  }

  SECTION("two users, overlapping interests") {
    const std::vector<ServiceRequest> requests{{0, 1.0, {0, 1}}, {1, 1.0, {1}}};
    const auto z = build_diversity_matrix(requests, catalog);
    CHECK(z.at(0, 0));
    CHECK(z.at(0, 1));
    CHECK_FALSE(z.at(1, 0));
    CHECK(z.at(1, 1));
  }

  SECTION("unknown object and empty request are rejected") {
    CHECK(error_code_of([&] {
            build_diversity_matrix({{0, 1.0, {7}}}, catalog);
          }) == ErrorCode::UnknownObjectId);
    CHECK(error_code_of([&] {
            build_diversity_matrix({{0, 1.0, {}}}, catalog);
          }) == ErrorCode::EmptyRequest);
  }
}

TEST_CASE("diversity matrix row sums equal request set sizes") {
  // 50 random requests over L = 20; the oracle recomputes row sums straight
  // from the raw request list.
  SplitMix64 rng(101);
  const auto catalog = workload::make_uniform_catalog(20, 1000);
  std::vector<ServiceRequest> requests;
  for (std::uint32_t u = 0; u < 50; ++u) {
    std::set<std::uint32_t> wanted;
    const auto n = 1 + rng.below(6);
    while (wanted.size() < n) wanted.insert(static_cast<std::uint32_t>(rng.below(20)));
    requests.push_back({u, 1.0, {wanted.begin(), wanted.end()}});
  }
  const auto z = build_diversity_matrix(requests, catalog);
  for (const auto& r : requests) CHECK(z.row_sum(r.user_id) == r.object_ids.size());
}

TEST_CASE("diversity matrix round-trips through implied request sets") {
  SplitMix64 rng(202);
  for (int iter = 0; iter < 50; ++iter) {
    const auto s = random_scenario(rng);
    const auto z = build_diversity_matrix(s.requests, s.catalog);
    // reconstruct request sets from the matrix, rebuild, compare
    std::vector<ServiceRequest> implied(z.rows);
    for (std::uint32_t u = 0; u < z.rows; ++u) {
      implied[u].user_id = u;
      implied[u].request_time_s = 1.0;
      for (std::uint32_t l = 0; l < z.cols; ++l)
        if (z.at(u, l)) implied[u].object_ids.push_back(l);
    }
    CHECK(build_diversity_matrix(implied, s.catalog) == z);
  }
}

TEST_CASE("content rate follows the definition") {
  const std::vector<ContentObject> catalog{{0, 100}};
  const WirelessBudget budget{10.0, 10.0, 1.0};

  SECTION("two satisfied users of 100 bits each") {
    const std::vector<ServiceRequest> satisfied{{0, 5.0, {0}}, {1, 7.0, {0}}};
    const auto report = content_rate(satisfied, catalog, budget);
    CHECK(report.delivered_bits == 200);
    CHECK(report.content_rate == 2.0);
    CHECK(report.satisfied_users == std::vector<std::uint32_t>{0, 1});
  }

  SECTION("no satisfied users") {
    const auto report = content_rate({}, catalog, budget);
    CHECK(report.delivered_bits == 0);
    CHECK(report.content_rate == 0.0);
  }
}

TEST_CASE("bandwidth bounds") {
  SECTION("lower bound over fixed sizes") {
    const std::vector<ContentObject> catalog{{0, 100}, {1, 200}, {2, 300}};
    CHECK(bandwidth_lower_bound(catalog, 10.0) == 60.0);
  }

  SECTION("identity case") {
    CHECK(bandwidth_lower_bound({{0, 1}}, 1.0) == 1.0);
  }

  SECTION("random catalog equals an independent fold") {
    SplitMix64 rng(303);
    for (int iter = 0; iter < 100; ++iter) {
      const auto s = random_scenario(rng);
      std::uint64_t fold = 0;
      for (const auto& obj : s.catalog) fold += obj.size_bits;
      CHECK(bandwidth_lower_bound(s.catalog, s.horizon_s) ==
            static_cast<double>(fold) / s.horizon_s);
    }
  }

  SECTION("shared object counted per user above, once below") {
    const std::vector<ContentObject> catalog{{0, 100}};
    const std::vector<ServiceRequest> requests{{0, 10.0, {0}}, {1, 10.0, {0}}};
    CHECK(bandwidth_upper_bound(requests, catalog, 10.0) == 20.0);
    CHECK(bandwidth_lower_bound(catalog, 10.0) == 10.0);
  }

  SECTION("single user: bounds coincide over the requested set") {
    const std::vector<ContentObject> catalog{{0, 128}, {1, 256}};
    const std::vector<ServiceRequest> requests{{0, 4.0, {0, 1}}};
    CHECK(bandwidth_upper_bound(requests, catalog, 4.0) ==
          bandwidth_lower_bound(catalog, 4.0));
  }

  SECTION("horizon must be positive") {
    CHECK(error_code_of([] { bandwidth_lower_bound({{0, 1}}, 0.0); }) ==
          ErrorCode::NonPositiveHorizon);
    CHECK(error_code_of([] { bandwidth_upper_bound({}, {}, -1.0); }) ==
          ErrorCode::NonPositiveHorizon);
  }
}

TEST_CASE("upper bound dominates the requested-subset lower bound") {
  SplitMix64 rng(404);
  for (int iter = 0; iter < 1000; ++iter) {
    const auto s = random_scenario(rng, {.ensure_shared = false});
    // lower bound restricted to the union of requested objects
    std::vector<std::uint8_t> requested(s.catalog.size(), 0);
    for (const auto& r : s.requests)
      for (std::uint32_t id : r.object_ids) requested[id] = 1;
    std::vector<ContentObject> requested_catalog;
    for (const auto& obj : s.catalog)
      if (requested[obj.id]) requested_catalog.push_back(obj);
    REQUIRE(bandwidth_upper_bound(s.requests, s.catalog, s.horizon_s) >=
            bandwidth_lower_bound(requested_catalog, s.horizon_s) - 1e-12);
  }
}

TEST_CASE("achievability: unicast everything exactly at the deadlines, M = 0") {
  // On-demand shape: every package arrives exactly at its request time.
  const std::vector<ContentObject> catalog{{0, 100}, {1, 50}};
  const std::vector<ServiceRequest> requests{{0, 10.0, {0}}, {1, 15.0, {1}}};
  const WirelessBudget budget{10.0, 20.0, 1.0};
  DeliveryPlan plan;
  plan.unicast_actions.push_back({0, 0, 0.0, 10.0});   // 100 bits at 10 Hz
  plan.unicast_actions.push_back({1, 1, 10.0, 5.0});   // 50 bits at 10 Hz
  const auto report = check_achievable(plan, requests, catalog, CacheSpec::none(), budget);
  CHECK(report.satisfied_users == std::vector<std::uint32_t>{0, 1});
  CHECK(report.delivered_bits == 150);
}

TEST_CASE("achievability: broadcast everything before the first deadline, M = inf") {
  SplitMix64 rng(505);
  for (int iter = 0; iter < 25; ++iter) {
    const auto s = random_scenario(rng, {.deadlines_at_horizon = true});
    const double b_min = bandwidth_lower_bound(s.catalog, s.horizon_s);
    const auto plan = sched::plan_broadcast_all(s.catalog, b_min, s.horizon_s);
    const WirelessBudget budget{b_min, s.horizon_s, 1.0};
    const auto report =
        check_achievable(plan, s.requests, s.catalog, CacheSpec::infinite(), budget);
    CHECK(report.unsatisfied_users.empty());
    CHECK(report.delivered_bits == test_helpers::total_package_bits(s.requests, s.catalog));
  }
}

TEST_CASE("achievability: delivery after the deadline leaves the user unsatisfied") {
  const std::vector<ContentObject> catalog{{0, 100}};
  const std::vector<ServiceRequest> requests{{0, 5.0, {0}}};
  const WirelessBudget budget{100.0, 20.0, 1.0};
  DeliveryPlan plan;
  plan.unicast_actions.push_back({0, 0, 6.0, 1.0});  // completes at 7.0 > 5.0
  const auto report = check_achievable(plan, requests, catalog, CacheSpec::none(), budget);
  CHECK(report.satisfied_users.empty());
  CHECK(report.unsatisfied_users == std::vector<std::uint32_t>{0});
  CHECK(report.content_rate == 0.0);
}

TEST_CASE("achievability: overloading the channel is a hard error") {
  const std::vector<ContentObject> catalog{{0, 1000}};
  const std::vector<ServiceRequest> requests{{0, 10.0, {0}}};
  const WirelessBudget budget{10.0, 10.0, 1.0};
  DeliveryPlan plan;
  plan.unicast_actions.push_back({0, 0, 0.0, 5.0});  // 200 Hz on a 10 Hz channel
  CHECK(error_code_of([&] {
          check_achievable(plan, requests, catalog, CacheSpec::none(), budget);
        }) == ErrorCode::PlanExceedsBandwidth);
}

TEST_CASE("achievability: cache overflow judges the user, not the plan") {
  // Hand-computed timeline: broadcasts complete at 100/30 s and 300/30 s;
  // caching both objects needs 300 bits.
  const std::vector<ContentObject> catalog{{0, 100}, {1, 200}};
  const std::vector<ServiceRequest> requests{{0, 10.0, {0, 1}}};
  const WirelessBudget budget{30.0, 10.0, 1.0};
  const auto plan = sched::plan_broadcast_all(catalog, 30.0, 10.0);

  const auto tight = check_achievable(plan, requests, catalog, CacheSpec::bits(300), budget);
  CHECK(tight.satisfied_users == std::vector<std::uint32_t>{0});

  const auto small = check_achievable(plan, requests, catalog, CacheSpec::bits(250), budget);
  CHECK(small.satisfied_users.empty());
  CHECK(small.unsatisfied_users == std::vector<std::uint32_t>{0});
}

TEST_CASE("achievability is monotone in cache capacity") {
  SplitMix64 rng(606);
  for (int iter = 0; iter < 40; ++iter) {
    const auto s = random_scenario(rng, {.deadlines_at_horizon = false});
    const double b_min = bandwidth_lower_bound(s.catalog, s.horizon_s);
    const auto plan = sched::plan_broadcast_all(s.catalog, 2.0 * b_min, s.horizon_s);
    const WirelessBudget budget{2.0 * b_min, s.horizon_s, 1.0};
    const std::uint64_t total = test_helpers::total_catalog_bits(s.catalog);
    std::vector<std::uint32_t> previous;
    for (const CacheSpec cache :
         {CacheSpec::none(), CacheSpec::bits(total / 3), CacheSpec::bits(total), CacheSpec::infinite()}) {
      const auto report = check_achievable(plan, s.requests, s.catalog, cache, budget);
      CHECK(std::includes(report.satisfied_users.begin(), report.satisfied_users.end(),
                          previous.begin(), previous.end()));
      previous = report.satisfied_users;
    }
  }
}

TEST_CASE("content-rate arithmetic is exact") {
  SplitMix64 rng(707);
  for (int iter = 0; iter < 50; ++iter) {
    const auto s = random_scenario(rng, {.deadlines_at_horizon = true});
    const double b_min = bandwidth_lower_bound(s.catalog, s.horizon_s);
    const auto plan = sched::plan_broadcast_all(s.catalog, b_min, s.horizon_s);
    const WirelessBudget budget{b_min, s.horizon_s, 1.0};
    const auto report = check_achievable(plan, s.requests, s.catalog, CacheSpec::infinite(), budget);

    std::uint64_t expected_bits = 0;
    for (const auto& r : s.requests)
      if (std::binary_search(report.satisfied_users.begin(), report.satisfied_users.end(), r.user_id))
        expected_bits += package_bits(r, s.catalog);
    CHECK(report.delivered_bits == expected_bits);
    CHECK(report.content_rate ==
          static_cast<double>(report.delivered_bits) / (budget.bandwidth_hz * budget.horizon_s));
  }
}

TEST_CASE("broadcast bound never exceeds unicast bound when all objects are wanted") {
  SplitMix64 rng(808);
  for (int iter = 0; iter < 200; ++iter) {
    const auto s = random_scenario(rng, {.ensure_shared = false});
    const double lower = bandwidth_lower_bound(s.catalog, s.horizon_s);
    const double upper = bandwidth_upper_bound(s.requests, s.catalog, s.horizon_s);
    REQUIRE(lower <= upper + 1e-12);
    if (!test_helpers::any_object_shared(s)) CHECK(lower == Approx(upper));
  }
}

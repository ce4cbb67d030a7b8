#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "camr/bench/hertz.hpp"
#include "camr/partition/partition.hpp"
#include "doctest.h"
#include "partition_oracle.hpp"

using namespace camr;

using namespace camr::testing;

TEST_CASE("contact rank budget") {
  CHECK(compute_rc(2, 4, 8, 1.0) == 1);           // ceil gives 4, capped at one pair
  CHECK(compute_rc(0, 100, 8, 1.0) == 0);
  CHECK(compute_rc(40, 40, 8, 1.0) == 8);         // contact-only mesh
  CHECK(compute_rc(60, 62, 4, 1.0) == 3);         // would take every rank
  CHECK(compute_rc(16, 64, 8, 1.0) == 2);         // exact product does not round up
  CHECK(compute_rc(16, 64, 8, 1.01) == 3);
  CHECK(compute_rc(16, 64, 8, 0.5) == 1);
  CHECK_THROWS_AS(compute_rc(3, 10, 8, 1.0), PairingError);
  CHECK_THROWS_AS(compute_rc(2, 10, 0, 1.0), ConfigError);
  CHECK_THROWS_AS(compute_rc(2, 10, 8, 0.0), ConfigError);
  CHECK_THROWS_AS(compute_rc(12, 10, 8, 1.0), ConfigError);
}

TEST_CASE("worked instance with 8 ranks and 3 contact regions") {
  const auto regions = worked_instance();
  const auto p = plan(regions, 8, 1.0);
  CHECK(p.contact_ranks == 2);
  std::map<int, int> rank;
  for (const auto& a : p.assignments) rank[a.element] = a.rank;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    for (const auto& s : regions[r].super_elements) {
      CHECK(rank[s.solid1] < 2);
      CHECK(rank[s.solid1] == rank[s.solid2]);
    }
    for (int e : regions[r].non_contact) CHECK(rank[e] >= 2);
  }
  CHECK(rank[4 * 1000 + 500] == 6);
  CHECK(rank[5 * 1000 + 500] == 7);
  // Region 1 deals 3 super-elements from rank 1: 1, 0, 1; the next would be rank 0.
  CHECK(rank[1000] == 1);
  CHECK(rank[1002] == 0);
  CHECK(rank[1004] == 1);
  CHECK((1 + 3) % 2 == 0);
  CHECK(non_contact_start(4, 8, 2) == 6);
  CHECK(non_contact_start(5, 8, 2) == 7);
  CHECK(non_contact_start(6, 8, 2) == 4);
  CHECK(non_contact_start(7, 8, 2) == 5);
}

TEST_CASE("random region states agree with the brute-force oracle") {
  std::mt19937 gen(20240611);
  for (int trial = 0; trial < 100; ++trial) {
    const int ranks = std::uniform_int_distribution<int>(1, 12)(gen);
    const int regions_n = std::uniform_int_distribution<int>(1, ranks)(gen);
    const long long num = std::uniform_int_distribution<int>(1, 6)(gen);
    const long long den = 2;
    std::vector<int> supers, others;
    std::uniform_int_distribution<int> count(0, 12);
    for (int r = 0; r < regions_n; ++r) {
      supers.push_back(trial % 7 == 0 ? 0 : count(gen) / 2);
      others.push_back(trial % 11 == 0 ? 0 : count(gen));
    }
    if (std::accumulate(supers.begin(), supers.end(), 0) + std::accumulate(others.begin(), others.end(), 0) == 0)
      others[0] = 1;
    const auto regions = make_regions(supers, others);
    const double c = static_cast<double>(num) / den;
    long long n_ec = 0, n_e = 0;
    for (const auto& reg : regions) {
      n_ec += 2 * static_cast<long long>(reg.super_elements.size());
      n_e += static_cast<long long>(reg.num_elements());
    }
    const int rc = rc_oracle(n_ec, n_e, ranks, num, den);
    CAPTURE(trial);
    REQUIRE(compute_rc(n_ec, n_e, ranks, c) == rc);
    if (rc == ranks && n_e > n_ec) continue;  // not reachable: contact-only meshes have no other work
    const auto p = plan(regions, ranks, c);
    const auto expected = dealing_oracle(regions, ranks, rc);
    REQUIRE(p.assignments.size() == expected.size());
    for (const auto& a : p.assignments) CHECK(expected.at(a.element) == a.rank);

    // Co-location and rank-class separation.
    std::map<int, int> rank;
    for (const auto& a : p.assignments) rank[a.element] = a.rank;
    for (const auto& reg : regions) {
      for (const auto& s : reg.super_elements) {
        CHECK(rank[s.solid1] == rank[s.solid2]);
        if (rc > 0) CHECK(rank[s.solid1] < rc);
      }
      if (rc < ranks)
        for (int e : reg.non_contact) CHECK(rank[e] >= rc);
    }
    // Per rank class, counts differ by at most the number of contributing regions.
    std::vector<int> sup(static_cast<std::size_t>(ranks), 0), non(static_cast<std::size_t>(ranks), 0);
    int contributing_s = 0, contributing_n = 0;
    for (const auto& reg : regions) {
      contributing_s += rc > 0 && !reg.super_elements.empty();
      contributing_n += !reg.non_contact.empty() || (rc == 0 && !reg.super_elements.empty());
      for (const auto& s : reg.super_elements) ++sup[static_cast<std::size_t>(rank[s.solid1])];
      for (int e : reg.non_contact) ++non[static_cast<std::size_t>(rank[e])];
    }
    if (rc > 0) {
      auto [lo, hi] = std::minmax_element(sup.begin(), sup.begin() + rc);
      CHECK(*hi - *lo <= contributing_s);
    }
    if (rc < ranks) {
      std::vector<int> load(non.begin() + rc, non.end());
      if (rc == 0)
        for (int r = 0; r < ranks; ++r) load[static_cast<std::size_t>(r)] += sup[static_cast<std::size_t>(r)];
      auto [lo, hi] = std::minmax_element(load.begin(), load.end());
      CHECK(*hi - *lo <= contributing_n);
    }
  }
}

TEST_CASE("planning is deterministic and regions are dealt independently") {
  const auto regions = worked_instance();
  const auto a = plan(regions, 8, 1.0);
  const auto b = plan(regions, 8, 1.0);
  REQUIRE(a.assignments.size() == b.assignments.size());
  for (std::size_t i = 0; i < a.assignments.size(); ++i) {
    CHECK(a.assignments[i].element == b.assignments[i].element);
    CHECK(a.assignments[i].rank == b.assignments[i].rank);
  }
  // A region's plan depends only on its own state and the global counts.
  for (int r = 0; r < 8; ++r) {
    const auto alone = plan_region(regions[static_cast<std::size_t>(r)], r, 8, a.contact_ranks);
    std::map<int, int> rank;
    for (const auto& x : a.assignments) rank[x.element] = x.rank;
    for (const auto& x : alone) CHECK(rank[x.element] == x.rank);
  }
  // Changing another region without changing the global counts leaves region 0 alone.
  auto moved = regions;
  std::swap(moved[6].non_contact, moved[7].non_contact);
  const auto c = plan(moved, 8, 1.0);
  CHECK(c.contact_ranks == a.contact_ranks);
  for (std::size_t i = 0; i < regions[0].num_elements(); ++i) CHECK(c.assignments[i].rank == a.assignments[i].rank);
}

TEST_CASE("a larger balance coefficient never lowers the contact rank budget") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int ranks = std::uniform_int_distribution<int>(1, 64)(gen);
    const long long n_ec = 2 * std::uniform_int_distribution<int>(0, 200)(gen);
    const long long n_e = n_ec + std::uniform_int_distribution<int>(0, 2000)(gen);
    if (n_e == 0) continue;
    int prev = -1;
    double prev_load = INFINITY;
    for (double c : {0.25, 0.5, 1.0, 1.5, 2.0, 4.0}) {
      const int rc = compute_rc(n_ec, n_e, ranks, c);
      CHECK(rc >= prev);
      if (rc > 0) {
        const double load = static_cast<double>(n_ec) / rc;
        CHECK(load <= prev_load);
        prev_load = load;
      }
      prev = rc;
    }
  }
}

TEST_CASE("validation on the half-disk mesh, and a single injected violation") {
  HertzParams hp;
  hp.n0 = 4;
  auto problem = make_hertz(hp);
  const Mesh mesh = refine_uniformly(problem.mesh, 1);
  FeSpace space(mesh, 1);
  auto pairing = pair_nodes(mesh, space, tags::kContact1, tags::kContact2, {0, 1});
  const auto current = contiguous_ranks(mesh, 8);
  const auto regions = build_regions(mesh, pairing, current, 8);
  std::size_t total = 0;
  for (const auto& r : regions) total += r.num_elements();
  CHECK(total == mesh.num_leaves());
  const auto p = plan(regions, 8, 3.0);
  REQUIRE(p.contact_ranks >= 2);
  auto rep = validate(p, pairing, mesh);
  CHECK(rep.ok());
  CHECK(rep.imbalance >= 1.0);
  CHECK(std::accumulate(rep.elements_per_rank.begin(), rep.elements_per_rank.end(), 0) ==
        static_cast<int>(mesh.num_leaves()));

  // Move one solid-2 contact element to another contact rank.
  auto broken = p;
  const int victim = pairing.element_pairs.front().second;
  for (auto& a : broken.assignments)
    if (a.element == victim) a.rank = (a.rank + 1) % p.contact_ranks;
  rep = validate(broken, pairing, mesh);
  CHECK(rep.colocation_violations == 1);
  CHECK(rep.separation_violations == 0);
  CHECK_FALSE(rep.ok());

  // Or onto a non-contact rank.
  for (auto& a : broken.assignments)
    if (a.element == victim) a.rank = p.contact_ranks;
  rep = validate(broken, pairing, mesh);
  CHECK(rep.colocation_violations == 1);
  CHECK(rep.separation_violations == 1);

  // Unassigned leaves are reported.
  auto missing = p;
  missing.assignments.pop_back();
  CHECK(validate(missing, pairing, mesh).unassigned == 1);
}

TEST_CASE("plan rejects unpaired super-elements") {
  auto regions = make_regions({1}, {2});
  regions[0].super_elements[0].solid2 = -1;
  CHECK_THROWS_AS(plan(regions, 4, 1.0), PairingError);
}

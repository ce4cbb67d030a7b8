#include "camr/partition/partition.hpp"

#include <algorithm>
#include <cmath>

namespace camr {

int compute_rc(long long n_ec, long long n_e, int ranks, double c) {
  if (n_ec % 2 != 0) throw PairingError("contact element count must be even");
  if (ranks < 1) throw ConfigError("rank count must be positive");
  if (!(c > 0.0)) throw ConfigError("balance coefficient must be positive");
  if (n_ec < 0 || n_e < n_ec) throw ConfigError("inconsistent element counts");
  if (n_ec == 0) return 0;
  // The small offset keeps an exact integer product from rounding up.
  long long rc = static_cast<long long>(
      std::ceil(c * static_cast<double>(n_ec) / static_cast<double>(n_e) * ranks - 1e-12));
  if (rc > n_ec / 2) rc = n_ec / 2;
  if (rc >= ranks && n_e > n_ec) rc = ranks - 1;
  if (n_e == n_ec) rc = ranks;
  return static_cast<int>(rc);
}

std::vector<int> PartitionPlan::rank_table(std::size_t num_elements) const {
  std::vector<int> out(num_elements, -1);
  for (const auto& a : assignments)
    if (a.element >= 0 && static_cast<std::size_t>(a.element) < num_elements)
      out[static_cast<std::size_t>(a.element)] = a.rank;
  return out;
}

int non_contact_start(int r, int ranks, int contact_ranks) {
  const int start = r + contact_ranks;
  if (start < ranks) return start;
  return (start % (ranks - contact_ranks)) + contact_ranks;
}

std::vector<Assignment> plan_region(const RegionState& region, int r, int ranks, int contact_ranks) {
  std::vector<Assignment> out;
  out.reserve(region.num_elements());
  if (contact_ranks > 0) {
    const int first = r % contact_ranks;
    for (std::size_t j = 0; j < region.super_elements.size(); ++j) {
      const int rank = static_cast<int>((first + j) % static_cast<std::size_t>(contact_ranks));
      out.push_back({region.super_elements[j].solid1, rank});
      out.push_back({region.super_elements[j].solid2, rank});
    }
  }
  // Without contact ranks the super-elements are dealt with everything else.
  std::vector<std::pair<int, int>> rest;  // (element, partner or -1)
  if (contact_ranks == 0)
    for (const auto& s : region.super_elements) rest.emplace_back(s.solid1, s.solid2);
  for (int e : region.non_contact) rest.emplace_back(e, -1);
  if (!rest.empty()) {
    if (contact_ranks >= ranks) throw ConfigError("no ranks left for non-contact elements");
    const int span = ranks - contact_ranks;
    const int start = non_contact_start(r, ranks, contact_ranks) - contact_ranks;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      const int rank = contact_ranks + static_cast<int>((start + j) % static_cast<std::size_t>(span));
      out.push_back({rest[j].first, rank});
      if (rest[j].second >= 0) out.push_back({rest[j].second, rank});
    }
  }
  return out;
}

PartitionPlan plan(const std::vector<RegionState>& regions, int ranks, double c) {
  if (ranks < 1) throw ConfigError("rank count must be positive");
  long long n_e = 0;
  long long n_ec = 0;
  for (const auto& reg : regions) {
    n_e += static_cast<long long>(reg.num_elements());
    n_ec += 2 * static_cast<long long>(reg.super_elements.size());
    for (const auto& s : reg.super_elements)
      if (s.solid1 < 0 || s.solid2 < 0) throw PairingError("super-element without a partner");
  }
  PartitionPlan out;
  out.ranks = ranks;
  out.c = c;
  out.contact_ranks = compute_rc(n_ec, n_e, ranks, c);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    auto part = plan_region(regions[r], static_cast<int>(r), ranks, out.contact_ranks);
    out.assignments.insert(out.assignments.end(), part.begin(), part.end());
  }
  return out;
}

ValidationReport validate(const PartitionPlan& plan, const ContactPairing& pairing, const Mesh& mesh) {
  ValidationReport rep;
  const auto table = plan.rank_table(mesh.num_elements());
  rep.elements_per_rank.assign(static_cast<std::size_t>(plan.ranks), 0);
  const auto leaves = mesh.leaves();
  for (int e : leaves) {
    const int r = table[static_cast<std::size_t>(e)];
    if (r < 0 || r >= plan.ranks) {
      ++rep.unassigned;
      continue;
    }
    ++rep.elements_per_rank[static_cast<std::size_t>(r)];
    if (plan.contact_ranks > 0 && plan.contact_ranks < plan.ranks) {
      const bool contact = pairing.partner(e) >= 0;
      if (contact != (r < plan.contact_ranks)) ++rep.separation_violations;
    }
  }
  for (const auto& [a, b] : pairing.element_pairs)
    if (table[static_cast<std::size_t>(a)] != table[static_cast<std::size_t>(b)]) {
      ++rep.colocation_violations;
      rep.messages.push_back("paired elements " + std::to_string(a) + " and " + std::to_string(b) +
                             " on different ranks");
    }
  if (rep.unassigned > 0) rep.messages.push_back(std::to_string(rep.unassigned) + " leaves unassigned");
  if (rep.separation_violations > 0)
    rep.messages.push_back(std::to_string(rep.separation_violations) + " elements on the wrong rank class");
  const double mean = static_cast<double>(leaves.size()) / plan.ranks;
  const int mx = rep.elements_per_rank.empty() ? 0 : *std::max_element(rep.elements_per_rank.begin(), rep.elements_per_rank.end());
  rep.imbalance = mean > 0.0 ? mx / mean : 0.0;
  return rep;
}

std::vector<RegionState> build_regions(const Mesh& mesh, const ContactPairing& pairing,
                                       const std::vector<int>& rank_of, int ranks) {
  std::vector<RegionState> regions(static_cast<std::size_t>(ranks));
  auto region_of = [&](int e) {
    const int r = (static_cast<std::size_t>(e) < rank_of.size()) ? rank_of[static_cast<std::size_t>(e)] : -1;
    if (r < 0 || r >= ranks) throw InternalError("element " + std::to_string(e) + " has no current rank");
    return static_cast<std::size_t>(r);
  };
  for (int e : mesh.leaves()) {
    const int partner = pairing.partner(e);
    if (partner < 0) {
      regions[region_of(e)].non_contact.push_back(e);
    } else if (mesh.element(e).solid == 1) {
      regions[region_of(e)].super_elements.push_back({e, partner});
    }
  }
  return regions;
}

std::vector<int> contiguous_ranks(const Mesh& mesh, int ranks) {
  std::vector<int> out(mesh.num_elements(), -1);
  const auto leaves = mesh.leaves();
  const std::size_t n = leaves.size();
  for (std::size_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(leaves[i])] = static_cast<int>(i * static_cast<std::size_t>(ranks) / std::max<std::size_t>(n, 1));
  return out;
}

}  // namespace camr

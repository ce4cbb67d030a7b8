#pragma once

// Contact-aware element-to-rank planning. Ranks are logical labels: regions are
// the element sets currently owned by each rank, and every region is dealt out
// independently from its own data plus global counts.

#include <string>
#include <vector>

#include "camr/contact/contact.hpp"

namespace camr {

/// Two paired contact elements kept together, keyed by the solid-1 element.
struct SuperElement {
  int solid1 = -1;
  int solid2 = -1;
};

struct RegionState {
  std::vector<SuperElement> super_elements;  // ascending solid-1 id
  std::vector<int> non_contact;              // ascending id

  std::size_t num_elements() const { return 2 * super_elements.size() + non_contact.size(); }
};

/// Number of ranks reserved for contact elements, with the corrections for
/// tiny contact sets, no room left for non-contact work and contact-only meshes.
/// Throws PairingError when n_ec is odd.
int compute_rc(long long n_ec, long long n_e, int ranks, double c);

struct Assignment {
  int element = -1;
  int rank = -1;
};

struct PartitionPlan {
  int ranks = 1;
  int contact_ranks = 0;
  double c = 1.0;
  std::vector<Assignment> assignments;  // region order, then dealing order

  /// Rank per element id (size = max id + 1, -1 for unassigned).
  std::vector<int> rank_table(std::size_t num_elements) const;
};

/// First rank used by region r for its non-contact elements.
int non_contact_start(int r, int ranks, int contact_ranks);

/// Deals one region given only its own state and the global R, R_C.
std::vector<Assignment> plan_region(const RegionState& region, int r, int ranks, int contact_ranks);

PartitionPlan plan(const std::vector<RegionState>& regions, int ranks, double c);

struct ValidationReport {
  int colocation_violations = 0;
  int separation_violations = 0;
  int unassigned = 0;
  std::vector<int> elements_per_rank;
  double imbalance = 0.0;  // max / mean of elements_per_rank
  std::vector<std::string> messages;

  bool ok() const { return colocation_violations == 0 && separation_violations == 0 && unassigned == 0; }
};

ValidationReport validate(const PartitionPlan& plan, const ContactPairing& pairing, const Mesh& mesh);

/// Groups the current leaves by their rank in `rank_of` (indexed by element id).
std::vector<RegionState> build_regions(const Mesh& mesh, const ContactPairing& pairing,
                                       const std::vector<int>& rank_of, int ranks);

/// Contiguous split of the leaves (ascending id) into `ranks` chunks.
std::vector<int> contiguous_ranks(const Mesh& mesh, int ranks);

}  // namespace camr

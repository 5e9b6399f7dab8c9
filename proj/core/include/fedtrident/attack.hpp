#pragma once

#include <set>
#include <vector>

#include "fedtrident/dataset.hpp"

namespace fedtrident {

struct AttackPhase {
  int first_round = 0;  // inclusive
  int last_round = 0;   // inclusive
  int source = 0;       // f: true class being hidden
  int target = 0;       // g: class it is disguised as
};

// Round-indexed flip directives. Phases must tile [1..total_rounds] with no
// gaps or overlaps; a static attack is a single phase.
struct AttackSchedule {
  std::vector<AttackPhase> phases;
  int total_rounds = 0;

  const AttackPhase& effective(int round) const;
};

AttackSchedule static_schedule(int source, int target, int total_rounds);
AttackSchedule dynamic_schedule(std::vector<AttackPhase> phases);

struct AttackerSet {
  std::set<int> ids;
  bool contains(int id) const { return ids.count(id) != 0; }
  std::size_t size() const { return ids.size(); }
};

// What client `client_id` actually trains on in round `round`: malicious
// clients see their data with the phase's flip applied, benign clients see
// it untouched. The clean dataset is never mutated.
Dataset poisoned_view(int client_id, const Dataset& clean,
                      const AttackSchedule& schedule,
                      const AttackerSet& attackers, int round);

}  // namespace fedtrident

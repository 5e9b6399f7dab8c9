#include "fedtrident/attack.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fedtrident {

const AttackPhase& AttackSchedule::effective(int round) const {
  for (const auto& p : phases)
    if (round >= p.first_round && round <= p.last_round) return p;
  throw std::out_of_range("AttackSchedule: round " + std::to_string(round) +
                          " outside schedule coverage");
}

namespace {

void check_phase(const AttackPhase& p) {
  if (p.first_round < 1 || p.last_round < p.first_round)
    throw std::invalid_argument("AttackSchedule: invalid round range [" +
                                std::to_string(p.first_round) + ".." +
                                std::to_string(p.last_round) + "]");
  if (p.source < 1 || p.target < 1)
    throw std::invalid_argument("AttackSchedule: classes are 1-based");
  if (p.source == p.target)
    throw std::invalid_argument("AttackSchedule: source and target must differ");
}

}  // namespace

AttackSchedule static_schedule(int source, int target, int total_rounds) {
  if (total_rounds < 1)
    throw std::invalid_argument("static_schedule: total_rounds must be >= 1");
  AttackPhase phase{1, total_rounds, source, target};
  check_phase(phase);
  AttackSchedule s;
  s.phases.push_back(phase);
  s.total_rounds = total_rounds;
  return s;
}

AttackSchedule dynamic_schedule(std::vector<AttackPhase> phases) {
  if (phases.empty())
    throw std::invalid_argument("dynamic_schedule: no phases given");
  std::sort(phases.begin(), phases.end(),
            [](const AttackPhase& a, const AttackPhase& b) {
              return a.first_round < b.first_round;
            });
  for (const auto& p : phases) check_phase(p);
  if (phases.front().first_round != 1)
    throw std::invalid_argument("dynamic_schedule: coverage must start at round 1");
  for (std::size_t i = 1; i < phases.size(); ++i) {
    int prev_end = phases[i - 1].last_round;
    int next_start = phases[i].first_round;
    if (next_start <= prev_end)
      throw std::invalid_argument(
          "dynamic_schedule: overlapping phases at round " +
          std::to_string(next_start));
    if (next_start != prev_end + 1)
      throw std::invalid_argument("dynamic_schedule: gap between rounds " +
                                  std::to_string(prev_end) + " and " +
                                  std::to_string(next_start));
  }
  AttackSchedule s;
  s.total_rounds = phases.back().last_round;
  s.phases = std::move(phases);
  return s;
}

Dataset poisoned_view(int client_id, const Dataset& clean,
                      const AttackSchedule& schedule,
                      const AttackerSet& attackers, int round) {
  if (!attackers.contains(client_id)) return clean;
  const AttackPhase& phase = schedule.effective(round);
  return flip_labels(clean, phase.source, phase.target);
}

}  // namespace fedtrident

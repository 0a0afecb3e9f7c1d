#include "clinicdx/diagnosis.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace clinicdx {

ChangeVector ChangeVector::zeros(std::size_t n) {
  ChangeVector c;
  c.delta_ap.assign(n, 0);
  c.delta_ae.assign(n, 0);
  return c;
}

ChangeVector ChangeVector::ones(std::size_t n) {
  ChangeVector c;
  c.delta_ap.assign(n, 1);
  c.delta_ae.assign(n, 1);
  return c;
}

int ChangeVector::objective() const {
  int total = 0;
  for (unsigned char b : delta_ap) total += b;
  for (unsigned char b : delta_ae) total += b;
  return total;
}

std::vector<Minutes> RevisedTimeline::revised_end() const {
  std::vector<Minutes> end(revised_start.size());
  for (std::size_t i = 0; i < end.size(); ++i) {
    end[i] = revised_start[i] + revised_duration[i];
  }
  return end;
}

bool is_feasible(const DiagnoseOutcome& outcome) {
  return std::holds_alternative<Diagnosis>(outcome);
}

Minutes revise_arrival(const PlannedAppointment& planned,
                       const ObservedAppointment& observed, bool flip) {
  return flip ? planned.scheduled_start : observed.arrival;
}

Minutes revise_duration(const PlannedAppointment& planned,
                        const ObservedAppointment& observed, bool flip) {
  return flip ? planned.scheduled_duration : observed.actual_duration;
}

RevisedTimeline simulate_revised(const ProviderDay& day,
                                 const ChangeVector& changes) {
  const auto& a = day.appointments;
  const std::size_t n = a.size();
  assert(changes.delta_ap.size() == n && changes.delta_ae.size() == n);
  RevisedTimeline t;
  t.revised_arrival.resize(n);
  t.revised_duration.resize(n);
  t.revised_start.resize(n);
  Minutes prev_end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Minutes arrival =
        revise_arrival(a[i].planned, a[i].observed, changes.delta_ap[i] != 0);
    const Minutes duration =
        revise_duration(a[i].planned, a[i].observed, changes.delta_ae[i] != 0);
    const Minutes start =
        (i == 0) ? arrival : std::max({0, prev_end, arrival});
    t.revised_arrival[i] = arrival;
    t.revised_duration[i] = duration;
    t.revised_start[i] = start;
    prev_end = start + duration;
  }
  return t;
}

std::vector<bool> is_on_schedule(const ProviderDay& day,
                                 const RevisedTimeline& revised,
                                 Minutes epsilon) {
  const std::size_t n = day.size();
  std::vector<bool> ok(n);
  const auto end = revised.revised_end();
  for (std::size_t i = 0; i < n; ++i) {
    ok[i] = std::abs(end[i] - day.appointments[i].planned.scheduled_end()) <=
            epsilon;
  }
  return ok;
}

namespace {

// Pin per flag position: delta_ap occupies [0, n), delta_ae [n, 2n).
// -1 leaves the flag free; 0/1 forces it.
using BitConstraints = std::vector<signed char>;

// Fewest flags that bring every appointment's end within eps of plan,
// honouring the pins. The search walks appointments left to right keeping,
// per reachable end time, the cheapest way to get there; the end time is
// the only part of the past the future can see.
std::optional<int> min_flag_count(const ProviderDay& day, Minutes eps,
                                  const BitConstraints& pinned) {
  const auto& a = day.appointments;
  const std::size_t n = a.size();
  using Layer = std::map<Minutes, int>;  // revised end -> fewest flags so far
  Layer layer;
  for (std::size_t i = 0; i < n; ++i) {
    Layer next;
    const Minutes planned_end = a[i].planned.scheduled_end();
    auto expand = [&](Minutes prev_end, int cost_so_far, bool have_prev) {
      for (int ap_flag = 0; ap_flag <= 1; ++ap_flag) {
        if (pinned[i] >= 0 && pinned[i] != ap_flag) continue;
        for (int ae_flag = 0; ae_flag <= 1; ++ae_flag) {
          if (pinned[n + i] >= 0 && pinned[n + i] != ae_flag) continue;
          const Minutes arrival =
              revise_arrival(a[i].planned, a[i].observed, ap_flag != 0);
          const Minutes duration =
              revise_duration(a[i].planned, a[i].observed, ae_flag != 0);
          const Minutes start =
              have_prev ? std::max({0, prev_end, arrival}) : arrival;
          const Minutes end = start + duration;
          if (std::abs(end - planned_end) > eps) continue;
          const int cost = cost_so_far + ap_flag + ae_flag;
          auto [it, inserted] = next.try_emplace(end, cost);
          if (!inserted && cost < it->second) it->second = cost;
        }
      }
    };
    if (i == 0) {
      expand(0, 0, false);
    } else {
      for (const auto& [prev_end, cost] : layer) expand(prev_end, cost, true);
    }
    if (next.empty()) return std::nullopt;
    layer = std::move(next);
  }
  int best = std::numeric_limits<int>::max();
  for (const auto& [end, cost] : layer) best = std::min(best, cost);
  return best;
}

std::size_t first_off_schedule(const ProviderDay& day,
                               const RevisedTimeline& revised,
                               Minutes epsilon) {
  const auto ok = is_on_schedule(day, revised, epsilon);
  std::size_t i = 0;
  while (i < ok.size() && ok[i]) ++i;
  return i;
}

std::uint32_t rev_bits(std::uint32_t mask, std::size_t n) {
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out |= ((mask >> i) & 1u) << (n - 1 - i);
  }
  return out;
}

Diagnosis empty_diagnosis(Minutes epsilon) {
  return Diagnosis{ChangeVector::zeros(0), RevisedTimeline{}, 0, epsilon};
}

}  // namespace

DiagnoseOutcome diagnose(const ProviderDay& day, Minutes epsilon) {
  assert(epsilon >= 0);
  const std::size_t n = day.size();
  if (n == 0) return empty_diagnosis(epsilon);

  BitConstraints pinned(2 * n, -1);
  const auto base = min_flag_count(day, epsilon, pinned);
  if (!base) {
    const auto all = simulate_revised(day, ChangeVector::ones(n));
    const std::size_t first = first_off_schedule(day, all, epsilon);
    assert(first < n);
    return InfeasibleDay{first};
  }
  const int target = *base;

  // Fix flags one position at a time, arrivals before durations, preferring
  // 0: a flag stays clear only when some completion still hits the minimum.
  // Pinning can only shrink the search space, so the minimum never drops.
  for (std::size_t pos = 0; pos < 2 * n; ++pos) {
    pinned[pos] = 0;
    const auto res = min_flag_count(day, epsilon, pinned);
    assert(!res || *res >= target);
    if (!res || *res != target) pinned[pos] = 1;
  }

  ChangeVector changes = ChangeVector::zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    changes.delta_ap[i] = pinned[i] == 1 ? 1 : 0;
    changes.delta_ae[i] = pinned[n + i] == 1 ? 1 : 0;
  }
  assert(changes.objective() == target);
  RevisedTimeline revised = simulate_revised(day, changes);
  assert(first_off_schedule(day, revised, epsilon) == n);
  return Diagnosis{std::move(changes), std::move(revised), target, epsilon};
}

DiagnoseOutcome brute_force_diagnose(const ProviderDay& day, Minutes epsilon) {
  assert(epsilon >= 0);
  const std::size_t n = day.size();
  if (n > kBruteForceMaxAppointments) {
    std::ostringstream os;
    os << "exhaustive search handles at most " << kBruteForceMaxAppointments
       << " appointments, got " << n;
    throw InstanceTooLargeError(os.str());
  }
  if (n == 0) return empty_diagnosis(epsilon);

  const auto& a = day.appointments;
  const std::uint32_t limit = 1u << n;
  bool found = false;
  int best_obj = 0;
  std::uint64_t best_key = 0;
  std::uint32_t best_ap = 0;
  std::uint32_t best_ae = 0;
  for (std::uint32_t ap_mask = 0; ap_mask < limit; ++ap_mask) {
    for (std::uint32_t ae_mask = 0; ae_mask < limit; ++ae_mask) {
      Minutes prev_end = 0;
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        const Minutes arrival = ((ap_mask >> i) & 1u) != 0
                                    ? a[i].planned.scheduled_start
                                    : a[i].observed.arrival;
        const Minutes duration = ((ae_mask >> i) & 1u) != 0
                                     ? a[i].planned.scheduled_duration
                                     : a[i].observed.actual_duration;
        const Minutes start =
            (i == 0) ? arrival : std::max({0, prev_end, arrival});
        const Minutes end = start + duration;
        if (std::abs(end - a[i].planned.scheduled_end()) > epsilon) {
          ok = false;
          break;
        }
        prev_end = end;
      }
      if (!ok) continue;
      const int obj = std::popcount(ap_mask) + std::popcount(ae_mask);
      // Reversing the bits makes numeric order agree with reading the flag
      // string left to right, arrivals first.
      const std::uint64_t key =
          (static_cast<std::uint64_t>(rev_bits(ap_mask, n)) << n) |
          rev_bits(ae_mask, n);
      if (!found || obj < best_obj ||
          (obj == best_obj && key < best_key)) {
        found = true;
        best_obj = obj;
        best_key = key;
        best_ap = ap_mask;
        best_ae = ae_mask;
      }
    }
  }
  if (!found) {
    const auto all = simulate_revised(day, ChangeVector::ones(n));
    const std::size_t first = first_off_schedule(day, all, epsilon);
    assert(first < n);
    return InfeasibleDay{first};
  }
  ChangeVector changes = ChangeVector::zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    changes.delta_ap[i] = (best_ap >> i) & 1u;
    changes.delta_ae[i] = (best_ae >> i) & 1u;
  }
  RevisedTimeline revised = simulate_revised(day, changes);
  return Diagnosis{std::move(changes), std::move(revised), best_obj, epsilon};
}

std::string to_string(SchedulePattern pattern) {
  switch (pattern) {
    case SchedulePattern::kOnSchedule:
      return "on-schedule";
    case SchedulePattern::kLatePatients:
      return "late-patients";
    case SchedulePattern::kUnpredictableAppointment:
      return "unpredictable-appointment";
    case SchedulePattern::kBlockTimePlanning:
      return "block-time-planning";
    case SchedulePattern::kMixed:
      return "mixed";
  }
  return "unknown";
}

DiagnosisAnnotation classify_diagnosis(const Diagnosis& diagnosis,
                                       const ProviderDay& day,
                                       const ClassifierConfig& config) {
  DiagnosisAnnotation note;
  const std::size_t n = day.size();
  if (n == 0) return note;
  std::size_t ap_flips = 0;
  std::size_t ae_flips = 0;
  for (unsigned char b : diagnosis.changes.delta_ap) ap_flips += b;
  for (unsigned char b : diagnosis.changes.delta_ae) ae_flips += b;
  note.ap_share = static_cast<double>(ap_flips) / static_cast<double>(n);
  note.ae_share = static_cast<double>(ae_flips) / static_cast<double>(n);
  note.ae_flips = ae_flips;

  const auto concentrated_cap = static_cast<std::size_t>(std::max(
      1.0, std::ceil(config.concentrated_share * static_cast<double>(n))));
  if (diagnosis.objective == 0) {
    note.pattern = SchedulePattern::kOnSchedule;
  } else if (ae_flips == 0) {
    note.pattern = SchedulePattern::kLatePatients;
  } else if (note.ae_share >= config.pervasive_share) {
    note.pattern = SchedulePattern::kBlockTimePlanning;
  } else if (ae_flips <= concentrated_cap) {
    note.pattern = SchedulePattern::kUnpredictableAppointment;
  } else {
    note.pattern = SchedulePattern::kMixed;
  }
  return note;
}

}  // namespace clinicdx

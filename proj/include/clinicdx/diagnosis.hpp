#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "clinicdx/datetime.hpp"
#include "clinicdx/errors.hpp"
#include "clinicdx/schedule_model.hpp"

namespace clinicdx {

// One candidate correction set: which arrivals and which durations to
// replace with their planned values. Entries are 0 or 1.
struct ChangeVector {
  std::vector<unsigned char> delta_ap;
  std::vector<unsigned char> delta_ae;

  static ChangeVector zeros(std::size_t n);
  static ChangeVector ones(std::size_t n);

  int objective() const;  // total number of set flags
  bool operator==(const ChangeVector&) const = default;
};

// The day replayed with the chosen corrections applied.
struct RevisedTimeline {
  std::vector<Minutes> revised_arrival;
  std::vector<Minutes> revised_duration;
  std::vector<Minutes> revised_start;

  std::vector<Minutes> revised_end() const;
  bool operator==(const RevisedTimeline&) const = default;
};

struct Diagnosis {
  ChangeVector changes;
  RevisedTimeline revised;
  int objective = 0;
  Minutes epsilon = 0;
  bool operator==(const Diagnosis&) const = default;
};

// Even correcting every arrival and every duration cannot bring this day
// back on schedule; the plan itself is inconsistent starting here.
struct InfeasibleDay {
  std::size_t first_failing_index = 0;
  bool operator==(const InfeasibleDay&) const = default;
};

using DiagnoseOutcome = std::variant<Diagnosis, InfeasibleDay>;

bool is_feasible(const DiagnoseOutcome& outcome);

// Arrival used in the replay: planned start when flipped, else observed.
Minutes revise_arrival(const PlannedAppointment& planned,
                       const ObservedAppointment& observed, bool flip);

// Duration used in the replay: planned length when flipped, else observed.
Minutes revise_duration(const PlannedAppointment& planned,
                        const ObservedAppointment& observed, bool flip);

// Replays the day under `changes`: each start is the moment the previous
// appointment ends or the (revised) patient arrival, whichever is later.
RevisedTimeline simulate_revised(const ProviderDay& day,
                                 const ChangeVector& changes);

// True per appointment when the revised end lands within `epsilon` minutes
// of the planned end.
std::vector<bool> is_on_schedule(const ProviderDay& day,
                                 const RevisedTimeline& revised,
                                 Minutes epsilon);

// Finds a correction set of provably minimum size under which every
// appointment ends within `epsilon` of its planned end, breaking ties
// lexicographically on the concatenated (delta_ap, delta_ae) bit string.
// Returns InfeasibleDay when no correction set works.
DiagnoseOutcome diagnose(const ProviderDay& day, Minutes epsilon = 0);

class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kBruteForceMaxAppointments = 12;

// Reference solver: exhaustively tries all 4^n correction sets and keeps
// the best by the same (objective, lexicographic) order as diagnose().
// Throws InstanceTooLargeError above kBruteForceMaxAppointments.
DiagnoseOutcome brute_force_diagnose(const ProviderDay& day,
                                     Minutes epsilon = 0);

enum class SchedulePattern {
  kOnSchedule,                // nothing needed correcting
  kLatePatients,              // arrival corrections only
  kUnpredictableAppointment,  // duration trouble concentrated in a few spots
  kBlockTimePlanning,         // duration trouble across much of the day
  kMixed,                     // several duration flips but not pervasive
};

std::string to_string(SchedulePattern pattern);

struct ClassifierConfig {
  double pervasive_share = 0.5;     // >= this share of duration flips
  double concentrated_share = 0.2;  // <= this share counts as isolated
};

struct DiagnosisAnnotation {
  double ap_share = 0.0;  // arrival flips / n
  double ae_share = 0.0;  // duration flips / n
  std::size_t ae_flips = 0;
  SchedulePattern pattern = SchedulePattern::kOnSchedule;
};

// Maps a minimal correction set onto the workflow story it tells.
DiagnosisAnnotation classify_diagnosis(const Diagnosis& diagnosis,
                                       const ProviderDay& day,
                                       const ClassifierConfig& config = {});

}  // namespace clinicdx

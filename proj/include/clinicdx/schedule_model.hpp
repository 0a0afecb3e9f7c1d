#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "clinicdx/datetime.hpp"

namespace clinicdx {

// One appointment as it was booked: block start and block length.
struct PlannedAppointment {
  Minutes scheduled_start = 0;
  Minutes scheduled_duration = 0;

  Minutes scheduled_end() const { return scheduled_start + scheduled_duration; }
  bool operator==(const PlannedAppointment&) const = default;
};

// The same appointment as it actually happened.
struct ObservedAppointment {
  Minutes arrival = 0;          // patient checked in at the clinic
  Minutes actual_start = 0;     // patient entered the exam room
  Minutes actual_duration = 0;  // room-in to room-out

  Minutes actual_end() const { return actual_start + actual_duration; }
  bool operator==(const ObservedAppointment&) const = default;
};

struct Appointment {
  PlannedAppointment planned;
  ObservedAppointment observed;
  bool operator==(const Appointment&) const = default;
};

// Everything one provider completed on one date, ordered by actual start
// time with non-overlapping service intervals (one patient at a time).
struct ProviderDay {
  std::string provider_id;
  Date date;
  std::vector<Appointment> appointments;

  std::size_t size() const { return appointments.size(); }
  bool operator==(const ProviderDay&) const = default;
};

// Per-appointment quantities derived from a day:
//   start_deviation     minutes the start slipped past the plan, >= 0
//   duration_deviation  actual minus planned duration, signed
//   end_time            minutes from midnight when the room was released
//   cycle_time          arrival to end, >= 0
//   cycle_deviation     cycle time minus planned duration, signed
struct DerivedTimeline {
  std::vector<Minutes> start_deviation;
  std::vector<Minutes> duration_deviation;
  std::vector<Minutes> end_time;
  std::vector<Minutes> cycle_time;
  std::vector<Minutes> cycle_deviation;
  bool operator==(const DerivedTimeline&) const = default;
};

struct InvariantViolation {
  std::string code;       // stable identifier, e.g. "sequential-service"
  std::size_t index = 0;  // offending appointment
  std::string message;
};

// Start slip per appointment: how late the patient arrived, or how far the
// previous appointment spilled past this one's scheduled start, whichever
// is larger; never negative.
std::vector<Minutes> compute_start_deviation(const ProviderDay& day);

// Actual minus planned duration per appointment; negative when the
// appointment ran short.
std::vector<Minutes> compute_duration_deviation(const ProviderDay& day);

DerivedTimeline compute_timeline(const ProviderDay& day);

// Checks every day and field invariant, returning the violations found.
// Never throws and never mutates; empty result means the day is valid.
std::vector<InvariantViolation> validate_day(const ProviderDay& day);

}  // namespace clinicdx

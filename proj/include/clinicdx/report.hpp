#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clinicdx/datetime.hpp"
#include "clinicdx/diagnosis.hpp"
#include "clinicdx/schedule_model.hpp"

namespace clinicdx {

// One successfully diagnosed provider-day, ready for aggregation.
struct DiagnosedDay {
  ProviderDay day;
  Diagnosis diagnosis;
};

struct ExcludedDay {
  std::string provider_id;
  Date date;
  std::size_t first_failing_index = 0;
  bool operator==(const ExcludedDay&) const = default;
};

struct ProviderAggregate {
  std::string provider_id;
  long long sum_delta_ap = 0;
  long long sum_delta_ae = 0;
  std::size_t clinic_days = 0;
  std::size_t patients_seen = 0;
  bool operator==(const ProviderAggregate&) const = default;
};

struct DateAggregate {
  Date date;
  long long sum_delta_ap = 0;
  long long sum_delta_ae = 0;
  std::size_t patients_seen = 0;
  std::size_t provider_count = 0;
  bool operator==(const DateAggregate&) const = default;
};

struct HalfAggregate {
  long long first_half_ap = 0;
  long long first_half_ae = 0;
  long long second_half_ap = 0;
  long long second_half_ae = 0;
  bool operator==(const HalfAggregate&) const = default;
};

// Rows ordered by patients_seen descending, provider_id ascending on ties.
std::vector<ProviderAggregate> aggregate_by_provider(
    std::span<const DiagnosedDay> days);

// Rows in calendar order.
std::vector<DateAggregate> aggregate_by_date(std::span<const DiagnosedDay> days);

// Splits each day down the middle — the first floor(n/2) appointments land
// in the first half, the rest (one extra when n is odd) in the second —
// and totals corrections on each side across all days.
HalfAggregate aggregate_by_half(std::span<const DiagnosedDay> days);

std::string provider_csv(const std::vector<ProviderAggregate>& rows);
std::string date_csv(const std::vector<DateAggregate>& rows);
std::string half_csv(const HalfAggregate& halves);
std::string exclusions_csv(const std::vector<ExcludedDay>& rows);

// One bar of the day-replay chart.
struct GanttAppointment {
  int index = 0;
  Minutes planned_start = 0;
  Minutes planned_end = 0;
  Minutes arrival = 0;
  Minutes observed_start = 0;
  Minutes observed_end = 0;
  Minutes revised_arrival = 0;
  Minutes revised_start = 0;
  Minutes revised_end = 0;
  bool flip_arrival = false;
  bool flip_duration = false;
  bool operator==(const GanttAppointment&) const = default;
};

struct GanttDoc {
  std::string provider_id;
  Date date;
  Minutes epsilon = 0;
  int objective = 0;
  std::vector<GanttAppointment> appointments;
  bool operator==(const GanttDoc&) const = default;
};

GanttDoc export_gantt(const ProviderDay& day, const Diagnosis& diagnosis);

// Serialization is stable: same document, same bytes.
std::string gantt_to_json(const GanttDoc& doc);
GanttDoc gantt_from_json(const std::string& text);

}  // namespace clinicdx

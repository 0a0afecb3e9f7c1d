#include "clinicdx/schedule_model.hpp"

#include <algorithm>
#include <sstream>

namespace clinicdx {

std::vector<Minutes> compute_start_deviation(const ProviderDay& day) {
  const auto& a = day.appointments;
  std::vector<Minutes> s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    Minutes since_arrival = a[i].observed.arrival - a[i].planned.scheduled_start;
    if (i == 0) {
      s[0] = std::max(0, since_arrival);
      continue;
    }
    Minutes spillover =
        a[i - 1].observed.actual_end() - a[i].planned.scheduled_start;
    s[i] = std::max({0, spillover, since_arrival});
  }
  return s;
}

std::vector<Minutes> compute_duration_deviation(const ProviderDay& day) {
  const auto& a = day.appointments;
  std::vector<Minutes> e(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    e[i] = a[i].observed.actual_duration - a[i].planned.scheduled_duration;
  }
  return e;
}

DerivedTimeline compute_timeline(const ProviderDay& day) {
  const auto& a = day.appointments;
  DerivedTimeline t;
  t.start_deviation = compute_start_deviation(day);
  t.duration_deviation = compute_duration_deviation(day);
  t.end_time.resize(a.size());
  t.cycle_time.resize(a.size());
  t.cycle_deviation.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    t.end_time[i] = a[i].observed.actual_start + a[i].planned.scheduled_duration +
                    t.duration_deviation[i];
    t.cycle_time[i] = t.end_time[i] - a[i].observed.arrival;
    t.cycle_deviation[i] = t.cycle_time[i] - a[i].planned.scheduled_duration;
  }
  return t;
}

namespace {

void add(std::vector<InvariantViolation>& out, std::string code,
         std::size_t index, std::string message) {
  out.push_back({std::move(code), index, std::move(message)});
}

std::string at_index(std::size_t i) {
  std::ostringstream os;
  os << "appointment " << i;
  return os.str();
}

}  // namespace

std::vector<InvariantViolation> validate_day(const ProviderDay& day) {
  std::vector<InvariantViolation> out;
  const auto& a = day.appointments;
  if (a.empty()) {
    add(out, "empty-day", 0, "day has no appointments");
    return out;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& p = a[i].planned;
    const auto& o = a[i].observed;
    if (p.scheduled_start < 0 || p.scheduled_start > kMinutesPerDay) {
      add(out, "planned-start-range", i,
          at_index(i) + ": scheduled start outside the day");
    }
    if (p.scheduled_duration < 0 || p.scheduled_duration > kMinutesPerDay) {
      add(out, "planned-duration-range", i,
          at_index(i) + ": scheduled duration outside the day");
    } else if (p.scheduled_start >= 0 && p.scheduled_end() > kMinutesPerDay) {
      add(out, "planned-crosses-midnight", i,
          at_index(i) + ": scheduled block runs past midnight");
    }
    if (o.arrival < 0 || o.arrival > kMinutesPerDay || o.actual_start < 0 ||
        o.actual_start > kMinutesPerDay || o.actual_duration < 0 ||
        o.actual_duration > kMinutesPerDay) {
      add(out, "observed-range", i,
          at_index(i) + ": observed times outside the day");
    } else if (o.actual_end() > kMinutesPerDay) {
      add(out, "observed-crosses-midnight", i,
          at_index(i) + ": observed service runs past midnight");
    }
    if (o.arrival > o.actual_start) {
      add(out, "arrival-after-room-in", i,
          at_index(i) + ": patient roomed before arriving");
    }
    if (i > 0 && a[i - 1].observed.actual_end() > o.actual_start) {
      add(out, "sequential-service", i,
          at_index(i) + ": service began before the previous patient left");
    }
  }
  return out;
}

}  // namespace clinicdx

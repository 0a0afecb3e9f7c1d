#include "clinicdx/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "clinicdx/errors.hpp"
#include "json.hpp"

namespace clinicdx {

std::vector<ProviderAggregate> aggregate_by_provider(
    std::span<const DiagnosedDay> days) {
  std::map<std::string, ProviderAggregate> acc;
  for (const auto& d : days) {
    auto& agg = acc[d.day.provider_id];
    agg.provider_id = d.day.provider_id;
    for (unsigned char b : d.diagnosis.changes.delta_ap) agg.sum_delta_ap += b;
    for (unsigned char b : d.diagnosis.changes.delta_ae) agg.sum_delta_ae += b;
    agg.clinic_days += 1;
    agg.patients_seen += d.day.size();
  }
  std::vector<ProviderAggregate> rows;
  rows.reserve(acc.size());
  for (auto& [id, agg] : acc) rows.push_back(std::move(agg));
  std::sort(rows.begin(), rows.end(),
            [](const ProviderAggregate& a, const ProviderAggregate& b) {
              if (a.patients_seen != b.patients_seen) {
                return a.patients_seen > b.patients_seen;
              }
              return a.provider_id < b.provider_id;
            });
  return rows;
}

std::vector<DateAggregate> aggregate_by_date(
    std::span<const DiagnosedDay> days) {
  std::map<Date, DateAggregate> acc;
  std::map<Date, std::set<std::string>> providers;
  for (const auto& d : days) {
    auto& agg = acc[d.day.date];
    agg.date = d.day.date;
    for (unsigned char b : d.diagnosis.changes.delta_ap) agg.sum_delta_ap += b;
    for (unsigned char b : d.diagnosis.changes.delta_ae) agg.sum_delta_ae += b;
    agg.patients_seen += d.day.size();
    providers[d.day.date].insert(d.day.provider_id);
  }
  std::vector<DateAggregate> rows;
  rows.reserve(acc.size());
  for (auto& [date, agg] : acc) {
    agg.provider_count = providers[date].size();
    rows.push_back(std::move(agg));
  }
  return rows;
}

HalfAggregate aggregate_by_half(std::span<const DiagnosedDay> days) {
  HalfAggregate halves;
  for (const auto& d : days) {
    const std::size_t n = d.day.size();
    const std::size_t cut = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
      if (i < cut) {
        halves.first_half_ap += d.diagnosis.changes.delta_ap[i];
        halves.first_half_ae += d.diagnosis.changes.delta_ae[i];
      } else {
        halves.second_half_ap += d.diagnosis.changes.delta_ap[i];
        halves.second_half_ae += d.diagnosis.changes.delta_ae[i];
      }
    }
  }
  return halves;
}

std::string provider_csv(const std::vector<ProviderAggregate>& rows) {
  std::ostringstream os;
  os << "provider_id,sum_delta_ap,sum_delta_ae,clinic_days,patients_seen\n";
  for (const auto& r : rows) {
    os << r.provider_id << ',' << r.sum_delta_ap << ',' << r.sum_delta_ae
       << ',' << r.clinic_days << ',' << r.patients_seen << '\n';
  }
  return os.str();
}

std::string date_csv(const std::vector<DateAggregate>& rows) {
  std::ostringstream os;
  os << "date,sum_delta_ap,sum_delta_ae,patients_seen,provider_count\n";
  for (const auto& r : rows) {
    os << r.date.to_string() << ',' << r.sum_delta_ap << ',' << r.sum_delta_ae
       << ',' << r.patients_seen << ',' << r.provider_count << '\n';
  }
  return os.str();
}

std::string half_csv(const HalfAggregate& halves) {
  std::ostringstream os;
  os << "half,sum_delta_ap,sum_delta_ae\n";
  os << "first," << halves.first_half_ap << ',' << halves.first_half_ae
     << '\n';
  os << "second," << halves.second_half_ap << ',' << halves.second_half_ae
     << '\n';
  return os.str();
}

std::string exclusions_csv(const std::vector<ExcludedDay>& rows) {
  std::ostringstream os;
  os << "provider_id,date,first_failing_index\n";
  for (const auto& r : rows) {
    os << r.provider_id << ',' << r.date.to_string() << ','
       << r.first_failing_index << '\n';
  }
  return os.str();
}

GanttDoc export_gantt(const ProviderDay& day, const Diagnosis& diagnosis) {
  GanttDoc doc;
  doc.provider_id = day.provider_id;
  doc.date = day.date;
  doc.epsilon = diagnosis.epsilon;
  doc.objective = diagnosis.objective;
  const auto revised_end = diagnosis.revised.revised_end();
  for (std::size_t i = 0; i < day.size(); ++i) {
    const auto& a = day.appointments[i];
    GanttAppointment g;
    g.index = static_cast<int>(i);
    g.planned_start = a.planned.scheduled_start;
    g.planned_end = a.planned.scheduled_end();
    g.arrival = a.observed.arrival;
    g.observed_start = a.observed.actual_start;
    g.observed_end = a.observed.actual_end();
    g.revised_arrival = diagnosis.revised.revised_arrival[i];
    g.revised_start = diagnosis.revised.revised_start[i];
    g.revised_end = revised_end[i];
    g.flip_arrival = diagnosis.changes.delta_ap[i] != 0;
    g.flip_duration = diagnosis.changes.delta_ae[i] != 0;
    doc.appointments.push_back(g);
  }
  return doc;
}

std::string gantt_to_json(const GanttDoc& doc) {
  nlohmann::ordered_json j;
  j["provider_id"] = doc.provider_id;
  j["date"] = doc.date.to_string();
  j["epsilon"] = doc.epsilon;
  j["objective"] = doc.objective;
  auto& apps = j["appointments"] = nlohmann::ordered_json::array();
  for (const auto& g : doc.appointments) {
    nlohmann::ordered_json a;
    a["index"] = g.index;
    a["planned_start"] = g.planned_start;
    a["planned_end"] = g.planned_end;
    a["arrival"] = g.arrival;
    a["observed_start"] = g.observed_start;
    a["observed_end"] = g.observed_end;
    a["revised_arrival"] = g.revised_arrival;
    a["revised_start"] = g.revised_start;
    a["revised_end"] = g.revised_end;
    a["flip_arrival"] = g.flip_arrival;
    a["flip_duration"] = g.flip_duration;
    apps.push_back(std::move(a));
  }
  return j.dump(2) + "\n";
}

GanttDoc gantt_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    GanttDoc doc;
    doc.provider_id = j.at("provider_id").get<std::string>();
    const auto date = Date::parse(j.at("date").get<std::string>());
    if (!date) throw Error("bad date in chart document");
    doc.date = *date;
    doc.epsilon = j.at("epsilon").get<Minutes>();
    doc.objective = j.at("objective").get<int>();
    for (const auto& a : j.at("appointments")) {
      GanttAppointment g;
      g.index = a.at("index").get<int>();
      g.planned_start = a.at("planned_start").get<Minutes>();
      g.planned_end = a.at("planned_end").get<Minutes>();
      g.arrival = a.at("arrival").get<Minutes>();
      g.observed_start = a.at("observed_start").get<Minutes>();
      g.observed_end = a.at("observed_end").get<Minutes>();
      g.revised_arrival = a.at("revised_arrival").get<Minutes>();
      g.revised_start = a.at("revised_start").get<Minutes>();
      g.revised_end = a.at("revised_end").get<Minutes>();
      g.flip_arrival = a.at("flip_arrival").get<bool>();
      g.flip_duration = a.at("flip_duration").get<bool>();
      doc.appointments.push_back(g);
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad chart document: ") + e.what());
  }
}

}  // namespace clinicdx

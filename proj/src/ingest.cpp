#include "clinicdx/ingest.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <istream>
#include <iterator>
#include <map>
#include <sstream>
#include <string_view>
#include <utility>

namespace clinicdx {
namespace {

constexpr std::array<const char*, 10> kColumns = {
    "provider_id",  "date",         "scheduled_start",
    "scheduled_duration_min",       "arrival_sys1",
    "arrival_sys2", "roomin_sys1",  "roomin_sys2",
    "roomout_sys1", "roomout_sys2"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(begin)));
      return out;
    }
    out.push_back(trim(line.substr(begin, comma - begin)));
    begin = comma + 1;
  }
}

[[noreturn]] void fail(IngestError::Code code, int row, std::string column,
                       const std::string& message) {
  throw IngestError(code, row, std::move(column), message);
}

std::string finding_code(IngestError::Code code) {
  switch (code) {
    case IngestError::Code::kSchema:
      return "schema";
    case IngestError::Code::kParse:
      return "parse";
    case IngestError::Code::kMissingCheckpoint:
      return "missing-checkpoint";
    case IngestError::Code::kOrderingViolation:
      return "ordering-violation";
    case IngestError::Code::kNestedBeyondRepair:
      return "nested-beyond-repair";
    case IngestError::Code::kInvalidPlan:
      return "invalid-plan";
  }
  return "unknown";
}

std::string group_context(const std::string& provider_id, const Date& date) {
  return provider_id + "/" + date.to_string();
}

struct BuiltDay {
  ProviderDay day;
  std::vector<int> source_rows;  // aligned with day.appointments
};

// Groups by provider and date, sorts each group by room time, repairs
// overlaps, and applies the minimum-patients filter. On a repair failure
// the group is dropped when collecting findings, otherwise the error
// propagates.
std::vector<BuiltDay> group_and_repair(std::vector<MergedRecord> records,
                                       std::size_t min_patients,
                                       IngestReport* report) {
  std::map<std::pair<std::string, Date>, std::vector<MergedRecord>> groups;
  for (auto& r : records) {
    groups[{r.provider_id, r.date}].push_back(std::move(r));
  }

  std::vector<BuiltDay> out;
  for (auto& [key, group] : groups) {
    const std::string context = group_context(key.first, key.second);
    std::sort(group.begin(), group.end(),
              [](const MergedRecord& a, const MergedRecord& b) {
                return std::tie(a.room_in, a.room_out, a.source_row) <
                       std::tie(b.room_in, b.room_out, b.source_row);
              });
    std::vector<MergedRecord> resolved;
    try {
      resolved = resolve_overlaps(group);
    } catch (const IngestError& e) {
      if (!report) throw;
      report->records_dropped += group.size();
      report->findings.push_back({IngestReport::Severity::kViolation,
                                  finding_code(e.code()), e.row(), context,
                                  e.what()});
      continue;
    }
    if (report) {
      for (std::size_t i = 0; i + 1 < group.size(); ++i) {
        if (resolved[i].room_out == group[i].room_out) continue;
        ++report->overlap_splits;
        std::ostringstream os;
        os << "rows " << resolved[i].source_row << " and "
           << resolved[i + 1].source_row
           << " overlapped in the exam room; boundary moved to "
           << format_clock(resolved[i].room_out);
        report->findings.push_back({IngestReport::Severity::kInfo,
                                    "overlap-split",
                                    resolved[i + 1].source_row, context,
                                    os.str()});
      }
    }
    if (resolved.size() < min_patients) {
      if (report) {
        ++report->days_dropped_min_patients;
        std::ostringstream os;
        os << "only " << resolved.size() << " appointments, need "
           << min_patients;
        report->findings.push_back({IngestReport::Severity::kInfo,
                                    "below-min-patients", 0, context,
                                    os.str()});
      }
      continue;
    }
    BuiltDay built;
    built.day.provider_id = key.first;
    built.day.date = key.second;
    for (const auto& m : resolved) {
      Appointment a;
      a.planned = {m.scheduled_start, m.scheduled_duration};
      a.observed = {m.arrival, m.room_in, m.room_out - m.room_in};
      built.day.appointments.push_back(a);
      built.source_rows.push_back(m.source_row);
    }
    out.push_back(std::move(built));
  }
  return out;
}

IngestError::Code error_code_for(const InvariantViolation& v) {
  if (v.code.rfind("planned-", 0) == 0) {
    return IngestError::Code::kInvalidPlan;
  }
  return IngestError::Code::kOrderingViolation;
}

}  // namespace

std::size_t IngestReport::violation_count() const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
        return f.severity == Severity::kViolation;
      }));
}

std::vector<RawAppointmentRecord> parse_csv(std::istream& in) {
  std::vector<RawAppointmentRecord> records;
  std::array<int, kColumns.size()> position{};
  bool have_header = false;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view = line;
    if (row == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);

    if (!have_header) {
      position.fill(-1);
      for (std::size_t pos = 0; pos < fields.size(); ++pos) {
        const auto it =
            std::find(kColumns.begin(), kColumns.end(), fields[pos]);
        if (it == kColumns.end()) {
          fail(IngestError::Code::kSchema, row, std::string(fields[pos]),
               "unknown column '" + std::string(fields[pos]) + "'");
        }
        const auto slot = static_cast<std::size_t>(it - kColumns.begin());
        if (position[slot] != -1) {
          fail(IngestError::Code::kSchema, row, kColumns[slot],
               std::string("duplicate column '") + kColumns[slot] + "'");
        }
        position[slot] = static_cast<int>(pos);
      }
      for (std::size_t slot = 0; slot < kColumns.size(); ++slot) {
        if (position[slot] == -1) {
          fail(IngestError::Code::kSchema, row, kColumns[slot],
               std::string("missing column '") + kColumns[slot] + "'");
        }
      }
      have_header = true;
      continue;
    }

    if (fields.size() != kColumns.size()) {
      std::ostringstream os;
      os << "expected " << kColumns.size() << " fields, got " << fields.size();
      fail(IngestError::Code::kParse, row, "", os.str());
    }
    const auto cell = [&](std::size_t slot) {
      return fields[static_cast<std::size_t>(position[slot])];
    };
    const auto required_clock = [&](std::size_t slot) {
      const auto text = cell(slot);
      const auto parsed = parse_clock(text);
      if (!parsed) {
        fail(IngestError::Code::kParse, row, kColumns[slot],
             std::string("bad time '") + std::string(text) + "' in " +
                 kColumns[slot]);
      }
      return *parsed;
    };
    const auto optional_clock = [&](std::size_t slot) -> std::optional<Minutes> {
      const auto text = cell(slot);
      if (text.empty()) return std::nullopt;
      const auto parsed = parse_clock(text);
      if (!parsed) {
        fail(IngestError::Code::kParse, row, kColumns[slot],
             std::string("bad time '") + std::string(text) + "' in " +
                 kColumns[slot]);
      }
      return parsed;
    };

    RawAppointmentRecord r;
    r.source_row = row;
    r.provider_id = std::string(cell(0));
    if (r.provider_id.empty()) {
      fail(IngestError::Code::kParse, row, "provider_id",
           "provider_id is empty");
    }
    const auto date = Date::parse(cell(1));
    if (!date) {
      fail(IngestError::Code::kParse, row, "date",
           "bad date '" + std::string(cell(1)) + "'");
    }
    r.date = *date;
    r.scheduled_start = required_clock(2);
    const auto duration = parse_nonneg_int(cell(3));
    if (!duration) {
      fail(IngestError::Code::kParse, row, "scheduled_duration_min",
           "bad duration '" + std::string(cell(3)) + "'");
    }
    r.scheduled_duration = *duration;
    r.arrival_sys1 = optional_clock(4);
    r.arrival_sys2 = optional_clock(5);
    r.roomin_sys1 = optional_clock(6);
    r.roomin_sys2 = optional_clock(7);
    r.roomout_sys1 = optional_clock(8);
    r.roomout_sys2 = optional_clock(9);
    records.push_back(std::move(r));
  }
  if (!have_header) {
    fail(IngestError::Code::kSchema, row, "", "input has no header row");
  }
  return records;
}

MergedRecord merge_timestamps(const RawAppointmentRecord& raw) {
  const auto pick = [&](std::optional<Minutes> s1, std::optional<Minutes> s2,
                        const char* name) -> Minutes {
    if (s1 && s2) return std::min(*s1, *s2);
    if (s1) return *s1;
    if (s2) return *s2;
    fail(IngestError::Code::kMissingCheckpoint, raw.source_row, name,
         std::string("no ") + name + " timestamp in either system");
  };
  MergedRecord m;
  m.provider_id = raw.provider_id;
  m.date = raw.date;
  m.scheduled_start = raw.scheduled_start;
  m.scheduled_duration = raw.scheduled_duration;
  m.arrival = pick(raw.arrival_sys1, raw.arrival_sys2, "arrival");
  m.room_in = pick(raw.roomin_sys1, raw.roomin_sys2, "roomin");
  m.room_out = pick(raw.roomout_sys1, raw.roomout_sys2, "roomout");
  m.source_row = raw.source_row;
  if (m.arrival > m.room_in) {
    fail(IngestError::Code::kOrderingViolation, raw.source_row, "roomin",
         "roomed at " + format_clock(m.room_in) + " before arriving at " +
             format_clock(m.arrival));
  }
  if (m.room_in > m.room_out) {
    fail(IngestError::Code::kOrderingViolation, raw.source_row, "roomout",
         "left the room at " + format_clock(m.room_out) +
             " before entering at " + format_clock(m.room_in));
  }
  return m;
}

std::vector<MergedRecord> resolve_overlaps(std::vector<MergedRecord> records) {
  assert(std::is_sorted(records.begin(), records.end(),
                        [](const MergedRecord& a, const MergedRecord& b) {
                          return a.room_in < b.room_in;
                        }));
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    auto& cur = records[i];
    auto& next = records[i + 1];
    if (cur.room_out <= next.room_in) continue;
    const Minutes mid = (next.room_in + cur.room_out) / 2;
    cur.room_out = mid;
    next.room_in = mid;
    if (cur.room_in >= cur.room_out) {
      fail(IngestError::Code::kNestedBeyondRepair, cur.source_row, "",
           "record is nested inside its neighbour; nothing left after the "
           "overlap split");
    }
    if (next.room_in >= next.room_out) {
      fail(IngestError::Code::kNestedBeyondRepair, next.source_row, "",
           "record is nested inside its neighbour; nothing left after the "
           "overlap split");
    }
  }
  return records;
}

std::vector<ProviderDay> build_provider_days(std::vector<MergedRecord> records,
                                             std::size_t min_patients) {
  auto built = group_and_repair(std::move(records), min_patients, nullptr);
  std::vector<ProviderDay> out;
  out.reserve(built.size());
  for (auto& b : built) out.push_back(std::move(b.day));
  return out;
}

std::vector<ProviderDay> load_provider_days(std::istream& in,
                                            std::size_t min_patients,
                                            IngestReport* report) {
  auto raw = parse_csv(in);
  if (report) report->records_read = raw.size();

  std::vector<MergedRecord> merged;
  merged.reserve(raw.size());
  for (const auto& r : raw) {
    try {
      merged.push_back(merge_timestamps(r));
    } catch (const IngestError& e) {
      if (!report) throw;
      ++report->records_dropped;
      report->findings.push_back({IngestReport::Severity::kViolation,
                                  finding_code(e.code()), e.row(),
                                  group_context(r.provider_id, r.date),
                                  e.what()});
    }
  }

  auto built = group_and_repair(std::move(merged), min_patients, report);

  std::vector<ProviderDay> out;
  for (auto& b : built) {
    const auto violations = validate_day(b.day);
    if (violations.empty()) {
      out.push_back(std::move(b.day));
      continue;
    }
    const std::string context =
        group_context(b.day.provider_id, b.day.date);
    if (!report) {
      const auto& v = violations.front();
      const int source_row = v.index < b.source_rows.size()
                                 ? b.source_rows[v.index]
                                 : 0;
      fail(error_code_for(v), source_row, "", v.message + " (" + context + ")");
    }
    report->records_dropped += b.day.size();
    for (const auto& v : violations) {
      const int source_row =
          v.index < b.source_rows.size() ? b.source_rows[v.index] : 0;
      report->findings.push_back({IngestReport::Severity::kViolation, v.code,
                                  source_row, context, v.message});
    }
  }
  if (report) report->days_built = out.size();
  return out;
}

}  // namespace clinicdx

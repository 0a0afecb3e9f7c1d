#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clinicdx/datetime.hpp"
#include "clinicdx/errors.hpp"
#include "clinicdx/schedule_model.hpp"

namespace clinicdx {

// One CSV row as parsed: the plan plus each checkpoint as reported by the
// two timestamp systems, either of which may be absent.
struct RawAppointmentRecord {
  std::string provider_id;
  Date date;
  Minutes scheduled_start = 0;
  Minutes scheduled_duration = 0;
  std::optional<Minutes> arrival_sys1;
  std::optional<Minutes> arrival_sys2;
  std::optional<Minutes> roomin_sys1;
  std::optional<Minutes> roomin_sys2;
  std::optional<Minutes> roomout_sys1;
  std::optional<Minutes> roomout_sys2;
  int source_row = 0;  // 1-based line in the CSV, header = 1
  bool operator==(const RawAppointmentRecord&) const = default;
};

// A row after the two systems have been reconciled to one timestamp per
// checkpoint.
struct MergedRecord {
  std::string provider_id;
  Date date;
  Minutes scheduled_start = 0;
  Minutes scheduled_duration = 0;
  Minutes arrival = 0;
  Minutes room_in = 0;
  Minutes room_out = 0;
  int source_row = 0;
  bool operator==(const MergedRecord&) const = default;
};

class IngestError : public Error {
 public:
  enum class Code {
    kSchema,             // header missing/duplicated/unknown columns
    kParse,              // a cell or row that does not scan
    kMissingCheckpoint,  // both systems blank for a checkpoint
    kOrderingViolation,  // checkpoints out of order within a record
    kNestedBeyondRepair, // record swallowed whole by its neighbours
    kInvalidPlan,        // scheduled fields out of range
  };

  IngestError(Code code, int row, std::string column, const std::string& what)
      : Error(what), code_(code), row_(row), column_(std::move(column)) {}

  Code code() const { return code_; }
  int row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  Code code_;
  int row_;
  std::string column_;
};

// Reads the whole CSV. Header must contain exactly the ten known columns,
// in any order. Throws IngestError on any schema or parse problem.
std::vector<RawAppointmentRecord> parse_csv(std::istream& in);

// Reconciles the two systems: each checkpoint becomes the earlier of the
// two reported stamps. Throws kMissingCheckpoint when both are blank and
// kOrderingViolation when arrival > room-in or room-in > room-out.
MergedRecord merge_timestamps(const RawAppointmentRecord& raw);

// Fixes overlapping room intervals within one provider-day by moving each
// boundary to the midpoint of the overlap (earlier record keeps the floor).
// Records must already be sorted by room_in. Throws kNestedBeyondRepair
// when a record would be squeezed to nothing or less.
std::vector<MergedRecord> resolve_overlaps(std::vector<MergedRecord> records);

inline constexpr std::size_t kDefaultMinPatients = 5;

// Groups merged records into provider-days (sorted by provider then date),
// resolving overlaps within each group and dropping days with fewer than
// `min_patients` appointments.
std::vector<ProviderDay> build_provider_days(
    std::vector<MergedRecord> records,
    std::size_t min_patients = kDefaultMinPatients);

struct IngestReport {
  enum class Severity { kInfo, kViolation };

  struct Finding {
    Severity severity = Severity::kViolation;
    std::string code;     // stable identifier, e.g. "overlap-split"
    int row = 0;          // source row when known, else 0
    std::string context;  // "<provider>/<date>" when known
    std::string message;
  };

  std::vector<Finding> findings;
  std::size_t records_read = 0;
  std::size_t records_dropped = 0;
  std::size_t days_built = 0;
  std::size_t days_dropped_min_patients = 0;
  std::size_t overlap_splits = 0;

  std::size_t violation_count() const;
};

// End-to-end ingest: parse, merge, group, repair, filter, validate.
// With `report` null any defect throws (strict mode). With a report the
// offending record or day is dropped, the finding is recorded, and the
// rest of the file still loads.
std::vector<ProviderDay> load_provider_days(
    std::istream& in, std::size_t min_patients = kDefaultMinPatients,
    IngestReport* report = nullptr);

}  // namespace clinicdx

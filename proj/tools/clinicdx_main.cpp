#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "clinicdx/datetime.hpp"
#include "clinicdx/diagnosis.hpp"
#include "clinicdx/errors.hpp"
#include "clinicdx/ingest.hpp"
#include "clinicdx/report.hpp"
#include "clinicdx/schedule_model.hpp"

namespace fs = std::filesystem;
using namespace clinicdx;

namespace {

// Exhaustive cross-checking stays affordable up to this day size.
constexpr std::size_t kOracleCheckMaxAppointments = 10;

struct RunConfig {
  std::string input_path;
  std::string output_dir;
  int epsilon = 0;
  std::size_t min_patients = kDefaultMinPatients;
  bool oracle_check = false;
  std::vector<std::string> report_set = {"provider", "date", "half", "gantt"};
};

// Writes via a temp file and renames so readers never see a partial file.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string sanitize_for_filename(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

struct PipelineResult {
  std::vector<DiagnosedDay> diagnosed;
  std::vector<ProviderDay> infeasible_days;  // aligned with excluded
  std::vector<ExcludedDay> excluded;
};

PipelineResult run_pipeline(const RunConfig& cfg) {
  std::ifstream in(cfg.input_path, std::ios::binary);
  if (!in) throw Error("cannot open " + cfg.input_path);
  auto days = load_provider_days(in, cfg.min_patients, nullptr);
  PipelineResult result;
  for (auto& day : days) {
    auto outcome = diagnose(day, cfg.epsilon);
    if (auto* d = std::get_if<Diagnosis>(&outcome)) {
      result.diagnosed.push_back({std::move(day), std::move(*d)});
    } else {
      const auto& inf = std::get<InfeasibleDay>(outcome);
      result.excluded.push_back(
          {day.provider_id, day.date, inf.first_failing_index});
      result.infeasible_days.push_back(std::move(day));
    }
  }
  return result;
}

std::size_t write_gantt_files(const PipelineResult& result,
                              const fs::path& out) {
  std::size_t charts = 0;
  for (const auto& d : result.diagnosed) {
    const auto doc = export_gantt(d.day, d.diagnosis);
    const std::string name = "gantt_" +
                             sanitize_for_filename(d.day.provider_id) + "_" +
                             d.day.date.to_string() + ".json";
    write_file_atomic(out / name, gantt_to_json(doc));
    ++charts;
  }
  return charts;
}

int cmd_validate(const RunConfig& cfg) {
  std::ifstream in(cfg.input_path, std::ios::binary);
  if (!in) throw Error("cannot open " + cfg.input_path);
  IngestReport report;
  load_provider_days(in, cfg.min_patients, &report);
  for (const auto& f : report.findings) {
    std::cout << (f.severity == IngestReport::Severity::kViolation
                      ? "[violation] "
                      : "[info] ");
    if (f.row > 0) std::cout << "row " << f.row << ' ';
    if (!f.context.empty()) std::cout << f.context << ' ';
    std::cout << f.code << ": " << f.message << '\n';
  }
  std::cout << report.days_built << " days built from " << report.records_read
            << " records";
  if (report.records_dropped > 0) {
    std::cout << " (" << report.records_dropped << " records dropped)";
  }
  std::cout << '\n';
  std::cout << report.violation_count() << " violations\n";
  return report.violation_count() > 0 ? 2 : 0;
}

int cmd_diagnose(const RunConfig& cfg) {
  auto result = run_pipeline(cfg);
  fs::create_directories(cfg.output_dir);

  long long sum_ap = 0;
  long long sum_ae = 0;
  for (const auto& d : result.diagnosed) {
    for (unsigned char b : d.diagnosis.changes.delta_ap) sum_ap += b;
    for (unsigned char b : d.diagnosis.changes.delta_ae) sum_ae += b;
  }

  std::string oracle_status = "skipped";
  std::size_t oracle_checked = 0;
  std::vector<std::string> mismatches;
  if (cfg.oracle_check) {
    for (const auto& d : result.diagnosed) {
      if (d.day.size() > kOracleCheckMaxAppointments) continue;
      const auto ref = brute_force_diagnose(d.day, cfg.epsilon);
      ++oracle_checked;
      const auto* rd = std::get_if<Diagnosis>(&ref);
      if (!rd || rd->changes != d.diagnosis.changes ||
          rd->objective != d.diagnosis.objective) {
        mismatches.push_back(d.day.provider_id + "/" +
                             d.day.date.to_string());
      }
    }
    for (std::size_t i = 0; i < result.infeasible_days.size(); ++i) {
      const auto& day = result.infeasible_days[i];
      if (day.size() > kOracleCheckMaxAppointments) continue;
      const auto ref = brute_force_diagnose(day, cfg.epsilon);
      ++oracle_checked;
      const auto* ri = std::get_if<InfeasibleDay>(&ref);
      if (!ri ||
          ri->first_failing_index != result.excluded[i].first_failing_index) {
        mismatches.push_back(day.provider_id + "/" + day.date.to_string());
      }
    }
    if (oracle_checked > 0) {
      oracle_status = mismatches.empty() ? "agree" : "mismatch";
    }
  }

  nlohmann::ordered_json manifest;
  manifest["epsilon"] = cfg.epsilon;
  manifest["min_patients"] = cfg.min_patients;
  manifest["diagnosed_days"] = result.diagnosed.size();
  manifest["infeasible_days"] = result.excluded.size();
  manifest["sum_delta_ap"] = sum_ap;
  manifest["sum_delta_ae"] = sum_ae;
  manifest["oracle"] = oracle_status;
  manifest["oracle_checked_days"] = oracle_checked;
  auto& days = manifest["days"] = nlohmann::ordered_json::array();
  for (const auto& d : result.diagnosed) {
    long long day_ap = 0;
    long long day_ae = 0;
    for (unsigned char b : d.diagnosis.changes.delta_ap) day_ap += b;
    for (unsigned char b : d.diagnosis.changes.delta_ae) day_ae += b;
    const auto note = classify_diagnosis(d.diagnosis, d.day);
    nlohmann::ordered_json j;
    j["provider_id"] = d.day.provider_id;
    j["date"] = d.day.date.to_string();
    j["appointments"] = d.day.size();
    j["objective"] = d.diagnosis.objective;
    j["sum_delta_ap"] = day_ap;
    j["sum_delta_ae"] = day_ae;
    j["pattern"] = to_string(note.pattern);
    days.push_back(std::move(j));
  }
  auto& exclusions = manifest["exclusions"] = nlohmann::ordered_json::array();
  for (const auto& e : result.excluded) {
    nlohmann::ordered_json j;
    j["provider_id"] = e.provider_id;
    j["date"] = e.date.to_string();
    j["first_failing_index"] = e.first_failing_index;
    exclusions.push_back(std::move(j));
  }

  const fs::path out(cfg.output_dir);
  const std::size_t charts = write_gantt_files(result, out);
  write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  write_file_atomic(out / "exclusions.csv", exclusions_csv(result.excluded));

  std::cout << "diagnosed " << result.diagnosed.size() << " days, "
            << result.excluded.size() << " infeasible\n";
  std::cout << "corrections: " << sum_ap << " arrivals, " << sum_ae
            << " durations\n";
  if (cfg.oracle_check) {
    std::cout << "oracle: " << oracle_status << " (" << oracle_checked
              << " days checked)\n";
  }
  std::cout << "wrote manifest.json, exclusions.csv and " << charts
            << " charts in " << out.string() << '\n';

  if (!mismatches.empty()) {
    for (const auto& m : mismatches) {
      std::cerr << "oracle mismatch on " << m << '\n';
    }
    return 1;
  }
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  auto result = run_pipeline(cfg);
  fs::create_directories(cfg.output_dir);
  const fs::path out(cfg.output_dir);
  const std::span<const DiagnosedDay> days{result.diagnosed};
  const auto selected = [&](const char* name) {
    return std::find(cfg.report_set.begin(), cfg.report_set.end(), name) !=
           cfg.report_set.end();
  };

  std::vector<std::string> written;
  if (selected("provider")) {
    write_file_atomic(out / "by_provider.csv",
                      provider_csv(aggregate_by_provider(days)));
    written.push_back("by_provider.csv");
  }
  if (selected("date")) {
    write_file_atomic(out / "by_date.csv", date_csv(aggregate_by_date(days)));
    written.push_back("by_date.csv");
  }
  if (selected("half")) {
    write_file_atomic(out / "by_half.csv", half_csv(aggregate_by_half(days)));
    written.push_back("by_half.csv");
  }
  std::size_t charts = 0;
  if (selected("gantt")) {
    charts = write_gantt_files(result, out);
  }
  write_file_atomic(out / "exclusions.csv", exclusions_csv(result.excluded));
  written.push_back("exclusions.csv");

  std::cout << "reported on " << result.diagnosed.size() << " days ("
            << result.excluded.size() << " excluded as infeasible)\n";
  std::cout << "wrote";
  for (const auto& w : written) std::cout << ' ' << w;
  if (selected("gantt")) std::cout << " and " << charts << " charts";
  std::cout << " in " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Replay clinic schedules and find the fewest corrections that "
               "put every appointment back on plan"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand(
      "validate", "Check an export for structural problems");
  auto* diagnose = app.add_subcommand(
      "diagnose", "Compute minimal correction sets per provider-day");
  auto* report = app.add_subcommand(
      "report", "Write aggregate tables and per-day charts");

  for (auto* cmd : {validate, diagnose, report}) {
    cmd->add_option("--input", cfg.input_path, "appointment CSV")->required();
    cmd->add_option("--min-patients", cfg.min_patients,
                    "drop days with fewer appointments (at least 1)")
        ->check(CLI::PositiveNumber);
  }
  for (auto* cmd : {diagnose, report}) {
    cmd->add_option("--out", cfg.output_dir, "output directory")->required();
    cmd->add_option("--epsilon", cfg.epsilon,
                    "on-schedule tolerance in minutes")
        ->check(CLI::NonNegativeNumber);
  }
  diagnose->add_flag("--oracle-check", cfg.oracle_check,
                     "cross-check small days against exhaustive search");
  report->add_option("--reports", cfg.report_set, "which outputs to write")
      ->delimiter(',')
      ->check(CLI::IsMember({"provider", "date", "half", "gantt"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(cfg);
    if (app.got_subcommand(diagnose)) return cmd_diagnose(cfg);
    return cmd_report(cfg);
  } catch (const IngestError& e) {
    std::cerr << "error: ";
    if (e.row() > 0) std::cerr << "row " << e.row() << ": ";
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "clinicdx/datetime.hpp"
#include "clinicdx/report.hpp"
#include "clinicdx/schedule_model.hpp"
#include "testutil.hpp"

using namespace clinicdx;
namespace fs = std::filesystem;
using testutil::run_cli;
using testutil::TempDir;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::vector<ProviderDay> clinic_days(std::uint32_t seed, int providers,
                                     int dates, int appts) {
  testutil::Rng rng(seed);
  std::vector<ProviderDay> days;
  for (int p = 0; p < providers; ++p) {
    for (int d = 0; d < dates; ++d) {
      auto day = testutil::random_day(rng, appts, true);
      day.provider_id = std::string("doc") + char('A' + p);
      day.date = Date{2026, 3, 2 + d};
      days.push_back(std::move(day));
    }
  }
  return days;
}

nlohmann::json read_manifest(const fs::path& dir) {
  return nlohmann::json::parse(testutil::read_file(dir / "manifest.json"));
}

}  // namespace

TEST_CASE("validate passes a clean export") {
  TempDir tmp;
  const auto csv = tmp.path() / "clean.csv";
  testutil::write_file(csv, testutil::days_to_csv(clinic_days(1, 2, 2, 5)));
  const auto r = run_cli({"validate", "--input", csv.string()}, tmp.path());
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "4 days built from 20 records"));
  CHECK(contains(r.output, "0 violations"));
  CHECK_FALSE(contains(r.output, "[violation]"));
}

TEST_CASE("validate reports room overlaps as informational repairs") {
  TempDir tmp;
  const auto csv = tmp.path() / "overlap.csv";
  std::string text = testutil::csv_header();
  text += "P1,2026-03-02,09:00,30,09:00,,09:00,,09:40,\n";
  text += "P1,2026-03-02,09:30,30,09:30,,09:30,,10:00,\n";
  testutil::write_file(csv, text);
  const auto r = run_cli(
      {"validate", "--input", csv.string(), "--min-patients", "1"},
      tmp.path());
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "[info]"));
  CHECK(contains(r.output, "overlap-split"));
  CHECK(contains(r.output, "boundary moved to 09:35"));
  CHECK(contains(r.output, "1 days built from 2 records"));
  CHECK(contains(r.output, "0 violations"));
}

TEST_CASE("validate flags impossible stamp order and exits 2") {
  TempDir tmp;
  const auto csv = tmp.path() / "order.csv";
  std::string text = testutil::csv_header();
  text += "P1,2026-03-02,09:00,30,09:10,,09:05,,09:40,\n";
  testutil::write_file(csv, text);
  const auto r = run_cli(
      {"validate", "--input", csv.string(), "--min-patients", "1"},
      tmp.path());
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "[violation] row 2"));
  CHECK(contains(r.output, "ordering-violation"));
  CHECK(contains(r.output, "1 violations"));
  CHECK(contains(r.output, "0 days built from 1 records"));
}

TEST_CASE("a missing column is fatal even for validate") {
  TempDir tmp;
  const auto csv = tmp.path() / "schema.csv";
  std::string text =
      "provider_id,date,scheduled_start,scheduled_duration_min,"
      "arrival_sys1,arrival_sys2,roomin_sys1,roomin_sys2,roomout_sys1\n";
  text += "P1,2026-03-02,09:00,30,09:00,,09:00,,09:40\n";
  testutil::write_file(csv, text);
  const auto r = run_cli({"validate", "--input", csv.string()}, tmp.path());
  CHECK(r.exit_code == 1);
  CHECK(contains(r.output, "error:"));
  CHECK(contains(r.output, "roomout_sys2"));
}

TEST_CASE("an unparseable cell is fatal even for validate") {
  TempDir tmp;
  const auto csv = tmp.path() / "parse.csv";
  std::string text = testutil::csv_header();
  text += "P1,2026-03-02,9:00am,30,08:55,,09:02,,09:31,\n";
  testutil::write_file(csv, text);
  const auto r = run_cli({"validate", "--input", csv.string()}, tmp.path());
  CHECK(r.exit_code == 1);
  CHECK(contains(r.output, "error: row 2"));
}

TEST_CASE("a missing input file is reported cleanly") {
  TempDir tmp;
  const auto r = run_cli(
      {"validate", "--input", (tmp.path() / "nope.csv").string()}, tmp.path());
  CHECK(r.exit_code == 1);
  CHECK(contains(r.output, "cannot open"));
}

TEST_CASE("diagnose writes a manifest, charts, and an exclusion table") {
  TempDir tmp;
  const auto csv = tmp.path() / "clinic.csv";
  const auto days = clinic_days(7, 1, 2, 5);
  testutil::write_file(csv, testutil::days_to_csv(days));
  const auto out = tmp.path() / "out";
  const auto r = run_cli({"diagnose", "--input", csv.string(), "--out",
                          out.string(), "--min-patients", "1"},
                         tmp.path());
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "diagnosed 2 days, 0 infeasible"));

  REQUIRE(fs::exists(out / "manifest.json"));
  REQUIRE(fs::exists(out / "exclusions.csv"));
  REQUIRE(fs::exists(out / "gantt_docA_2026-03-02.json"));
  REQUIRE(fs::exists(out / "gantt_docA_2026-03-03.json"));

  const auto manifest = read_manifest(out);
  CHECK(manifest.at("epsilon") == 0);
  CHECK(manifest.at("min_patients") == 1);
  CHECK(manifest.at("diagnosed_days") == 2);
  CHECK(manifest.at("infeasible_days") == 0);
  CHECK(manifest.at("oracle") == "skipped");
  REQUIRE(manifest.at("days").size() == 2);
  long long day_ap = 0;
  long long day_ae = 0;
  for (const auto& d : manifest.at("days")) {
    CHECK(d.at("provider_id") == "docA");
    CHECK(d.at("appointments") == 5);
    CHECK(d.at("objective") ==
          d.at("sum_delta_ap").get<long long>() +
              d.at("sum_delta_ae").get<long long>());
    CHECK(d.contains("pattern"));
    day_ap += d.at("sum_delta_ap").get<long long>();
    day_ae += d.at("sum_delta_ae").get<long long>();
  }
  CHECK(manifest.at("sum_delta_ap") == day_ap);
  CHECK(manifest.at("sum_delta_ae") == day_ae);
  CHECK(manifest.at("exclusions").empty());
  CHECK(testutil::read_file(out / "exclusions.csv") ==
        "provider_id,date,first_failing_index\n");

  const auto doc = gantt_from_json(
      testutil::read_file(out / "gantt_docA_2026-03-02.json"));
  CHECK(doc.provider_id == "docA");
  CHECK(doc.date == Date{2026, 3, 2});
  CHECK(doc.appointments.size() == 5);
}

TEST_CASE("diagnose can cross-check itself against exhaustive search") {
  TempDir tmp;
  const auto csv = tmp.path() / "clinic.csv";
  testutil::write_file(csv, testutil::days_to_csv(clinic_days(11, 2, 1, 6)));
  const auto out = tmp.path() / "out";
  const auto r = run_cli({"diagnose", "--input", csv.string(), "--out",
                          out.string(), "--min-patients", "1",
                          "--oracle-check"},
                         tmp.path());
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "oracle: agree"));
  const auto manifest = read_manifest(out);
  CHECK(manifest.at("oracle") == "agree");
  CHECK(manifest.at("oracle_checked_days") == 2);
}

TEST_CASE("days that cannot be put on schedule are excluded, not fatal") {
  TempDir tmp;
  std::vector<ProviderDay> days;
  // The second appointment is booked before the first can possibly finish,
  // so even full correction leaves it ending 10 minutes past its plan.
  days.push_back(testutil::make_day("bad", Date{2026, 3, 2}, {540, 560},
                                    {30, 30}, {540, 560}, {540, 570},
                                    {30, 30}));
  testutil::Rng rng(5);
  auto good = testutil::on_plan_day(rng, 2);
  good.provider_id = "good";
  days.push_back(std::move(good));

  const auto csv = tmp.path() / "clinic.csv";
  testutil::write_file(csv, testutil::days_to_csv(days));
  const auto out = tmp.path() / "out";
  const auto r = run_cli({"diagnose", "--input", csv.string(), "--out",
                          out.string(), "--min-patients", "1",
                          "--oracle-check"},
                         tmp.path());
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "diagnosed 1 days, 1 infeasible"));

  const auto manifest = read_manifest(out);
  CHECK(manifest.at("diagnosed_days") == 1);
  CHECK(manifest.at("infeasible_days") == 1);
  CHECK(manifest.at("oracle") == "agree");
  CHECK(manifest.at("oracle_checked_days") == 2);
  REQUIRE(manifest.at("exclusions").size() == 1);
  CHECK(manifest.at("exclusions")[0].at("provider_id") == "bad");
  CHECK(manifest.at("exclusions")[0].at("first_failing_index") == 1);

  CHECK(testutil::read_file(out / "exclusions.csv") ==
        "provider_id,date,first_failing_index\n"
        "bad,2026-03-02,1\n");
  CHECK(fs::exists(out / "gantt_good_2026-03-02.json"));
  CHECK_FALSE(fs::exists(out / "gantt_bad_2026-03-02.json"));
}

TEST_CASE("the tolerance option widens the on-schedule band") {
  TempDir tmp;
  testutil::Rng rng(13);
  const auto day = testutil::single_late_day(rng, 5, 2, 7);
  const auto csv = tmp.path() / "late.csv";
  testutil::write_file(csv, testutil::days_to_csv({day}));

  const auto strict_out = tmp.path() / "strict";
  const auto strict = run_cli({"diagnose", "--input", csv.string(), "--out",
                               strict_out.string(), "--min-patients", "1"},
                              tmp.path());
  REQUIRE(strict.exit_code == 0);
  CHECK(read_manifest(strict_out).at("sum_delta_ap") == 1);
  CHECK(read_manifest(strict_out).at("sum_delta_ae") == 0);

  const auto loose_out = tmp.path() / "loose";
  const auto loose = run_cli({"diagnose", "--input", csv.string(), "--out",
                              loose_out.string(), "--min-patients", "1",
                              "--epsilon", "10"},
                             tmp.path());
  REQUIRE(loose.exit_code == 0);
  CHECK(read_manifest(loose_out).at("epsilon") == 10);
  CHECK(read_manifest(loose_out).at("sum_delta_ap") == 0);
  CHECK(read_manifest(loose_out).at("sum_delta_ae") == 0);
}

TEST_CASE("report writes only the selected tables") {
  TempDir tmp;
  const auto csv = tmp.path() / "clinic.csv";
  testutil::write_file(csv, testutil::days_to_csv(clinic_days(21, 2, 2, 5)));

  const auto half_out = tmp.path() / "half";
  const auto r1 = run_cli({"report", "--input", csv.string(), "--out",
                           half_out.string(), "--min-patients", "1",
                           "--reports", "half"},
                          tmp.path());
  REQUIRE(r1.exit_code == 0);
  CHECK(fs::exists(half_out / "by_half.csv"));
  CHECK(fs::exists(half_out / "exclusions.csv"));
  CHECK_FALSE(fs::exists(half_out / "by_provider.csv"));
  CHECK_FALSE(fs::exists(half_out / "by_date.csv"));
  CHECK_FALSE(fs::exists(half_out / "gantt_docA_2026-03-02.json"));

  const auto full_out = tmp.path() / "full";
  const auto r2 = run_cli({"report", "--input", csv.string(), "--out",
                           full_out.string(), "--min-patients", "1"},
                          tmp.path());
  REQUIRE(r2.exit_code == 0);
  CHECK(fs::exists(full_out / "by_provider.csv"));
  CHECK(fs::exists(full_out / "by_date.csv"));
  CHECK(fs::exists(full_out / "by_half.csv"));
  CHECK(fs::exists(full_out / "exclusions.csv"));
  CHECK(fs::exists(full_out / "gantt_docA_2026-03-02.json"));
  CHECK(fs::exists(full_out / "gantt_docB_2026-03-03.json"));

  const auto provider_table = testutil::read_file(full_out / "by_provider.csv");
  CHECK(contains(provider_table,
                 "provider_id,sum_delta_ap,sum_delta_ae,clinic_days,"
                 "patients_seen"));
  CHECK(contains(provider_table, "docA,"));
  CHECK(contains(provider_table, "docB,"));
}

TEST_CASE("days below the patient floor are skipped") {
  TempDir tmp;
  const auto csv = tmp.path() / "small.csv";
  testutil::write_file(csv, testutil::days_to_csv(clinic_days(31, 1, 1, 2)));

  const auto out_default = tmp.path() / "defaults";
  const auto r1 = run_cli({"diagnose", "--input", csv.string(), "--out",
                           out_default.string()},
                          tmp.path());
  REQUIRE(r1.exit_code == 0);
  CHECK(read_manifest(out_default).at("min_patients") == 5);
  CHECK(read_manifest(out_default).at("diagnosed_days") == 0);

  const auto out_all = tmp.path() / "all";
  const auto r2 = run_cli({"diagnose", "--input", csv.string(), "--out",
                           out_all.string(), "--min-patients", "1"},
                          tmp.path());
  REQUIRE(r2.exit_code == 0);
  CHECK(read_manifest(out_all).at("diagnosed_days") == 1);
}

TEST_CASE("data violations abort diagnose and report") {
  TempDir tmp;
  const auto csv = tmp.path() / "order.csv";
  std::string text = testutil::csv_header();
  text += "P1,2026-03-02,09:00,30,09:10,,09:05,,09:40,\n";
  testutil::write_file(csv, text);
  for (const char* sub : {"diagnose", "report"}) {
    const auto out = tmp.path() / (std::string("out_") + sub);
    const auto r = run_cli({sub, "--input", csv.string(), "--out",
                            out.string(), "--min-patients", "1"},
                           tmp.path());
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "error: row 2"));
  }
}

TEST_CASE("repeated runs produce identical bytes") {
  TempDir tmp;
  const auto csv = tmp.path() / "clinic.csv";
  testutil::write_file(csv, testutil::days_to_csv(clinic_days(41, 2, 2, 6)));
  const auto a = tmp.path() / "a";
  const auto b = tmp.path() / "b";
  for (const auto& out : {a, b}) {
    const auto r = run_cli({"diagnose", "--input", csv.string(), "--out",
                            out.string(), "--min-patients", "1"},
                           tmp.path());
    REQUIRE(r.exit_code == 0);
  }
  CHECK(testutil::read_file(a / "manifest.json") ==
        testutil::read_file(b / "manifest.json"));
  CHECK(testutil::read_file(a / "gantt_docA_2026-03-02.json") ==
        testutil::read_file(b / "gantt_docA_2026-03-02.json"));
}

TEST_CASE("usage errors exit nonzero, help exits zero") {
  TempDir tmp;
  const auto help = run_cli({"--help"}, tmp.path());
  CHECK(help.exit_code == 0);
  CHECK(contains(help.output, "validate"));
  CHECK(contains(help.output, "diagnose"));
  CHECK(contains(help.output, "report"));

  const auto none = run_cli({}, tmp.path());
  CHECK(none.exit_code == 1);

  const auto bad_report = run_cli(
      {"report", "--input", "x.csv", "--out", "y", "--reports", "bogus"},
      tmp.path());
  CHECK(bad_report.exit_code == 1);

  const auto bad_floor = run_cli(
      {"validate", "--input", "x.csv", "--min-patients", "0"}, tmp.path());
  CHECK(bad_floor.exit_code == 1);
}

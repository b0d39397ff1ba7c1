#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sfgen/model.hpp"
#include "sfgen/ownership.hpp"

namespace sfgen {

struct FileClassification {
  std::set<std::string> generated;
  std::set<std::string> manual;
};

struct StatsReport {
  std::uint64_t generatedBytes = 0;
  std::uint64_t manualBytes = 0;
  std::uint64_t generatedFiles = 0;
  std::uint64_t manualFiles = 0;
  int pctGeneratedBytes = 0;
  int pctManualBytes = 0;
  int pctGeneratedFiles = 0;
  int pctManualFiles = 0;

  bool operator==(const StatsReport&) const = default;
};

struct Advisory {
  std::string code;
  std::string subject;
  std::string message;

  bool operator==(const Advisory&) const = default;
};

/// Generated: ALWAYS outputs, and ONCE outputs still matching their recorded
/// digest. Manual: edited ONCE outputs and anything the manifest does not
/// know. The manifest file itself is excluded.
FileClassification classify_files(const std::map<std::string, std::string>& listing,
                                  const Manifest& manifest);

/// round(100*g/(g+m)) and round(100*m/(g+m)), rounding half away from zero;
/// (0, 0) when both are zero.
std::pair<int, int> percentages(std::uint64_t generated, std::uint64_t manual);

StatsReport build_report(const std::map<std::string, std::string>& listing,
                         const FileClassification& classes);

/// Every regular file under `root`, keyed by '/'-separated relative path.
std::map<std::string, std::string> read_tree(const std::filesystem::path& root);

/// Rule-of-three and unused-language advisories, sorted by (code, subject).
std::vector<Advisory> lint_model(const ApplicationModel& model);

std::string report_to_json(const StatsReport& report);
std::string report_to_table(const StatsReport& report);

}  // namespace sfgen

#include "sfgen/stats.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace sfgen {

namespace fs = std::filesystem;

FileClassification classify_files(const std::map<std::string, std::string>& listing,
                                  const Manifest& manifest) {
  FileClassification out;
  for (const auto& [path, content] : listing) {
    if (path == kManifestFileName) continue;
    const ManifestEntry* entry = manifest.find(path);
    const bool generated =
        entry && (entry->ownership == Ownership::Always || digest(content) == entry->sha256);
    (generated ? out.generated : out.manual).insert(path);
  }
  return out;
}

std::pair<int, int> percentages(std::uint64_t generated, std::uint64_t manual) {
  const std::uint64_t total = generated + manual;
  if (total == 0) return {0, 0};
  // Half away from zero for non-negative x/t: floor((2x + t) / 2t).
  auto pct = [total](std::uint64_t x) {
    return static_cast<int>((200 * x + total) / (2 * total));
  };
  return {pct(generated), pct(manual)};
}

StatsReport build_report(const std::map<std::string, std::string>& listing,
                         const FileClassification& classes) {
  StatsReport r;
  for (const std::string& p : classes.generated) {
    r.generatedBytes += listing.at(p).size();
    ++r.generatedFiles;
  }
  for (const std::string& p : classes.manual) {
    r.manualBytes += listing.at(p).size();
    ++r.manualFiles;
  }
  std::tie(r.pctGeneratedBytes, r.pctManualBytes) = percentages(r.generatedBytes, r.manualBytes);
  std::tie(r.pctGeneratedFiles, r.pctManualFiles) = percentages(r.generatedFiles, r.manualFiles);
  return r;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> listing;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw IoError(entry.path().string(), "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    listing[fs::relative(entry.path(), root).generic_string()] = buf.str();
  }
  return listing;
}

std::vector<Advisory> lint_model(const ApplicationModel& model) {
  // Rule usage counted over distinct active entities.
  std::map<std::string, std::vector<std::string>> users;
  std::set<std::string> used_languages;
  auto note_text = [&](const LocalizedText& t) {
    for (const auto& [lang, text] : t.entries()) {
      if (!text.empty()) used_languages.insert(lang);
    }
  };
  for (const Entity& e : model.entities) {
    if (!e.isActive) continue;
    note_text(e.displayNames);
    note_text(e.pluralNames);
    for (const Field& f : e.fields) note_text(f.displayNames);
    std::set<std::string> rules;
    for (const Constraint& c : e.constraints) {
      note_text(c.errorMessages);
      if (!c.kind) continue;
      rules.insert(std::string(to_string(*c.kind)));
      if (*c.kind == ConstraintKind::TwoFields && c.relationship) {
        rules.insert("TwoFields/" + std::string(to_string(*c.relationship)));
      }
    }
    for (const std::string& r : rules) users[r].push_back(e.name);
  }

  std::vector<Advisory> out;
  for (const auto& [rule, entities] : users) {
    if (entities.size() > 2) continue;
    std::string names;
    for (const std::string& n : entities) names += (names.empty() ? "" : ", ") + n;
    out.push_back({"ADV_RULE_OF_THREE", rule,
                   "rule '" + rule + "' is used by " + std::to_string(entities.size()) +
                       " entit" + (entities.size() == 1 ? "y" : "ies") + " (" + names +
                       "); below three uses, handcrafting is usually cheaper than templating"});
  }
  for (const std::string& lang : model.languages) {
    if (!used_languages.contains(lang)) {
      out.push_back({"ADV_UNUSED_LANGUAGE", lang,
                     "language '" + lang + "' is declared but no generated element uses it"});
    }
  }
  std::sort(out.begin(), out.end(), [](const Advisory& a, const Advisory& b) {
    return std::tie(a.code, a.subject) < std::tie(b.code, b.subject);
  });
  return out;
}

std::string report_to_json(const StatsReport& r) {
  nlohmann::ordered_json j;
  j["generatedBytes"] = r.generatedBytes;
  j["manualBytes"] = r.manualBytes;
  j["generatedFiles"] = r.generatedFiles;
  j["manualFiles"] = r.manualFiles;
  j["pctGeneratedBytes"] = r.pctGeneratedBytes;
  j["pctManualBytes"] = r.pctManualBytes;
  j["pctGeneratedFiles"] = r.pctGeneratedFiles;
  j["pctManualFiles"] = r.pctManualFiles;
  return j.dump(2) + "\n";
}

std::string report_to_table(const StatsReport& r) {
  std::ostringstream out;
  auto row = [&](const char* label, std::uint64_t bytes, int pb, std::uint64_t files, int pf) {
    out << std::left << std::setw(14) << label << std::right << std::setw(12) << bytes
        << " bytes (" << std::setw(3) << pb << "%)" << std::setw(8) << files << " files ("
        << std::setw(3) << pf << "%)\n";
  };
  row("generated", r.generatedBytes, r.pctGeneratedBytes, r.generatedFiles, r.pctGeneratedFiles);
  row("handcrafted", r.manualBytes, r.pctManualBytes, r.manualFiles, r.pctManualFiles);
  return out.str();
}

}  // namespace sfgen

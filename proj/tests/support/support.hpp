#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sfgen::testing {

std::filesystem::path source_dir();
std::filesystem::path fixture(const std::string& relative);
std::filesystem::path webstack_dir();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

std::size_t occurrences(const std::string& haystack, const std::string& needle);

// SHA-256 over every (relative path, contents) pair under root, sorted.
std::string tree_hash(const std::filesystem::path& root);

// Invalid-model corpus: each file opens with `<!-- expect: CODE line:col -->`.
struct ExpectedDiagnostic {
  std::string code;
  int line = 0;
  int column = 0;
};

std::vector<std::filesystem::path> invalid_fixtures();
std::optional<ExpectedDiagnostic> read_expectation(const std::string& document);

// Randomized valid domain models, kept as plain data so tests can mutate
// them before serializing.
struct RandomField {
  std::string name;
  std::string type;
  std::optional<int> length;
  bool nullable = false;
  bool pk = false;
  bool identity = false;
  std::optional<std::string> fkEntity;
  std::optional<int> rows;
  std::optional<int> cols;
  std::map<std::string, std::string> labels;
};

struct RandomConstraint {
  std::string kind;
  std::string relationship;
  std::vector<std::string> fields;
  std::map<std::string, std::string> messages;
};

struct RandomEntity {
  std::string name;
  std::string table;
  bool logged = false;
  bool active = true;
  std::map<std::string, std::string> displayNames;
  std::map<std::string, std::string> pluralNames;
  std::vector<RandomField> fields;
  std::vector<RandomConstraint> constraints;
};

struct RandomModel {
  std::string appName;
  std::string defaultLanguage;
  std::vector<RandomEntity> entities;
};

struct RandomModelLimits {
  int maxEntities = 20;
  int maxFields = 30;
  int minFields = 1;
};

RandomModel random_model(std::mt19937_64& rng, const RandomModelLimits& limits = {});
std::string to_xml(const RandomModel& model);

// Every TwoFields constraint of an active entity must appear exactly once as
// a CHECK statement and once as a client comparison inside its entity's
// validate_ function. Returns one message per mismatch.
std::vector<std::string> vertical_consistency_errors(const RandomModel& model,
                                                     const std::string& constraints_sql,
                                                     const std::string& validation_js);

// Exactly `entities` entities of `fields` fields each, deterministic.
RandomModel synthetic_model(int entities, int fields);

}  // namespace sfgen::testing

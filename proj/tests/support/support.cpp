#include "support.hpp"

#include <stdlib.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "sfgen/ownership.hpp"

namespace fs = std::filesystem;

namespace sfgen::testing {

fs::path source_dir() { return fs::path(SFGEN_SOURCE_DIR); }

fs::path fixture(const std::string& relative) { return source_dir() / "fixtures" / relative; }

fs::path webstack_dir() { return source_dir() / "packs" / "webstack"; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "sfgen-test-XXXXXX").string();
  if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string tree_hash(const fs::path& root) {
  std::map<std::string, std::string> files;
  if (fs::exists(root)) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file()) {
        files[fs::relative(entry.path(), root).generic_string()] = read_file(entry.path());
      }
    }
  }
  std::string all;
  for (const auto& [path, content] : files) {
    all += path;
    all += '\0';
    all += digest(content);
    all += '\n';
  }
  return digest(all);
}

std::vector<fs::path> invalid_fixtures() {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(source_dir() / "tests" / "fixtures" / "invalid")) {
    if (entry.path().extension() == ".xml") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<ExpectedDiagnostic> read_expectation(const std::string& document) {
  static const std::regex header(R"(^<!-- expect: ([A-Z_]+) (\d+):(\d+) -->)");
  std::smatch m;
  if (!std::regex_search(document, m, header)) return std::nullopt;
  return ExpectedDiagnostic{m[1], std::stoi(m[2]), std::stoi(m[3])};
}

namespace {

const std::vector<std::string> kTypes = {"int",      "bigint", "decimal",  "bit",     "float",
                                         "datetime", "date",   "nvarchar", "varchar", "text"};
const std::vector<std::string> kRelationships = {"lt", "le", "gt", "ge", "eq", "neq"};
const std::vector<std::string> kNouns = {"Customer", "Order",  "Vest",    "Fakultet", "Item",
                                         "Invoice",  "Course", "Student", "Oglas",    "Tag"};
const std::vector<std::string> kAttrs = {"Name",  "Title", "Amount", "Price",  "From",  "To",
                                         "Count", "Note",  "Code",   "Active", "Start", "End"};
const std::vector<std::string> kWords = {"Faculty", "News",   "R&D",    "O'Neil", "\"quoted\"",
                                         "a < b",   "Факултет", "Über",   "total",  "x > y",
                                         "back\\slash", "line"};

bool is_date_type(const std::string& t) { return t == "datetime" || t == "date"; }
bool is_sized_type(const std::string& t) { return t == "nvarchar" || t == "varchar"; }
bool is_textual_type(const std::string& t) { return is_sized_type(t) || t == "text"; }

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::string phrase(std::mt19937_64& rng) {
  std::string out = pick(rng, kWords);
  const int extra = uniform(rng, 0, 2);
  for (int i = 0; i < extra; ++i) out += " " + pick(rng, kWords);
  return out;
}

std::map<std::string, std::string> labels(std::mt19937_64& rng) {
  std::map<std::string, std::string> out{{"English", phrase(rng)}};
  if (chance(rng, 0.5)) out["Macedonian"] = phrase(rng);
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void add_constraints(std::mt19937_64& rng, RandomEntity& e) {
  const int n = uniform(rng, 0, 3);
  for (int i = 0; i < n; ++i) {
    RandomConstraint c;
    if (chance(rng, 0.6)) {
      // TwoFields over a same-family pair, if one exists.
      std::vector<std::pair<std::string, std::string>> pairs;
      for (std::size_t a = 0; a < e.fields.size(); ++a) {
        for (std::size_t b = 0; b < e.fields.size(); ++b) {
          if (a != b &&
              is_date_type(e.fields[a].type) == is_date_type(e.fields[b].type)) {
            pairs.emplace_back(e.fields[a].name, e.fields[b].name);
          }
        }
      }
      if (pairs.empty()) continue;
      const auto& [f1, f2] = pick(rng, pairs);
      c.kind = "TwoFields";
      c.relationship = pick(rng, kRelationships);
      c.fields = {f1, f2};
    } else {
      c.kind = "Unique";
      std::vector<std::string> names;
      for (const RandomField& f : e.fields) names.push_back(f.name);
      std::shuffle(names.begin(), names.end(), rng);
      names.resize(std::min<std::size_t>(names.size(), uniform(rng, 1, 2)));
      c.fields = names;
    }
    const bool duplicate = std::any_of(
        e.constraints.begin(), e.constraints.end(),
        [&](const RandomConstraint& o) { return o.kind == c.kind && o.fields == c.fields; });
    if (duplicate) continue;
    if (chance(rng, 0.8)) c.messages = labels(rng);
    e.constraints.push_back(std::move(c));
  }
}

}  // namespace

RandomModel random_model(std::mt19937_64& rng, const RandomModelLimits& limits) {
  RandomModel m;
  m.appName = "App" + std::to_string(uniform(rng, 0, 999));
  m.defaultLanguage = "English";
  const int entity_count = uniform(rng, 1, limits.maxEntities);
  std::vector<std::string> entity_names;
  for (int i = 0; i < entity_count; ++i) entity_names.push_back(pick(rng, kNouns) + std::to_string(i));

  for (int i = 0; i < entity_count; ++i) {
    RandomEntity e;
    e.name = entity_names[i];
    e.table = chance(rng, 0.5) ? e.name : "T" + e.name;
    e.logged = chance(rng, 0.5);
    e.active = chance(rng, 0.85);
    e.displayNames = labels(rng);
    if (chance(rng, 0.7)) e.pluralNames = labels(rng);

    RandomField pk;
    pk.name = "ID";
    pk.pk = true;
    if (chance(rng, 0.8)) {
      pk.type = "int";
      pk.identity = chance(rng, 0.75);
    } else {
      pk.type = "nvarchar";
      pk.length = 20;
    }
    if (chance(rng, 0.5)) pk.labels = labels(rng);
    e.fields.push_back(pk);

    const int field_count = uniform(rng, std::max(limits.minFields, 1), limits.maxFields);
    for (int j = 1; j < field_count; ++j) {
      RandomField f;
      f.name = pick(rng, kAttrs) + std::to_string(j);
      if (chance(rng, 0.1)) {
        f.type = "int";
        f.fkEntity = pick(rng, entity_names);
      } else {
        f.type = pick(rng, kTypes);
      }
      if (is_sized_type(f.type)) f.length = uniform(rng, 1, 4000);
      if (is_textual_type(f.type) && chance(rng, 0.3)) {
        f.rows = uniform(rng, 1, 20);
        if (chance(rng, 0.5)) f.cols = uniform(rng, 10, 80);
      }
      f.nullable = chance(rng, 0.4);
      if (chance(rng, 0.7)) f.labels = labels(rng);
      e.fields.push_back(std::move(f));
    }
    add_constraints(rng, e);
    m.entities.push_back(std::move(e));
  }
  return m;
}

std::string to_xml(const RandomModel& m) {
  std::ostringstream out;
  auto lang_block = [&](const std::string& indent,
                        const std::vector<std::pair<std::string,
                                                    const std::map<std::string, std::string>*>>&
                            keyed) {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_lang;
    for (const auto& [key, texts] : keyed) {
      for (const auto& [lang, text] : *texts) by_lang[lang].emplace_back(key, text);
    }
    for (const auto& [lang, items] : by_lang) {
      out << indent << "<Language name=\"" << lang << "\">\n";
      for (const auto& [key, text] : items) {
        out << indent << "  <" << key << ">" << escape_xml(text) << "</" << key << ">\n";
      }
      out << indent << "</Language>\n";
    }
  };

  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<xsource>\n";
  out << "  <Settings appName=\"" << escape_xml(m.appName) << "\" defaultLanguage=\""
      << m.defaultLanguage << "\" />\n";
  out << "  <EntityConfig>\n";
  for (const RandomEntity& e : m.entities) {
    out << "    <Entity name=\"" << e.name << "\" tableName=\"" << e.table << "\" isLogged=\""
        << (e.logged ? "true" : "false") << "\" isActive=\"" << (e.active ? "true" : "false")
        << "\">\n";
    lang_block("      ", {{"DisplayName", &e.displayNames}, {"PluralName", &e.pluralNames}});
    for (const RandomField& f : e.fields) {
      out << "      <Field name=\"" << f.name << "\" type=\"" << f.type << "\"";
      if (f.length) out << " length=\"" << *f.length << "\"";
      out << " nullable=\"" << (f.nullable ? "true" : "false") << "\"";
      if (f.pk) out << " isPK=\"true\"";
      if (f.identity) out << " isIdentity=\"true\"";
      if (f.fkEntity) out << " isFK=\"true\" fkEntityName=\"" << *f.fkEntity << "\"";
      if (f.rows) out << " numberOfRows=\"" << *f.rows << "\"";
      if (f.cols) out << " numberOfCols=\"" << *f.cols << "\"";
      if (f.labels.empty()) {
        out << " />\n";
      } else {
        out << ">\n";
        lang_block("        ", {{"DisplayName", &f.labels}});
        out << "      </Field>\n";
      }
    }
    for (const RandomConstraint& c : e.constraints) {
      out << "      <Constraint type=\"" << c.kind << "\"";
      if (!c.relationship.empty()) out << " relationship=\"" << c.relationship << "\"";
      out << ">\n";
      lang_block("        ", {{"ErrorMessage", &c.messages}});
      for (const std::string& f : c.fields) out << "        <CField name=\"" << f << "\" />\n";
      out << "      </Constraint>\n";
    }
    out << "    </Entity>\n";
  }
  out << "  </EntityConfig>\n</xsource>\n";
  return out.str();
}

RandomModel synthetic_model(int entities, int fields) {
  RandomModel m;
  m.appName = "Synthetic";
  m.defaultLanguage = "English";
  for (int i = 0; i < entities; ++i) {
    RandomEntity e;
    e.name = "Entity" + std::to_string(i);
    e.table = e.name;
    e.logged = i % 2 == 0;
    e.displayNames = {{"English", "Entity " + std::to_string(i)}};
    e.pluralNames = {{"English", "Entities " + std::to_string(i)}};
    RandomField pk;
    pk.name = "ID";
    pk.type = "int";
    pk.pk = true;
    pk.identity = true;
    e.fields.push_back(pk);
    for (int j = 1; j < fields; ++j) {
      RandomField f;
      f.name = "Field" + std::to_string(j);
      f.type = kTypes[j % kTypes.size()];
      if (is_sized_type(f.type)) f.length = 100;
      f.nullable = j % 3 == 0;
      f.labels = {{"English", "Field " + std::to_string(j)}};
      e.fields.push_back(std::move(f));
    }
    e.constraints.push_back({"Unique", "", {"Field1"}, {{"English", "must be unique"}}});
    e.constraints.push_back({"TwoFields", "le", {"Field5", "Field15"}, {{"English", "order"}}});
    m.entities.push_back(std::move(e));
  }
  return m;
}

std::size_t occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::vector<std::string> vertical_consistency_errors(const RandomModel& model,
                                                     const std::string& constraints_sql,
                                                     const std::string& validation_js) {
  // Relationship lowering and comparator kind, restated independently.
  static const std::map<std::string, std::string> kOperator = {
      {"lt", "<"}, {"le", "<="}, {"gt", ">"}, {"ge", ">="}, {"neq", "<>"}, {"eq", "="}};
  const std::string ctrl = "aspnetForm.ctl00_MainContentplaceholder_ctrl";

  std::vector<std::string> errors;
  std::size_t total = 0;
  for (const RandomEntity& e : model.entities) {
    if (!e.active) continue;
    const std::string header = "function validate_" + e.name + "() {";
    const auto begin = validation_js.find(header);
    if (begin == std::string::npos) {
      errors.push_back("no " + header);
      continue;
    }
    const std::string fn = validation_js.substr(begin, validation_js.find("\n}\n", begin) - begin);
    auto field = [&](const std::string& name) -> const RandomField& {
      return *std::find_if(e.fields.begin(), e.fields.end(),
                           [&](const RandomField& f) { return f.name == name; });
    };
    for (const RandomConstraint& c : e.constraints) {
      if (c.kind != "TwoFields") continue;
      ++total;
      const RandomField& a = field(c.fields[0]);
      const RandomField& b = field(c.fields[1]);
      const bool dates = a.type == "datetime" || a.type == "date";
      const std::string check = "ALTER TABLE [dbo].[tbl_" + e.table + "] ADD\nCONSTRAINT [CK_tbl_" +
                                e.table + "_" + a.name + "_" + b.name + "]\nCHECK ([" + a.name +
                                "] " + kOperator.at(c.relationship) + " [" + b.name + "])\nGO\n";
      const std::string call = std::string("validation.vs_compare_") +
                               (dates ? "dates" : "strings") +
                               (a.nullable || b.nullable ? "_nullable" : "") + "(" + ctrl + a.name +
                               ", " + ctrl + b.name + ", '" + c.relationship + "')";
      if (occurrences(constraints_sql, check) != 1) errors.push_back("SQL: " + check);
      if (occurrences(fn, call) != 1) errors.push_back("script: " + call);
    }
  }
  if (occurrences(constraints_sql, "CHECK (") != total) {
    errors.push_back("CHECK count differs from " + std::to_string(total));
  }
  if (occurrences(validation_js, "validation.vs_compare_") != total) {
    errors.push_back("comparison count differs from " + std::to_string(total));
  }
  return errors;
}

}  // namespace sfgen::testing

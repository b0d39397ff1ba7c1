#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "sfgen/atl.hpp"
#include "sfgen/cli.hpp"
#include "sfgen/loader.hpp"
#include "sfgen/ownership.hpp"
#include "sfgen/packs.hpp"
#include "sfgen/stats.hpp"

namespace py = pybind11;
using namespace sfgen;

namespace {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

py::dict diagnostic_dict(const Diagnostic& d) {
  py::dict out;
  out["code"] = d.code;
  out["severity"] = d.severity == Severity::Error ? "error" : "warning";
  out["message"] = d.message;
  out["line"] = d.location ? py::cast(d.location->line) : py::none();
  out["column"] = d.location ? py::cast(d.location->column) : py::none();
  out["subject"] = d.subject;
  return out;
}

std::shared_ptr<const ApplicationModel> load_valid(const std::string& text) {
  LoadResult r = load_model(text);
  if (!r.ok()) {
    for (const Diagnostic& d : r.diagnostics) {
      if (d.severity == Severity::Error) throw ModelError(format(d));
    }
  }
  return r.model;
}

atl::Value to_value(const py::handle& obj) {
  if (obj.is_none()) return {};
  if (py::isinstance<py::bool_>(obj)) return atl::Value(obj.cast<bool>());
  if (py::isinstance<py::int_>(obj)) return atl::Value(obj.cast<std::int64_t>());
  if (py::isinstance<py::str>(obj)) return atl::Value(obj.cast<std::string>());
  if (py::isinstance<py::dict>(obj)) {
    std::map<std::string, atl::Value, std::less<>> entries;
    for (const auto& [k, v] : obj.cast<py::dict>()) entries[k.cast<std::string>()] = to_value(v);
    return atl::Value(std::make_shared<const atl::MapNode>(std::move(entries)));
  }
  if (py::isinstance<py::sequence>(obj)) {
    atl::Value::Sequence seq;
    for (const auto& item : obj.cast<py::sequence>()) seq.push_back(to_value(item));
    return atl::Value(std::move(seq));
  }
  throw py::type_error("unsupported template value: " + py::repr(obj).cast<std::string>());
}

std::string render_template(const std::string& source, const py::dict& variables,
                            const std::optional<std::string>& model_xml) {
  atl::Context ctx;
  for (const auto& [k, v] : variables) ctx[k.cast<std::string>()] = to_value(v);
  if (model_xml) ctx["model"] = atl::model_value(load_valid(*model_xml));
  return atl::render(atl::parse_template(source, "<string>"), ctx);
}

py::list generate(const std::string& model_xml, const std::filesystem::path& pack_dir,
                  const std::optional<std::string>& lang) {
  const auto model = load_valid(model_xml);
  const TemplatePack pack = load_pack(read_pack_directory(pack_dir));
  py::list out;
  for (const Artifact& a : generate_all(model, pack, {lang ? *lang : default_language(*model)})) {
    out.append(py::make_tuple(a.path, a.content, std::string(to_string(a.ownership))));
  }
  return out;
}

py::tuple run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = static_cast<int>(run_cli(args, out, err));
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_sfgen, m) {
  m.doc() = "Model-driven scaffold generator";

  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<PackError>(m, "PackError", PyExc_ValueError);
  py::register_exception<PathCollision>(m, "PathCollision", PyExc_ValueError);
  py::register_exception<atl::TemplateError>(m, "TemplateError", PyExc_ValueError);

  m.def("validate", [](const std::string& text) {
    py::list out;
    for (const Diagnostic& d : load_model(text).diagnostics) out.append(diagnostic_dict(d));
    return out;
  }, py::arg("model_xml"), "Diagnostics for a model document, sorted by location.");

  m.def("render_template", &render_template, py::arg("source"),
        py::arg("variables") = py::dict(), py::arg("model_xml") = py::none());

  m.def("sql_operator", [](const std::string& token) {
    auto rel = parse_relationship(token);
    if (!rel) throw py::value_error("unknown relationship '" + token + "'");
    return std::string(atl::sql_operator(*rel));
  });

  m.def("compare_kind", [](const std::string& type_token) {
    auto type = parse_field_type(type_token);
    if (!type) throw py::value_error("unknown field type '" + type_token + "'");
    return std::string(atl::compare_kind(*type));
  });

  m.def("generate", &generate, py::arg("model_xml"), py::arg("pack_dir"),
        py::arg("lang") = py::none(), "List of (path, content, ownership) tuples.");

  m.def("digest", [](const py::bytes& data) { return digest(std::string(data)); });

  m.def("percentages", &percentages, py::arg("generated"), py::arg("manual"));

  m.def("lint", [](const std::string& model_xml) {
    py::list out;
    for (const Advisory& a : lint_model(*load_valid(model_xml))) {
      out.append(py::make_tuple(a.code, a.subject, a.message));
    }
    return out;
  });

  m.def("run_cli", &run, py::arg("args"), "Returns (exit_code, stdout, stderr).");
}

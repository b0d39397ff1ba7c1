#include <gtest/gtest.h>

#include <set>

#include "sfgen/atl.hpp"
#include "sfgen/loader.hpp"
#include "support.hpp"

namespace sfgen::atl {
namespace {

std::shared_ptr<const ApplicationModel> fakultet_model() {
  static const auto model =
      load_model(testing::read_file(testing::fixture("fakultet.xml"))).model;
  return model;
}

Context fakultet_context() {
  auto model = fakultet_model();
  return {{"model", model_value(model)}, {"entity", entity_value(model, model->entities[0])}};
}

std::string run(std::string_view source, const Context& context = {}) {
  return render(parse_template(source, "t"), context);
}

Value eval(std::string_view source, const Context& context = {}) {
  return eval_expr(*parse_expression(source), context);
}

TemplateSyntaxError syntax_error(std::string_view source) {
  try {
    parse_template(source, "t");
  } catch (const TemplateSyntaxError& e) {
    return e;
  }
  ADD_FAILURE() << "expected TemplateSyntaxError for: " << source;
  return TemplateSyntaxError("", {}, "");
}

TemplateRuntimeError runtime_error(std::string_view source, const Context& context = {}) {
  try {
    run(source, context);
  } catch (const TemplateRuntimeError& e) {
    return e;
  }
  ADD_FAILURE() << "expected TemplateRuntimeError for: " << source;
  return TemplateRuntimeError("", {}, "");
}

TEST(AtlParse, PlainText) {
  const TemplateAst ast = parse_template("hello", "t");
  ASSERT_EQ(ast.nodes.size(), 1u);
  ASSERT_TRUE(std::holds_alternative<TextNode>(ast.nodes[0].node));
  EXPECT_EQ(std::get<TextNode>(ast.nodes[0].node).text, "hello");
}

TEST(AtlParse, SingleOutput) {
  const TemplateAst ast = parse_template("{{ entity.name }}", "t");
  ASSERT_EQ(ast.nodes.size(), 1u);
  const auto& out = std::get<OutputNode>(ast.nodes[0].node);
  const auto& member = std::get<MemberExpr>(out.expr->node);
  EXPECT_EQ(member.name, "name");
  EXPECT_EQ(std::get<VariableExpr>(member.object->node).name, "entity");
}

TEST(AtlParse, MismatchedClose) {
  const auto e = syntax_error("{% for f in entity.fields %}x{% endif %}");
  EXPECT_EQ(e.location().line, 1);
  EXPECT_EQ(e.location().column, 30);
}

TEST(AtlParse, UnclosedBlockReportedAtOpener) {
  const auto e = syntax_error("a\n  {% if x %}b");
  EXPECT_EQ(e.location().line, 2);
  EXPECT_EQ(e.location().column, 3);
}

TEST(AtlParse, OtherSyntaxErrors) {
  syntax_error("{% frobnicate %}");
  syntax_error("{{ }}");
  syntax_error("{{ a b }}");
  syntax_error("{{ a");
  syntax_error("{% if a %}{% else %}{% elif b %}{% endif %}");
  syntax_error("{% if a %}{% else %}{% else %}{% endif %}");
  syntax_error("{% endfor %}");
  syntax_error("{{ 'unterminated }}");
  syntax_error("{{ a < b < c }}");
  syntax_error("{% for in x %}{% endfor %}");
  syntax_error("{# never closed");
}

TEST(AtlParse, ErrorMessageCarriesNameAndLocation) {
  const auto e = syntax_error("x\n{% endif %}");
  EXPECT_EQ(std::string(e.what()).rfind("t:2:1: ", 0), 0u) << e.what();
}

TEST(AtlRender, Examples) {
  const Context ctx = fakultet_context();
  EXPECT_EQ(run("Hello {{ entity.name }}", ctx), "Hello Fakultet");
  EXPECT_EQ(run("{% for f in entity.fields %}{{ f.name }}{% if not loop.last %}, {% endif %}"
                "{% endfor %}",
                ctx),
            "ID, strName");
  EXPECT_EQ(run(""), "");
}

TEST(AtlRender, CommentsProduceNothing) { EXPECT_EQ(run("a{# x {{ y }} #}b"), "ab"); }

TEST(AtlRender, IfElifElse) {
  const std::string t = "{% if n == 1 %}one{% elif n == 2 %}two{% else %}many{% endif %}";
  EXPECT_EQ(run(t, {{"n", 1}}), "one");
  EXPECT_EQ(run(t, {{"n", 2}}), "two");
  EXPECT_EQ(run(t, {{"n", 7}}), "many");
}

TEST(AtlRender, Truthiness) {
  const std::string t = "{% if v %}T{% else %}F{% endif %}";
  EXPECT_EQ(run(t, {{"v", Value()}}), "F");
  EXPECT_EQ(run(t, {{"v", false}}), "F");
  EXPECT_EQ(run(t, {{"v", 0}}), "F");
  EXPECT_EQ(run(t, {{"v", ""}}), "F");
  EXPECT_EQ(run(t, {{"v", Value::Sequence{}}}), "F");
  EXPECT_EQ(run(t, {{"v", true}}), "T");
  EXPECT_EQ(run(t, {{"v", -1}}), "T");
  EXPECT_EQ(run(t, {{"v", "0"}}), "T");
  EXPECT_EQ(run(t, {{"v", Value::Sequence{Value()}}}), "T");
}

TEST(AtlRender, LoopMeta) {
  const Context ctx{{"xs", Value::Sequence{"a", "b", "c"}}};
  EXPECT_EQ(run("{% for x in xs %}{{ loop.index }}/{{ loop.length }}"
                "{% if loop.first %}F{% endif %}{% if loop.last %}L{% endif %} {% endfor %}",
                ctx),
            "1/3F 2/3 3/3L ");
}

TEST(AtlRender, NestedLoopsShadowLoop) {
  const Context ctx{{"xs", Value::Sequence{"a", "b"}}, {"ys", Value::Sequence{1, 2, 3}}};
  EXPECT_EQ(run("{% for x in xs %}{% for y in ys %}{{ loop.index }}{% endfor %}"
                "{{ loop.index }};{% endfor %}",
                ctx),
            "1231;1232;");
}

TEST(AtlRender, ForOverNullIsEmpty) { EXPECT_EQ(run("{% for x in v %}x{% endfor %}", {{"v", Value()}}), ""); }

TEST(AtlRender, TrimMarkers) {
  EXPECT_EQ(run("a  \n  {%- if true %}b{% endif %}"), "a  b");
  EXPECT_EQ(run("a\n{% if true -%}  \nb{% endif %}"), "a\nb");
  EXPECT_EQ(run("x\n\n{{- 'y' -}}\n\nz"), "x\ny\nz");
  EXPECT_EQ(run("{% if true -%}\n\n{%- endif %}"), "");
}

TEST(AtlRender, TrimStripsAtMostOneNewline) {
  EXPECT_EQ(run("a\n\n{%- if true %}b{% endif %}"), "a\nb");
  EXPECT_EQ(run("a \t\n \t{%- if true %}b{% endif %}"), "a \tb");
}

TEST(AtlRender, OutputForms) {
  EXPECT_EQ(run("{{ true }}|{{ false }}|{{ 42 }}|{{ -3 }}|{{ v }}|{{ 'x' }}", {{"v", Value()}}),
            "true|false|42|-3||x");
  EXPECT_EQ(run("{{ \"a\\\"b\\n\" }}"), "a\"b\n");
}

TEST(AtlRender, LiteralTextPreservedByteExactly) {
  const std::string text = "  weird { } % # }} %} \t\r\n Факултет ";
  EXPECT_EQ(run(text), text);
}

TEST(AtlRender, RuntimeErrors) {
  const Context ctx = fakultet_context();
  auto e = runtime_error("\n  {{ nope }}");
  EXPECT_EQ(e.location().line, 2);
  EXPECT_EQ(e.location().column, 6);
  runtime_error("{{ entity.nope }}", ctx);
  runtime_error("{{ entity.name.length }}", ctx);
  runtime_error("{{ frob(1) }}");
  runtime_error("{{ count(1) }}");
  runtime_error("{{ count(1, 2) }}");
  runtime_error("{{ 1 < 'a' }}");
  runtime_error("{{ entity }}", ctx);
  runtime_error("{{ entity.fields }}", ctx);
  runtime_error("{% for x in 3 %}{% endfor %}");
  runtime_error("{{ sql_operator('ne') }}");
  runtime_error("{{ localized(entity, 'English', 'Nope') }}", ctx);
}

TEST(AtlEval, Examples) {
  const Context ctx = fakultet_context();
  EXPECT_EQ(eval("entity.isLogged", ctx), Value(true));
  EXPECT_EQ(eval("1 == 1"), Value(true));
  const Context field{{"field", ctx.at("entity").as_node().member("pk").value()}};
  EXPECT_TRUE(eval("field.length", field).is_null());
  EXPECT_EQ(eval("field.name", field), Value("ID"));
}

TEST(AtlEval, Comparisons) {
  EXPECT_EQ(eval("2 < 3"), Value(true));
  EXPECT_EQ(eval("3 <= 3"), Value(true));
  EXPECT_EQ(eval("'b' > 'a'"), Value(true));
  EXPECT_EQ(eval("'a' >= 'b'"), Value(false));
  EXPECT_EQ(eval("1 == '1'"), Value(false));
  EXPECT_EQ(eval("1 != '1'"), Value(true));
  EXPECT_EQ(eval("n == n", {{"n", Value()}}), Value(true));
  EXPECT_EQ(eval("n < 1", {{"n", Value()}}), Value(false));
  EXPECT_EQ(eval("n >= 1", {{"n", Value()}}), Value(false));
  EXPECT_EQ(eval("n == 0", {{"n", Value()}}), Value(false));
}

TEST(AtlEval, BooleanShortCircuit) {
  EXPECT_EQ(eval("false and undefined_thing"), Value(false));
  EXPECT_EQ(eval("true or undefined_thing"), Value(true));
  EXPECT_EQ(eval("not 0 and 'x'"), Value(true));
  EXPECT_EQ(eval("not (1 == 1 or false)"), Value(false));
}

TEST(AtlEval, NullPropagation) {
  EXPECT_TRUE(eval("n.a.b.c", {{"n", Value()}}).is_null());
  const Context ctx = fakultet_context();
  const Context field{{"f", ctx.at("entity").as_node().member("pk").value()}};
  EXPECT_TRUE(eval("f.fkEntity.name", field).is_null());
  EXPECT_TRUE(eval("f.numberOfRows", field).is_null());
  EXPECT_EQ(run("{% if f.numberOfRows %}x{% else %}y{% endif %}", field), "y");
}

TEST(AtlEval, MapNodeUnknownKeysAreNull) {
  const Context ctx{{"flags", Value(std::make_shared<const MapNode>(
                                  std::map<std::string, Value, std::less<>>{{"a", 1}}))}};
  EXPECT_EQ(eval("flags.a", ctx), Value(1));
  EXPECT_TRUE(eval("flags.b", ctx).is_null());
}

TEST(AtlBuiltins, SqlOperatorTable) {
  const std::map<RelationshipOp, std::string> expected = {
      {RelationshipOp::Lt, "<"},  {RelationshipOp::Le, "<="}, {RelationshipOp::Gt, ">"},
      {RelationshipOp::Ge, ">="}, {RelationshipOp::Neq, "<>"}, {RelationshipOp::Eq, "="}};
  std::set<std::string> image;
  for (const auto& [rel, op] : expected) {
    EXPECT_EQ(sql_operator(rel), op);
    EXPECT_EQ(eval("sql_operator(r)", {{"r", std::string(to_string(rel))}}), Value(op));
    image.insert(std::string(sql_operator(rel)));
  }
  EXPECT_EQ(image.size(), 6u);
}

TEST(AtlBuiltins, CompareKind) {
  EXPECT_EQ(compare_kind(FieldType::DateTime), "dates");
  EXPECT_EQ(compare_kind(FieldType::Date), "dates");
  EXPECT_EQ(compare_kind(FieldType::NVarChar), "strings");
  EXPECT_EQ(compare_kind(FieldType::Int), "strings");
  EXPECT_EQ(eval("compare_kind('date')"), Value("dates"));
  const Context ctx = fakultet_context();
  EXPECT_EQ(run("{% for f in entity.fields %}{{ compare_kind(f) }} {% endfor %}", ctx),
            "strings strings ");
}

TEST(AtlBuiltins, SqlType) {
  EXPECT_EQ(sql_type({"x", FieldType::NVarChar, 30, false, false, false}), "nvarchar(30)");
  EXPECT_EQ(sql_type({"x", FieldType::Int, std::nullopt, false, false, false}), "int");
  EXPECT_EQ(sql_type({"x", FieldType::VarChar, 50, false, false, false}), "varchar(50)");
  const Context ctx = fakultet_context();
  EXPECT_EQ(run("{% for c in entity.columns %}{{ sql_type(c) }};{% endfor %}", ctx),
            "int;nvarchar(30);datetime;varchar(50);");
}

TEST(AtlBuiltins, TextHelpers) {
  EXPECT_EQ(eval("count(xs)", {{"xs", Value::Sequence{1, 2}}}), Value(2));
  EXPECT_EQ(eval("count(n)", {{"n", Value()}}), Value(0));
  EXPECT_EQ(eval("lower('AbÉ')"), Value("abÉ"));
  EXPECT_EQ(eval("upper('ab')"), Value("AB"));
  EXPECT_EQ(eval("coalesce(n, 'd')", {{"n", Value()}}), Value("d"));
  EXPECT_EQ(eval("coalesce('v', 'd')"), Value("v"));
  EXPECT_EQ(eval("escape_html(s)", {{"s", "<a href=\"x\">'&'</a>"}}),
            Value("&lt;a href=&quot;x&quot;&gt;&#39;&amp;&#39;&lt;/a&gt;"));
  EXPECT_EQ(eval("escape_js(s)", {{"s", "it's \"q\" \\ \n"}}), Value("it\\'s \\\"q\\\" \\\\ \\n"));
  EXPECT_EQ(eval("escape_json(s)", {{"s", "it's \"q\"\t"}}), Value("it's \\\"q\\\"\\t"));
  EXPECT_TRUE(is_builtin("localized"));
  EXPECT_FALSE(is_builtin("eval"));
}

TEST(AtlBuiltins, Localized) {
  const Context ctx = fakultet_context();
  EXPECT_EQ(run("{{ localized(entity, 'Macedonian', 'DisplayName') }}", ctx), "Факултет");
  EXPECT_EQ(run("{{ localized(entity, 'German', 'PluralName') }}", ctx), "Faculties");
  EXPECT_EQ(run("{% for c in entity.constraints %}{{ localized(c, 'English', 'ErrorMessage') }}"
                "{% endfor %}",
                ctx),
            "Faculty name must be unique");
}

TEST(AtlModel, EntityMembers) {
  const Context ctx = fakultet_context();
  EXPECT_EQ(run("{{ entity.tableName }} {{ entity.caching }} {{ count(entity.listFields) }} "
                "{{ count(entity.insertFields) }} {{ count(entity.updateFields) }} "
                "{{ entity.pk.name }} {{ count(entity.uniqueConstraints) }} "
                "{{ count(entity.twoFieldsConstraints) }}",
                ctx),
            "Fakultet enabled 1 1 1 ID 1 0");
  EXPECT_EQ(run("{% for c in entity.constraints %}{{ c.type }}:{% for f in c.cfields %}"
                "{{ f.name }}{% endfor %}:{{ c.first.type }}:{{ c.second.name }}:{{ c.nullable }}"
                "{% endfor %}",
                ctx),
            "Unique:strName:nvarchar::false");
  EXPECT_EQ(run("{{ model.appName }} {% for l in model.languages %}{{ l }} {% endfor %}", ctx),
            "NewsBoard Macedonian English ");
}

TEST(AtlModel, NodesCompareByIdentity) {
  const Context ctx = fakultet_context();
  EXPECT_EQ(eval("entity.pk == entity.pk", ctx), Value(true));
  EXPECT_EQ(run("{% for c in entity.constraints %}{{ c.entity == entity }}{% endfor %}", ctx),
            "true");
}

TEST(AtlProperties, SeparatorIdiomEmitsNMinusOne) {
  const TemplateAst ast =
      parse_template("{% for x in xs %}{{ x }}{% if not loop.last %},{% endif %}{% endfor %}", "t");
  std::mt19937_64 rng(5);
  for (int n = 0; n < 200; ++n) {
    Value::Sequence xs;
    const int len = std::uniform_int_distribution<int>(0, 50)(rng);
    for (int i = 0; i < len; ++i) xs.emplace_back(i);
    const std::string out = render(ast, {{"xs", xs}});
    EXPECT_EQ(std::count(out.begin(), out.end(), ','), std::max(0, len - 1));
  }
}

TEST(AtlProperties, RenderIsPureAndDeterministic) {
  const Context ctx = fakultet_context();
  const TemplateAst ast = parse_template(
      testing::read_file(testing::webstack_dir() / "templates" / "procs.sql.atl"), "procs");
  const Context before = ctx;
  const std::string a = render(ast, ctx);
  const std::string b = render(ast, ctx);
  EXPECT_EQ(a, b);
  EXPECT_EQ(before.size(), ctx.size());
  for (const auto& [k, v] : before) EXPECT_EQ(ctx.at(k), v);
}

TEST(AtlProperties, TrimNeverRemovesMoreThanOneNewline) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    const int before = std::uniform_int_distribution<int>(0, 4)(rng);
    const int after = std::uniform_int_distribution<int>(0, 4)(rng);
    const std::string src =
        "a" + std::string(before, '\n') + "{{- 'x' -}}" + std::string(after, '\n') + "b";
    const std::string out = run(src);
    const auto nl = std::count(out.begin(), out.end(), '\n');
    EXPECT_EQ(nl, std::max(0, before - 1) + std::max(0, after - 1)) << src;
  }
}

}  // namespace
}  // namespace sfgen::atl

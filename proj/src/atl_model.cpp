// Node adapters exposing the bound model to templates.

#include "sfgen/atl.hpp"

namespace sfgen::atl {

namespace {

using ModelPtr = std::shared_ptr<const ApplicationModel>;

Value text_or_null(const std::optional<std::string>& s) { return s ? Value(*s) : Value(); }

Value field_value(const ModelPtr& model, const Field& field);

class ColumnNode : public Node {
 public:
  explicit ColumnNode(ColumnSpec column) : column_(std::move(column)) {}

  std::string_view type_name() const override { return "Column"; }

  std::optional<Value> member(std::string_view name) const override {
    if (name == "name") return Value(column_.name);
    if (name == "type") return Value(to_string(column_.type));
    if (name == "length") return Value::optional(column_.length);
    if (name == "nullable") return Value(column_.nullable);
    if (name == "identity") return Value(column_.identity);
    if (name == "audit") return Value(column_.audit);
    return std::nullopt;
  }

 private:
  ColumnSpec column_;
};

class FieldNode : public Node {
 public:
  FieldNode(ModelPtr model, const Field& field) : model_(std::move(model)), field_(field) {}

  std::string_view type_name() const override { return "Field"; }
  const void* identity() const override { return &field_; }

  std::optional<Value> member(std::string_view name) const override {
    const Field& f = field_;
    if (name == "name") return Value(f.name);
    if (name == "type") return Value(f.typeToken);
    if (name == "length") return Value::optional(f.length);
    if (name == "nullable") return Value(f.nullable);
    if (name == "isPK") return Value(f.isPK);
    if (name == "isIdentity") return Value(f.isIdentity);
    if (name == "isFK") return Value(f.isFK);
    if (name == "fkEntityName") return text_or_null(f.fkEntityName);
    if (name == "fkName") return text_or_null(f.fkName);
    if (name == "fkEntity") {
      const Entity* target = f.fkEntityName ? find_entity(*model_, *f.fkEntityName) : nullptr;
      return target ? entity_value(model_, *target) : Value();
    }
    if (name == "isLookup") return Value(f.isLookup);
    if (name == "createLookup") return Value(f.createLookup);
    if (name == "isOVN") return Value(f.isOVN);
    if (name == "isAudited") return Value(f.isAudited);
    if (name == "isShownInList") return Value(f.isShownInList);
    if (name == "isShownInEdit") return Value(f.isShownInEdit);
    if (name == "isShownInHistory") return Value(f.isShownInHistory);
    if (name == "description") return text_or_null(f.description);
    if (name == "defaultValue") return text_or_null(f.defaultValue);
    if (name == "displayFormat") return text_or_null(f.displayFormat);
    if (name == "numberOfRows") return Value::optional(f.numberOfRows);
    if (name == "numberOfCols") return Value::optional(f.numberOfCols);
    if (name == "displayName") return text_or_null(f.displayNameAttr);
    return std::nullopt;
  }

  std::optional<std::string> localized(std::string_view key,
                                       std::string_view lang) const override {
    if (key != "DisplayName") return std::nullopt;
    return display_name(*model_, field_, lang);
  }

 private:
  ModelPtr model_;
  const Field& field_;
};

class ConstraintNode : public Node {
 public:
  ConstraintNode(ModelPtr model, const Entity& entity, const Constraint& constraint)
      : model_(std::move(model)), entity_(entity), constraint_(constraint) {}

  std::string_view type_name() const override { return "Constraint"; }
  const void* identity() const override { return &constraint_; }

  std::optional<Value> member(std::string_view name) const override {
    const Constraint& c = constraint_;
    if (name == "type" || name == "kind") return Value(c.kindToken);
    if (name == "relationship") {
      return c.relationshipToken.empty() ? Value() : Value(c.relationshipToken);
    }
    if (name == "cfields") {
      Value::Sequence seq;
      for (const std::string& n : c.cfields) {
        if (const Field* f = entity_.find_field(n)) seq.push_back(field_value(model_, *f));
      }
      return Value(std::move(seq));
    }
    if (name == "cfieldNames") {
      Value::Sequence seq(c.cfields.begin(), c.cfields.end());
      return Value(std::move(seq));
    }
    if (name == "first") return nth(0);
    if (name == "second") return nth(1);
    if (name == "nullable") {
      bool any = false;
      for (const std::string& n : c.cfields) {
        if (const Field* f = entity_.find_field(n)) any = any || f->nullable;
      }
      return Value(any);
    }
    if (name == "entity") return entity_value(model_, entity_);
    return std::nullopt;
  }

  std::optional<std::string> localized(std::string_view key,
                                       std::string_view lang) const override {
    if (key != "ErrorMessage") return std::nullopt;
    return display_name(*model_, constraint_, lang);
  }

 private:
  Value nth(std::size_t i) const {
    if (i >= constraint_.cfields.size()) return Value();
    const Field* f = entity_.find_field(constraint_.cfields[i]);
    return f ? field_value(model_, *f) : Value();
  }

  ModelPtr model_;
  const Entity& entity_;
  const Constraint& constraint_;
};

class EntityNode : public Node {
 public:
  EntityNode(ModelPtr model, const Entity& entity) : model_(std::move(model)), entity_(entity) {}

  std::string_view type_name() const override { return "Entity"; }
  const void* identity() const override { return &entity_; }

  std::optional<Value> member(std::string_view name) const override {
    const Entity& e = entity_;
    if (name == "name") return Value(e.name);
    if (name == "tableName") return Value(e.tableName);
    if (name == "caching") return Value(to_string(e.caching));
    if (name == "isAudited") return Value(e.isAudited);
    if (name == "isLogged") return Value(e.isLogged);
    if (name == "isActive") return Value(e.isActive);
    if (name == "fields") return fields([](const Field&) { return true; });
    if (name == "listFields") return fields([](const Field& f) { return f.isShownInList; });
    if (name == "editFields") return fields([](const Field& f) { return f.isShownInEdit; });
    if (name == "historyFields") return fields([](const Field& f) { return f.isShownInHistory; });
    if (name == "insertFields") return fields([](const Field& f) { return !f.isIdentity; });
    if (name == "updateFields") return fields([](const Field& f) { return !f.isPK; });
    if (name == "pk") {
      const Field* pk = e.primary_key();
      return pk ? field_value(model_, *pk) : Value();
    }
    if (name == "columns") {
      Value::Sequence seq;
      for (ColumnSpec& c : effective_columns(e)) {
        seq.emplace_back(std::make_shared<const ColumnNode>(std::move(c)));
      }
      return Value(std::move(seq));
    }
    if (name == "constraints") return constraints(std::nullopt);
    if (name == "uniqueConstraints") return constraints(ConstraintKind::Unique);
    if (name == "twoFieldsConstraints") return constraints(ConstraintKind::TwoFields);
    return std::nullopt;
  }

  std::optional<std::string> localized(std::string_view key,
                                       std::string_view lang) const override {
    if (key == "DisplayName") return display_name(*model_, entity_, lang);
    if (key == "PluralName") return plural_name(*model_, entity_, lang);
    return std::nullopt;
  }

 private:
  template <typename Pred>
  Value fields(Pred pred) const {
    Value::Sequence seq;
    for (const Field& f : entity_.fields) {
      if (pred(f)) seq.push_back(field_value(model_, f));
    }
    return Value(std::move(seq));
  }

  Value constraints(std::optional<ConstraintKind> kind) const {
    Value::Sequence seq;
    for (const Constraint& c : entity_.constraints) {
      if (!kind || c.kind == kind) {
        seq.emplace_back(std::make_shared<const ConstraintNode>(model_, entity_, c));
      }
    }
    return Value(std::move(seq));
  }

  ModelPtr model_;
  const Entity& entity_;
};

class ModelNode : public Node {
 public:
  explicit ModelNode(ModelPtr model) : model_(std::move(model)) {}

  std::string_view type_name() const override { return "Model"; }
  const void* identity() const override { return model_.get(); }

  std::optional<Value> member(std::string_view name) const override {
    const ApplicationModel& m = *model_;
    if (name == "appName") return Value(m.settings.appName);
    if (name == "defaultLanguage") return text_or_null(m.settings.defaultLanguage);
    if (name == "connectionStringName") return text_or_null(m.settings.connectionStringName);
    if (name == "languages") {
      Value::Sequence seq(m.languages.begin(), m.languages.end());
      return Value(std::move(seq));
    }
    if (name == "entities" || name == "activeEntities") {
      const bool active_only = name == "activeEntities";
      Value::Sequence seq;
      for (const Entity& e : m.entities) {
        if (!active_only || e.isActive) seq.push_back(entity_value(model_, e));
      }
      return Value(std::move(seq));
    }
    return std::nullopt;
  }

 private:
  ModelPtr model_;
};

Value field_value(const ModelPtr& model, const Field& field) {
  return Value(std::make_shared<const FieldNode>(model, field));
}

}  // namespace

Value model_value(std::shared_ptr<const ApplicationModel> model) {
  return Value(std::make_shared<const ModelNode>(std::move(model)));
}

Value entity_value(std::shared_ptr<const ApplicationModel> model, const Entity& entity) {
  return Value(std::make_shared<const EntityNode>(std::move(model), entity));
}

}  // namespace sfgen::atl

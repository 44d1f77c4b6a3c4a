#include "cr/rule_model.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace cr {

// ---------------------------------------------------------------------------
// Matching

const Value* BindingFrame::find(SymbolId s) const {
  for (const auto& [id, v] : entries_) {
    if (id == s) return &v;
  }
  return nullptr;
}

bool BindingFrame::bind(SymbolId s, Value v) {
  if (find(s) != nullptr) return false;
  entries_.emplace_back(s, std::move(v));
  return true;
}

namespace {

bool match_fields(const std::vector<Pattern>& patterns, const Tuple& values,
                  BindingFrame& frame) {
  if (patterns.size() != values.size()) return false;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const Pattern& p = patterns[i];
    switch (p.kind()) {
      case Pattern::Kind::Wildcard:
        break;
      case Pattern::Kind::Literal:
        if (!values_equal(p.value(), values[i])) return false;
        break;
      case Pattern::Kind::Bind:
        if (const Value* bound = frame.find(p.symbol().id)) {
          if (!values_equal(*bound, values[i])) return false;
        } else {
          frame.bind(p.symbol().id, values[i]);
        }
        break;
    }
  }
  return true;
}

}  // namespace

std::optional<BindingFrame> match_head(const HeadElement& element,
                                       ConstraintId constraint,
                                       const KeyTuple& key,
                                       const DataTuple& data,
                                       const BindingFrame& bindings) {
  if (element.constraint != constraint) return std::nullopt;
  BindingFrame frame = bindings;
  if (!match_fields(element.key, key, frame)) return std::nullopt;
  if (!match_fields(element.data, data, frame)) return std::nullopt;
  return frame;
}

std::optional<BindingFrame> match_head(const HeadElement& element,
                                       const Fact& fact,
                                       const BindingFrame& bindings) {
  return match_head(element, fact.constraint, fact.key, fact.data, bindings);
}

// ---------------------------------------------------------------------------
// Compiled program

std::optional<ConstraintId> CompiledProgram::find_constraint(
    std::string_view name) const {
  for (const auto& sig : constraints_) {
    if (sig.name == name) return sig.id;
  }
  return std::nullopt;
}

const std::vector<Occurrence>& CompiledProgram::occurrences_of(
    ConstraintId id) const {
  static const std::vector<Occurrence> kNone;
  auto it = occurrences_.find(id);
  return it == occurrences_.end() ? kNone : it->second;
}

std::string CompiledProgram::rule_label(std::size_t index) const {
  const Rule& r = rule(index);
  return r.label.empty() ? "rule " + std::to_string(index) : r.label;
}

std::string CompiledProgram::render(const Fact& fact) const {
  std::string out = signature(fact.constraint).name + to_text(fact.key);
  if (!fact.data.empty()) out += " -> " + to_text(fact.data);
  return out;
}

// ---------------------------------------------------------------------------
// Builder

RuleDraft& RuleBuilder::draft() { return program_->rules_.at(slot_); }

std::size_t RuleBuilder::atom_position() const {
  const RuleDraft& d = program_->rules_.at(slot_);
  return d.heads.size() + d.guards.size() + d.body.size();
}

void RuleBuilder::fault(ErrorCode code, std::string description,
                        bool on_last_atom) {
  RuleDraft& d = draft();
  std::size_t at = atom_position();
  if (on_last_atom && at > 0) --at;
  if (!d.fault) d.fault.emplace(code, std::move(description), slot_ + 1, at);
}

Pattern RuleBuilder::to_pattern(const Symbol& s) {
  if (s.id == kWildcardSymbol) return Pattern::wildcard();
  if (s.id == kFailSymbol) {
    fault(ErrorCode::MalformedRule, "'fail' cannot be used as a pattern");
  }
  return Pattern::bind(s);
}

RuleBuilder& RuleBuilder::add_atom(const Symbol& constraint,
                                   std::vector<Pattern> keys) {
  if (section_ == Section::Guard) {
    fault(ErrorCode::MalformedRule,
          "constraint atom '" + constraint.name + "' after a guard");
    return *this;
  }
  if (!program_->find_constraint(constraint.id)) {
    fault(ErrorCode::UnknownConstraint,
          "constraint '" + constraint.name + "' is not declared");
  }
  AtomDraft atom{constraint, std::move(keys), {}, false, false, false};
  if (section_ == Section::Head) {
    draft().heads.push_back(std::move(atom));
  } else {
    draft().body.push_back(std::move(atom));
  }
  return *this;
}

RuleBuilder& RuleBuilder::add_guard(std::string_view guard,
                                    std::vector<Pattern> args) {
  if (section_ == Section::Body) {
    fault(ErrorCode::MalformedRule,
          "guard '" + std::string{guard} + "' inside the body");
    return *this;
  }
  section_ = Section::Guard;
  GuardAtom atom;
  atom.negated = !guard.empty() && guard.front() == '!';
  atom.name = std::string{atom.negated ? guard.substr(1) : guard};
  atom.args = std::move(args);
  draft().guards.push_back(std::move(atom));
  return *this;
}

RuleBuilder& RuleBuilder::start_guards(std::string_view guard,
                                       std::vector<Pattern> args) {
  return add_guard(guard, std::move(args));
}

RuleBuilder& RuleBuilder::start_body(const Symbol& constraint,
                                     std::vector<Pattern> keys) {
  if (section_ == Section::Body) {
    fault(ErrorCode::MalformedRule, "a rule has only one then()");
    return *this;
  }
  section_ = Section::Body;
  return add_atom(constraint, std::move(keys));
}

RuleBuilder& RuleBuilder::add_data(std::vector<Pattern> data) {
  RuleDraft& d = draft();
  AtomDraft* last = nullptr;
  if (section_ == Section::Head && !d.heads.empty()) last = &d.heads.back();
  if (section_ == Section::Body && !d.body.empty()) last = &d.body.back();
  if (last == nullptr) {
    fault(ErrorCode::MalformedRule, "with() must follow a constraint atom");
    return *this;
  }
  if (last->has_data) {
    fault(ErrorCode::MalformedRule, "with() given twice for one atom", true);
    return *this;
  }
  last->data = std::move(data);
  last->has_data = true;
  return *this;
}

RuleBuilder& RuleBuilder::passive() {
  if (section_ != Section::Head) {
    fault(ErrorCode::ModifierOnBody, "passive() outside the head", true);
    return *this;
  }
  draft().heads.back().passive = true;
  return *this;
}

RuleBuilder& RuleBuilder::keep() {
  if (section_ != Section::Head) {
    fault(ErrorCode::ModifierOnBody, "keep() outside the head", true);
    return *this;
  }
  draft().heads.back().keep = true;
  return *this;
}

RuleBuilder& RuleBuilder::label(std::string text) {
  draft().label = std::move(text);
  return *this;
}

ConstraintDecl& ConstraintDecl::set_data(std::vector<TypeTag> tags) {
  program_->require_setup();
  program_->constraints_.at(id_.value).data_tags = std::move(tags);
  return *this;
}

// ---------------------------------------------------------------------------
// Program

Program::Program(std::string name) : name_(std::move(name)) {
  constraints_.push_back({kFailConstraint, "fail", {}, {}});
  constraint_by_symbol_.emplace(kFailSymbol, kFailConstraint);
}

void Program::require_setup() const {
  if (sealed_) {
    throw HandlerError(ErrorCode::DeclarationAfterSetup,
                       "program '" + name_ + "' is already compiled");
  }
}

Symbol Program::symbol(std::string name) {
  require_setup();
  return Symbol{SymbolId{next_symbol_++}, std::move(name)};
}

ConstraintDecl Program::declare_constraint(const Symbol& name,
                                           std::vector<TypeTag> key_tags,
                                           std::vector<TypeTag> data_tags) {
  require_setup();
  if (name.id == kFailSymbol || name.id == kWildcardSymbol) {
    throw HandlerError(ErrorCode::ReservedName,
                       "'" + name.name + "' is predefined");
  }
  bool clash = constraint_by_symbol_.contains(name.id) ||
               std::any_of(constraints_.begin(), constraints_.end(),
                           [&](const auto& s) { return s.name == name.name; });
  if (clash) {
    throw HandlerError(ErrorCode::DuplicateConstraint,
                       "constraint '" + name.name + "' already declared");
  }
  ConstraintId id{static_cast<std::uint32_t>(constraints_.size())};
  constraints_.push_back({id, name.name, std::move(key_tags), std::move(data_tags)});
  constraint_by_symbol_.emplace(name.id, id);
  return ConstraintDecl{*this, id};
}

std::optional<ConstraintId> Program::find_constraint(SymbolId symbol) const {
  auto it = constraint_by_symbol_.find(symbol);
  if (it == constraint_by_symbol_.end()) return std::nullopt;
  return it->second;
}

std::size_t Program::new_rule() {
  require_setup();
  rules_.emplace_back();
  return rules_.size() - 1;
}

void Program::add_rule(RuleDraft draft) {
  require_setup();
  rules_.push_back(std::move(draft));
}

void Program::guard(GuardSpec spec, GuardFn fn) {
  require_setup();
  guards_.register_guard(std::move(spec), std::move(fn));
}

std::shared_ptr<const CompiledProgram> Program::compile() {
  auto compiled = compile_program(*this);
  sealed_ = true;
  return compiled;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

class RuleCompiler {
 public:
  RuleCompiler(const Program& program, const CompiledProgram& out,
               std::size_t index)
      : program_(program), out_(out), index_(index) {}

  Rule compile(const RuleDraft& draft) {
    if (draft.fault) {
      throw HandlerError(draft.fault->code(), draft.fault->description(),
                         index_, draft.fault->atom());
    }
    Rule rule;
    rule.index = index_;
    rule.label = draft.label;
    if (draft.heads.empty()) fail(ErrorCode::EmptyHead, "rule has no head");

    for (const AtomDraft& atom : draft.heads) {
      auto [id, key, data] = resolve(atom);
      rule.heads.push_back({id, std::move(key), std::move(data), atom.passive,
                            atom.keep});
      for (const Pattern& p : rule.heads.back().key) note_binding(p);
      for (const Pattern& p : rule.heads.back().data) note_binding(p);
      ++position_;
    }
    if (std::all_of(rule.heads.begin(), rule.heads.end(),
                    [](const HeadElement& h) { return h.passive; })) {
      position_ = 0;
      fail(ErrorCode::AllHeadsPassive, "every head element is passive");
    }

    for (const GuardAtom& g : draft.guards) {
      check_guard(g);
      rule.guards.push_back(g);
      ++position_;
    }

    for (const AtomDraft& atom : draft.body) {
      auto [id, key, data] = resolve(atom);
      for (const auto* fields : {&key, &data}) {
        for (const Pattern& p : *fields) {
          if (p.kind() == Pattern::Kind::Wildcard) {
            fail(ErrorCode::UnboundBodySymbol, "wildcard in a body atom");
          }
          if (p.kind() == Pattern::Kind::Bind && !bound_.contains(p.symbol().id)) {
            fail(ErrorCode::UnboundBodySymbol,
                 "symbol '" + p.symbol().name + "' is never bound");
          }
        }
      }
      rule.body.push_back({id, std::move(key), std::move(data)});
      ++position_;
    }
    return rule;
  }

 private:
  [[noreturn]] void fail(ErrorCode code, std::string description) const {
    throw HandlerError(code, std::move(description), index_, position_);
  }

  void note_binding(const Pattern& p) {
    if (p.kind() == Pattern::Kind::Bind) bound_.insert(p.symbol().id);
  }

  std::tuple<ConstraintId, std::vector<Pattern>, std::vector<Pattern>> resolve(
      const AtomDraft& atom) const {
    auto id = program_.find_constraint(atom.constraint.id);
    if (!id) {
      fail(ErrorCode::UnknownConstraint,
           "constraint '" + atom.constraint.name + "' is not declared");
    }
    const ConstraintSignature& sig = out_.signature(*id);
    if (atom.key.size() != sig.key_tags.size() ||
        atom.data.size() != sig.data_tags.size()) {
      fail(ErrorCode::ArityMismatch,
           "'" + sig.name + "' expects " + std::to_string(sig.key_tags.size()) +
               " key and " + std::to_string(sig.data_tags.size()) +
               " data fields, got " + std::to_string(atom.key.size()) + " and " +
               std::to_string(atom.data.size()));
    }
    check_literals(atom.key, sig.key_tags, sig.name);
    check_literals(atom.data, sig.data_tags, sig.name);
    return {*id, atom.key, atom.data};
  }

  void check_literals(const std::vector<Pattern>& patterns,
                      const std::vector<TypeTag>& tags,
                      const std::string& name) const {
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      if (patterns[i].kind() == Pattern::Kind::Literal &&
          !type_check(patterns[i].value(), tags[i])) {
        fail(ErrorCode::PatternTypeMismatch,
             "literal " + to_text(patterns[i].value()) + " in field " +
                 std::to_string(i) + " of '" + name + "'");
      }
    }
  }

  void check_guard(const GuardAtom& g) {
    const auto* entry = out_.guards().find(g.name);
    if (entry == nullptr) {
      fail(ErrorCode::UnknownGuard, "guard '" + g.name + "' is not registered");
    }
    const GuardSpec& spec = entry->spec;
    if (!spec.accepts_arity(g.args.size())) {
      fail(ErrorCode::GuardArityMismatch,
           "guard '" + g.name + "' does not take " +
               std::to_string(g.args.size()) + " arguments");
    }
    std::vector<SymbolId> outputs;
    for (std::size_t i = 0; i < g.args.size(); ++i) {
      const Pattern& p = g.args[i];
      if (is_out(spec.param_at(i))) {
        if (g.negated) {
          fail(ErrorCode::NegatedGuardWithOutParam,
               "negated guard '" + g.name + "' has out-parameter " +
                   std::to_string(i));
        }
        if (p.kind() != Pattern::Kind::Bind) {
          fail(ErrorCode::GuardParamKind,
               "out-parameter " + std::to_string(i) + " of '" + g.name +
                   "' needs a symbol");
        }
        outputs.push_back(p.symbol().id);
        continue;
      }
      if (p.kind() == Pattern::Kind::Wildcard) {
        fail(ErrorCode::GuardParamKind,
             "wildcard passed to input " + std::to_string(i) + " of '" +
                 g.name + "'");
      }
      if (p.kind() == Pattern::Kind::Bind && !bound_.contains(p.symbol().id)) {
        fail(ErrorCode::UnboundGuardSymbol,
             "symbol '" + p.symbol().name + "' is unbound at guard '" +
                 g.name + "'");
      }
    }
    bound_.insert(outputs.begin(), outputs.end());
  }

  const Program& program_;
  const CompiledProgram& out_;
  std::size_t index_;
  std::size_t position_ = 0;
  std::set<SymbolId> bound_;
};

}  // namespace

std::shared_ptr<const CompiledProgram> compile_program(const Program& program) {
  auto out = std::make_shared<CompiledProgram>();
  out->name_ = program.name();
  out->constraints_ = program.constraints();
  out->guards_ = program.guards();

  for (std::size_t i = 0; i < program.rules().size(); ++i) {
    RuleCompiler rc{program, *out, i + 1};
    out->rules_.push_back(rc.compile(program.rules()[i]));
  }
  for (const Rule& rule : out->rules_) {
    for (std::size_t h = 0; h < rule.heads.size(); ++h) {
      if (!rule.heads[h].passive) {
        out->occurrences_[rule.heads[h].constraint].push_back({rule.index, h});
      }
    }
  }
  return out;
}

}  // namespace cr

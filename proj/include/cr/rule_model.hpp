#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "cr/error.hpp"
#include "cr/fact.hpp"
#include "cr/guards.hpp"
#include "cr/value.hpp"

namespace cr {

struct SymbolId {
  std::uint32_t value = 0;
  auto operator<=>(const SymbolId&) const = default;
};

inline constexpr SymbolId kFailSymbol{0};
inline constexpr SymbolId kWildcardSymbol{1};

/// A handler-scoped name for constraints and rule variables.
struct Symbol {
  SymbolId id;
  std::string name;

  bool operator==(const Symbol& o) const { return id == o.id; }
};

struct ConstraintSignature {
  ConstraintId id;
  std::string name;
  std::vector<TypeTag> key_tags;
  std::vector<TypeTag> data_tags;
};

class Pattern {
 public:
  enum class Kind { Literal, Bind, Wildcard };

  static Pattern literal(Value v) { return Pattern{Kind::Literal, std::move(v), {}}; }
  static Pattern bind(Symbol s) { return Pattern{Kind::Bind, {}, std::move(s)}; }
  static Pattern wildcard() { return Pattern{Kind::Wildcard, {}, {}}; }

  Kind kind() const { return kind_; }
  const Value& value() const { return value_; }
  const Symbol& symbol() const { return symbol_; }

 private:
  Pattern(Kind k, Value v, Symbol s)
      : kind_(k), value_(std::move(v)), symbol_(std::move(s)) {}

  Kind kind_;
  Value value_;
  Symbol symbol_;
};

struct HeadElement {
  ConstraintId constraint;
  std::vector<Pattern> key;
  std::vector<Pattern> data;
  bool passive = false;
  bool keep = false;
};

struct GuardAtom {
  std::string name;
  bool negated = false;
  std::vector<Pattern> args;
};

struct BodyAtom {
  ConstraintId constraint;
  std::vector<Pattern> key;
  std::vector<Pattern> data;
};

struct Rule {
  std::size_t index = 0;  // 1-based, definition order
  std::string label;
  std::vector<HeadElement> heads;
  std::vector<GuardAtom> guards;
  std::vector<BodyAtom> body;
};

/// An active head element: (1-based rule index, head position).
struct Occurrence {
  std::size_t rule = 0;
  std::size_t head = 0;
  bool operator==(const Occurrence&) const = default;
};

using OccurrenceIndex = std::map<ConstraintId, std::vector<Occurrence>>;

/// Variable bindings accumulated while matching one rule instance.
class BindingFrame {
 public:
  const Value* find(SymbolId s) const;
  /// Adds a binding; returns false when s is already bound.
  bool bind(SymbolId s, Value v);
  std::size_t size() const { return entries_.size(); }
  bool operator==(const BindingFrame&) const = default;

 private:
  std::vector<std::pair<SymbolId, Value>> entries_;
};

/// Matches one head element against a fact of the same constraint. Repeated
/// symbols require equal values. The input frame is never modified.
std::optional<BindingFrame> match_head(const HeadElement& element,
                                       const Fact& fact,
                                       const BindingFrame& bindings);
std::optional<BindingFrame> match_head(const HeadElement& element,
                                       ConstraintId constraint,
                                       const KeyTuple& key,
                                       const DataTuple& data,
                                       const BindingFrame& bindings);

/// Rule as written, before constraint resolution and binding analysis.
struct AtomDraft {
  Symbol constraint;
  std::vector<Pattern> key;
  std::vector<Pattern> data;
  bool passive = false;
  bool keep = false;
  bool has_data = false;
};

struct RuleDraft {
  std::string label;
  std::vector<AtomDraft> heads;
  std::vector<GuardAtom> guards;
  std::vector<AtomDraft> body;
  /// First structural problem noticed by the builder, reported on compile.
  std::optional<HandlerError> fault;
};

class CompiledProgram {
 public:
  const std::string& name() const { return name_; }
  const std::vector<ConstraintSignature>& constraints() const { return constraints_; }
  const ConstraintSignature& signature(ConstraintId id) const {
    return constraints_.at(id.value);
  }
  std::optional<ConstraintId> find_constraint(std::string_view name) const;

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(std::size_t index) const { return rules_.at(index - 1); }
  const OccurrenceIndex& occurrences() const { return occurrences_; }
  const std::vector<Occurrence>& occurrences_of(ConstraintId id) const;
  const GuardRegistry& guards() const { return guards_; }

  std::string rule_label(std::size_t index) const;
  std::string render(const Fact& fact) const;

 private:
  friend std::shared_ptr<const CompiledProgram> compile_program(
      const class Program&);

  std::string name_;
  std::vector<ConstraintSignature> constraints_;
  std::vector<Rule> rules_;
  OccurrenceIndex occurrences_;
  GuardRegistry guards_;
};

class Program;

/// Fluent rule builder. Sections must appear in the order head, guard, body;
/// `and_` continues the current section, a string first argument always
/// denotes a guard and a symbol a head or body atom.
class RuleBuilder {
 public:
  RuleBuilder(Program& program, std::size_t slot) : program_(&program), slot_(slot) {}

  template <typename... Args>
  RuleBuilder& and_(const Symbol& constraint, Args&&... keys) {
    return add_atom(constraint, patterns(std::forward<Args>(keys)...));
  }
  template <typename... Args>
  RuleBuilder& and_(std::string_view guard, Args&&... args) {
    return add_guard(guard, patterns(std::forward<Args>(args)...));
  }
  template <typename... Args>
  RuleBuilder& and_(const char* guard, Args&&... args) {
    return add_guard(guard, patterns(std::forward<Args>(args)...));
  }
  template <typename... Args>
  RuleBuilder& with(Args&&... data) {
    return add_data(patterns(std::forward<Args>(data)...));
  }
  template <typename... Args>
  RuleBuilder& where(std::string_view guard, Args&&... args) {
    return start_guards(guard, patterns(std::forward<Args>(args)...));
  }
  template <typename... Args>
  RuleBuilder& then(const Symbol& constraint, Args&&... keys) {
    return start_body(constraint, patterns(std::forward<Args>(keys)...));
  }
  RuleBuilder& passive();
  RuleBuilder& keep();
  RuleBuilder& label(std::string text);

 private:
  enum class Section { Head, Guard, Body };

  template <typename... Args>
  std::vector<Pattern> patterns(Args&&... args) {
    std::vector<Pattern> out;
    out.reserve(sizeof...(Args));
    (out.push_back(to_pattern(std::forward<Args>(args))), ...);
    return out;
  }
  Pattern to_pattern(const Symbol& s);
  Pattern to_pattern(Pattern p) { return p; }
  template <typename T>
    requires std::is_constructible_v<Value, T>
  Pattern to_pattern(T&& v) {
    return Pattern::literal(Value(std::forward<T>(v)));
  }

  RuleBuilder& add_atom(const Symbol& constraint, std::vector<Pattern> keys);
  RuleBuilder& add_guard(std::string_view guard, std::vector<Pattern> args);
  RuleBuilder& add_data(std::vector<Pattern> data);
  RuleBuilder& start_guards(std::string_view guard, std::vector<Pattern> args);
  RuleBuilder& start_body(const Symbol& constraint, std::vector<Pattern> keys);
  RuleDraft& draft();
  void fault(ErrorCode code, std::string description, bool on_last_atom = false);
  std::size_t atom_position() const;

  Program* program_;
  std::size_t slot_;
  Section section_ = Section::Head;
};

/// Declaration proxy returned by Program::constraint for `.with(...)`.
class ConstraintDecl {
 public:
  ConstraintDecl(Program& program, ConstraintId id) : program_(&program), id_(id) {}
  template <typename... Tags>
  ConstraintDecl& with(Tags... tags) {
    return set_data({tags...});
  }
  ConstraintId id() const { return id_; }

 private:
  ConstraintDecl& set_data(std::vector<TypeTag> tags);
  Program* program_;
  ConstraintId id_;
};

/// Setup-phase handler description: symbols, constraint declarations, rules
/// and guards. compile() validates it and seals it against further changes.
class Program {
 public:
  explicit Program(std::string name = "handler");

  const std::string& name() const { return name_; }

  /// A fresh symbol; symbols are never shared between calls.
  Symbol symbol(std::string name);
  const Symbol& fail() const { return fail_; }
  const Symbol& wildcard() const { return wildcard_; }

  template <typename... Tags>
  ConstraintDecl constraint(const Symbol& name, Tags... key_tags) {
    return declare_constraint(name, {key_tags...}, {});
  }
  ConstraintDecl declare_constraint(const Symbol& name,
                                    std::vector<TypeTag> key_tags,
                                    std::vector<TypeTag> data_tags);

  template <typename... Args>
  RuleBuilder when(const Symbol& constraint, Args&&... keys) {
    RuleBuilder b{*this, new_rule()};
    return std::move(b.and_(constraint, std::forward<Args>(keys)...));
  }
  /// Appends a rule assembled without the fluent builder.
  void add_rule(RuleDraft draft);

  void guard(GuardSpec spec, GuardFn fn);
  const GuardRegistry& guards() const { return guards_; }

  const std::vector<ConstraintSignature>& constraints() const { return constraints_; }
  std::optional<ConstraintId> find_constraint(SymbolId symbol) const;
  const std::vector<RuleDraft>& rules() const { return rules_; }

  /// Runs compile_program and seals the program.
  std::shared_ptr<const CompiledProgram> compile();
  bool sealed() const { return sealed_; }

 private:
  friend class RuleBuilder;
  friend class ConstraintDecl;

  std::size_t new_rule();
  void require_setup() const;

  std::string name_;
  std::uint32_t next_symbol_ = 2;
  Symbol fail_{kFailSymbol, "fail"};
  Symbol wildcard_{kWildcardSymbol, "_"};
  std::vector<ConstraintSignature> constraints_;
  std::map<SymbolId, ConstraintId> constraint_by_symbol_;
  std::vector<RuleDraft> rules_;
  GuardRegistry guards_;
  bool sealed_ = false;
};

/// Validates every rule and builds the occurrence index. Throws HandlerError
/// carrying the rule index and atom position of the first fault.
std::shared_ptr<const CompiledProgram> compile_program(const Program& program);

}  // namespace cr

#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tidal/attribution.hpp"
#include "tidal/model.hpp"

namespace tidal::explain {

/// Placeholders are written {{NAME}}; NAME may contain any character but '}'.
std::vector<std::string> placeholders_in(std::string_view text);

/// Compressed subroutine form, rendered as `NAME (in, ...):out,...`.
struct CallSignature {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  bool operator==(const CallSignature&) const = default;
};

struct SchematicSentence {
  std::string id;
  std::string text;
  std::vector<std::string> dummies;
  std::optional<CallSignature> signature;
  bool operator==(const SchematicSentence&) const = default;
};

/// Builds a sentence whose dummies are the placeholders of `text`.
SchematicSentence make_sentence(std::string id, std::string text);

using Value = std::variant<double, std::string>;

/// Doubles use the shortest round-trip form with an uppercase exponent marker.
std::string format_value(const Value& value);

struct FillingEntry {
  std::string domain;
  std::optional<Value> binding;
  bool operator==(const FillingEntry&) const = default;
};

struct FillingInstructions {
  std::map<std::string, FillingEntry> entries;
  /// Narrative directions; may contain placeholders.
  std::vector<std::string> statements;
  bool operator==(const FillingInstructions&) const = default;
};

enum class Role { premise, derived, explanandum };
std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct ClassificationEntry {
  std::string id;
  Role role = Role::premise;
  std::vector<std::string> from;
  bool operator==(const ClassificationEntry&) const = default;
};

using Classification = std::vector<ClassificationEntry>;

enum class CommentKind { usage_note, alternative_instantiation, error_term };
std::string_view to_string(CommentKind kind);
CommentKind comment_kind_from_string(std::string_view text);

enum class ErrorLabel { local_discretization, accumulated, roundoff };
std::string_view to_string(ErrorLabel label);
ErrorLabel error_label_from_string(std::string_view text);

/// Error of order h^(numerator/denominator).
struct ErrorTerm {
  ErrorLabel label = ErrorLabel::local_discretization;
  int exponent_numerator = 0;
  int exponent_denominator = 1;
  std::vector<std::string> constants;
  bool operator==(const ErrorTerm&) const = default;
};

struct Comment {
  std::string id;
  CommentKind kind = CommentKind::usage_note;
  std::string text;
  std::vector<ErrorTerm> error_terms;  // non-empty iff kind == error_term
  bool operator==(const Comment&) const = default;
};

struct ArgumentPattern {
  std::string name;
  std::vector<SchematicSentence> sentences;
  FillingInstructions filling;
  Classification classification;
  std::vector<Comment> comments;
  bool operator==(const ArgumentPattern&) const = default;
};

/// Structural problems of a pattern other than its classification: sentence
/// placeholders not matching declared dummies, duplicate ids, dummies without
/// a filling entry, error-term comments without terms, unusable exponents.
std::vector<std::string> validate_structure(const ArgumentPattern& pattern);

class MissingBinding : public std::runtime_error {
 public:
  explicit MissingBinding(std::vector<std::string> dummies);
  const std::vector<std::string>& dummies() const { return dummies_; }

 private:
  std::vector<std::string> dummies_;
};

using Bindings = std::map<std::string, Value>;

struct InstantiatedSentence {
  std::string id;
  std::string text;
  bool operator==(const InstantiatedSentence&) const = default;
};

/// Replaces every placeholder of `text` from `bindings`. Throws
/// MissingBinding listing every unbound placeholder.
std::string fill(std::string_view text, const Bindings& bindings);

/// Sentence texts with all dummies replaced. Explicit bindings take
/// precedence over the filling's concrete ones.
std::vector<InstantiatedSentence> instantiate(const ArgumentPattern& pattern,
                                              const Bindings& bindings = {});
std::vector<std::string> instantiate_filling(const ArgumentPattern& pattern,
                                             const Bindings& bindings = {});

enum class DefectKind {
  no_explanandum,
  multiple_explananda,
  unknown_reference,
  unclassified,
  duplicate_entry,
  premise_with_sources,
  missing_sources,
  cycle,
  unreachable,  // the explanandum cannot be derived from premises
  unsupported,  // a sentence lies on no derivation path into the explanandum
};
std::string_view to_string(DefectKind kind);

struct Defect {
  DefectKind kind;
  std::vector<std::string> ids;
  std::string message;
};

/// A sentence is derivable when it is a premise or when all of its sources
/// are derivable. A classification is accepted when it names each sentence
/// exactly once, has one explanandum, an acyclic from-relation with known
/// ids, a derivable explanandum, and every other sentence is an ancestor of
/// the explanandum.
std::vector<Defect> validate_classification(const ArgumentPattern& pattern);

/// Sentence ids in dependency order; ties keep pattern order. Requires an
/// acyclic classification.
std::vector<std::string> derivation_trace(const Classification& classification,
                                          std::span<const SchematicSentence> sentences);

struct Measurement {
  std::string name;
  double value = 0.0;
  bool operator==(const Measurement&) const = default;
};

struct EvidenceCheck {
  std::string id;
  std::string claim;
  bool passed = false;
  std::vector<Measurement> measured;
  std::vector<std::string> basis;  // sentence ids the check rests on
  std::string detail;
  bool operator==(const EvidenceCheck&) const = default;
};

struct ExplanationReport {
  std::string pattern_name;
  std::vector<InstantiatedSentence> sentences;
  std::vector<std::string> filling;
  Classification classification;
  std::vector<std::string> derivation_trace;
  std::vector<EvidenceCheck> evidence;
  std::vector<Comment> comments;
  std::optional<std::string> verdict;
  bool supported = false;
  std::vector<std::string> sources;
  bool operator==(const ExplanationReport&) const = default;
};

struct DeriveOptions {
  /// Artifact references recorded in the report.
  std::vector<std::string> sources;
  /// Spike-to-minimum tolerance; zero uses the median sample spacing.
  double output_interval = 0.0;
};

/// Builds the report for `pattern` against a diagnostics series and an
/// optional convergence study. Throws std::invalid_argument if the
/// classification has defects and MissingBinding if a dummy is unbound.
ExplanationReport derive(const ArgumentPattern& pattern,
                         std::span<const OrbitalDiagnostics> diagnostics,
                         const StudySummary* study,
                         const DeriveOptions& options = {});

enum class Format { plain_text, structured };

std::string render_report(const ExplanationReport& report, Format format);
ExplanationReport parse_report(std::string_view structured);

std::string format_pattern(const ArgumentPattern& pattern);
ArgumentPattern parse_pattern(std::string_view text);

/// The shipped tidal-satellite pattern, as stored in the pattern file.
ArgumentPattern default_satellite_pattern_document();

/// The shipped pattern with concrete bindings taken from `config`. The
/// discretization-error sentence is kept only when `fault_injection` is
/// nonzero, and then bound to it.
ArgumentPattern satellite_pattern(const SimulationConfig& config,
                                  double fault_injection = 0.0);

}  // namespace tidal::explain

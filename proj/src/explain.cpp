#include "tidal/explain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tidal/diagnostics.hpp"

namespace tidal::explain {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Templates

std::vector<std::string> placeholders_in(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    const auto close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) break;
    std::string name(text.substr(pos + 2, close - pos - 2));
    if (std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(std::move(name));
    }
    pos = close + 2;
  }
  return out;
}

SchematicSentence make_sentence(std::string id, std::string text) {
  SchematicSentence s;
  s.id = std::move(id);
  s.dummies = placeholders_in(text);
  s.text = std::move(text);
  return s;
}

std::string format_value(const Value& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, std::get<double>(value));
  std::string out(buf, ptr);
  std::replace(out.begin(), out.end(), 'e', 'E');
  return out;
}

MissingBinding::MissingBinding(std::vector<std::string> dummies)
    : std::runtime_error([&] {
        std::string msg = "missing binding for";
        for (const auto& d : dummies) msg += " " + d;
        return msg;
      }()),
      dummies_(std::move(dummies)) {}

std::string fill(std::string_view text, const Bindings& bindings) {
  std::vector<std::string> missing;
  for (const auto& name : placeholders_in(text)) {
    if (!bindings.contains(name)) missing.push_back(name);
  }
  if (!missing.empty()) throw MissingBinding(std::move(missing));

  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("{{", pos);
    const auto close =
        open == std::string_view::npos ? open : text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(text.substr(pos));
      return out;
    }
    out.append(text.substr(pos, open - pos));
    const std::string name(text.substr(open + 2, close - open - 2));
    out += format_value(bindings.at(name));
    pos = close + 2;
  }
}

namespace {

Bindings merged_bindings(const ArgumentPattern& pattern,
                         const Bindings& explicit_bindings) {
  Bindings all = explicit_bindings;
  for (const auto& [name, entry] : pattern.filling.entries) {
    if (entry.binding && !all.contains(name)) all.emplace(name, *entry.binding);
  }
  return all;
}

// Fills each text and collects every missing dummy before throwing.
template <typename Fn>
void fill_all(const Bindings& bindings, std::size_t count, Fn&& text_at,
              std::vector<std::string>& out) {
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < count; ++i) {
    try {
      out.push_back(fill(text_at(i), bindings));
    } catch (const MissingBinding& e) {
      for (const auto& d : e.dummies()) {
        if (std::find(missing.begin(), missing.end(), d) == missing.end()) {
          missing.push_back(d);
        }
      }
    }
  }
  if (!missing.empty()) throw MissingBinding(std::move(missing));
}

std::string render_signature(const CallSignature& sig) {
  std::string out = sig.name + " (";
  for (std::size_t i = 0; i < sig.inputs.size(); ++i) {
    out += (i ? ", " : "") + sig.inputs[i];
  }
  out += "):";
  for (std::size_t i = 0; i < sig.outputs.size(); ++i) {
    out += (i ? "," : "") + sig.outputs[i];
  }
  return out;
}

}  // namespace

std::vector<InstantiatedSentence> instantiate(const ArgumentPattern& pattern,
                                              const Bindings& bindings) {
  const Bindings all = merged_bindings(pattern, bindings);
  std::vector<std::string> texts;
  fill_all(all, pattern.sentences.size(),
           [&](std::size_t i) -> const std::string& {
             return pattern.sentences[i].text;
           },
           texts);
  std::vector<InstantiatedSentence> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& s = pattern.sentences[i];
    std::string text = std::move(texts[i]);
    if (s.signature) {
      text = text.empty() ? render_signature(*s.signature)
                          : render_signature(*s.signature) + "\n" + text;
    }
    out.push_back({s.id, std::move(text)});
  }
  return out;
}

std::vector<std::string> instantiate_filling(const ArgumentPattern& pattern,
                                             const Bindings& bindings) {
  const Bindings all = merged_bindings(pattern, bindings);
  std::vector<std::string> out;
  fill_all(all, pattern.filling.statements.size(),
           [&](std::size_t i) -> const std::string& {
             return pattern.filling.statements[i];
           },
           out);
  return out;
}

// ---------------------------------------------------------------------------
// Enumerations

std::string_view to_string(Role role) {
  switch (role) {
    case Role::premise: return "premise";
    case Role::derived: return "derived";
    case Role::explanandum: return "explanandum";
  }
  return "premise";
}

Role role_from_string(std::string_view text) {
  for (Role r : {Role::premise, Role::derived, Role::explanandum}) {
    if (to_string(r) == text) return r;
  }
  throw std::invalid_argument("unknown role: " + std::string(text));
}

std::string_view to_string(CommentKind kind) {
  switch (kind) {
    case CommentKind::usage_note: return "usage_note";
    case CommentKind::alternative_instantiation: return "alternative_instantiation";
    case CommentKind::error_term: return "error_term";
  }
  return "usage_note";
}

CommentKind comment_kind_from_string(std::string_view text) {
  for (CommentKind k : {CommentKind::usage_note,
                        CommentKind::alternative_instantiation,
                        CommentKind::error_term}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown comment kind: " + std::string(text));
}

std::string_view to_string(ErrorLabel label) {
  switch (label) {
    case ErrorLabel::local_discretization: return "local_discretization";
    case ErrorLabel::accumulated: return "accumulated";
    case ErrorLabel::roundoff: return "roundoff";
  }
  return "local_discretization";
}

ErrorLabel error_label_from_string(std::string_view text) {
  for (ErrorLabel l : {ErrorLabel::local_discretization,
                       ErrorLabel::accumulated, ErrorLabel::roundoff}) {
    if (to_string(l) == text) return l;
  }
  throw std::invalid_argument("unknown error label: " + std::string(text));
}

std::string_view to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::no_explanandum: return "no_explanandum";
    case DefectKind::multiple_explananda: return "multiple_explananda";
    case DefectKind::unknown_reference: return "unknown_reference";
    case DefectKind::unclassified: return "unclassified";
    case DefectKind::duplicate_entry: return "duplicate_entry";
    case DefectKind::premise_with_sources: return "premise_with_sources";
    case DefectKind::missing_sources: return "missing_sources";
    case DefectKind::cycle: return "cycle";
    case DefectKind::unreachable: return "unreachable";
    case DefectKind::unsupported: return "unsupported";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_structure(const ArgumentPattern& pattern) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  std::set<std::string> used;
  for (const auto& s : pattern.sentences) {
    if (!ids.insert(s.id).second) problems.push_back("duplicate sentence id " + s.id);
    const auto found = placeholders_in(s.text);
    const std::set<std::string> in_text(found.begin(), found.end());
    const std::set<std::string> declared(s.dummies.begin(), s.dummies.end());
    if (in_text != declared) {
      problems.push_back("sentence " + s.id +
                         ": placeholders and declared dummies differ");
    }
    used.insert(declared.begin(), declared.end());
  }
  for (const auto& st : pattern.filling.statements) {
    for (auto& d : placeholders_in(st)) used.insert(std::move(d));
  }
  for (const auto& d : used) {
    if (!pattern.filling.entries.contains(d)) {
      problems.push_back("dummy " + d + " has no filling instruction");
    }
  }
  for (const auto& c : pattern.comments) {
    if ((c.kind == CommentKind::error_term) == c.error_terms.empty()) {
      problems.push_back("comment " + c.id +
                         ": error terms must be present exactly for error_term comments");
    }
    for (const auto& t : c.error_terms) {
      if (t.exponent_denominator == 0) {
        problems.push_back("comment " + c.id + ": exponent has zero denominator");
      }
    }
  }
  return problems;
}

std::vector<Defect> validate_classification(const ArgumentPattern& pattern) {
  std::vector<Defect> defects;
  std::set<std::string> sentence_ids;
  for (const auto& s : pattern.sentences) sentence_ids.insert(s.id);

  std::map<std::string, const ClassificationEntry*> entry;
  for (const auto& e : pattern.classification) {
    if (!sentence_ids.contains(e.id)) {
      defects.push_back({DefectKind::unknown_reference, {e.id},
                         "classification names unknown sentence " + e.id});
      continue;
    }
    if (!entry.emplace(e.id, &e).second) {
      defects.push_back({DefectKind::duplicate_entry, {e.id},
                         "sentence " + e.id + " is classified twice"});
    }
  }
  for (const auto& s : pattern.sentences) {
    if (!entry.contains(s.id)) {
      defects.push_back({DefectKind::unclassified, {s.id},
                         "sentence " + s.id + " has no classification"});
    }
  }

  std::vector<std::string> explananda;
  std::map<std::string, std::vector<std::string>> sources;  // known ids only
  for (const auto& [id, e] : entry) {
    if (e->role == Role::explanandum) explananda.push_back(id);
    if (e->role == Role::premise && !e->from.empty()) {
      defects.push_back({DefectKind::premise_with_sources, {id},
                         "premise " + id + " lists sources"});
    }
    if (e->role != Role::premise && e->from.empty()) {
      defects.push_back({DefectKind::missing_sources, {id},
                         "sentence " + id + " follows from nothing"});
    }
    for (const auto& f : e->from) {
      if (entry.contains(f)) {
        sources[id].push_back(f);
      } else {
        defects.push_back({DefectKind::unknown_reference, {id, f},
                           "sentence " + id + " cites unknown sentence " + f});
      }
    }
  }
  if (explananda.empty()) {
    defects.push_back({DefectKind::no_explanandum, {}, "no explanandum"});
  } else if (explananda.size() > 1) {
    defects.push_back({DefectKind::multiple_explananda, explananda,
                       "more than one explanandum"});
  }

  // Kahn elimination: whatever cannot be ordered lies on or behind a cycle.
  std::map<std::string, std::size_t> pending;
  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto& [id, e] : entry) {
    pending[id] = sources[id].size();
    for (const auto& f : sources[id]) dependents[f].push_back(id);
  }
  std::deque<std::string> ready;
  for (const auto& [id, n] : pending) {
    if (n == 0) ready.push_back(id);
  }
  std::size_t ordered = 0;
  while (!ready.empty()) {
    const std::string id = ready.front();
    ready.pop_front();
    ++ordered;
    for (const auto& d : dependents[id]) {
      if (--pending[d] == 0) ready.push_back(d);
    }
  }
  if (ordered < entry.size()) {
    std::vector<std::string> stuck;
    for (const auto& [id, n] : pending) {
      if (n > 0) stuck.push_back(id);
    }
    defects.push_back({DefectKind::cycle, stuck,
                       "the from-relation is cyclic"});
  }

  if (explananda.size() != 1) return defects;
  const std::string& target = explananda.front();

  // Derivable: premises, then anything whose sources are all derivable.
  std::set<std::string> derivable;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [id, e] : entry) {
      if (derivable.contains(id)) continue;
      bool ok = e->role == Role::premise;
      if (!ok && !e->from.empty()) {
        ok = std::all_of(e->from.begin(), e->from.end(),
                         [&](const std::string& f) {
                           return derivable.contains(f);
                         });
      }
      if (ok) {
        derivable.insert(id);
        changed = true;
      }
    }
  }
  if (!derivable.contains(target)) {
    defects.push_back({DefectKind::unreachable, {target},
                       "explanandum " + target +
                           " cannot be derived from the premises"});
  }

  std::set<std::string> ancestors;
  std::deque<std::string> queue{target};
  while (!queue.empty()) {
    const std::string id = queue.front();
    queue.pop_front();
    for (const auto& f : sources[id]) {
      if (ancestors.insert(f).second) queue.push_back(f);
    }
  }
  for (const auto& [id, e] : entry) {
    if (id != target && !ancestors.contains(id)) {
      defects.push_back({DefectKind::unsupported, {id},
                         "sentence " + id + " does not support explanandum " +
                             target});
    }
  }
  return defects;
}

std::vector<std::string> derivation_trace(
    const Classification& classification,
    std::span<const SchematicSentence> sentences) {
  std::map<std::string, std::vector<std::string>> from;
  for (const auto& e : classification) from[e.id] = e.from;
  std::vector<std::string> order;
  std::set<std::string> done;
  std::vector<std::string> remaining;
  for (const auto& s : sentences) remaining.push_back(s.id);
  while (!remaining.empty()) {
    auto next = std::find_if(remaining.begin(), remaining.end(),
                             [&](const std::string& id) {
                               const auto& f = from[id];
                               return std::all_of(
                                   f.begin(), f.end(), [&](const std::string& x) {
                                     return done.contains(x) || !from.contains(x);
                                   });
                             });
    if (next == remaining.end()) {
      throw std::invalid_argument("classification is cyclic");
    }
    done.insert(*next);
    order.push_back(*next);
    remaining.erase(next);
  }
  return order;
}

// ---------------------------------------------------------------------------
// Evidence

namespace {

double series_period(std::span<const OrbitalDiagnostics> d) {
  const auto& first = d.front();
  if (first.bound && first.semi_major_axis > 0.0 && first.specific_energy < 0.0) {
    const double mu = -2.0 * first.specific_energy * first.semi_major_axis;
    return orbital_period(first.semi_major_axis, mu);
  }
  return d.back().time - d.front().time;
}

double median_spacing(std::span<const OrbitalDiagnostics> d) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < d.size(); ++i) gaps.push_back(d[i].time - d[i - 1].time);
  return gaps.empty() ? 0.0 : median(std::move(gaps));
}

std::vector<std::string> premises_of(const Classification& c,
                                     const std::string& id) {
  for (const auto& e : c) {
    if (e.id == id) return e.from;
  }
  return {};
}

}  // namespace

ExplanationReport derive(const ArgumentPattern& pattern,
                         std::span<const OrbitalDiagnostics> diagnostics,
                         const StudySummary* study,
                         const DeriveOptions& options) {
  const auto defects = validate_classification(pattern);
  if (!defects.empty()) {
    throw std::invalid_argument("pattern classification is defective: " +
                                defects.front().message);
  }

  ExplanationReport report;
  report.pattern_name = pattern.name;
  report.sentences = instantiate(pattern);
  report.filling = instantiate_filling(pattern);
  report.classification = pattern.classification;
  report.derivation_trace = derivation_trace(pattern.classification, pattern.sentences);
  report.sources = options.sources;

  std::string explanandum;
  for (const auto& e : pattern.classification) {
    if (e.role == Role::explanandum) explanandum = e.id;
  }
  const auto e_sources = premises_of(pattern.classification, explanandum);
  auto cited = [&](std::initializer_list<const char*> ids) {
    std::vector<std::string> out;
    for (const char* id : ids) {
      if (std::find(e_sources.begin(), e_sources.end(), id) != e_sources.end()) {
        out.push_back(id);
      }
    }
    return out;
  };

  SpikeDetection spikes;
  double interval = options.output_interval;
  if (!diagnostics.empty()) {
    if (!(interval > 0.0)) interval = median_spacing(diagnostics);
    spikes = detect_spikes(eccentricity_series(diagnostics),
                           {series_period(diagnostics), 5.0});
  }

  {
    EvidenceCheck check;
    check.id = "i";
    check.claim = "every eccentricity spike coincides with a local minimum of R";
    check.basis = cited({"7"});
    std::vector<double> distance;
    for (const auto& d : diagnostics) distance.push_back(d.distance);
    const auto minima = local_minima(distance);
    double worst = 0.0;
    for (const auto& ev : spikes.events) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t m : minima) {
        best = std::min(best, std::fabs(diagnostics[m].time - ev.time));
      }
      worst = std::max(worst, best);
    }
    check.measured = {{"spikes", static_cast<double>(spikes.events.size())},
                      {"distance_minima", static_cast<double>(minima.size())}};
    if (!spikes.events.empty()) {
      check.measured.push_back({"max_offset_s", worst});
      check.measured.push_back({"allowed_offset_s", interval});
    }
    if (spikes.events.empty()) {
      check.detail = spikes.series_too_short ? "series shorter than one orbit"
                                             : "no spikes detected";
    } else {
      check.passed = worst <= interval * (1.0 + 1e-9);
      check.detail = check.passed ? "all spikes at closest approach"
                                  : "a spike lies away from closest approach";
    }
    report.evidence.push_back(std::move(check));
  }

  {
    EvidenceCheck check;
    check.id = "ii";
    check.claim =
        "spin and orbital angular-momentum increments anticorrelate across each spike";
    check.basis = cited({"7", "8"});
    double worst = -1.0;
    std::size_t undefined = 0;
    for (const auto& ev : spikes.events) {
      const auto r = spin_orbit_increment_correlation(
          diagnostics, ev.window_start - ev.width, ev.window_end + ev.width);
      if (!r) {
        ++undefined;
        continue;
      }
      worst = std::max(worst, *r);
    }
    check.measured = {{"windows", static_cast<double>(spikes.events.size())},
                      {"undefined_windows", static_cast<double>(undefined)}};
    if (spikes.events.empty()) {
      check.detail = "no spike windows";
    } else {
      if (undefined < spikes.events.size()) {
        check.measured.push_back({"max_correlation", worst});
      }
      check.passed = undefined == 0 && worst < 0.0;
      check.detail = check.passed ? "exchange observed in every window"
                                  : "some window shows no exchange";
    }
    report.evidence.push_back(std::move(check));
  }

  if (study) {
    const auto& c = study->classification;
    EvidenceCheck check;
    check.id = "iii";
    check.claim = "the secular eccentricity trend is attributed by a convergence study";
    check.basis = cited({"6", "8'"});
    check.measured = {{"levels", static_cast<double>(study->levels.size())},
                      {"converged_drift_per_orbit", c.converged_drift},
                      {"converged_uncertainty", c.converged_uncertainty},
                      {"numerical_component_per_orbit", c.numerical_component}};
    for (const auto& l : study->levels) {
      if (!l.failed && l.injected_per_orbit != 0.0) {
        check.measured.push_back({"injected_per_orbit", l.injected_per_orbit});
        break;
      }
    }
    check.passed = c.verdict != Verdict::Undetermined;
    check.detail = std::string(to_string(c.verdict)) + ": " + c.rationale;
    report.verdict = std::string(to_string(c.verdict));
    report.evidence.push_back(std::move(check));
  }

  const bool attach_errors =
      study && (study->classification.verdict == Verdict::NumericalArtifact ||
                study->classification.verdict == Verdict::Mixed);
  for (const auto& c : pattern.comments) {
    if (c.kind != CommentKind::error_term || attach_errors) {
      report.comments.push_back(c);
    }
  }
  if (attach_errors) {
    const auto& fc = study->classification;
    double loosest = 0.0;
    for (const auto& l : study->levels) {
      if (!l.failed) loosest = std::max(loosest, l.tolerance);
    }
    std::ostringstream text;
    text.precision(4);
    text << "Measured tolerance-dependent eccentricity drift of "
         << fc.numerical_component << " per orbit at tolerance " << loosest
         << " m; the zero-tolerance limit is " << fc.converged_drift << " +/- "
         << fc.converged_uncertainty << " per orbit.";
    report.comments.push_back(
        {"measured", CommentKind::error_term, text.str(),
         {{ErrorLabel::accumulated, 4, 1, {"C", "p"}}}});
  }

  report.supported = std::all_of(report.evidence.begin(), report.evidence.end(),
                                 [](const EvidenceCheck& c) { return c.passed; });
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json to_json(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::get<double>(v);
}

Value value_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  return j.get<double>();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json to_json(const Comment& c) {
  json terms = json::array();
  for (const auto& t : c.error_terms) {
    terms.push_back({{"label", std::string(to_string(t.label))},
                     {"exponent", {t.exponent_numerator, t.exponent_denominator}},
                     {"constants", t.constants}});
  }
  return {{"id", c.id},
          {"kind", std::string(to_string(c.kind))},
          {"text", c.text},
          {"error_terms", terms}};
}

Comment comment_from_json(const json& j) {
  Comment c;
  c.id = j.at("id").get<std::string>();
  c.kind = comment_kind_from_string(j.at("kind").get<std::string>());
  c.text = j.at("text").get<std::string>();
  for (const auto& t : j.value("error_terms", json::array())) {
    ErrorTerm term;
    term.label = error_label_from_string(t.at("label").get<std::string>());
    term.exponent_numerator = t.at("exponent").at(0).get<int>();
    term.exponent_denominator = t.at("exponent").at(1).get<int>();
    term.constants = t.at("constants").get<std::vector<std::string>>();
    c.error_terms.push_back(std::move(term));
  }
  return c;
}

json to_json(const Classification& classification) {
  json out = json::array();
  for (const auto& e : classification) {
    out.push_back({{"id", e.id},
                   {"role", std::string(to_string(e.role))},
                   {"from", e.from}});
  }
  return out;
}

Classification classification_from_json(const json& j) {
  Classification out;
  for (const auto& e : j) {
    out.push_back({e.at("id").get<std::string>(),
                   role_from_string(e.at("role").get<std::string>()),
                   e.at("from").get<std::vector<std::string>>()});
  }
  return out;
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed ") + what + ": " + e.what());
  }
}

bool numeric_id(const std::string& id, long& value) {
  const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), value);
  return ec == std::errc{} && ptr == id.data() + id.size();
}

// "1, 2, 3, 4, 5, 8'" -> "1-5, 8'"
std::string compact_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size();) {
    long a = 0, b = 0;
    std::size_t j = i;
    if (numeric_id(ids[i], a)) {
      while (j + 1 < ids.size() && numeric_id(ids[j + 1], b) &&
             b == a + static_cast<long>(j + 1 - i)) {
        ++j;
      }
    }
    if (!out.empty()) out += ", ";
    out += j >= i + 2 ? ids[i] + "-" + ids[j] : ids[i];
    if (j == i + 1) out += ", " + ids[j];
    i = j + 1;
  }
  return out;
}

std::string indent_lines(const std::string& text, const std::string& pad) {
  std::string out;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (!first) out += "\n" + pad;
    out += line;
    first = false;
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::string format_measure(double v) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

std::string format_pattern(const ArgumentPattern& pattern) {
  json sentences = json::array();
  for (const auto& s : pattern.sentences) {
    json j = {{"id", s.id}, {"text", s.text}, {"dummies", s.dummies}};
    if (s.signature) {
      j["signature"] = {{"name", s.signature->name},
                        {"inputs", s.signature->inputs},
                        {"outputs", s.signature->outputs}};
    }
    sentences.push_back(std::move(j));
  }
  json entries = json::object();
  for (const auto& [name, e] : pattern.filling.entries) {
    entries[name] = {{"domain", e.domain},
                     {"binding", e.binding ? to_json(*e.binding) : json(nullptr)}};
  }
  json comments = json::array();
  for (const auto& c : pattern.comments) comments.push_back(to_json(c));
  json doc = {{"name", pattern.name},
              {"sentences", sentences},
              {"filling", {{"entries", entries},
                           {"statements", pattern.filling.statements}}},
              {"classification", to_json(pattern.classification)},
              {"comments", comments}};
  return doc.dump(2) + "\n";
}

ArgumentPattern parse_pattern(std::string_view text) {
  return guarded("pattern", [&] {
    const json doc = json::parse(text);
    ArgumentPattern p;
    p.name = doc.value("name", std::string{});
    for (const auto& s : doc.at("sentences")) {
      SchematicSentence sentence;
      sentence.id = s.at("id").get<std::string>();
      sentence.text = s.at("text").get<std::string>();
      sentence.dummies = s.contains("dummies")
                             ? s.at("dummies").get<std::vector<std::string>>()
                             : placeholders_in(sentence.text);
      if (s.contains("signature")) {
        const auto& sig = s.at("signature");
        sentence.signature = CallSignature{
            sig.at("name").get<std::string>(),
            sig.at("inputs").get<std::vector<std::string>>(),
            sig.at("outputs").get<std::vector<std::string>>()};
      }
      p.sentences.push_back(std::move(sentence));
    }
    const auto& filling = doc.at("filling");
    for (const auto& [name, e] : filling.at("entries").items()) {
      FillingEntry entry;
      entry.domain = e.value("domain", std::string{});
      if (e.contains("binding") && !e.at("binding").is_null()) {
        entry.binding = value_from_json(e.at("binding"));
      }
      p.filling.entries.emplace(name, std::move(entry));
    }
    p.filling.statements =
        filling.value("statements", std::vector<std::string>{});
    p.classification = classification_from_json(doc.at("classification"));
    for (const auto& c : doc.at("comments")) {
      p.comments.push_back(comment_from_json(c));
    }
    return p;
  });
}

std::string render_report(const ExplanationReport& report, Format format) {
  if (format == Format::structured) {
    json sentences = json::array();
    for (const auto& s : report.sentences) {
      sentences.push_back({{"id", s.id}, {"text", s.text}});
    }
    json evidence = json::array();
    for (const auto& c : report.evidence) {
      json measured = json::array();
      for (const auto& m : c.measured) {
        measured.push_back({{"name", m.name}, {"value", number(m.value)}});
      }
      evidence.push_back({{"id", c.id},
                          {"claim", c.claim},
                          {"passed", c.passed},
                          {"measured", measured},
                          {"basis", c.basis},
                          {"detail", c.detail}});
    }
    json comments = json::array();
    for (const auto& c : report.comments) comments.push_back(to_json(c));
    json doc = {{"pattern", report.pattern_name},
                {"sentences", sentences},
                {"filling", report.filling},
                {"classification", to_json(report.classification)},
                {"derivation_trace", report.derivation_trace},
                {"evidence", evidence},
                {"comments", comments},
                {"verdict", report.verdict ? json(*report.verdict) : json(nullptr)},
                {"supported", report.supported},
                {"sources", report.sources}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "Argument pattern: " << report.pattern_name << "\n\n";
  out << "Schematic Sentences:\n";
  for (const auto& s : report.sentences) {
    const std::string label = "  " + s.id + ". ";
    out << label << indent_lines(s.text, std::string(label.size(), ' ')) << '\n';
  }
  out << "\nFilling Instructions:\n";
  for (const auto& f : report.filling) out << "  " << f << '\n';

  out << "\nClassification:\n";
  std::vector<std::string> premises;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> derived;
  for (const auto& e : report.classification) {
    if (e.role == Role::premise) {
      premises.push_back(e.id);
    } else if (e.role == Role::derived) {
      auto it = std::find_if(derived.begin(), derived.end(),
                             [&](const auto& g) { return g.first == e.from; });
      if (it == derived.end()) {
        derived.push_back({e.from, {e.id}});
      } else {
        it->second.push_back(e.id);
      }
    }
  }
  if (!premises.empty()) out << "  Premises: " << compact_ids(premises) << '\n';
  for (const auto& [from, ids] : derived) {
    out << "  Derived: " << compact_ids(ids) << " from " << compact_ids(from) << '\n';
  }
  for (const auto& e : report.classification) {
    if (e.role == Role::explanandum) {
      out << "  Explanandum: " << e.id << " follows from " << compact_ids(e.from)
          << '\n';
    }
  }
  if (!report.derivation_trace.empty()) {
    out << "  Derivation order:";
    for (const auto& id : report.derivation_trace) out << ' ' << id;
    out << '\n';
  }

  out << "\nComments:\n";
  for (const auto& c : report.comments) {
    const std::string label = "  " + c.id + ". ";
    out << label << "[" << to_string(c.kind) << "] "
        << indent_lines(c.text, std::string(label.size(), ' ')) << '\n';
    for (const auto& t : c.error_terms) {
      out << std::string(label.size(), ' ') << "error term: " << to_string(t.label)
          << ", order h^" << t.exponent_numerator;
      if (t.exponent_denominator != 1) out << '/' << t.exponent_denominator;
      if (!t.constants.empty()) {
        out << ", constants";
        for (const auto& k : t.constants) out << ' ' << k;
      }
      out << '\n';
    }
  }

  out << "\nEvidence:\n";
  for (const auto& c : report.evidence) {
    out << "  (" << c.id << ") " << (c.passed ? "PASS" : "FAIL") << "  " << c.claim
        << '\n';
    for (const auto& m : c.measured) {
      out << "      " << m.name << " = " << format_measure(m.value) << '\n';
    }
    if (!c.basis.empty()) {
      out << "      basis:";
      for (const auto& b : c.basis) out << ' ' << b;
      out << '\n';
    }
    if (!c.detail.empty()) out << "      " << c.detail << '\n';
  }

  out << "\nAttribution: " << (report.verdict ? *report.verdict : "none") << '\n';
  out << "Explanandum: " << (report.supported ? "supported" : "unsupported")
      << '\n';
  if (!report.sources.empty()) {
    out << "Sources:\n";
    for (const auto& s : report.sources) out << "  " << s << '\n';
  }
  return out.str();
}

ExplanationReport parse_report(std::string_view structured) {
  return guarded("report", [&] {
    const json doc = json::parse(structured);
    ExplanationReport r;
    r.pattern_name = doc.at("pattern").get<std::string>();
    for (const auto& s : doc.at("sentences")) {
      r.sentences.push_back({s.at("id").get<std::string>(),
                             s.at("text").get<std::string>()});
    }
    r.filling = doc.at("filling").get<std::vector<std::string>>();
    r.classification = classification_from_json(doc.at("classification"));
    r.derivation_trace = doc.at("derivation_trace").get<std::vector<std::string>>();
    for (const auto& c : doc.at("evidence")) {
      EvidenceCheck check;
      check.id = c.at("id").get<std::string>();
      check.claim = c.at("claim").get<std::string>();
      check.passed = c.at("passed").get<bool>();
      for (const auto& m : c.at("measured")) {
        check.measured.push_back({m.at("name").get<std::string>(),
                                  number_from(m.at("value"))});
      }
      check.basis = c.at("basis").get<std::vector<std::string>>();
      check.detail = c.at("detail").get<std::string>();
      r.evidence.push_back(std::move(check));
    }
    for (const auto& c : doc.at("comments")) r.comments.push_back(comment_from_json(c));
    if (!doc.at("verdict").is_null()) r.verdict = doc.at("verdict").get<std::string>();
    r.supported = doc.at("supported").get<bool>();
    r.sources = doc.at("sources").get<std::vector<std::string>>();
    return r;
  });
}

}  // namespace tidal::explain

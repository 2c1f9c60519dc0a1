#include <algorithm>

#include "satellite_pattern_data.hpp"
#include "tidal/diagnostics.hpp"
#include "tidal/explain.hpp"

namespace tidal::explain {

namespace {

constexpr const char* kErrorSentence = "8'";

std::string vector_text(const Vec3& v, const char* unit) {
  return "(" + format_value(v.x) + ", " + format_value(v.y) + ", " +
         format_value(v.z) + ") " + unit;
}

}  // namespace

ArgumentPattern default_satellite_pattern_document() {
  return parse_pattern(detail::kSatellitePatternJson);
}

ArgumentPattern satellite_pattern(const SimulationConfig& config,
                                  double fault_injection) {
  ArgumentPattern p = default_satellite_pattern_document();
  const InitialConditions ic = build_initial_state(config);
  const auto d0 = compute_diagnostics(ic.state, ic.springs, config.constants);

  auto bind = [&p](const std::string& name, Value v) {
    p.filling.entries.at(name).binding = std::move(v);
  };
  bind("CM(I)", config.mass_of_planet);
  bind("CM(J)", config.mass_of_satellite);
  bind("A", d0.semi_major_axis);
  bind("E", config.initial_eccentricity);
  bind("G", config.constants.gravitational_constant);
  const auto& bodies = ic.state.bodies;
  const BodyState& planet = bodies[ic.state.planet_index()];
  for (std::size_t k = 0; k < 3; ++k) {
    // A point-mass satellite stands in for all three components.
    const BodyState& b = bodies[std::min(k, ic.state.satellite_count() - 1)];
    const std::string n = std::to_string(k + 1);
    bind("POS(" + n + ")", vector_text(b.position - planet.position, "m"));
    bind("VEL(" + n + ")", vector_text(b.velocity - planet.velocity, "m/s"));
  }

  if (fault_injection != 0.0) {
    bind("DELTA", format_value(fault_injection) + " m per accepted step");
    return p;
  }
  std::erase_if(p.sentences,
                [](const SchematicSentence& s) { return s.id == kErrorSentence; });
  std::erase_if(p.classification, [](const ClassificationEntry& e) {
    return e.id == kErrorSentence;
  });
  for (auto& e : p.classification) std::erase(e.from, std::string(kErrorSentence));
  p.filling.entries.erase("DELTA");
  return p;
}

}  // namespace tidal::explain

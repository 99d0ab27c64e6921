#pragma once

#include <string>

#include "incidence/counting.hpp"
#include "incidence/families.hpp"

namespace incidence::serialize {

// JSONL family format: a header line {kind, delta, seed, box}, then one
// circle per line {cx, cy, r} with j/k/l present for lattice-coded circles.
// Round-trips doubles exactly (shortest round-trip printing) and lattice
// integers bit-exactly.
std::string family_to_jsonl(const families::CircleFamily& family);
families::CircleFamily family_from_jsonl(const std::string& text);

// Deterministic CSV cell for a double (shortest round-trip form).
std::string csv_double(double v);

// IncidenceReport as a JSON string, and its per-bucket census as CSV rows
// (eps, t, pairs, rectangles, max_mu, max_nu): rectangle columns aggregate
// the type histogram over each bucket's t level.
std::string report_to_json(const counting::IncidenceReport& report);
std::string report_bucket_csv(const counting::IncidenceReport& report);

std::string kind_name(families::FamilyKind kind);
families::FamilyKind kind_from_name(const std::string& name);

} // namespace incidence::serialize

#pragma once

// JSON forms of spaces, covers, operators and bundles. Doubles are written
// in shortest round-trip form, so every emitted matrix reads back
// bit-identically.

#include <filesystem>
#include <string>

#include "lipfree/certificate.hpp"
#include "lipfree/cover.hpp"
#include "lipfree/extension.hpp"
#include "lipfree/free_norm.hpp"
#include "lipfree/gluing.hpp"
#include "lipfree/metric.hpp"

namespace lipfree {

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// {"points": [...], "metric": [[...]], "base_point": i} plus an optional
// "grid" object carrying lattice metadata.
Json space_to_json(const FiniteMetricSpace& space);
// Accepts the inline form or a generator:
//   {"generator": "grid", "dims": [...], "spacing": h, "ground": "linf"}
//   {"generator": "random", "n": k, "seed": s, "lo": a, "hi": b}
FiniteMetricSpace space_from_json(const Json& j, double tol = kDefaultTolerance);

Json cover_to_json(const CoverFamily& c);
CoverFamily cover_from_json(const Json& j);
// {"sets": [[...]], "net": [...], "eps": e, "order_bound": r}
Json net_cover_to_json(const NetAndCover& nc);
NetAndCover net_cover_from_json(const Json& j);

Json free_element_to_json(const FreeElement& mu);
FreeElement free_element_from_json(const Json& j);
Json weight_operator_to_json(const WeightOperator& w);
WeightOperator weight_operator_from_json(const Json& j);

// Matrices are included only when `with_matrices` is set.
Json prop33_to_json(const Prop33Bundle& b, bool with_matrices);
Json perturbed_to_json(const PerturbedBundle& p, bool with_matrices);
Json section4_to_json(const Section4Bundle& b, bool with_matrices);
Json gluing_config_to_json(const GluingConfig& cfg, const Json& space_json);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// name,relation,claimed,measured,tol,pass,warning
std::string certificate_csv(const Certificate& c);

}  // namespace lipfree

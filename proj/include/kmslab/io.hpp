#pragma once

// JSON encodings of the library's data. Doubles are written with enough
// digits to round-trip; rationals are written as "p/q" strings.

#include <string>

#include <json.hpp>

#include "kmslab/bundle.hpp"
#include "kmslab/cocycle.hpp"
#include "kmslab/modular.hpp"
#include "kmslab/products.hpp"

namespace kmslab::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

json schema_tag(const std::string& kind);  // {"schema": "kmslab.<kind>/1"}

Complex parse_complex(const json& j, const std::string& where);
json to_json(Complex z);

Matrix parse_matrix(const json& j, const std::string& where);
json to_json(const Matrix& m);

BlockAlgebra parse_algebra(const json& j);
json to_json(const BlockAlgebra& a);

// `where` prefixes diagnostics, e.g. "flow.generator".
AlgElement parse_element(const json& j, const BlockAlgebra& a, const std::string& where = "element");
json to_json(const AlgElement& x);

// {"algebra": {...}, "generator": {...}}
InnerFlow parse_flow(const json& j);
json flow_json(const InnerFlow& f);

// {"algebra": {...}, "density": {...}, "beta": optional}
Functional parse_state(const json& j);
json state_json(const Functional& f, double beta);

// A number, or a string "p/q" / "p".
Rational parse_rational(const json& j, const std::string& where);

DimensionGroupSpec parse_dimension_group(const json& j);
json to_json(const DimensionGroupSpec& g);

// {"step", "half_range", "values": row-major phases, null where undefined}
CocycleGrid parse_cocycle(const json& j);
json to_json(const CocycleGrid& g);
Cochain parse_cochain(const json& j);
json to_json(const Cochain& c);

SpectrumFamily parse_spectrum_family(const json& j);
MatroidSpec parse_matroid(const json& j);
PointBundleSpec parse_point_bundle(const json& j);

json to_json(const KmsVerdict& v);
json to_json(const SimplexFiber& f);
json to_json(const Window& w);

// Reads a whole file, throwing ErrorCode::io on failure.
std::string read_file(const std::string& path);
json parse_text(const std::string& text);

// Shortest decimal that round-trips.
std::string format_double(double x);

}  // namespace kmslab::io

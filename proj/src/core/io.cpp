#include "kmslab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kmslab::io {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  fail(ErrorCode::parse, where + ": " + what);
}

const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  const auto it = j.find(name);
  if (it == j.end()) parse_fail(where, std::string("missing field '") + name + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where, "expected a number");
  return j.get<double>();
}

json phase_or_null(const CocycleGrid& g, int i, int j) {
  if (!g.defined(i, j)) return nullptr;
  return std::arg(g.at(i, j));
}

}  // namespace

json schema_tag(const std::string& kind) {
  return json{{"schema", "kmslab." + kind + "/" + kSchemaVersion}};
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Complex parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  parse_fail(where, "expected a number or [re, im]");
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_fail(where, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) parse_fail(where + "[0]", "expected a nonempty row");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) parse_fail(rw, "ragged matrix row");
    for (std::size_t c = 0; c < cols; ++c)
      m(Eigen::Index(r), Eigen::Index(c)) = parse_complex(j[r][c], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

BlockAlgebra parse_algebra(const json& j) {
  const json& blocks = j.is_array() ? j : field(j, "blocks", "algebra");
  if (!blocks.is_array() || blocks.empty()) parse_fail("algebra.blocks", "expected a nonempty array");
  std::vector<int> dims;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!blocks[i].is_number_integer() || blocks[i].get<int>() < 1)
      parse_fail("algebra.blocks[" + std::to_string(i) + "]", "expected a positive integer");
    dims.push_back(blocks[i].get<int>());
  }
  return BlockAlgebra(std::move(dims));
}

json to_json(const BlockAlgebra& a) {
  return json{{"blocks", std::vector<int>(a.block_dims().begin(), a.block_dims().end())}};
}

AlgElement parse_element(const json& j, const BlockAlgebra& a, const std::string& context) {
  const json& blocks = j.is_array() ? j : field(j, "blocks", context);
  if (!blocks.is_array() || static_cast<int>(blocks.size()) != a.num_blocks())
    parse_fail(context + ".blocks", "expected one matrix per block (" + std::to_string(a.num_blocks()) + ")");
  std::vector<Matrix> ms;
  for (int b = 0; b < a.num_blocks(); ++b) {
    const std::string where = context + ".blocks[" + std::to_string(b) + "]";
    Matrix m = parse_matrix(blocks[static_cast<std::size_t>(b)], where);
    if (m.rows() != a.block_dim(b) || m.cols() != a.block_dim(b))
      parse_fail(where, "expected a " + std::to_string(a.block_dim(b)) + "x" + std::to_string(a.block_dim(b)) + " matrix");
    ms.push_back(std::move(m));
  }
  return AlgElement(a, std::move(ms));
}

json to_json(const AlgElement& x) {
  json blocks = json::array();
  for (const Matrix& m : x.blocks()) blocks.push_back(to_json(m));
  return json{{"blocks", blocks}};
}

InnerFlow parse_flow(const json& j) {
  const BlockAlgebra a = parse_algebra(field(j, "algebra", "flow"));
  AlgElement h = parse_element(field(j, "generator", "flow"), a, "flow.generator");
  if (!h.is_hermitian(1e-10)) fail(ErrorCode::invalid_argument, "flow.generator: not Hermitian");
  return InnerFlow(std::move(h));
}

json flow_json(const InnerFlow& f) {
  json j = schema_tag("flow");
  j["algebra"] = to_json(f.algebra());
  j["generator"] = to_json(f.generator());
  return j;
}

Functional parse_state(const json& j) {
  const BlockAlgebra a = parse_algebra(field(j, "algebra", "state"));
  AlgElement d = parse_element(field(j, "density", "state"), a, "state.density");
  if (!d.is_hermitian(1e-10)) fail(ErrorCode::invalid_argument, "state.density: not Hermitian");
  return Functional(std::move(d));
}

json state_json(const Functional& f, double beta) {
  json j = schema_tag("state");
  j["algebra"] = to_json(f.algebra());
  j["density"] = to_json(f.density());
  j["beta"] = beta;
  return j;
}

Rational parse_rational(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) parse_fail(where, "non-finite number");
    if (const auto q = rationalize(x, 1e-12 * std::max(1.0, std::abs(x)))) return q->exact();
    return Rational(x);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    try {
      const auto slash = s.find('/');
      if (slash == std::string::npos) return Rational(BigInt(s));
      const BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
      if (den == 0) parse_fail(where, "zero denominator");
      return Rational(num, den);
    } catch (const std::runtime_error&) {
      parse_fail(where, "cannot parse rational '" + s + "'");
    }
  }
  parse_fail(where, "expected a number or a \"p/q\" string");
}

DimensionGroupSpec parse_dimension_group(const json& j) {
  DimensionGroupSpec g;
  const json& rho = field(j, "rho", "dimension_group");
  const json& unit = field(j, "unit", "dimension_group");
  if (!rho.is_array() || !unit.is_array()) parse_fail("dimension_group", "rho and unit must be arrays");
  g.rank = j.contains("rank") ? j["rank"].get<int>() : static_cast<int>(unit.size());
  if (static_cast<int>(rho.size()) != g.rank || static_cast<int>(unit.size()) != g.rank)
    parse_fail("dimension_group", "rho must be rank x rank and unit of length rank");
  for (int r = 0; r < g.rank; ++r) {
    const json& row = rho[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != g.rank)
      parse_fail("dimension_group.rho[" + std::to_string(r) + "]", "row of wrong length");
    std::vector<Rational> out;
    for (int c = 0; c < g.rank; ++c)
      out.push_back(parse_rational(row[static_cast<std::size_t>(c)],
                                   "dimension_group.rho[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
    g.rho.push_back(std::move(out));
  }
  for (int i = 0; i < g.rank; ++i)
    g.unit.push_back(parse_rational(unit[static_cast<std::size_t>(i)], "dimension_group.unit[" + std::to_string(i) + "]"));
  return g;
}

json to_json(const DimensionGroupSpec& g) {
  json j = schema_tag("dimension_group");
  j["rank"] = g.rank;
  json rho = json::array();
  for (const auto& row : g.rho) {
    json r = json::array();
    for (const Rational& x : row) r.push_back(to_string(x));
    rho.push_back(r);
  }
  j["rho"] = rho;
  json u = json::array();
  for (const Rational& x : g.unit) u.push_back(to_string(x));
  j["unit"] = u;
  return j;
}

CocycleGrid parse_cocycle(const json& j) {
  CocycleGrid g(number(field(j, "step", "cocycle"), "cocycle.step"),
                number(field(j, "half_range", "cocycle"), "cocycle.half_range"));
  const json& values = field(j, "values", "cocycle");
  const int k = g.half_points(), side = g.side();
  if (!values.is_array()) parse_fail("cocycle.values", "expected an array");
  const bool nested = !values.empty() && values[0].is_array();
  if (nested ? static_cast<int>(values.size()) != side
             : static_cast<long>(values.size()) != static_cast<long>(side) * side)
    parse_fail("cocycle.values", "expected " + std::to_string(side) + "^2 phases");
  for (int i = 0; i < side; ++i)
    for (int jj = 0; jj < side; ++jj) {
      const json& v = nested ? values[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(jj))
                             : values[static_cast<std::size_t>(i) * side + jj];
      if (v.is_null()) {
        g.undefine(i - k, jj - k);
        continue;
      }
      g.set(i - k, jj - k, std::exp(kI * number(v, "cocycle.values")));
    }
  return g;
}

json to_json(const CocycleGrid& g) {
  json j = schema_tag("cocycle");
  j["step"] = g.step();
  j["half_range"] = g.half_range();
  json values = json::array();
  const int k = g.half_points();
  for (int i = -k; i <= k; ++i)
    for (int jj = -k; jj <= k; ++jj) values.push_back(phase_or_null(g, i, jj));
  j["values"] = std::move(values);
  return j;
}

Cochain parse_cochain(const json& j) {
  Cochain c(number(field(j, "step", "cochain"), "cochain.step"),
            number(field(j, "half_range", "cochain"), "cochain.half_range"));
  const json& values = field(j, "values", "cochain");
  const int k = c.half_points();
  if (!values.is_array() || static_cast<int>(values.size()) != 2 * k + 1)
    parse_fail("cochain.values", "expected " + std::to_string(2 * k + 1) + " phases");
  for (int i = -k; i <= k; ++i) c.set(i, std::exp(kI * number(values[static_cast<std::size_t>(i + k)], "cochain.values")));
  return c;
}

json to_json(const Cochain& c) {
  json j = schema_tag("cochain");
  j["step"] = c.step();
  j["half_range"] = c.half_range();
  json values = json::array();
  for (int i = -c.half_points(); i <= c.half_points(); ++i) values.push_back(std::arg(c.at(i)));
  j["values"] = std::move(values);
  return j;
}

SpectrumFamily parse_spectrum_family(const json& j) {
  const std::string tag = field(j, "family", "spectrum_family").get<std::string>();
  if (tag == "zero") return SpectrumFamily::zero();
  if (tag == "power") return SpectrumFamily::power(number(field(j, "r", "spectrum_family"), "spectrum_family.r"));
  if (tag == "power_log" || tag == "power-log")
    return SpectrumFamily::power_log(number(field(j, "r", "spectrum_family"), "spectrum_family.r"));
  if (tag == "negated") return SpectrumFamily::negated(parse_spectrum_family(field(j, "inner", "spectrum_family")));
  if (tag == "explicit_prefix" || tag == "explicit-prefix") {
    std::vector<double> values;
    for (const json& v : field(j, "values", "spectrum_family")) values.push_back(number(v, "spectrum_family.values"));
    return SpectrumFamily::explicit_values(std::move(values));
  }
  parse_fail("spectrum_family.family", "unknown family '" + tag + "'");
}

MatroidSpec parse_matroid(const json& j) {
  MatroidSpec spec;
  if (j.contains("prefix")) {
    std::size_t i = 0;
    for (const json& t : j["prefix"]) {
      const std::string where = "matroid.prefix[" + std::to_string(i++) + "]";
      spec.prefix.push_back({parse_matrix(field(t, "h", where), where + ".h"), parse_matrix(field(t, "p", where), where + ".p")});
    }
  }
  if (j.contains("base")) spec.base = j["base"].get<int>();
  if (j.contains("tail") && !j["tail"].is_null()) {
    const std::string tail = j["tail"].get<std::string>();
    if (tail == "seven-adic" || tail == "seven_adic") {
      spec.tail = MatroidFamily::base_adic;
      spec.base = 7;
    } else if (tail == "base-adic" || tail == "base_adic") {
      spec.tail = MatroidFamily::base_adic;
    } else if (tail == "factorial") {
      spec.tail = MatroidFamily::factorial;
    } else {
      parse_fail("matroid.tail", "unknown family '" + tail + "'");
    }
  }
  return spec;
}

PointBundleSpec parse_point_bundle(const json& j) {
  const json& points = field(j, "points", "point_bundle");
  if (!points.is_array()) parse_fail("point_bundle.points", "expected an array");
  if (!points.empty() && points[0].is_object()) {
    PointBundleSpec spec;
    for (const json& p : points)
      spec.points.push_back({field(p, "label", "point_bundle.points").get<std::string>(),
                             number(field(p, "level", "point_bundle.points"), "point_bundle.points.level")});
    return spec;
  }
  std::vector<std::pair<double, double>> xy;
  for (const json& p : points) {
    const Complex z = parse_complex(p, "point_bundle.points");
    xy.emplace_back(z.real(), z.imag());
  }
  const std::string level = j.value("level", "re");
  if (level != "re" && level != "im") parse_fail("point_bundle.level", "expected \"re\" or \"im\"");
  return point_bundle_from_plane(xy, level == "im");
}

json to_json(const KmsVerdict& v) {
  json j = schema_tag("verdict");
  j["passed"] = v.passed;
  j["max_residual"] = v.max_residual;
  j["condition2_residual"] = v.condition2_residual;
  j["conditions_agree"] = v.conditions_agree;
  j["worst_pair"] = {{"block", v.worst_pair[0]},
                     {"a", {v.worst_pair[1], v.worst_pair[2]}},
                     {"b", {v.worst_pair[3], v.worst_pair[4]}}};
  return j;
}

json to_json(const SimplexFiber& f) {
  json j;
  j["beta"] = f.beta;
  j["eigenvalue"] = f.eigenvalue.s;
  j["exact"] = f.eigenvalue.exact;
  if (f.eigenvalue.exact) j["eigenvalue_exact"] = f.eigenvalue.s_exact;
  j["dimension"] = f.dimension;
  j["vertex_count"] = f.vertices.size();
  json verts = json::array();
  for (const RealVector& v : f.vertices) verts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  j["vertices"] = verts;
  if (!f.exact_vertices.empty()) j["vertices_exact"] = f.exact_vertices;
  return j;
}

json to_json(const Window& w) {
  json j = schema_tag("window");
  j["empty"] = w.empty;
  j["text"] = w.to_string();
  if (!w.empty) {
    auto endpoint = [](double x) -> json {
      if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
      return x;
    };
    j["lower"] = endpoint(w.lower);
    j["upper"] = endpoint(w.upper);
    j["lower_closed"] = w.lower_closed;
    j["upper_closed"] = w.upper_closed;
  }
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace kmslab::io

#include "kmslab/kmslab.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "kmslab/io.hpp"
#include "kmslab/periodic.hpp"
#include "kmslab/plot.hpp"

using kmslab::io::json;
namespace io = kmslab::io;

struct kmslab_flow {
  kmslab::InnerFlow flow;
};
struct kmslab_state {
  kmslab::Functional functional;
  double beta;
};
struct kmslab_dimgroup {
  kmslab::DimensionGroupSpec spec;
};
struct kmslab_cocycle {
  kmslab::CocycleGrid grid;
};

namespace {

thread_local std::string g_last_error;

kmslab_status from_code(kmslab::ErrorCode c) {
  switch (c) {
    case kmslab::ErrorCode::invalid_argument: return KMSLAB_INVALID_ARGUMENT;
    case kmslab::ErrorCode::domain: return KMSLAB_DOMAIN;
    case kmslab::ErrorCode::numerical: return KMSLAB_NUMERICAL;
    case kmslab::ErrorCode::parse: return KMSLAB_PARSE;
    case kmslab::ErrorCode::io: return KMSLAB_IO;
  }
  return KMSLAB_INTERNAL;
}

template <class F>
kmslab_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return KMSLAB_OK;
  } catch (const kmslab::Error& e) {
    g_last_error = e.what();
    return from_code(e.code());
  } catch (const json::parse_error& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return KMSLAB_PARSE;
  } catch (const json::exception& e) {
    g_last_error = std::string("unexpected JSON content: ") + e.what();
    return KMSLAB_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return KMSLAB_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KMSLAB_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return KMSLAB_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) kmslab::fail(kmslab::ErrorCode::invalid_argument, std::string(name) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const json& j) {
  if (out) *out = dup(j.dump(2) + "\n");
}

json parse(const char* text) {
  need(text, "json");
  return io::parse_text(text);
}

kmslab::ItpfiSpec parse_site(const json& j) {
  const json& m = j.is_object() && j.contains("generator") ? j["generator"] : j;
  kmslab::Matrix h = io::parse_matrix(m, "site.generator");
  kmslab::require(h.rows() == h.cols() && h.rows() > 0, kmslab::ErrorCode::invalid_argument,
                  "site generator must be a nonempty square matrix");
  kmslab::require((h - h.adjoint()).cwiseAbs().maxCoeff() <= kmslab::kDefaultTol,
                  kmslab::ErrorCode::invalid_argument, "site generator not self-adjoint");
  return {h};
}

kmslab::PeriodicFlow periodic(const kmslab::InnerFlow& flow, double period) {
  if (period <= 0) {
    auto p = kmslab::minimal_period(flow);
    if (!p) kmslab::fail(kmslab::ErrorCode::domain, "flow is not periodic");
    period = *p > 0 ? *p : 2.0 * M_PI;  // trivial flow: any period works
  }
  return kmslab::PeriodicFlow(flow, period);
}

std::string vertex_cell(const kmslab::SimplexFiber& f, std::size_t i) {
  std::string s;
  if (!f.exact_vertices.empty()) {
    for (const std::string& c : f.exact_vertices[i]) s += (s.empty() ? "" : ";") + c;
  } else {
    const kmslab::RealVector& v = f.vertices[i];
    for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? ";" : "") + io::format_double(v[k]);
  }
  return s;
}

}  // namespace

extern "C" {

const char* kmslab_version(void) { return "0.1.0"; }
const char* kmslab_schema_version(void) { return io::kSchemaVersion; }
const char* kmslab_last_error(void) { return g_last_error.c_str(); }

const char* kmslab_status_name(kmslab_status s) {
  switch (s) {
    case KMSLAB_OK: return "ok";
    case KMSLAB_INVALID_ARGUMENT: return "invalid_argument";
    case KMSLAB_PARSE: return "parse";
    case KMSLAB_DOMAIN: return "domain";
    case KMSLAB_NUMERICAL: return "numerical";
    case KMSLAB_IO: return "io";
    case KMSLAB_INTERNAL: return "internal";
  }
  return "unknown";
}

void kmslab_string_free(char* s) { std::free(s); }

kmslab_status kmslab_flow_from_json(const char* text, kmslab_flow** out) {
  return guarded([&] {
    need(out, "out");
    *out = new kmslab_flow{io::parse_flow(parse(text))};
  });
}

kmslab_status kmslab_flow_to_json(const kmslab_flow* flow, char** text) {
  return guarded([&] {
    need(flow, "flow");
    emit(text, io::flow_json(flow->flow));
  });
}

void kmslab_flow_free(kmslab_flow* flow) { delete flow; }

kmslab_status kmslab_state_from_json(const char* text, kmslab_state** out) {
  return guarded([&] {
    need(out, "out");
    const json j = parse(text);
    const double beta = j.contains("beta") && j["beta"].is_number() ? j["beta"].get<double>() : NAN;
    *out = new kmslab_state{io::parse_state(j), beta};
  });
}

kmslab_status kmslab_state_to_json(const kmslab_state* state, char** text) {
  return guarded([&] {
    need(state, "state");
    emit(text, io::state_json(state->functional, state->beta));
  });
}

void kmslab_state_free(kmslab_state* state) { delete state; }

kmslab_status kmslab_gibbs(const kmslab_flow* flow, double beta, kmslab_state** out) {
  return guarded([&] {
    need(flow, "flow");
    need(out, "out");
    kmslab::KmsState s = kmslab::gibbs(flow->flow, beta);
    *out = new kmslab_state{std::move(s.functional), beta};
  });
}

kmslab_status kmslab_verify_kms(const kmslab_flow* flow, const kmslab_state* state, double beta,
                                double tol, uint64_t seed, int* passed, char** verdict_json) {
  return guarded([&] {
    need(flow, "flow");
    need(state, "state");
    const kmslab::KmsVerdict v = kmslab::verify_kms(flow->flow, state->functional, beta, tol, seed);
    json j = io::to_json(v);
    j["beta"] = beta;
    j["tolerance"] = tol;
    j["seed"] = seed;
    if (passed) *passed = v.passed ? 1 : 0;
    emit(verdict_json, j);
  });
}

kmslab_status kmslab_simplex(const kmslab_flow* flow, double beta, char** text) {
  return guarded([&] {
    need(flow, "flow");
    const kmslab::KmsSimplex s = kmslab::kms_simplex(flow->flow, beta);
    json j = io::schema_tag("simplex");
    j["beta"] = beta;
    j["dimension"] = s.dimension();
    json verts = json::array();
    for (const kmslab::KmsState& v : s.vertices) verts.push_back(io::state_json(v.functional, beta));
    j["vertices"] = verts;
    emit(text, j);
  });
}

kmslab_status kmslab_simplex_sweep(const kmslab_flow* flow, const double* betas, size_t count,
                                   int threads, char** csv, char** svg, char** certificate_json) {
  return guarded([&] {
    need(flow, "flow");
    kmslab::require(count > 0 && betas != nullptr, kmslab::ErrorCode::invalid_argument,
                    "empty beta sweep");
    const kmslab::KmsBundle b =
        kmslab::kms_bundle_fd(flow->flow, std::vector<double>(betas, betas + count), std::max(1, threads));
    std::ostringstream os;
    os << "beta,fiber_dimension,vertex_count\n";
    kmslab::PlotSpec plot{"KMS simplex vertex count", "beta", "vertex count", {}, false};
    for (const kmslab::BundleFiber& f : b.fibers) {
      const int n = static_cast<int>(f.simplex.vertices.size());
      os << io::format_double(f.beta) << ',' << f.simplex.dimension() << ',' << n << '\n';
      plot.points.emplace_back(f.beta, n);
    }
    if (csv) *csv = dup(os.str());
    if (svg) *svg = dup(kmslab::render_svg(plot));
    json j = io::schema_tag("sweep");
    j["fibers"] = b.fibers.size();
    j["all_fibers_full"] = b.certificate.all_fibers_full;
    j["continuous"] = b.certificate.continuous;
    j["max_lipschitz_ratio"] = b.certificate.max_lipschitz_ratio;
    emit(certificate_json, j);
  });
}

kmslab_status kmslab_modular_report(const kmslab_flow* flow, double beta, int* passed, char** text) {
  return guarded([&] {
    need(flow, "flow");
    const kmslab::KmsState psi = kmslab::gibbs(flow->flow, beta);
    const kmslab::GnsTriple g = kmslab::gns(psi.functional);
    const kmslab::ModularData m = kmslab::modular_data(g);
    const kmslab::ModularComparison cmp = kmslab::compare_with_oracle(m, kmslab::modular_oracle(g));
    const kmslab::ModularIdentities ids = kmslab::check_modular_identities(g, m);
    const kmslab::KmsVerdict mf = kmslab::verify_modular_flow(flow->flow, psi);
    const kmslab::CommutantReport cr = kmslab::verify_commutant_theorem(g, m);
    const double tol = kmslab::kDefaultTol;
    const bool ok = mf.passed && cr.holds && cmp.delta_residual <= tol && cmp.conjugation_residual <= tol;

    json j = io::schema_tag("modular");
    j["beta"] = beta;
    j["hilbert_dimension"] = g.hilbert_dim;
    j["delta_spectrum"] = std::vector<double>(m.spectrum.data(), m.spectrum.data() + m.spectrum.size());
    j["oracle"] = {{"delta_residual", cmp.delta_residual},
                   {"conjugation_residual", cmp.conjugation_residual}};
    j["identities"] = {{"j_involution", ids.j_involution},
                       {"j_symmetric", ids.j_symmetric},
                       {"j_delta_j", ids.j_delta_j},
                       {"s_on_lambda", ids.s_on_lambda}};
    j["modular_flow"] = {{"passed", mf.passed},
                         {"max_residual", mf.max_residual},
                         {"times", std::vector<double>(std::begin(kmslab::kModularFlowTimes),
                                                       std::end(kmslab::kModularFlowTimes))}};
    j["commutant"] = {{"holds", cr.holds},
                      {"commutant_dimension", cr.commutant_dimension},
                      {"algebra_dimension", cr.algebra_dimension},
                      {"subspace_distance", cr.subspace_distance}};
    j["center_dimension"] = kmslab::center_dimension(g);
    j["passed"] = ok;
    if (passed) *passed = ok ? 1 : 0;
    emit(text, j);
  });
}

kmslab_status kmslab_fejer_mean(const kmslab_flow* flow, const char* element_json, int n_terms,
                                double period, char** text) {
  return guarded([&] {
    need(flow, "flow");
    kmslab::require(n_terms >= 0, kmslab::ErrorCode::invalid_argument, "n must be nonnegative");
    const kmslab::AlgElement a = io::parse_element(parse(element_json), flow->flow.algebra());
    const kmslab::PeriodicFlow p = periodic(flow->flow, period);
    const kmslab::AlgElement mean = kmslab::fejer_mean(p, a, n_terms);
    json j = io::schema_tag("fejer");
    j["n"] = n_terms;
    j["period"] = p.period();
    json weights = json::array();
    for (int k : p.occupied_degrees())
      weights.push_back({{"k", k}, {"weight", kmslab::fejer_weight(n_terms, k)}});
    j["weights"] = weights;
    j["mean"] = io::to_json(mean);
    j["norm_element"] = a.operator_norm();
    j["norm_mean"] = mean.operator_norm();
    emit(text, j);
  });
}

kmslab_status kmslab_decompose_csv(const kmslab_flow* flow, const char* element_json, double period,
                                   char** csv) {
  return guarded([&] {
    need(flow, "flow");
    const kmslab::AlgElement a = io::parse_element(parse(element_json), flow->flow.algebra());
    const kmslab::PeriodicFlow p = periodic(flow->flow, period);
    std::ostringstream os;
    os << "k,frobenius_norm\n";
    for (int k : p.occupied_degrees())
      os << k << ',' << io::format_double(kmslab::spectral_component(p, a, k).frobenius_norm()) << '\n';
    if (csv) *csv = dup(os.str());
  });
}

kmslab_status kmslab_factor_type(const char* site_json, double beta, char** text) {
  return guarded([&] {
    const kmslab::ItpfiSpec spec = parse_site(parse(site_json));
    const kmslab::FactorType t = kmslab::factor_type_itpfi(spec, beta);
    const kmslab::DifferenceGroupReport d = kmslab::difference_group(spec.site_generator);
    json j = io::schema_tag("factor_type");
    j["beta"] = beta;
    j["type"] = t.tag;
    if (t.tag == "III_lambda") j["lambda"] = t.lambda;
    j["difference_group"] = {{"kind", kmslab::to_string(d.kind)},
                             {"tolerance", d.tolerance},
                             {"generators", d.generators}};
    if (d.kind == kmslab::GroupKind::cyclic) j["difference_group"]["kappa"] = d.kappa;
    if (d.kind == kmslab::GroupKind::dense)
      j["difference_group"]["witness"] = {d.witness.first, d.witness.second};
    emit(text, j);
  });
}

kmslab_status kmslab_gamma(const char* site_json, double beta, char** text) {
  return guarded([&] {
    const kmslab::ItpfiSpec spec = parse_site(parse(site_json));
    const kmslab::GammaInvariant g = kmslab::gamma_invariant(spec, beta);
    json j = io::schema_tag("gamma");
    j["beta"] = beta;
    j["gamma"] = g.tag;
    if (g.tag == "cyclic") j["generator"] = g.generator;
    emit(text, j);
  });
}

kmslab_status kmslab_matroid(const char* spec_json, double beta, char** text) {
  return guarded([&] {
    const kmslab::MatroidSpec spec = io::parse_matroid(parse(spec_json));
    const kmslab::MatroidVerdict v = kmslab::matroid_bounded(spec, beta);
    json j = io::schema_tag("matroid");
    j["beta"] = beta;
    j["verdict"] = kmslab::to_string(v.verdict);
    j["partial_product"] = v.partial_product;
    j["partial_sum"] = v.partial_sum;
    j["reason"] = v.reason;
    emit(text, j);
  });
}

kmslab_status kmslab_trace_window(const char* family_json, char** text) {
  return guarded([&] {
    const kmslab::Window w = kmslab::trace_class_window(io::parse_spectrum_family(parse(family_json)));
    emit(text, io::to_json(w));
  });
}

kmslab_status kmslab_dimgroup_from_json(const char* text, kmslab_dimgroup** out) {
  return guarded([&] {
    need(out, "out");
    kmslab::DimensionGroupSpec g = io::parse_dimension_group(parse(text));
    kmslab::validate(g);
    *out = new kmslab_dimgroup{std::move(g)};
  });
}

void kmslab_dimgroup_free(kmslab_dimgroup* g) { delete g; }

kmslab_status kmslab_beta_spectrum(const kmslab_dimgroup* g, char** text) {
  return guarded([&] {
    need(g, "dimgroup");
    json j = io::schema_tag("bundle");
    json fibers = json::array();
    for (const kmslab::SpectrumPoint& p : kmslab::beta_spectrum(g->spec))
      fibers.push_back(io::to_json(kmslab::fiber_simplex(g->spec, p.beta)));
    j["fibers"] = fibers;
    emit(text, j);
  });
}

kmslab_status kmslab_fiber(const kmslab_dimgroup* g, double beta, char** text) {
  return guarded([&] {
    need(g, "dimgroup");
    json j = io::schema_tag("fiber");
    j.update(io::to_json(kmslab::fiber_simplex(g->spec, beta)));
    emit(text, j);
  });
}

kmslab_status kmslab_bundle_csv(const kmslab_dimgroup* g, const double* extra, size_t count,
                                char** csv) {
  return guarded([&] {
    need(g, "dimgroup");
    std::vector<double> betas;
    for (const kmslab::SpectrumPoint& p : kmslab::beta_spectrum(g->spec)) betas.push_back(p.beta);
    if (count > 0) need(extra, "extra_betas");
    for (size_t i = 0; i < count; ++i) betas.push_back(extra[i]);
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

    std::ostringstream os;
    os << "beta,fiber_dimension,vertex_count,vertices\n";
    for (double b : betas) {
      const kmslab::SimplexFiber f = kmslab::fiber_simplex(g->spec, b);
      os << io::format_double(b) << ',' << f.dimension << ',' << f.vertices.size();
      for (std::size_t i = 0; i < f.vertices.size(); ++i) os << ',' << vertex_cell(f, i);
      os << '\n';
    }
    if (csv) *csv = dup(os.str());
  });
}

kmslab_status kmslab_bundle_svg(const kmslab_dimgroup* g, char** svg) {
  return guarded([&] {
    need(g, "dimgroup");
    kmslab::PlotSpec plot{"KMS bundle fibers", "beta", "vertex count (fiber dimension + 1)", {}, true};
    for (const kmslab::SpectrumPoint& p : kmslab::beta_spectrum(g->spec))
      plot.points.emplace_back(p.beta, kmslab::fiber_simplex(g->spec, p.beta).vertices.size());
    if (svg) *svg = dup(kmslab::render_svg(plot));
  });
}

kmslab_status kmslab_point_bundle(const char* spec_json, double t, char** text) {
  return guarded([&] {
    const kmslab::PointBundleSpec spec = io::parse_point_bundle(parse(spec_json));
    const kmslab::PointFiber f = kmslab::bundle_from_points(spec, t);
    json j = io::schema_tag("point_fiber");
    j["t"] = t;
    j["dimension"] = f.dimension();
    json atoms = json::array();
    for (int i : f.atoms)
      atoms.push_back({{"index", i}, {"label", spec.points[static_cast<std::size_t>(i)].label}});
    j["atoms"] = atoms;
    emit(text, j);
  });
}

kmslab_status kmslab_scaling_measure(const char* params_json, int* passed, char** text) {
  return guarded([&] {
    const json p = parse(params_json);
    const std::string kind = p.value("kind", "atomic");
    const double lambda = p.value("lambda", 2.0);
    const double beta = p.value("beta", 0.0);
    kmslab::ScalingMeasure mu;
    if (kind == "atomic") {
      mu = kmslab::ScalingMeasure::atomic(lambda, beta, p.value("x", 1.0), p.value("truncation", 8));
    } else if (kind == "density") {
      mu = kmslab::ScalingMeasure::density(lambda, beta);
    } else {
      kmslab::fail(kmslab::ErrorCode::parse, "measure.kind: expected \"atomic\" or \"density\"");
    }
    std::vector<kmslab::TestSet> sets;
    if (p.contains("sets")) {
      for (const json& s : p["sets"]) sets.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
    } else {
      sets = {{0.5, 1.0}, {1.0, 1.0}, {0.25, 2.0}, {0.1, 0.3}};
    }
    const kmslab::ScalingReport r = kmslab::verify_scaling(mu, sets);
    const double tol = 1e-8;
    const bool ok = r.max_residual <= tol;

    json j = io::schema_tag("measure");
    j["kind"] = mu.kind_name();
    j["lambda"] = mu.lambda;
    j["beta"] = mu.beta;
    if (mu.kind == kmslab::ScalingMeasure::Kind::density) j["alpha"] = mu.alpha;
    if (mu.kind == kmslab::ScalingMeasure::Kind::atomic) {
      j["x"] = mu.x;
      j["truncation"] = mu.truncation;
      j["exact_residual"] = kmslab::to_string(kmslab::verify_scaling_exact(mu, sets));
    }
    json checks = json::array();
    for (const kmslab::ScalingCheck& c : r.checks) {
      json e = {{"set", {c.set.lo, c.set.hi}}, {"in_window", c.in_window}};
      if (c.in_window)
        e["residual"] = c.residual;
      else
        e["marker"] = "outside window";
      checks.push_back(e);
    }
    j["checks"] = checks;
    j["max_residual"] = r.max_residual;
    j["outside_window"] = r.outside_window;
    j["tolerance"] = tol;
    j["passed"] = ok;
    if (passed) *passed = ok ? 1 : 0;
    emit(text, j);
  });
}

kmslab_status kmslab_cocycle_from_json(const char* text, kmslab_cocycle** out) {
  return guarded([&] {
    need(out, "out");
    *out = new kmslab_cocycle{io::parse_cocycle(parse(text))};
  });
}

void kmslab_cocycle_free(kmslab_cocycle* c) { delete c; }

kmslab_status kmslab_cocycle_check(const kmslab_cocycle* c, char** text) {
  return guarded([&] {
    need(c, "cocycle");
    const kmslab::CocycleCheck r = kmslab::check_cocycle(c->grid);
    json j = io::schema_tag("cocycle_check");
    j["step"] = c->grid.step();
    j["half_range"] = c->grid.half_range();
    j["cocycle_residual"] = r.cocycle_residual;
    j["normalization_residual"] = r.normalization_residual;
    j["modulus_residual"] = r.modulus_residual;
    j["triples_checked"] = r.triples_checked;
    j["sampled"] = r.sampled;
    j["worst"] = {r.worst[0], r.worst[1], r.worst[2]};
    emit(text, j);
  });
}

kmslab_status kmslab_cocycle_trivialize(const kmslab_cocycle* c, char** mu_json, char** report_json) {
  return guarded([&] {
    need(c, "cocycle");
    const kmslab::TrivializeResult r = kmslab::trivialize(c->grid);
    emit(mu_json, io::to_json(r.mu));
    json j = io::schema_tag("trivialize");
    j["step"] = c->grid.step();
    j["half_range"] = c->grid.half_range();
    j["residual"] = r.residual;
    j["epsilon"] = r.epsilon;
    j["period_points"] = r.period_points;
    j["stage_b_residual"] = r.stage_b_residual;
    j["stage_d_residual"] = r.stage_d_residual;
    j["final_residual"] = r.final_residual;
    j["undefined_entries"] = r.undefined_entries;
    emit(report_json, j);
  });
}

kmslab_status kmslab_cuntz(int m, double rho, const int* a, size_t a_len, const int* b, size_t b_len,
                           char** text) {
  return guarded([&] {
    kmslab::require(m >= 2, kmslab::ErrorCode::invalid_argument, "m must be at least 2");
    if (a_len) need(a, "a");
    if (b_len) need(b, "b");
    const kmslab::CuntzWord wa{std::vector<int>(a, a + a_len)};
    const kmslab::CuntzWord wb{std::vector<int>(b, b + b_len)};
    json j = io::schema_tag("cuntz");
    j["m"] = m;
    j["a"] = wa.letters;
    j["b"] = wb.letters;
    j["trace"] = kmslab::to_string(kmslab::cuntz_trace(m, wa, wb));
    j["scaling_ratio"] = kmslab::to_string(kmslab::cuntz_scaling_ratio(m, wa));
    if (rho != 0.0) {
      j["rho"] = rho;
      j["gauge_beta"] = kmslab::gauge_kms_beta(m, rho);
    }
    emit(text, j);
  });
}

}  // extern "C"

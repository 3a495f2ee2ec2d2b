// kmslab command-line front end. All computation goes through the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kmslab/kmslab.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailedVerdict = 1;
constexpr int kExitInputError = 2;

// Carries an exit code up to main.
struct Exit {
  int code;
};

[[noreturn]] void die(const std::string& msg) {
  std::cerr << "kmslab: " << msg << '\n';
  throw Exit{kExitInputError};
}

void check(kmslab_status s) {
  if (s != KMSLAB_OK) die(std::string(kmslab_status_name(s)) + ": " + kmslab_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) die("cannot write " + path);
}

// Owns a string returned by the library.
struct Str {
  char* p = nullptr;
  ~Str() { kmslab_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};
using Flow = Handle<kmslab_flow, kmslab_flow_free>;
using State = Handle<kmslab_state, kmslab_state_free>;
using DimGroup = Handle<kmslab_dimgroup, kmslab_dimgroup_free>;
using Cocycle = Handle<kmslab_cocycle, kmslab_cocycle_free>;

void load_flow(const std::string& path, Flow& f) { check(kmslab_flow_from_json(read_file(path).c_str(), &f.p)); }

int thread_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("KMSLAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) die("KMSLAB_THREADS must be a positive integer");
    n = static_cast<int>(std::min<long>(n, cap));
  }
  return n;
}

// lo:hi:steps, half-open: β_i = lo + i(hi - lo)/steps for 0 ≤ i < steps.
std::vector<double> parse_beta_range(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string::npos) die("--beta-range expects lo:hi:steps");
  double lo = 0, hi = 0;
  long steps = 0;
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, c1), b = text.substr(c1 + 1, c2 - c1 - 1), c = text.substr(c2 + 1);
    lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    steps = std::stol(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
  } catch (const std::exception&) {
    die("--beta-range expects lo:hi:steps, got '" + text + "'");
  }
  if (steps <= 0) die("--beta-range: empty sweep (steps must be positive)");
  if (!(hi > lo)) die("--beta-range: hi must exceed lo");
  std::vector<double> out;
  for (long i = 0; i < steps; ++i) out.push_back(lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(steps));
  return out;
}

std::vector<int> parse_word(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      die("word letters must be comma-separated integers, got '" + text + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kmslab: KMS states, modular data and KMS bundles at desk scale"};
  app.set_version_flag("--version", std::string("kmslab ") + kmslab_version() + " (schema " +
                                        kmslab_schema_version() + ")");
  app.require_subcommand(1);

  std::string flow_path, state_path, out_path, plot_path, report_path, range_text, element_path;
  std::string site_path, spec_path, dg_path, in_path, json_path, family;
  double beta = 0.0, tol = 1e-9, period = 0.0, r = 0.0, t = 0.0, rho = 0.0;
  double lambda = 2.0, x = 1.0, trivialize_tol = 1e-6;
  std::uint64_t seed = 0;
  int n_terms = 0, base = 7, truncation = 8, m = 2;
  bool negate = false;
  std::string kind = "atomic", sets_path, word_a, word_b;

  auto* gibbs = app.add_subcommand("gibbs", "Gibbs state e^{-βh}/Tr e^{-βh}");
  gibbs->add_option("--flow", flow_path, "flow JSON")->required();
  gibbs->add_option("--beta", beta, "inverse temperature")->required();
  gibbs->add_option("--out", out_path, "state JSON (default stdout)");

  auto* verify = app.add_subcommand("verify", "check the KMS condition; exit 1 on failure");
  verify->add_option("--flow", flow_path)->required();
  verify->add_option("--state", state_path)->required();
  verify->add_option("--beta", beta)->required();
  verify->add_option("--tol", tol, "residual tolerance");
  verify->add_option("--seed", seed, "seed for the random samples");
  verify->add_option("--out", out_path, "verdict JSON (default stdout)");

  auto* simplex = app.add_subcommand("simplex", "KMS simplex at β, or a β-sweep");
  auto* simplex_beta = simplex->add_option("--beta", beta);
  auto* simplex_range = simplex->add_option("--beta-range", range_text, "lo:hi:steps, half-open");
  simplex_beta->excludes(simplex_range);
  simplex->add_option("--flow", flow_path)->required();
  simplex->add_option("--out", out_path, "simplex JSON, or sweep CSV with --beta-range");
  simplex->add_option("--plot", plot_path, "sweep SVG");
  simplex->add_option("--report", report_path, "sweep continuity certificate JSON");

  auto* modular = app.add_subcommand("modular", "modular data of the Gibbs state; exit 1 if a check fails");
  modular->add_option("--flow", flow_path)->required();
  modular->add_option("--beta", beta)->required();
  modular->add_option("--report", report_path, "report JSON (default stdout)");

  auto* fejer = app.add_subcommand("fejer", "Cesàro mean of the spectral decomposition");
  fejer->add_option("--flow", flow_path)->required();
  fejer->add_option("--element", element_path)->required();
  fejer->add_option("--n", n_terms)->required();
  fejer->add_option("--period", period, "default: minimal period");
  fejer->add_option("--out", out_path);

  auto* decompose = app.add_subcommand("decompose", "CSV of (k, ∥Q_k(a)∥_F)");
  decompose->add_option("--flow", flow_path)->required();
  decompose->add_option("--element", element_path)->required();
  decompose->add_option("--period", period, "default: minimal period");
  decompose->add_option("--out", out_path);

  auto* factor = app.add_subcommand("factor-type", "type of the ITPFI factor");
  factor->add_option("--site", site_path, "site generator JSON")->required();
  factor->add_option("--beta", beta)->required();
  factor->add_option("--out", out_path);

  auto* gamma = app.add_subcommand("gamma", "Γ-invariant of the ITPFI factor");
  gamma->add_option("--site", site_path)->required();
  gamma->add_option("--beta", beta)->required();
  gamma->add_option("--out", out_path);

  auto* matroid = app.add_subcommand("matroid", "boundedness of the KMS weight of a matroid flow");
  auto* matroid_family = matroid->add_option("--family", family, "seven-adic | base-adic | factorial");
  auto* matroid_spec = matroid->add_option("--spec", spec_path, "matroid JSON");
  matroid_family->excludes(matroid_spec);
  matroid->add_option("--base", base, "base for base-adic");
  matroid->add_option("--beta", beta)->required();
  matroid->add_option("--out", out_path);

  auto* window = app.add_subcommand("window", "trace-class window of Σ e^{-βa_n}");
  auto* window_family = window->add_option("--family", family, "zero | power | power-log");
  auto* window_spec = window->add_option("--spec", spec_path, "spectrum family JSON");
  window_family->excludes(window_spec);
  window->add_option("--r", r);
  window->add_flag("--negate", negate, "use the generator -H");
  window->add_option("--out", out_path);

  auto* bundle = app.add_subcommand("bundle", "KMS bundle of a dimension group");
  bundle->add_option("--dg", dg_path, "dimension group JSON")->required();
  bundle->add_option("--out", out_path, "fiber CSV (default stdout)");
  bundle->add_option("--plot", plot_path, "SVG of vertex count against β");
  bundle->add_option("--json", json_path, "fibers as JSON");
  bundle->add_option("--beta-range", range_text, "extra rows lo:hi:steps, half-open");

  auto* point_bundle = app.add_subcommand("point-bundle", "fiber of a point-set bundle");
  point_bundle->add_option("--points", spec_path)->required();
  point_bundle->add_option("--t", t)->required();
  point_bundle->add_option("--out", out_path);

  auto* measure = app.add_subcommand("measure", "scaling measure check; exit 1 on failure");
  measure->add_option("--kind", kind, "atomic | density");
  measure->add_option("--lambda", lambda);
  measure->add_option("--beta", beta);
  measure->add_option("--x", x);
  measure->add_option("--truncation", truncation);
  measure->add_option("--sets", sets_path, "JSON array of [lo, hi]");
  measure->add_option("--out", out_path);

  auto* cocycle = app.add_subcommand("cocycle", "2-cocycles on a grid");
  cocycle->require_subcommand(1);
  auto* trivialize = cocycle->add_subcommand("trivialize", "find μ with ∂μ = λ");
  trivialize->add_option("--in", in_path)->required();
  trivialize->add_option("--out", out_path, "μ JSON");
  trivialize->add_option("--report", report_path, "report JSON (default stdout)");
  trivialize->add_option("--tol", trivialize_tol, "residual tolerance; exit 1 above it");
  auto* cocheck = cocycle->add_subcommand("check", "cocycle identity residuals; exit 1 above --tol");
  cocheck->add_option("--in", in_path)->required();
  cocheck->add_option("--tol", tol);
  cocheck->add_option("--out", out_path);

  auto* cuntz = app.add_subcommand("cuntz", "gauge-invariant trace of V_a V_b*");
  cuntz->add_option("--m", m);
  cuntz->add_option("--a", word_a, "letters, comma-separated");
  cuntz->add_option("--b", word_b, "letters, comma-separated");
  cuntz->add_option("--rho", rho, "gauge rate; reports the KMS β");
  cuntz->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (gibbs->parsed()) {
      Flow f;
      load_flow(flow_path, f);
      State s;
      check(kmslab_gibbs(f.p, beta, &s.p));
      Str j;
      check(kmslab_state_to_json(s.p, j.out()));
      write_output(out_path, j.str());
    } else if (verify->parsed()) {
      Flow f;
      load_flow(flow_path, f);
      State s;
      check(kmslab_state_from_json(read_file(state_path).c_str(), &s.p));
      int passed = 0;
      Str j;
      check(kmslab_verify_kms(f.p, s.p, beta, tol, seed, &passed, j.out()));
      write_output(out_path, j.str());
      return passed ? kExitOk : kExitFailedVerdict;
    } else if (simplex->parsed()) {
      Flow f;
      load_flow(flow_path, f);
      if (!range_text.empty()) {
        const std::vector<double> betas = parse_beta_range(range_text);
        Str csv, svg, cert;
        check(kmslab_simplex_sweep(f.p, betas.data(), betas.size(), thread_count(), csv.out(), svg.out(),
                                   cert.out()));
        write_output(out_path, csv.str());
        if (!plot_path.empty()) write_output(plot_path, svg.str());
        if (!report_path.empty()) write_output(report_path, cert.str());
      } else {
        if (simplex_beta->count() == 0) die("simplex needs --beta or --beta-range");
        Str j;
        check(kmslab_simplex(f.p, beta, j.out()));
        write_output(out_path, j.str());
      }
    } else if (modular->parsed()) {
      Flow f;
      load_flow(flow_path, f);
      int passed = 0;
      Str j;
      check(kmslab_modular_report(f.p, beta, &passed, j.out()));
      write_output(report_path, j.str());
      return passed ? kExitOk : kExitFailedVerdict;
    } else if (fejer->parsed()) {
      Flow f;
      load_flow(flow_path, f);
      Str j;
      check(kmslab_fejer_mean(f.p, read_file(element_path).c_str(), n_terms, period, j.out()));
      write_output(out_path, j.str());
    } else if (decompose->parsed()) {
      Flow f;
      load_flow(flow_path, f);
      Str csv;
      check(kmslab_decompose_csv(f.p, read_file(element_path).c_str(), period, csv.out()));
      write_output(out_path, csv.str());
    } else if (factor->parsed() || gamma->parsed()) {
      const std::string site = read_file(site_path);
      Str j;
      check(factor->parsed() ? kmslab_factor_type(site.c_str(), beta, j.out())
                             : kmslab_gamma(site.c_str(), beta, j.out()));
      write_output(out_path, j.str());
    } else if (matroid->parsed()) {
      std::string spec;
      if (!spec_path.empty()) {
        spec = read_file(spec_path);
      } else if (!family.empty()) {
        spec = json{{"tail", family}, {"base", base}}.dump();
      } else {
        die("matroid needs --family or --spec");
      }
      Str j;
      check(kmslab_matroid(spec.c_str(), beta, j.out()));
      write_output(out_path, j.str());
    } else if (window->parsed()) {
      std::string spec;
      if (!spec_path.empty()) {
        spec = read_file(spec_path);
      } else if (!family.empty()) {
        json fam = {{"family", family}, {"r", r}};
        if (negate) fam = {{"family", "negated"}, {"inner", fam}};
        spec = fam.dump();
      } else {
        die("window needs --family or --spec");
      }
      Str j;
      check(kmslab_trace_window(spec.c_str(), j.out()));
      write_output(out_path, j.str());
    } else if (bundle->parsed()) {
      DimGroup g;
      check(kmslab_dimgroup_from_json(read_file(dg_path).c_str(), &g.p));
      std::vector<double> extra;
      if (!range_text.empty()) extra = parse_beta_range(range_text);
      Str csv;
      check(kmslab_bundle_csv(g.p, extra.data(), extra.size(), csv.out()));
      write_output(out_path, csv.str());
      if (!plot_path.empty()) {
        Str svg;
        check(kmslab_bundle_svg(g.p, svg.out()));
        write_output(plot_path, svg.str());
      }
      if (!json_path.empty()) {
        Str j;
        check(kmslab_beta_spectrum(g.p, j.out()));
        write_output(json_path, j.str());
      }
    } else if (point_bundle->parsed()) {
      Str j;
      check(kmslab_point_bundle(read_file(spec_path).c_str(), t, j.out()));
      write_output(out_path, j.str());
    } else if (measure->parsed()) {
      json params = {{"kind", kind}, {"lambda", lambda}, {"beta", beta}, {"x", x}, {"truncation", truncation}};
      if (!sets_path.empty()) {
        try {
          params["sets"] = json::parse(read_file(sets_path));
        } catch (const json::parse_error& e) {
          die(std::string("malformed JSON in ") + sets_path + ": " + e.what());
        }
      }
      int passed = 0;
      Str j;
      check(kmslab_scaling_measure(params.dump().c_str(), &passed, j.out()));
      write_output(out_path, j.str());
      return passed ? kExitOk : kExitFailedVerdict;
    } else if (trivialize->parsed()) {
      Cocycle c;
      check(kmslab_cocycle_from_json(read_file(in_path).c_str(), &c.p));
      Str mu, report;
      check(kmslab_cocycle_trivialize(c.p, mu.out(), report.out()));
      if (!out_path.empty()) write_output(out_path, mu.str());
      write_output(report_path, report.str());
      const double residual = json::parse(report.str()).at("residual").get<double>();
      return residual <= trivialize_tol ? kExitOk : kExitFailedVerdict;
    } else if (cocheck->parsed()) {
      Cocycle c;
      check(kmslab_cocycle_from_json(read_file(in_path).c_str(), &c.p));
      Str j;
      check(kmslab_cocycle_check(c.p, j.out()));
      write_output(out_path, j.str());
      const json r = json::parse(j.str());
      const bool ok = r.at("cocycle_residual").get<double>() <= tol &&
                      r.at("normalization_residual").get<double>() <= tol &&
                      r.at("modulus_residual").get<double>() <= tol;
      return ok ? kExitOk : kExitFailedVerdict;
    } else if (cuntz->parsed()) {
      const std::vector<int> a = parse_word(word_a), b = parse_word(word_b);
      Str j;
      check(kmslab_cuntz(m, rho, a.data(), a.size(), b.data(), b.size(), j.out()));
      write_output(out_path, j.str());
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitOk;
}

#include "rigidity/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "json.hpp"
#include "rigidity/closure.hpp"
#include "rigidity/counterexamples.hpp"
#include "rigidity/exact.hpp"
#include "rigidity/intersections.hpp"
#include "rigidity/selftest.hpp"

namespace rigidity {

namespace {

using nlohmann::json;

constexpr char kSchema[] = "rigidity-lab/v1";

int code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ModelMismatch:
    case ErrorKind::CutLocus:
    case ErrorKind::Precondition:
    case ErrorKind::Refinement:
    case ErrorKind::Parameter:
      return 2;
    default:
      return 1;
  }
}

std::vector<double> parse_coords(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      fail(ErrorKind::Parameter, "coordinate list '" + text + "' is not comma-separated numbers");
    }
  }
  if (out.empty()) fail(ErrorKind::Parameter, "empty coordinate list");
  return out;
}

std::vector<Scalar> parse_seed_list(const std::string& text) {
  std::vector<Scalar> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Scalar::parse(item));
  if (out.empty()) fail(ErrorKind::Parameter, "empty seed list");
  return out;
}

// Shared --model/--radius/--curvature triple.
struct ModelOpts {
  std::string id = "e2";
  double radius = 1.0;
  double curvature = -1.0;

  CLI::Option* attach(CLI::App* cmd) {
    CLI::Option* o = cmd->add_option("--model", id, "model id: e<n>, s<n>, h<n>, t<n>")->capture_default_str();
    cmd->add_option("--radius", radius, "sphere radius")->capture_default_str();
    cmd->add_option("--curvature", curvature, "hyperbolic curvature, negative")->capture_default_str();
    return o;
  }

  ManifoldModel build() const { return ManifoldModel::parse(id, radius, curvature); }

  void echo(json& cfg) const {
    cfg["model"] = id;
    cfg["radius"] = radius;
    cfg["curvature"] = curvature;
  }
};

struct SphereArgs {
  std::string c1 = "0,0";
  std::string c2 = "1,0";
  double r1 = 1.0;
  double r2 = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--c1", c1, "first centre, comma-separated coordinates")->capture_default_str();
    cmd->add_option("--r1", r1, "first radius")->capture_default_str();
    cmd->add_option("--c2", c2, "second centre")->capture_default_str();
    cmd->add_option("--r2", r2, "second radius")->capture_default_str();
  }

  void echo(json& cfg) const {
    cfg["c1"] = c1;
    cfg["r1"] = r1;
    cfg["c2"] = c2;
    cfg["r2"] = r2;
  }
};

std::string read_source(const std::string& path, std::istream& stdin_stream) {
  if (path == "-") {
    std::ostringstream buf;
    buf << stdin_stream.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parameter, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string profile_svg(const LensProfile& profile, const json& cfg) {
  const double kW = 640, kH = 420, kL = 70, kR = 24, kT = 24, kB = 56;
  double tmax = 2.0 * profile.r;
  double gmax = 2.0 * profile.r;
  for (const LensSample& s : profile.samples) gmax = std::max(gmax, s.g);
  gmax *= 1.05;

  auto px = [&](double t) { return kL + (kW - kL - kR) * (t / tmax); };
  auto py = [&](double g) { return kH - kB - (kH - kT - kB) * (g / gmax); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  s << "<desc>" << cfg.dump() << "</desc>\n";
  s << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  // axes
  s << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(tmax)) << "\" y2=\""
    << num(py(0)) << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(0)) << "\" y2=\""
    << num(py(gmax)) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double t = tmax * i / 4.0, g = gmax * i / 4.0;
    s << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(t)) << "\" y2=\""
      << num(py(0) + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(px(t)) << "\" y=\"" << num(py(0) + 20)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << num(t) << "</text>\n";
    s << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(g)) << "\" x2=\"" << num(px(0) - 5) << "\" y2=\""
      << num(py(g)) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(px(0) - 8) << "\" y=\"" << num(py(g) + 4)
      << "\" font-size=\"12\" text-anchor=\"end\">" << num(g) << "</text>\n";
  }
  s << "<text x=\"" << num((px(0) + px(tmax)) / 2) << "\" y=\"" << num(kH - 12)
    << "\" font-size=\"13\" text-anchor=\"middle\">centre separation t</text>\n";
  s << "<text x=\"16\" y=\"" << num(py(gmax / 2)) << "\" font-size=\"13\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 16 " << num(py(gmax / 2)) << ")\">lens diameter</text>\n";
  // the 2r - t floor, then the measured curve on top
  s << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(2.0 * profile.r)) << "\" x2=\"" << num(px(tmax))
    << "\" y2=\"" << num(py(0)) << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (const LensSample& sm : profile.samples) s << num(px(sm.t)) << "," << num(py(std::max(0.0, sm.g))) << " ";
  s << "\"/>\n";
  s << "<text x=\"" << num(kW - kR - 8) << "\" y=\"" << num(kT + 16)
    << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#1f77b4\">measured diameter</text>\n";
  s << "<text x=\"" << num(kW - kR - 8) << "\" y=\"" << num(kT + 32)
    << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#d62728\">2r - t floor</text>\n";
  s << "</svg>\n";
  return s.str();
}

const char* tag_name(IntersectionTag t) {
  switch (t) {
    case IntersectionTag::Empty: return "empty";
    case IntersectionTag::Singleton: return "singleton";
    case IntersectionTag::Continuum: return "continuum";
  }
  fail(ErrorKind::Internal, "unknown intersection tag");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "rigidity-lab: sphere intersections, lens diameters, and preserved-distance closure on model manifolds.\n"
      "Exit codes: 0 success; 2 violated precondition or bad parameter; 3 refuted verification;\n"
      "64 unusable command line; 1 internal error.  Identical arguments (seeds included) give\n"
      "byte-identical output.",
      "rigidity"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ---- intersect ------------------------------------------------------
  auto ix = std::make_shared<SphereArgs>();
  auto ix_model = std::make_shared<ModelOpts>();
  double ix_tol = 1e-7;
  CLI::App* intersect_cmd = app.add_subcommand("intersect", "Decide whether two metric spheres meet, with a witness");
  ix_model->attach(intersect_cmd);
  ix->attach(intersect_cmd);
  intersect_cmd->add_option("--tol", ix_tol, "witness residual tolerance")->capture_default_str();
  intersect_cmd->callback([&app, ix, ix_model, &ix_tol, &out]() {
    ManifoldModel m = ix_model->build();
    Point x1(m, parse_coords(ix->c1));
    Point x2(m, parse_coords(ix->c2));
    json cfg{{"subcommand", "intersect"}, {"tol", ix_tol}};
    ix_model->echo(cfg);
    ix->echo(cfg);
    json j;
    j["schema"] = kSchema;
    j["kind"] = "intersection-check";
    j["config"] = cfg;
    j["inequalities_hold"] = sphere_intersection_inequalities(m, x1, ix->r1, x2, ix->r2);
    j["intersects"] = intersect_predicate(m, x1, ix->r1, x2, ix->r2);
    WitnessResult w = intersect_witness(m, x1, ix->r1, x2, ix->r2, ix_tol);
    if (w.point) {
      j["witness"] = {{"point", w.point->coords},
                      {"residual", w.residual},
                      {"bisection_steps", w.bisection_steps},
                      {"bracketed", w.bracketed}};
    } else {
      j["witness"] = nullptr;
    }
    out << j.dump(2) << "\n";
    (void)app;
  });

  // ---- classify -------------------------------------------------------
  auto cl = std::make_shared<SphereArgs>();
  auto cl_model = std::make_shared<ModelOpts>();
  CLI::App* classify_cmd = app.add_subcommand("classify", "Tag an intersection as empty, singleton, or continuum");
  cl_model->attach(classify_cmd);
  cl->attach(classify_cmd);
  classify_cmd->callback([cl, cl_model, &out]() {
    ManifoldModel m = cl_model->build();
    Point x1(m, parse_coords(cl->c1));
    Point x2(m, parse_coords(cl->c2));
    json cfg{{"subcommand", "classify"}};
    cl_model->echo(cfg);
    cl->echo(cfg);
    IntersectionClass k = classify_intersection(m, x1, cl->r1, x2, cl->r2);
    json j;
    j["schema"] = kSchema;
    j["kind"] = "intersection-class";
    j["config"] = cfg;
    j["tag"] = tag_name(k.tag);
    j["witness"] = k.witness ? json(k.witness->coords) : json(nullptr);
    out << j.dump(2) << "\n";
  });

  // ---- lens-profile ---------------------------------------------------
  auto lp_model = std::make_shared<ModelOpts>();
  double lp_r = 1.0;
  int lp_samples = 33;
  int lp_budget = 4000;
  std::uint64_t lp_seed = 1;
  std::string lp_format = "json";
  CLI::App* lens_cmd = app.add_subcommand(
      "lens-profile", "Sample the lens diameter over centre separations t in [0, 2r].  CSV columns: "
                      "t,g_estimate,error_bound (config echoed on a leading # line)");
  lp_model->attach(lens_cmd);
  lens_cmd->add_option("--r", lp_r, "common sphere radius")->capture_default_str();
  lens_cmd->add_option("--samples", lp_samples, "number of separations")->capture_default_str();
  lens_cmd->add_option("--budget", lp_budget, "sampling draws per estimate")->capture_default_str();
  lens_cmd->add_option("--seed", lp_seed, "rng seed")->capture_default_str();
  lens_cmd->add_option("--format", lp_format, "json, csv, or svg")->capture_default_str()
      ->check(CLI::IsMember({"json", "csv", "svg"}));
  lens_cmd->callback([lp_model, &lp_r, &lp_samples, &lp_budget, &lp_seed, &lp_format, &out]() {
    ManifoldModel m = lp_model->build();
    json cfg{{"subcommand", "lens-profile"}, {"r", lp_r},       {"samples", lp_samples},
             {"budget", lp_budget},          {"seed", lp_seed}, {"format", lp_format}};
    lp_model->echo(cfg);
    LensProfile profile = lens_profile(m, lp_r, lp_samples, lp_budget, lp_seed);
    if (lp_format == "csv") {
      out << "# config " << cfg.dump() << "\n";
      out << "t,g_estimate,error_bound\n";
      for (const LensSample& s : profile.samples)
        out << csv_num(s.t) << "," << csv_num(s.g) << "," << csv_num(s.error_bound) << "\n";
    } else if (lp_format == "svg") {
      out << profile_svg(profile, cfg);
    } else {
      json j;
      j["schema"] = kSchema;
      j["kind"] = "lens-profile";
      j["config"] = cfg;
      j["r"] = profile.r;
      j["tolerance"] = profile.tolerance;
      json samples = json::array();
      for (const LensSample& s : profile.samples)
        samples.push_back({{"t", s.t}, {"g", s.g}, {"error_bound", s.error_bound}});
      j["samples"] = samples;
      out << j.dump(2) << "\n";
    }
  });

  // ---- rbar -----------------------------------------------------------
  auto rb_model = std::make_shared<ModelOpts>();
  double rb_r = 1.0;
  double rb_tol = 1e-6;
  int rb_budget = 4000;
  std::uint64_t rb_seed = 1;
  CLI::App* rbar_cmd =
      app.add_subcommand("rbar", "Certified enclosure of the separation where the lens diameter equals r");
  rb_model->attach(rbar_cmd);
  rbar_cmd->add_option("--r", rb_r, "sphere radius")->capture_default_str();
  rbar_cmd->add_option("--tol", rb_tol, "enclosure width target")->capture_default_str();
  rbar_cmd->add_option("--budget", rb_budget, "sampling draws per lens estimate")->capture_default_str();
  rbar_cmd->add_option("--seed", rb_seed, "rng seed")->capture_default_str();
  rbar_cmd->callback([rb_model, &rb_r, &rb_tol, &rb_budget, &rb_seed, &out]() {
    ManifoldModel m = rb_model->build();
    json cfg{{"subcommand", "rbar"}, {"r", rb_r}, {"tol", rb_tol}, {"budget", rb_budget}, {"seed", rb_seed}};
    rb_model->echo(cfg);
    RBarResult res = rbar(m, rb_r, rb_tol, rb_budget, rb_seed);
    json j;
    j["schema"] = kSchema;
    j["kind"] = "rbar";
    j["config"] = cfg;
    j["r"] = res.r;
    j["interval"] = {res.lo, res.hi};
    j["value"] = (res.lo + res.hi) / 2.0;
    j["width"] = res.hi - res.lo;
    j["iterations"] = res.iterations;
    out << j.dump(2) << "\n";
  });

  // ---- closure --------------------------------------------------------
  CLI::App* closure_cmd = app.add_subcommand("closure", "Preserved-distance closure engine");
  closure_cmd->require_subcommand(1);

  std::string cd_seeds;
  std::string cd_strategy = "A";
  std::string cd_eps;
  std::string cd_conv = "inf";
  std::string cd_inj = "inf";
  bool cd_periodic = false;
  auto cd_model = std::make_shared<ModelOpts>();
  cd_model->id = "";
  double cd_rbar_tol = 1e-6;
  int cd_rbar_budget = 4000;
  std::uint64_t cd_rbar_seed = 1;
  int cd_budget = 10000;
  CLI::App* derive_cmd = closure_cmd->add_subcommand(
      "derive", "Derive a preserved distance below epsilon, emitting a replayable certificate");
  derive_cmd->add_option("--seeds", cd_seeds, "comma-separated exact scalars, e.g. 1,sqrt2 or 3/4")->required();
  derive_cmd->add_option("--strategy", cd_strategy, "A, B, C, or exhaustive")->capture_default_str()
      ->check(CLI::IsMember({"A", "B", "C", "exhaustive"}));
  derive_cmd->add_option("--eps,--epsilon", cd_eps, "target upper bound, exact scalar")->required();
  CLI::Option* conv_opt = derive_cmd->add_option("--conv", cd_conv, "convexity bound, scalar or inf")->capture_default_str();
  CLI::Option* inj_opt = derive_cmd->add_option("--inj", cd_inj, "injectivity bound, scalar or inf")->capture_default_str();
  CLI::Option* periodic_opt = derive_cmd->add_flag("--periodic", cd_periodic, "distances live on a period-one circle");
  CLI::Option* cdm = derive_cmd->add_option("--model", cd_model->id,
                                            "take bounds and the lens oracle from this model instead");
  derive_cmd->add_option("--radius", cd_model->radius, "sphere radius")->capture_default_str();
  derive_cmd->add_option("--curvature", cd_model->curvature, "hyperbolic curvature")->capture_default_str();
  derive_cmd->add_option("--rbar-tol", cd_rbar_tol, "lens oracle enclosure width")->capture_default_str();
  derive_cmd->add_option("--rbar-budget", cd_rbar_budget, "lens oracle sampling budget")->capture_default_str();
  derive_cmd->add_option("--rbar-seed", cd_rbar_seed, "lens oracle rng seed")->capture_default_str();
  derive_cmd->add_option("--step-budget", cd_budget, "maximum rule applications")->capture_default_str();
  cdm->excludes(conv_opt)->excludes(inj_opt)->excludes(periodic_opt);
  derive_cmd->callback([&, cd_model]() {
    ClosureContext ctx;
    json cfg{{"subcommand", "closure derive"},
             {"seeds", cd_seeds},
             {"strategy", cd_strategy},
             {"eps", cd_eps},
             {"rbar_tol", cd_rbar_tol},
             {"rbar_budget", cd_rbar_budget},
             {"rbar_seed", cd_rbar_seed},
             {"step_budget", cd_budget}};
    if (!cd_model->id.empty()) {
      ManifoldModel m = cd_model->build();
      ctx.model = m;
      ctx.conv = context_bound(m.convexity_radius());
      ctx.inj = context_bound(m.injectivity_radius());
      ctx.two_point_homogeneous = true;
      ctx.periodic_period_one = m.kind == ModelKind::FlatTorus;
      cd_model->echo(cfg);
    } else {
      if (cd_conv != "inf") ctx.conv = ContextBound::finite(Scalar::parse(cd_conv));
      if (cd_inj != "inf") ctx.inj = ContextBound::finite(Scalar::parse(cd_inj));
      ctx.periodic_period_one = cd_periodic;
      cfg["conv"] = cd_conv;
      cfg["inj"] = cd_inj;
      cfg["periodic"] = cd_periodic;
    }
    ctx.rbar_tol = cd_rbar_tol;
    ctx.rbar_budget = cd_rbar_budget;
    ctx.rbar_seed = cd_rbar_seed;
    DeriveOutcome outcome = derive_to_epsilon(parse_seed_list(cd_seeds), ctx, Scalar::parse(cd_eps), cd_strategy,
                                              cd_budget);
    json j = json::parse(derive_outcome_to_json(outcome));
    j["config"] = cfg;
    out << j.dump(2) << "\n";
  });

  std::string cv_cert;
  CLI::App* verify_cmd = closure_cmd->add_subcommand("verify", "Replay a derivation certificate independently");
  verify_cmd->add_option("--cert,cert", cv_cert, "certificate file, or - for stdin")->required();
  verify_cmd->callback([&cv_cert, &out, &exit_code]() {
    DerivationCertificate cert = certificate_from_json(read_source(cv_cert, std::cin));
    VerifyReport rep = verify_certificate(cert);
    json j = json::parse(verify_report_to_json(rep));
    j["config"] = {{"subcommand", "closure verify"}, {"cert", cv_cert}};
    out << j.dump(2) << "\n";
    if (!rep.ok) exit_code = 3;
  });

  // ---- counterexample -------------------------------------------------
  CLI::App* counter_cmd = app.add_subcommand("counterexample", "Audit the candidate maps");
  counter_cmd->require_subcommand(1);

  std::string ce_id;
  std::string ce_r;
  int ce_pairs = 10000;
  std::uint64_t ce_seed = 42;
  std::string ce_report = "json";
  double ce_hex = 0.9;
  double ce_cap = AntipodalRegion::kDefaultCapRadius;
  int ce_sphere_dim = 2;
  CLI::App* run_cmd = counter_cmd->add_subcommand(
      "run", "Sample distance preservation for ex1..ex3, or run the ex4 demo.  Verdicts live in the "
             "output, not the exit code");
  run_cmd->add_option("--id,id", ce_id, "ex1, ex2, ex3, or ex4")->required();
  run_cmd->add_option("--r", ce_r, "audited distance, exact-scalar grammar (default per example)");
  run_cmd->add_option("--pairs", ce_pairs, "sampled pairs per direction")->capture_default_str();
  run_cmd->add_option("--seed", ce_seed, "rng seed")->capture_default_str();
  run_cmd->add_option("--report", ce_report, "json or text")->capture_default_str()
      ->check(CLI::IsMember({"json", "text"}));
  run_cmd->add_option("--hex-diameter", ce_hex, "hexagon diameter for ex3")->capture_default_str();
  run_cmd->add_option("--cap-radius", ce_cap, "cap angular radius for ex2")->capture_default_str();
  run_cmd->add_option("--sphere-dim", ce_sphere_dim, "sphere dimension for ex2")->capture_default_str();
  run_cmd->callback([&, &out, &err, &exit_code]() {
    ExampleId id = example_from_name(ce_id);
    json cfg{{"subcommand", "counterexample run"}, {"id", ce_id},   {"pairs", ce_pairs},
             {"seed", ce_seed},                    {"report", ce_report}};
    if (id == ExampleId::Ex4) {
      Example4Report rep = example4_demo();
      if (ce_report == "text") {
        out << "beyond-convexity demo on s2: separation " << rep.separation << " = twice the convexity radius\n";
        out << "grid cells with inequalities holding and empty intersection: " << rep.grid.size() << "/100\n";
        out << "tangency boundary nonempty: " << (!rep.tangency.witness_empty ? "yes" : "no") << "\n";
        out << "restored bound consistent: " << (rep.restored.witness_empty ? "yes" : "no") << "\n";
        out << (rep.all_confirmed ? "all confirmed\n" : "DEVIATION DETECTED\n");
      } else {
        json j = json::parse(example4_report_to_json(rep));
        j["config"] = cfg;
        out << j.dump(2) << "\n";
      }
      if (!rep.all_confirmed) {
        err << "demo deviated from the expected pattern\n";
        exit_code = 1;
      }
      return;
    }
    ExampleParams params;
    params.hex_diameter = ce_hex;
    params.sphere_dim = ce_sphere_dim;
    if (id == ExampleId::Ex2 && ce_cap != AntipodalRegion::kDefaultCapRadius)
      params.region = AntipodalRegion::default_caps(ManifoldModel::sphere(ce_sphere_dim, 1.0), ce_cap);
    CandidateMap map = build_example(id, params);
    std::string r_text = ce_r;
    if (r_text.empty())
      r_text = id == ExampleId::Ex1 ? "1/2" : id == ExampleId::Ex2 ? "1.5707963267948966" : "1";
    cfg["r"] = r_text;
    cfg["hex_diameter"] = ce_hex;
    cfg["cap_radius"] = ce_cap;
    cfg["sphere_dim"] = ce_sphere_dim;
    AuditReport rep = audit_distance(map, Scalar::parse(r_text), ce_pairs, ce_seed);
    if (ce_report == "text") {
      out << "example " << example_name(rep.id) << ": r = " << rep.r_text << ", " << rep.pairs_tested
          << " pairs per direction, seed " << ce_seed << "\n";
      out << "forward:  " << rep.preserved_forward << " preserved, " << rep.violations_forward
          << " violations -> " << verdict_name(rep.forward) << "\n";
      if (rep.converse)
        out << "converse: " << *rep.preserved_converse << " preserved, " << *rep.violations_converse
            << " violations -> " << verdict_name(*rep.converse) << "\n";
    } else {
      json j = json::parse(audit_report_to_json(rep));
      j["config"] = cfg;
      out << j.dump(2) << "\n";
    }
  });

  // ---- verify-suite ---------------------------------------------------
  auto vs_model = std::make_shared<ModelOpts>();
  vs_model->id = "";
  std::uint64_t vs_seed = 7;
  std::string vs_report = "text";
  CLI::App* suite_cmd = app.add_subcommand("verify-suite", "Run every invariant suite and print a pass/fail table");
  suite_cmd->add_option("--model", vs_model->id, "restrict the per-model suites to this model");
  suite_cmd->add_option("--radius", vs_model->radius, "sphere radius")->capture_default_str();
  suite_cmd->add_option("--curvature", vs_model->curvature, "hyperbolic curvature")->capture_default_str();
  suite_cmd->add_option("--seed", vs_seed, "rng seed")->capture_default_str();
  suite_cmd->add_option("--report", vs_report, "text or json")->capture_default_str()
      ->check(CLI::IsMember({"text", "json"}));
  suite_cmd->callback([vs_model, &vs_seed, &vs_report, &out, &exit_code]() {
    std::optional<ManifoldModel> only;
    if (!vs_model->id.empty()) only = vs_model->build();
    std::vector<SuiteResult> suites = run_invariant_suites(only, vs_seed);
    int passed = 0;
    for (const SuiteResult& s : suites) passed += s.pass ? 1 : 0;
    bool all = passed == static_cast<int>(suites.size());
    if (vs_report == "json") {
      json cfg{{"subcommand", "verify-suite"}, {"seed", vs_seed}};
      if (only) cfg["model"] = only->id();
      json j;
      j["schema"] = kSchema;
      j["kind"] = "invariant-suites";
      j["config"] = cfg;
      json rows = json::array();
      for (const SuiteResult& s : suites) rows.push_back({{"name", s.name}, {"pass", s.pass}, {"detail", s.detail}});
      j["suites"] = rows;
      j["all_pass"] = all;
      out << j.dump(2) << "\n";
    } else {
      for (const SuiteResult& s : suites)
        out << std::left << std::setw(44) << s.name << (s.pass ? "pass  " : "FAIL  ") << s.detail << "\n";
      out << passed << "/" << suites.size() << " suites passed\n";
    }
    if (!all) exit_code = 3;
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n(run with --help)\n";
    return 64;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace rigidity

// fiberaudit: command-line front end for the fiber audit library.
//
// Exit codes: 0 success, 1 input/validation error, 2 search did not converge
// (the best-effort witness is still written).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fiberaudit/fiberaudit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fiberaudit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

struct Common {
  std::string out;
  std::string seed = "default";
  bool timing = false;
};

std::uint64_t resolve_seed(const std::string& s) {
  if (s == "default") return sampling::kDefaultSeed;
  if (s == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 0);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("--seed must be an integer, 'default' or 'random'");
}

struct LoadedMap {
  maps::MapDescriptor desc;
  std::string text;
};

LoadedMap load_map(const std::string& path) {
  std::string text = io::read_file(path);
  try {
    return {maps::parse_descriptor(text), std::move(text)};
  } catch (const ParseError& e) {
    throw ParseError(std::string(e.what()), path);
  }
}

/// Assembles and writes a report; returns the given exit code.
class Reporter {
 public:
  Reporter(std::string subcommand, const Common& common)
      : subcommand_(std::move(subcommand)), common_(common), start_(std::chrono::steady_clock::now()) {}

  void add_input(const std::string& content) { inputs_ += content; }

  int finish(json config, json result, std::size_t evaluations, int code = kExitOk) {
    json rep;
    rep["subcommand"] = subcommand_;
    rep["input_digest"] = report::digest(inputs_);
    rep["config"] = std::move(config);
    rep["result"] = std::move(result);
    rep["evaluations"] = evaluations;
    if (common_.timing) {
      rep["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    emit(report::to_string(rep));
    return code;
  }

  void emit(const std::string& text) const {
    if (common_.out.empty()) {
      std::cout << text;
    } else {
      io::write_file_atomic(common_.out, text);
    }
  }

 private:
  std::string subcommand_;
  const Common& common_;
  std::string inputs_;
  std::chrono::steady_clock::time_point start_;
};

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
  if (with_out) sub->add_option("--out", c.out, "Output file (default: stdout)");
  sub->add_option("--seed", c.seed, "Master seed: integer, 'default' or 'random'")->capture_default_str();
  sub->add_flag("--timing", c.timing, "Include wall time in the report (breaks byte-identical reruns)");
}

json vec_json(const Vector& v) { return io::vector_to_json(v); }

// ---- witness / cube-witness ----------------------------------------------------------

struct WitnessArgs {
  std::string map;
  double radius = 1.0;
  std::string carrier;
  std::optional<double> tol;
  std::size_t starts = 0;
  std::size_t budget = 500;
};

json witness_config(const LoadedMap& lm, const WitnessArgs& a, double tol, std::size_t starts, std::uint64_t seed) {
  return {{"map", maps::to_json(lm.desc)}, {"tol", tol}, {"starts", starts}, {"budget", a.budget}, {"seed", seed}};
}

int run_witness(const WitnessArgs& a, const Common& c, bool cube) {
  Reporter rep(cube ? "cube-witness" : "witness", c);
  const auto lm = load_map(a.map);
  rep.add_input(lm.text);
  const auto f = maps::MapEval::from(lm.desc);
  collision::WitnessOptions opt;
  opt.multistart.seed = resolve_seed(c.seed);
  opt.multistart.starts = a.starts;
  opt.multistart.budget = a.budget;
  opt.tol = a.tol;
  if (!a.carrier.empty()) {
    const std::string text = io::read_file(a.carrier);
    rep.add_input(text);
    std::vector<Vector> vecs;
    for (const auto& p : io::parse_points_csv(text)) vecs.push_back(p.coords());
    opt.carrier = vecs;
  }
  const auto w = cube ? collision::cube_inscribed_sphere_witness(f, opt) : collision::large_fiber_witness(f, a.radius, opt);
  const std::size_t m = f.codomain_dim();
  const geometry::Point center =
      cube ? geometry::Point(Vector::Constant(static_cast<Eigen::Index>(f.domain_dim()), 0.5))
           : geometry::Point::zeros(f.domain_dim());
  const double tol = a.tol.value_or(collision::default_tolerance(f, center));
  json cfg = witness_config(lm, a, tol, a.starts == 0 ? 8 * (m + 1) : a.starts, opt.multistart.seed);
  cfg["method"] = m == 1 ? "bisection" : "multistart";
  if (cube) {
    cfg["radius"] = 0.5;
  } else {
    cfg["M"] = a.radius;
  }
  if (opt.carrier) {
    json cj = json::array();
    for (const auto& v : *opt.carrier) cj.push_back(vec_json(v));
    cfg["carrier"] = cj;
  }
  if (!w.converged) std::cerr << "warning: search did not reach tolerance; best defect " << w.defect << "\n";
  return rep.finish(cfg, report::to_json(w), w.evaluations, w.converged ? kExitOk : kExitNotConverged);
}

// ---- fiber ------------------------------------------------------------------------

struct FiberArgs {
  std::string map;
  std::string level;
  double delta = 1e-9;
  std::string box;
  std::size_t n = 256;
  std::size_t refine = 100;
  std::optional<double> threshold;
};

int run_fiber(const FiberArgs& a, const Common& c) {
  Reporter rep("fiber", c);
  const auto lm = load_map(a.map);
  rep.add_input(lm.text);
  const auto f = maps::MapEval::from(lm.desc);
  const geometry::Point level(io::parse_values(a.level, "--level"));
  const auto box = io::parse_box(a.box, f.domain_dim());
  fibers::SamplingOptions opt;
  opt.seed = resolve_seed(c.seed);
  opt.map_id = lm.desc.kind() + ":" + report::digest(lm.text);
  const auto fiber = fibers::sample_approx_fiber(f, level, a.delta, box, a.n, a.refine, opt);

  if (!c.out.empty() && fs::path(c.out).extension() == ".csv") {
    rep.emit(io::points_to_csv(fiber.points));
    return kExitOk;
  }
  json result = report::to_json(fiber);
  if (fiber.points.size() >= 2) result["diameter_lower_bound"] = fibers::diameter_lower_bound(fiber);
  if (a.threshold && !fiber.points.empty()) result["classification"] = report::to_json(fibers::classify_small(fiber, *a.threshold));
  json cfg = {{"map", maps::to_json(lm.desc)}, {"level", vec_json(level.coords())}, {"delta", a.delta},
              {"box_lo", vec_json(box.lo)},    {"box_hi", vec_json(box.hi)},       {"n", a.n},
              {"refine_steps", a.refine},      {"seed", opt.seed}};
  if (a.threshold) cfg["M"] = *a.threshold;
  return rep.finish(cfg, result, fiber.evaluations);
}

// ---- lemma --------------------------------------------------------------------------

struct LemmaArgs {
  std::string map;
  std::string points;
  double M = 1.0;
  double tol = 1e-9;
};

int run_lemma(const LemmaArgs& a, const Common& c) {
  Reporter rep("lemma", c);
  const auto lm = load_map(a.map);
  rep.add_input(lm.text);
  const std::string text = io::read_file(a.points);
  rep.add_input(text);
  const auto pts = io::parse_points_csv(text);
  if (pts.size() != 3) throw InputError("--points must contain exactly three points");
  const auto f = maps::MapEval::from(lm.desc);
  const auto w = fibers::lemma_witness(f, pts[0], pts[1], pts[2], a.M, a.tol);
  json cfg = {{"map", maps::to_json(lm.desc)}, {"points", io::points_to_json(pts)}, {"M", a.M}, {"tol", a.tol}};
  return rep.finish(cfg, report::to_json(w), w.evaluations);
}

// ---- probe-union ---------------------------------------------------------------------

struct ProbeArgs {
  std::string map;
  std::string candidates;
  double M = 1.0;
  bool no_verify = false;
  double delta = 1e-9;
  std::string box;
  std::size_t samples = 32;
  std::size_t refine = 100;
};

int run_probe(const ProbeArgs& a, const Common& c) {
  Reporter rep("probe-union", c);
  const auto lm = load_map(a.map);
  rep.add_input(lm.text);
  const std::string text = io::read_file(a.candidates);
  rep.add_input(text);
  const auto cands = io::parse_points_csv(text);
  if (cands.empty()) throw InputError("no candidates given");
  const auto f = maps::MapEval::from(lm.desc);
  if (f.codomain_dim() != 1) throw InputError("probe-union applies to scalar maps (m = 1)");
  json cfg = {{"map", maps::to_json(lm.desc)}, {"M", a.M}, {"verify", !a.no_verify}, {"candidates", cands.size()}};
  json result;
  std::size_t evals = 0;
  if (!a.no_verify) {
    Vector lo = cands.front().coords(), hi = lo;
    for (const auto& p : cands) {
      lo = lo.cwiseMin(p.coords());
      hi = hi.cwiseMax(p.coords());
    }
    const auto box = a.box.empty() ? sampling::Box(Vector(lo.array() - 2.0 * a.M), Vector(hi.array() + 2.0 * a.M))
                                   : io::parse_box(a.box, f.domain_dim());
    fibers::SamplingOptions sopt;
    sopt.seed = resolve_seed(c.seed);
    const auto check = fibers::verify_small_candidates(f, cands, a.M, a.delta, box, a.samples, a.refine, sopt);
    cfg["delta"] = a.delta;
    cfg["samples"] = a.samples;
    cfg["seed"] = sopt.seed;
    cfg["box_lo"] = vec_json(box.lo);
    cfg["box_hi"] = vec_json(box.hi);
    if (check.first_not_small) {
      std::cerr << "error: candidate " << *check.first_not_small << " lies in a fiber that is not small\n";
      result["rejected_candidate"] = *check.first_not_small;
      result["classification"] = report::to_json(check.classes[*check.first_not_small]);
      rep.finish(cfg, result, evals, kExitInput);
      return kExitInput;
    }
  }
  result = report::to_json(fibers::union_probe(cands, a.M));
  return rep.finish(cfg, result, evals);
}

// ---- boundedness ------------------------------------------------------------------------

struct BoundArgs {
  std::string map;
  std::string b;
  double M = 1.0;
  std::string box;
  std::size_t grid = 4096;
  double tol = 1e-9;
};

int run_boundedness(const BoundArgs& a, const Common& c) {
  Reporter rep("boundedness", c);
  const auto lm = load_map(a.map);
  rep.add_input(lm.text);
  const auto f = maps::MapEval::from(lm.desc);
  const geometry::Point b(io::parse_values(a.b, "--b"));
  const auto box = io::parse_box(a.box, f.domain_dim());
  fibers::BoundednessOptions opt;
  opt.grid_points = a.grid;
  opt.seed = resolve_seed(c.seed);
  const auto outcome = fibers::boundedness_witness(f, b, a.M, box, a.tol, opt);
  json cfg = {{"map", maps::to_json(lm.desc)}, {"b", vec_json(b.coords())}, {"M", a.M},
              {"box_lo", vec_json(box.lo)},    {"box_hi", vec_json(box.hi)}, {"grid", a.grid},
              {"tol", a.tol},                  {"seed", opt.seed}};
  return rep.finish(cfg, report::to_json(outcome), 0);
}

// ---- urysohn ------------------------------------------------------------------------------

struct UrysohnArgs {
  std::string a;
  std::string b;
  std::optional<double> t;
  std::optional<double> M;
};

int run_urysohn(const UrysohnArgs& args, const Common& c) {
  Reporter rep("urysohn", c);
  const geometry::Point a(io::parse_values(args.a, "--a"));
  const geometry::Point b(io::parse_values(args.b, "--b"));
  json cfg = {{"a", vec_json(a.coords())}, {"b", vec_json(b.coords())}};
  json result;
  json fibers_json = json::array();
  if (args.t) {
    cfg["t"] = *args.t;
    fibers_json.push_back(report::to_json(urysohn::fiber_geometry(a, b, *args.t)));
  }
  if (args.M) {
    cfg["M"] = *args.M;
    const auto levels = urysohn::small_levels(a, b, *args.M);
    result["small_levels"] = {{"lower", {0.0, levels.lower_end}}, {"upper", {levels.upper_end, 1.0}},
                              {"merged", levels.merged}};
    result["region_separation"] = urysohn::region_separation(a, b, *args.M);
    fibers_json.push_back(report::to_json(urysohn::fiber_geometry(a, b, levels.lower_end)));
    fibers_json.push_back(report::to_json(urysohn::fiber_geometry(a, b, levels.upper_end)));
  }
  if (!args.t && !args.M) throw InputError("urysohn needs --t or --M");
  result["fibers"] = fibers_json;
  return rep.finish(cfg, result, 0);
}

// ---- quantize / dequantize -------------------------------------------------------------------

quantizer::CodecConfig load_codec(const std::string& path, std::string& text) {
  text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), path);
  }
  if (j.contains("variant")) {
    const auto desc = maps::from_json(j);
    const auto* pq = std::get_if<maps::PrimeQuantizer>(&desc.variant());
    if (!pq) throw InputError("--map-config descriptor is not a prime_quantizer map");
    return pq->config;
  }
  return quantizer::config_from_json(j);
}

std::string rational_string(const quantizer::Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

int run_quantize(const std::string& config_path, const std::string& in, const std::string& out, bool rational) {
  std::string text;
  const auto config = load_codec(config_path, text);
  const auto pts = io::read_points(in);
  std::string lines;
  for (const auto& p : pts) {
    const auto code = quantizer::encode(config, p);
    json j = quantizer::code_to_json(code);
    if (rational) {
      json vals = json::array();
      for (const auto& r : quantizer::code_to_rational(code)) vals.push_back(rational_string(r));
      j["rational"] = vals;
    }
    lines += j.dump() + "\n";
  }
  if (out.empty()) {
    std::cout << lines;
  } else {
    io::write_file_atomic(out, lines);
  }
  return kExitOk;
}

int run_dequantize(const std::string& config_path, const std::string& in, const std::string& out) {
  std::string text;
  const auto config = load_codec(config_path, text);
  std::stringstream ss(io::read_file(in));
  std::string line;
  std::vector<geometry::Point> pts;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (io::trim(line).empty()) continue;
    try {
      pts.push_back(quantizer::decode(config, quantizer::code_from_json(json::parse(line))));
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), in + ": line " + std::to_string(lineno));
    } catch (const FormatError& e) {
      throw ParseError(e.what(), in + ": line " + std::to_string(lineno));
    }
  }
  const std::string csv = io::points_to_csv(pts);
  if (out.empty()) {
    std::cout << csv;
  } else {
    io::write_file_atomic(out, csv);
  }
  return kExitOk;
}

// ---- report (figure data) ------------------------------------------------------------------------

int write_sets(const std::vector<report::PointSet>& sets, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& s : sets) io::write_file_atomic(fs::path(dir) / (s.name + ".csv"), io::points_to_csv(s.points));
  std::cerr << "wrote " << sets.size() << " point sets to " << dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiberaudit: witnesses for large fibers of continuous maps R^n -> R^m (n > m)"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Common common;

  WitnessArgs wa;
  auto* witness = app.add_subcommand("witness", "Antipodal pair on an m-sphere of radius M with equal images");
  witness->add_option("--map", wa.map, "Map descriptor (JSON)")->required()->check(CLI::ExistingFile);
  witness->add_option("--M", wa.radius, "Sphere radius M; the witness pair is 2M apart")->capture_default_str();
  witness->add_option("--carrier", wa.carrier, "CSV of m+1 vectors spanning the sphere's subspace (default: first m+1 axes)");
  witness->add_option("--tol", wa.tol, "Defect tolerance (default 1e-9 (1 + |f(center)|))");
  witness->add_option("--starts", wa.starts, "Multistart count K (0: 8 (m+1))")->capture_default_str();
  witness->add_option("--budget", wa.budget, "Map evaluations per start B")->capture_default_str();
  add_common(witness, common);

  WitnessArgs ca;
  auto* cube = app.add_subcommand("cube-witness", "Antipodal pair on the sphere of diameter 1 inscribed in [0,1]^n");
  cube->add_option("--map", ca.map, "Map descriptor (JSON)")->required()->check(CLI::ExistingFile);
  cube->add_option("--tol", ca.tol, "Defect tolerance (default 1e-9 (1 + |f(center)|))");
  cube->add_option("--starts", ca.starts, "Multistart count K (0: 8 (m+1))")->capture_default_str();
  cube->add_option("--budget", ca.budget, "Map evaluations per start B")->capture_default_str();
  add_common(cube, common);

  FiberArgs fa;
  auto* fiber = app.add_subcommand("fiber", "Sample a delta-approximate fiber and bound its diameter");
  fiber->add_option("--map", fa.map, "Map descriptor (JSON)")->required()->check(CLI::ExistingFile);
  fiber->add_option("--level", fa.level, "Level y as comma-separated values")->required();
  fiber->add_option("--delta", fa.delta, "Image-space tolerance delta")->capture_default_str();
  fiber->add_option("--box", fa.box, "Sampling box lo:hi,... (one range broadcasts)")->required();
  fiber->add_option("--n", fa.n, "Number of samples")->capture_default_str();
  fiber->add_option("--refine", fa.refine, "Refinement iterations per sample")->capture_default_str();
  fiber->add_option("--M", fa.threshold, "Classify the sample against smallness threshold M");
  add_common(fiber, common);
  fiber->get_option("--out")->description("Output: .csv writes the points, anything else the JSON report");

  LemmaArgs la;
  auto* lemma = app.add_subcommand("lemma", "Constructive small-fiber lemma on three M-separated points");
  lemma->add_option("--map", la.map, "Scalar map descriptor (JSON)")->required()->check(CLI::ExistingFile);
  lemma->add_option("--points", la.points, "CSV with three points")->required()->check(CLI::ExistingFile);
  lemma->add_option("--M", la.M, "Separation / smallness threshold M")->capture_default_str();
  lemma->add_option("--tol", la.tol, "Level tolerance")->capture_default_str();
  add_common(lemma, common);

  ProbeArgs pa;
  auto* probe = app.add_subcommand("probe-union", "Check that small-fiber points cluster around two anchors");
  probe->add_option("--map", pa.map, "Scalar map descriptor (JSON)")->required()->check(CLI::ExistingFile);
  probe->add_option("--candidates", pa.candidates, "CSV of points in small fibers")->required()->check(CLI::ExistingFile);
  probe->add_option("--M", pa.M, "Smallness threshold M")->capture_default_str();
  probe->add_flag("--no-verify", pa.no_verify, "Skip sampling each candidate's fiber");
  probe->add_option("--delta", pa.delta, "Fiber tolerance for verification")->capture_default_str();
  probe->add_option("--box", pa.box, "Verification sampling box (default: candidate bounds +- 2M)");
  probe->add_option("--samples", pa.samples, "Samples per candidate fiber")->capture_default_str();
  add_common(probe, common);

  BoundArgs ba;
  auto* bound = app.add_subcommand("boundedness", "Search for a far point of b's fiber via values on both sides");
  bound->add_option("--map", ba.map, "Scalar map descriptor (JSON)")->required()->check(CLI::ExistingFile);
  bound->add_option("--b", ba.b, "Point b as comma-separated values")->required();
  bound->add_option("--M", ba.M, "Ball radius M")->capture_default_str();
  bound->add_option("--box", ba.box, "Search box lo:hi,...")->required();
  bound->add_option("--grid", ba.grid, "Search grid size")->capture_default_str();
  bound->add_option("--tol", ba.tol, "Level tolerance")->capture_default_str();
  add_common(bound, common);

  UrysohnArgs ua;
  auto* ury = app.add_subcommand("urysohn", "Closed-form fibers of d(x,a)^2 / (d(x,a)^2 + d(x,b)^2)");
  ury->add_option("--a", ua.a, "Point a")->required();
  ury->add_option("--b", ua.b, "Point b")->required();
  ury->add_option("--t", ua.t, "Level in [0, 1]");
  ury->add_option("--M", ua.M, "Smallness threshold: report small levels and region separation");
  add_common(ury, common);

  std::string qconfig, qin, qout;
  bool qrational = false;
  auto* quant = app.add_subcommand("quantize", "Encode points into exact prime codes (JSON lines)");
  quant->add_option("--map-config", qconfig, "Codec config or prime_quantizer descriptor")->required()->check(CLI::ExistingFile);
  quant->add_option("--in", qin, "Input points (.csv or .json)")->required()->check(CLI::ExistingFile);
  quant->add_option("--out", qout, "Output codes.jsonl (default: stdout)");
  quant->add_flag("--rational", qrational, "Also render each slot as an exact fraction");

  std::string dconfig, din, dout;
  auto* dequant = app.add_subcommand("dequantize", "Decode prime codes to cell centers (CSV)");
  dequant->add_option("--map-config", dconfig, "Codec config or prime_quantizer descriptor")->required()->check(CLI::ExistingFile);
  dequant->add_option("--in", din, "Input codes.jsonl")->required()->check(CLI::ExistingFile);
  dequant->add_option("--out", dout, "Output CSV (default: stdout)");

  auto* rep = app.add_subcommand("report", "Emit point sets for plotting");
  rep->require_subcommand(1);
  std::string fig_a, fig_b, fig_dir, fig_from, fig_x1;
  std::size_t fig_levels = 9;
  double fig_r = 1.0;
  auto* ufig = rep->add_subcommand("urysohn-figure", "Circles of the Urysohn map at levels i/(k+1)");
  ufig->add_option("--a", fig_a, "Point a")->required();
  ufig->add_option("--b", fig_b, "Point b")->required();
  ufig->add_option("--levels", fig_levels, "Number of levels k")->capture_default_str();
  ufig->add_option("--out-dir", fig_dir, "Directory for the CSV files")->required();
  auto* afig = rep->add_subcommand("axis-tube-figure", "Axis tube fibers (circles) in R^3 at given x1 values");
  afig->add_option("--x1", fig_x1, "Comma-separated x1 values")->required();
  afig->add_option("--r", fig_r, "Tube radius")->capture_default_str();
  afig->add_option("--out-dir", fig_dir, "Directory for the CSV files")->required();
  auto* ffig = rep->add_subcommand("figure", "Point sets from a saved urysohn or fiber report");
  ffig->add_option("--from", fig_from, "Report JSON")->required()->check(CLI::ExistingFile);
  ffig->add_option("--out-dir", fig_dir, "Directory for the CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*witness) return run_witness(wa, common, false);
    if (*cube) return run_witness(ca, common, true);
    if (*fiber) return run_fiber(fa, common);
    if (*lemma) return run_lemma(la, common);
    if (*probe) return run_probe(pa, common);
    if (*bound) return run_boundedness(ba, common);
    if (*ury) return run_urysohn(ua, common);
    if (*quant) return run_quantize(qconfig, qin, qout, qrational);
    if (*dequant) return run_dequantize(dconfig, din, dout);
    if (*ufig) {
      const geometry::Point a(io::parse_values(fig_a, "--a"));
      const geometry::Point b(io::parse_values(fig_b, "--b"));
      const double d = geometry::distance(a, b);
      return write_sets(report::urysohn_figure(a, b, fig_levels, {-2.0 * d, 3.0 * d, -2.5 * d, 2.5 * d}), fig_dir);
    }
    if (*afig) {
      const Vector x1 = io::parse_values(fig_x1, "--x1");
      return write_sets(report::axis_tube_figure(std::vector<double>(x1.data(), x1.data() + x1.size()), fig_r), fig_dir);
    }
    if (*ffig) {
      json j;
      try {
        j = json::parse(io::read_file(fig_from));
      } catch (const json::parse_error& e) {
        throw ParseError(e.what(), fig_from);
      }
      return write_sets(report::emit_figure_data(j), fig_dir);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {  // InputError, ConfigError
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EvaluationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

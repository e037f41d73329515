#include "oscflow/config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "oscflow/error.hpp"

namespace oscflow {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void error(const YAML::Node& node, const std::string& msg) const {
    std::ostringstream out;
    out << source_;
    if (node.IsDefined() && node.Mark().line >= 0) out << ':' << node.Mark().line + 1;
    out << ": " << msg;
    fail(ErrorCode::Config, out.str());
  }

  void expect_map(const YAML::Node& node, const std::string& path, std::set<std::string> allowed) const {
    if (!node.IsMap()) error(node, path + ": expected a mapping");
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) error(kv.first, path + ": unknown field '" + key + "'");
    }
  }

  YAML::Node require(const YAML::Node& parent, const std::string& path, const char* key) const {
    const YAML::Node n = parent[key];
    if (!n) error(parent, path + ": missing field '" + key + "'");
    return n;
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) error(node, path + ": expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      error(node, path + ": cannot parse '" + node.Scalar() + "'");
    }
  }

  template <class T>
  void opt(const YAML::Node& parent, const std::string& path, const char* key, T& out) const {
    if (const YAML::Node n = parent[key]) out = scalar<T>(n, path + "." + key);
  }

  double positive(const YAML::Node& parent, const std::string& path, const char* key, double fallback,
                  bool required = false) const {
    const YAML::Node n = required ? require(parent, path, key) : parent[key];
    if (!n) return fallback;
    const double v = scalar<double>(n, path + "." + key);
    if (!(v > 0.0)) error(n, path + "." + key + ": must be positive");
    return v;
  }

  std::vector<double> list(const YAML::Node& node, const std::string& path) const {
    if (!node.IsSequence()) error(node, path + ": expected a list");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(scalar<double>(node[i], path));
    return out;
  }

  // period plus one of sine / constant / harmonics; a bare `zero: true` also works
  PeriodicSignal signal(const YAML::Node& node, const std::string& path, double default_period = 0.0,
                        const std::string& extra_key = "") const {
    std::set<std::string> keys{"period", "sine", "constant", "harmonics", "zero", "grid"};
    if (!extra_key.empty()) keys.insert(extra_key);
    expect_map(node, path, keys);
    const double period = default_period > 0.0 && !node["period"]
                              ? default_period
                              : positive(node, path, "period", 0.0, true);
    int grid = PeriodicSignal::kDefaultGrid;
    opt(node, path, "grid", grid);
    int kinds = 0;
    PeriodicSignal out = PeriodicSignal::zero(period, grid);
    try {
      if (const YAML::Node s = node["sine"]) {
        ++kinds;
        expect_map(s, path + ".sine", {"amplitude", "harmonic", "offset"});
        double amp = scalar<double>(require(s, path + ".sine", "amplitude"), path + ".sine.amplitude");
        int k = 1;
        double offset = 0.0;
        opt(s, path + ".sine", "harmonic", k);
        opt(s, path + ".sine", "offset", offset);
        if (k < 1) error(s, path + ".sine.harmonic: must be >= 1");
        out = PeriodicSignal::sine(period, amp, k, offset, grid);
      }
      if (const YAML::Node c = node["constant"]) {
        ++kinds;
        out = PeriodicSignal::constant(period, scalar<double>(c, path + ".constant"), grid);
      }
      if (const YAML::Node h = node["harmonics"]) {
        ++kinds;
        if (!h.IsSequence()) error(h, path + ".harmonics: expected a list of [k, re, im]");
        std::vector<Harmonic> coeffs;
        for (std::size_t i = 0; i < h.size(); ++i) {
          const YAML::Node row = h[i];
          if (!row.IsSequence() || row.size() != 3) error(row, path + ".harmonics: rows are [k, re, im]");
          coeffs.push_back({scalar<int>(row[0], path + ".harmonics"),
                            cplx(scalar<double>(row[1], path + ".harmonics"), scalar<double>(row[2], path + ".harmonics"))});
        }
        out = PeriodicSignal::make(period, coeffs, grid);
      }
      if (const YAML::Node z = node["zero"]) {
        ++kinds;
        if (!scalar<bool>(z, path + ".zero")) error(z, path + ".zero: only 'true' is meaningful");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Config) throw;
      error(node, path + ": " + e.what());
    }
    if (kinds != 1) error(node, path + ": give exactly one of sine, constant, harmonics, zero");
    return out;
  }

 private:
  std::string source_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    fail(ErrorCode::Io, "sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorCode::Config, source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) fail(ErrorCode::Config, source + ": empty config");
  rd.expect_map(root, "config", {"geometry", "params", "flowrate", "forces", "solver", "resonance", "output", "seed"});

  RunConfig cfg;
  cfg.source = source;
  cfg.hash = sha256_hex(text);
  ProblemSpec& ps = cfg.problem;

  if (const YAML::Node g = root["geometry"]) {
    rd.expect_map(g, "geometry", {"half_length", "body"});
    ps.half_length = rd.positive(g, "geometry", "half_length", ps.half_length);
    if (const YAML::Node b = g["body"]) {
      rd.expect_map(b, "geometry.body", {"x0", "x1", "y0", "y1"});
      rd.opt(b, "geometry.body", "x0", ps.body.x0);
      rd.opt(b, "geometry.body", "x1", ps.body.x1);
      rd.opt(b, "geometry.body", "y0", ps.body.y0);
      rd.opt(b, "geometry.body", "y1", ps.body.y1);
      if (!(ps.body.x1 > ps.body.x0 && ps.body.y1 > ps.body.y0)) rd.error(b, "geometry.body: empty rectangle");
    }
  }
  if (const YAML::Node p = root["params"]) {
    rd.expect_map(p, "params", {"rho", "mu", "mass", "stiffness"});
    ps.params.rho = rd.positive(p, "params", "rho", ps.params.rho);
    ps.params.mu = rd.positive(p, "params", "mu", ps.params.mu);
    ps.params.mass = rd.positive(p, "params", "mass", ps.params.mass);
    ps.params.stiffness = rd.positive(p, "params", "stiffness", ps.params.stiffness);
  }

  const YAML::Node f = rd.require(root, "config", "flowrate");
  {
    ps.flowrate = rd.signal(f, "flowrate", 0.0, "target_smallness");
    if (const YAML::Node t = f["target_smallness"]) {
      ps.target_smallness = rd.scalar<double>(t, "flowrate.target_smallness");
      if (ps.target_smallness < 0.0) rd.error(t, "flowrate.target_smallness: must be >= 0");
    }
  }
  const double period = ps.flowrate.period();

  if (const YAML::Node fo = root["forces"]) {
    rd.expect_map(fo, "forces", {"f_tilde", "g_tilde"});
    if (const YAML::Node ft = fo["f_tilde"]) {
      rd.expect_map(ft, "forces.f_tilde", {"center", "radius", "direction", "signal"});
      const std::vector<double> c = rd.list(rd.require(ft, "forces.f_tilde", "center"), "forces.f_tilde.center");
      if (c.size() != 2) rd.error(ft["center"], "forces.f_tilde.center: expected [x1, x2]");
      ps.f_tilde.c1 = c[0];
      ps.f_tilde.c2 = c[1];
      ps.f_tilde.radius = rd.positive(ft, "forces.f_tilde", "radius", 0.0, true);
      if (const YAML::Node d = ft["direction"]) {
        const std::vector<double> dir = rd.list(d, "forces.f_tilde.direction");
        if (dir.size() != 2) rd.error(d, "forces.f_tilde.direction: expected [d1, d2]");
        ps.f_tilde.dir1 = dir[0];
        ps.f_tilde.dir2 = dir[1];
      }
      ps.f_tilde.signal = rd.signal(rd.require(ft, "forces.f_tilde", "signal"), "forces.f_tilde.signal", period);
    }
    if (const YAML::Node gt = fo["g_tilde"]) ps.g_tilde = rd.signal(gt, "forces.g_tilde", period);
  }

  if (const YAML::Node s = root["solver"]) {
    rd.expect_map(s, "solver", {"modes", "steps", "mesh_h", "gauss", "cheb_order", "r_in", "r_out", "omega", "tol",
                                "max_iter", "alpha", "alphas", "substeps", "halving_tol", "diagnostic_stride",
                                "field_checks"});
    rd.opt(s, "solver", "modes", ps.modes);
    rd.opt(s, "solver", "steps", ps.steps);
    ps.mesh_h = rd.positive(s, "solver", "mesh_h", ps.mesh_h);
    rd.opt(s, "solver", "gauss", ps.gauss);
    rd.opt(s, "solver", "cheb_order", ps.cheb_order);
    rd.opt(s, "solver", "r_in", ps.r_in);
    rd.opt(s, "solver", "r_out", ps.r_out);
    FixedPointConfig& fp = ps.fixed_point;
    fp.omega = rd.positive(s, "solver", "omega", fp.omega);
    fp.tol = rd.positive(s, "solver", "tol", fp.tol);
    rd.opt(s, "solver", "max_iter", fp.max_iter);
    fp.alpha = rd.positive(s, "solver", "alpha", fp.alpha);
    if (const YAML::Node a = s["alphas"]) ps.alphas = rd.list(a, "solver.alphas");
    rd.opt(s, "solver", "substeps", fp.integrator.substeps);
    fp.integrator.halving_tol = rd.positive(s, "solver", "halving_tol", fp.integrator.halving_tol);
    rd.opt(s, "solver", "diagnostic_stride", ps.diagnostic_stride);
    rd.opt(s, "solver", "field_checks", ps.field_checks);
    if (ps.modes < 1) rd.error(s["modes"], "solver.modes: must be >= 1");
    if (ps.steps < 8) rd.error(s["steps"], "solver.steps: must be >= 8");
    if (ps.gauss < 1) rd.error(s["gauss"], "solver.gauss: must be >= 1");
    if (fp.max_iter < 1) rd.error(s["max_iter"], "solver.max_iter: must be >= 1");
    if (fp.integrator.substeps < 0) rd.error(s["substeps"], "solver.substeps: must be >= 0");
    if (ps.diagnostic_stride < 1) rd.error(s["diagnostic_stride"], "solver.diagnostic_stride: must be >= 1");
    if (fp.omega > 1.0) rd.error(s["omega"], "solver.omega: must lie in (0, 1]");
    if (fp.alpha > 1.0) rd.error(s["alpha"], "solver.alpha: must lie in (0, 1]");
    for (double a : ps.alphas)
      if (!(a > 0.0 && a <= 1.0)) rd.error(s["alphas"], "solver.alphas: values must lie in (0, 1]");
  }
  ps.fixed_point.integrator.steps = ps.steps;

  if (const YAML::Node r = root["resonance"]) {
    rd.expect_map(r, "resonance", {"ratios"});
    cfg.resonance_ratios = rd.list(rd.require(r, "resonance", "ratios"), "resonance.ratios");
    if (cfg.resonance_ratios.empty()) rd.error(r["ratios"], "resonance.ratios: empty period grid");
    for (double x : cfg.resonance_ratios)
      if (!(x > 0.0)) rd.error(r["ratios"], "resonance.ratios: values must be positive");
  }
  if (const YAML::Node o = root["output"]) {
    rd.expect_map(o, "output", {"dir", "profile_points", "profile_times"});
    rd.opt(o, "output", "dir", cfg.out_dir);
    rd.opt(o, "output", "profile_points", cfg.profile_points);
    rd.opt(o, "output", "profile_times", cfg.profile_times);
    if (cfg.profile_points < 2) rd.error(o["profile_points"], "output.profile_points: must be >= 2");
    if (cfg.profile_times < 1) rd.error(o["profile_times"], "output.profile_times: must be >= 1");
  }
  if (const YAML::Node sd = root["seed"]) ps.seed = rd.scalar<unsigned long long>(sd, "seed");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Config, path + ": cannot open config");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace oscflow

#include "lsda/config.hpp"

#include <charconv>
#include <fstream>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "lsda/error.hpp"

namespace lsda {

Grid RunConfig::grid() const {
  if (grid_origin) return Grid::build(grid_n, grid_length, *grid_origin);
  return Grid::centered(grid_n, grid_length);
}

XcFunctional RunConfig::functional() const {
  return xc == "none" ? XcFunctional::none() : XcFunctional::xalpha(c_x);
}

ExternalFields RunConfig::external() const {
  ExternalFields ext;
  ext.nuclei = nuclei;
  ext.field = field;
  ext.softening = softening;
  ext.mu = mu;
  return ext;
}

ScfProblem RunConfig::problem() const {
  ScfProblem p;
  p.grid = grid();
  p.ext = external();
  p.lambda = lambda;
  p.mode = mode;
  p.xc = functional();
  p.opt = scf;
  return p;
}

namespace {

constexpr int kNoCharge = std::numeric_limits<int>::min();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_items(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

class Value {
public:
  Value(std::string text, int line) : text_(std::move(text)), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(fmt::format("line {}: {} (got '{}')", line_, what, text_));
  }

  template <class T>
  static bool parse_number(const std::string& s, T& out) {
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
  }

  double real() const {
    double v;
    if (!parse_number(text_, v) || !std::isfinite(v)) fail("expected a real number");
    return v;
  }
  int integer() const {
    int v;
    if (!parse_number(text_, v)) fail("expected an integer");
    return v;
  }
  std::uint64_t unsigned64() const {
    std::uint64_t v;
    if (!parse_number(text_, v)) fail("expected a non-negative integer");
    return v;
  }
  Vec3 vec3() const {
    const auto items = split_items(text_);
    if (items.size() != 3) fail("expected three real numbers");
    Vec3 v;
    for (int i = 0; i < 3; ++i)
      if (!parse_number(items[i], v[i]) || !std::isfinite(v[i])) fail("expected three real numbers");
    return v;
  }
  std::vector<double> reals() const {
    std::vector<double> out;
    for (const auto& item : split_items(text_)) {
      double v;
      if (!parse_number(item, v) || !std::isfinite(v)) fail("expected a list of real numbers");
      out.push_back(v);
    }
    if (out.empty()) fail("expected a non-empty list");
    return out;
  }
  std::vector<std::uint64_t> unsigned_list() const {
    std::vector<std::uint64_t> out;
    for (const auto& item : split_items(text_)) {
      std::uint64_t v;
      if (!parse_number(item, v)) fail("expected a list of non-negative integers");
      out.push_back(v);
    }
    if (out.empty()) fail("expected a non-empty list");
    return out;
  }
  std::string text() const {
    if (text_.size() >= 2 && text_.front() == '"' && text_.back() == '"') return text_.substr(1, text_.size() - 2);
    return text_;
  }
  template <class F>
  auto keyword(F&& parse) const {
    try {
      return parse(text_);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  int line() const { return line_; }

private:
  std::string text_;
  int line_;
};

using Setter = std::function<void(RunConfig&, const Value&)>;

const std::map<std::string, Setter>& setters() {
  using K = MagneticFieldSpec::Kind;
  static const std::map<std::string, Setter> table = {
      {"grid.n", [](RunConfig& c, const Value& v) { c.grid_n = v.integer(); }},
      {"grid.L", [](RunConfig& c, const Value& v) { c.grid_length = v.real(); }},
      {"grid.origin", [](RunConfig& c, const Value& v) { c.grid_origin = v.vec3(); }},
      {"lambda", [](RunConfig& c, const Value& v) { c.lambda = v.real(); }},
      {"mode", [](RunConfig& c, const Value& v) { c.mode = v.keyword(parse_mode); }},
      {"xc",
       [](RunConfig& c, const Value& v) {
         const std::string s = v.text();
         if (s != "none" && s != "xalpha") v.fail("xc must be none or xalpha");
         c.xc = s;
       }},
      {"xc.c_x", [](RunConfig& c, const Value& v) { c.c_x = v.real(); }},
      {"softening_a",
       [](RunConfig& c, const Value& v) {
         c.softening = v.real();
         if (c.softening < 0.0) v.fail("softening_a must be non-negative");
       }},
      {"mu", [](RunConfig& c, const Value& v) { c.mu = v.real(); }},
      {"poisson.tol", [](RunConfig& c, const Value& v) { c.scf.poisson.tol = v.real(); }},
      {"poisson.max_iter", [](RunConfig& c, const Value& v) { c.scf.poisson.max_iter = v.integer(); }},
      {"eig.k_extra", [](RunConfig& c, const Value& v) { c.scf.k_extra = v.integer(); }},
      {"eig.tol", [](RunConfig& c, const Value& v) { c.scf.eig.tol = v.real(); }},
      {"eig.max_iter", [](RunConfig& c, const Value& v) { c.scf.eig.max_iter = v.integer(); }},
      {"eig.seed", [](RunConfig& c, const Value& v) { c.scf.eig.seed = v.unsigned64(); }},
      {"eig.guard", [](RunConfig& c, const Value& v) { c.scf.eig.guard = v.integer(); }},
      {"mix.beta", [](RunConfig& c, const Value& v) { c.scf.mix_beta = v.real(); }},
      {"scf.tol_rho", [](RunConfig& c, const Value& v) { c.scf.tol_rho = v.real(); }},
      {"scf.tol_e", [](RunConfig& c, const Value& v) { c.scf.tol_e = v.real(); }},
      {"scf.max_iter", [](RunConfig& c, const Value& v) { c.scf.max_iter = v.integer(); }},
      {"deg_tol", [](RunConfig& c, const Value& v) { c.scf.deg_tol = v.real(); }},
      {"starts", [](RunConfig& c, const Value& v) { c.scf.starts = v.keyword(parse_starts); }},
      {"field.type",
       [](RunConfig& c, const Value& v) {
         const std::string s = v.text();
         if (s == "none") c.field.kind = K::none;
         else if (s == "uniform") c.field.kind = K::uniform;
         else if (s == "gaussian") c.field.kind = K::gaussian;
         else if (s == "file") c.field.kind = K::file;
         else v.fail("field.type must be none, uniform, gaussian or file");
       }},
      {"field.amplitude", [](RunConfig& c, const Value& v) { c.field.amplitude = v.real(); }},
      {"field.axis", [](RunConfig& c, const Value& v) { c.field.axis = v.vec3(); }},
      {"field.center", [](RunConfig& c, const Value& v) { c.field.center = v.vec3(); }},
      {"field.width", [](RunConfig& c, const Value& v) { c.field.width = v.real(); }},
      {"field.path", [](RunConfig& c, const Value& v) { c.field.path = v.text(); }},
      {"sweep.lambdas", [](RunConfig& c, const Value& v) { c.sweep_lambdas = v.reals(); }},
      {"sweep.tol_bind", [](RunConfig& c, const Value& v) { c.tol_bind = v.real(); }},
      {"verify.seeds", [](RunConfig& c, const Value& v) { c.verify_seeds = v.unsigned_list(); }},
  };
  return table;
}

const char* field_kind_name(MagneticFieldSpec::Kind k) {
  switch (k) {
    case MagneticFieldSpec::Kind::none: return "none";
    case MagneticFieldSpec::Kind::uniform: return "uniform";
    case MagneticFieldSpec::Kind::gaussian: return "gaussian";
    case MagneticFieldSpec::Kind::file: return "file";
  }
  return "none";
}

std::string real(double v) { return fmt::format("{:.17g}", v); }

std::string vec(const Vec3& v) { return fmt::format("{} {} {}", real(v[0]), real(v[1]), real(v[2])); }

}  // namespace

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.grid_n >= 2, "grid.n must be at least 2");
  require(c.grid_length > 0.0, "grid.L must be positive");
  require(c.lambda > 0.0, "lambda must be positive");
  require(c.c_x > 0.0, "xc.c_x must be positive");
  require(c.mu >= 0.0, "mu must be non-negative");
  require(c.scf.poisson.tol > 0.0, "poisson.tol must be positive");
  require(c.scf.poisson.max_iter > 0, "poisson.max_iter must be positive");
  require(c.scf.k_extra >= 1, "eig.k_extra must be at least 1");
  require(c.scf.eig.tol > 0.0, "eig.tol must be positive");
  require(c.scf.eig.max_iter > 0, "eig.max_iter must be positive");
  require(c.scf.mix_beta > 0.0 && c.scf.mix_beta <= 1.0, "mix.beta must lie in (0, 1]");
  require(c.scf.tol_rho > 0.0, "scf.tol_rho must be positive");
  require(c.scf.tol_e > 0.0, "scf.tol_e must be positive");
  require(c.scf.max_iter > 0, "scf.max_iter must be positive");
  require(c.scf.deg_tol > 0.0, "deg_tol must be positive");
  require(c.tol_bind > 0.0, "sweep.tol_bind must be positive");
  require(!c.sweep_lambdas.empty(), "sweep.lambdas must not be empty");
  for (double l : c.sweep_lambdas) require(l > 0.0, "sweep.lambdas must be positive");
  require(!c.verify_seeds.empty(), "verify.seeds must not be empty");
  for (const auto& n : c.nuclei) require(n.charge >= 1, "nucleus z must be a positive integer");
  using K = MagneticFieldSpec::Kind;
  if (c.field.kind == K::gaussian) require(c.field.width > 0.0, "field.width must be positive");
  if (c.field.kind == K::file) require(!c.field.path.empty(), "field.path is required for field.type = file");
  if (c.field.kind == K::uniform || c.field.kind == K::gaussian) {
    const Vec3& a = c.field.axis;
    require(a[0] != 0.0 || a[1] != 0.0 || a[2] != 0.0, "field.axis must be non-zero");
  }
  if (c.mode == Mode::collinear && c.field.kind != K::none) {
    bool transverse = false;
    if (c.field.kind == K::file) {
      const VectorField b = sample_magnetic_field(c.field, c.grid());
      for (std::size_t p = 0; p < b.x.size(); ++p) transverse = transverse || b.x[p] != 0.0 || b.y[p] != 0.0;
    } else {
      transverse = c.field.amplitude != 0.0 && (c.field.axis[0] != 0.0 || c.field.axis[1] != 0.0);
    }
    require(!transverse, "mode = collinear couples only B_z; the field has x or y components");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::set<std::string> seen;
  std::set<std::string> nucleus_seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(fmt::format("line {}: malformed section header", line));
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      static const std::set<std::string> sections = {"grid", "nucleus", "field", "xc", "poisson", "eig",
                                                     "mix",  "scf",     "sweep", "verify"};
      if (!sections.count(section)) throw ConfigError(fmt::format("line {}: unknown section [{}]", line, section));
      if (section == "nucleus") {
        c.nuclei.push_back(Nucleus{kNoCharge, {0.0, 0.0, 0.0}});
        nucleus_seen.clear();
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", line));
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const Value value(trim(std::string_view(body).substr(eq + 1)), line);
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line));
    if (value.text().empty()) throw ConfigError(fmt::format("line {}: empty value for '{}'", line, key));

    if (section == "nucleus") {
      if (!nucleus_seen.insert(key).second)
        throw ConfigError(fmt::format("line {}: duplicate key '{}' in [nucleus]", line, key));
      if (key == "z")
        c.nuclei.back().charge = value.integer();
      else if (key == "position")
        c.nuclei.back().position = value.vec3();
      else
        throw ConfigError(fmt::format("line {}: unknown key '{}' in [nucleus]", line, key));
      continue;
    }
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError(fmt::format("line {}: unknown key '{}'", line, full));
    if (!seen.insert(full).second) throw ConfigError(fmt::format("line {}: duplicate key '{}'", line, full));
    it->second(c, value);
  }
  for (const char* req : {"grid.n", "grid.L", "lambda"})
    if (!seen.count(req)) throw ConfigError(fmt::format("missing required key '{}'", req));
  for (std::size_t i = 0; i < c.nuclei.size(); ++i)
    if (c.nuclei[i].charge == kNoCharge) throw ConfigError(fmt::format("nucleus {} has no z", i + 1));
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const RunConfig& c) {
  std::string out;
  auto put = [&](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  put("grid.n", std::to_string(c.grid_n));
  put("grid.L", real(c.grid_length));
  if (c.grid_origin) put("grid.origin", vec(*c.grid_origin));
  put("lambda", real(c.lambda));
  put("mode", to_string(c.mode));
  put("xc", c.xc);
  put("xc.c_x", real(c.c_x));
  if (c.softening >= 0.0) put("softening_a", real(c.softening));
  put("mu", real(c.mu));
  put("poisson.tol", real(c.scf.poisson.tol));
  put("poisson.max_iter", std::to_string(c.scf.poisson.max_iter));
  put("eig.k_extra", std::to_string(c.scf.k_extra));
  put("eig.tol", real(c.scf.eig.tol));
  put("eig.max_iter", std::to_string(c.scf.eig.max_iter));
  put("eig.seed", std::to_string(c.scf.eig.seed));
  put("eig.guard", std::to_string(c.scf.eig.guard));
  put("mix.beta", real(c.scf.mix_beta));
  put("scf.tol_rho", real(c.scf.tol_rho));
  put("scf.tol_e", real(c.scf.tol_e));
  put("scf.max_iter", std::to_string(c.scf.max_iter));
  put("deg_tol", real(c.scf.deg_tol));
  put("starts", to_string(c.scf.starts));
  put("field.type", field_kind_name(c.field.kind));
  put("field.amplitude", real(c.field.amplitude));
  put("field.axis", vec(c.field.axis));
  put("field.center", vec(c.field.center));
  put("field.width", real(c.field.width));
  if (!c.field.path.empty()) put("field.path", "\"" + c.field.path + "\"");
  std::string lambdas, seeds;
  for (double l : c.sweep_lambdas) lambdas += (lambdas.empty() ? "" : " ") + real(l);
  for (auto s : c.verify_seeds) seeds += (seeds.empty() ? "" : " ") + std::to_string(s);
  put("sweep.lambdas", lambdas);
  put("sweep.tol_bind", real(c.tol_bind));
  put("verify.seeds", seeds);
  for (const auto& n : c.nuclei) {
    out += "\n[nucleus]\n";
    put("z", std::to_string(n.charge));
    put("position", vec(n.position));
  }
  return out;
}

}  // namespace lsda

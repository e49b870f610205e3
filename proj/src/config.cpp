#include "gibbslab/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gibbslab/errors.hpp"
#include "gibbslab/numerics.hpp"

namespace gibbslab {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorKind::ConfigParse, "line " + std::to_string(line) + ": " + what);
}

class ValueParser {
 public:
  ValueParser(const std::string& s, int line) : s_(s), line_(line) {}

  ConfigValue parse() {
    ConfigValue v = value();
    skip_ws();
    if (pos_ != s_.size()) fail(line_, "unexpected trailing text '" + s_.substr(pos_) + "'");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  ConfigValue value() {
    skip_ws();
    if (pos_ >= s_.size()) fail(line_, "missing value");
    ConfigValue v;
    v.line = line_;
    const char c = s_[pos_];
    if (c == '"') {
      v.kind = ConfigValue::Kind::String;
      ++pos_;
      while (true) {
        if (pos_ >= s_.size()) fail(line_, "unterminated string");
        char ch = s_[pos_++];
        if (ch == '"') break;
        if (ch == '\\') {
          if (pos_ >= s_.size()) fail(line_, "dangling escape");
          const char e = s_[pos_++];
          ch = e == 'n' ? '\n' : e == 't' ? '\t' : e;
        }
        v.text += ch;
      }
      return v;
    }
    if (c == '[') {
      v.kind = ConfigValue::Kind::Array;
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(value());
        skip_ws();
        if (pos_ >= s_.size()) fail(line_, "unterminated array");
        if (s_[pos_] == ',') {
          ++pos_;
          skip_ws();
          if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return v;
          }
          continue;
        }
        if (s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        fail(line_, "expected ',' or ']' in array");
      }
    }
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '.' || s_[end] == '-' ||
                               s_[end] == '+' || s_[end] == '_'))
      ++end;
    const std::string tok = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (tok == "true" || tok == "false") {
      v.kind = ConfigValue::Kind::Bool;
      v.boolean = tok == "true";
      return v;
    }
    double d = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size()) fail(line_, "cannot parse value '" + tok + "'");
    v.kind = ConfigValue::Kind::Number;
    v.text = tok;
    return v;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_;
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '"' && (k == 0 || s[k - 1] != '\\')) in_string = !in_string;
    if (s[k] == '#' && !in_string) return s.substr(0, k);
  }
  return s;
}

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '"' && (k == 0 || s[k - 1] != '\\')) in_string = !in_string;
    if (in_string) continue;
    depth += s[k] == '[' ? 1 : s[k] == ']' ? -1 : 0;
  }
  return depth;
}

}  // namespace

double ConfigValue::as_double() const {
  if (kind != Kind::Number) fail(line, "expected a number");
  double d = 0;
  std::from_chars(text.data(), text.data() + text.size(), d);
  return d;
}

std::int64_t ConfigValue::as_int() const {
  if (kind != Kind::Number) fail(line, "expected an integer");
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) fail(line, "expected an integer, got '" + text + "'");
  return v;
}

std::uint64_t ConfigValue::as_uint() const {
  if (kind != Kind::Number) fail(line, "expected an unsigned integer");
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) fail(line, "expected a 64-bit unsigned integer, got '" + text + "'");
  return v;
}

bool ConfigValue::as_bool() const {
  if (kind != Kind::Bool) fail(line, "expected true or false");
  return boolean;
}

const std::string& ConfigValue::as_string() const {
  if (kind != Kind::String) fail(line, "expected a quoted string");
  return text;
}

std::vector<double> ConfigValue::as_doubles() const {
  if (kind == Kind::Number) return {as_double()};
  if (kind != Kind::Array) fail(line, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& it : items) out.push_back(it.as_double());
  return out;
}

std::vector<std::int64_t> ConfigValue::as_ints() const {
  if (kind == Kind::Number) return {as_int()};
  if (kind != Kind::Array) fail(line, "expected an array of integers");
  std::vector<std::int64_t> out;
  for (const auto& it : items) out.push_back(it.as_int());
  return out;
}

ConfigTable parse_config_text(const std::string& text) {
  ConfigTable table;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(line, "empty section name");
      table[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(line, "missing key");
    for (char ch : key)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') fail(line, "invalid key '" + key + "'");
    if (section.empty()) fail(line, "key '" + key + "' outside any section");
    std::string rhs = s.substr(eq + 1);
    const int start = line;
    while (bracket_balance(rhs) > 0 && std::getline(in, raw)) {
      ++line;
      rhs += " " + strip_comment(raw);
    }
    if (table[section].count(key)) fail(start, "duplicate key '" + key + "' in [" + section + "]");
    table[section][key] = ValueParser(rhs, start).parse();
  }
  return table;
}

namespace {

// Reads the known keys of one section and rejects the rest.
class SectionReader {
 public:
  SectionReader(const ConfigTable& t, const std::string& name) : name_(name) {
    auto it = t.find(name);
    if (it != t.end()) values_ = &it->second;
  }
  ~SectionReader() noexcept(false) {
    if (!values_ || std::uncaught_exceptions()) return;
    for (const auto& [k, v] : *values_)
      if (!used_.count(k)) fail(v.line, "unknown key '" + k + "' in [" + name_ + "]");
  }
  const ConfigValue* get(const std::string& key) {
    used_.insert(key);
    if (!values_) return nullptr;
    auto it = values_->find(key);
    return it == values_->end() ? nullptr : &it->second;
  }

 private:
  std::string name_;
  const std::map<std::string, ConfigValue>* values_ = nullptr;
  std::set<std::string> used_;
};

Scheme parse_scheme(const ConfigValue& v) {
  const auto& s = v.as_string();
  if (s == "metropolis" || s == "random-scan-metropolis") return Scheme::RandomScanMetropolis;
  if (s == "mala" || s == "full-step-mala") return Scheme::Mala;
  fail(v.line, "unknown scheme '" + s + "'");
}

void require_one_of(const ConfigValue& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v.as_string() == o) return;
  std::string all;
  for (const char* o : options) all += std::string(all.empty() ? "" : ", ") + o;
  fail(v.line, "'" + v.as_string() + "' is not one of " + all);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  const ConfigTable t = parse_config_text(text);
  for (const auto& [name, values] : t) {
    static const std::set<std::string> known{"lattice", "potential", "interaction", "boundary", "grid",
                                             "chain",   "block",     "bootstrap",   "run",      "fit"};
    if (!known.count(name)) {
      const int line = values.empty() ? 0 : values.begin()->second.line;
      fail(line, "unknown section [" + name + "]");
    }
  }
  ExperimentConfig c;
  c.source = text;
  {
    SectionReader r(t, "lattice");
    const ConfigValue* dim = r.get("dimension");
    if (auto v = r.get("extent")) {
      c.extents = v->as_ints();
      if (dim && c.extents.size() == 1) c.extents.assign(static_cast<std::size_t>(dim->as_int()), c.extents[0]);
      if (dim && static_cast<std::int64_t>(c.extents.size()) != dim->as_int()) fail(v->line, "extent does not match dimension");
    }
    if (dim && dim->as_int() < 1) fail(dim->line, "dimension must be >= 1");
    if (auto v = r.get("lower")) c.lower = v->as_ints();
  }
  {
    SectionReader r(t, "potential");
    if (auto v = r.get("kind")) {
      require_one_of(*v, {"gaussian", "quartic", "bumped_quartic"});
      c.potential = v->as_string();
    }
    if (auto v = r.get("amplitude")) c.potential_amplitude = v->as_double();
    if (auto v = r.get("field")) c.field = v->as_double();
  }
  {
    SectionReader r(t, "interaction");
    if (auto v = r.get("kind")) {
      require_one_of(*v, {"power_law", "nearest_neighbor", "explicit"});
      c.interaction = v->as_string();
    }
    if (auto v = r.get("amplitude")) c.amplitude = v->as_double();
    if (auto v = r.get("exponent")) c.exponent = v->as_double();
    if (auto v = r.get("diagonal")) c.diagonal = v->as_double();
    if (auto v = r.get("ferromagnetic")) c.ferromagnetic = v->as_bool();
    if (auto v = r.get("coupling")) c.coupling = v->as_double();
    if (auto v = r.get("cutoff")) c.cutoff = v->as_double();
    if (auto v = r.get("shell_width")) c.shell_width = v->as_int();
    if (auto v = r.get("decay_constant")) c.decay_constant = v->as_double();
    if (auto v = r.get("decay_exponent")) c.decay_exponent = v->as_double();
    if (auto v = r.get("matrix")) {
      if (v->kind != ConfigValue::Kind::Array) fail(v->line, "matrix must be an array of rows");
      for (const auto& row : v->items) c.matrix.push_back(row.as_doubles());
    }
  }
  {
    SectionReader r(t, "boundary");
    if (auto v = r.get("kind")) {
      require_one_of(*v, {"zero", "constant", "random"});
      c.boundary = v->as_string();
    }
    if (auto v = r.get("value")) c.boundary_value = v->as_double();
    if (auto v = r.get("seed")) c.boundary_seed = v->as_uint();
  }
  {
    SectionReader r(t, "grid");
    if (auto v = r.get("half_width")) c.grid.half_width = v->as_double();
    if (auto v = r.get("points")) c.grid.points_per_site = static_cast<std::size_t>(v->as_int());
    if (auto v = r.get("budget")) c.grid.budget = static_cast<std::size_t>(v->as_int());
  }
  {
    SectionReader r(t, "run");
    if (auto v = r.get("seed")) c.seed = v->as_uint();
    if (auto v = r.get("out")) c.out = v->as_string();
    if (auto v = r.get("format")) {
      require_one_of(*v, {"csv", "json"});
      c.format = v->as_string();
    }
  }
  c.chain.seed = c.seed;
  {
    SectionReader r(t, "chain");
    if (auto v = r.get("steps")) c.chain.steps = static_cast<std::size_t>(v->as_int());
    if (auto v = r.get("burn_in")) c.chain.burn_in = static_cast<std::size_t>(v->as_int());
    if (auto v = r.get("thin")) c.chain.thin = static_cast<std::size_t>(v->as_int());
    if (auto v = r.get("proposal_sd")) c.chain.proposal_sd = v->as_double();
    if (auto v = r.get("seed")) c.chain.seed = v->as_uint();
    if (auto v = r.get("scheme")) c.chain.scheme = parse_scheme(*v);
    if (auto v = r.get("pairs")) {
      require_one_of(*v, {"auto", "all", "origin"});
      c.pairs = v->as_string();
    }
  }
  {
    SectionReader r(t, "block");
    if (auto v = r.get("radii")) c.radii = v->as_doubles();
    if (auto v = r.get("epsilon")) c.epsilon = v->as_double();
    if (auto v = r.get("rho")) c.rho = v->as_double();
    if (auto v = r.get("C")) c.block_C = v->as_double();
  }
  {
    SectionReader r(t, "bootstrap");
    if (auto v = r.get("coupling_factor")) c.coupling_factor = v->as_double();
    if (auto v = r.get("max_iterations")) c.max_iterations = static_cast<std::size_t>(v->as_int());
    if (auto v = r.get("L")) c.L = v->as_double();
    if (auto v = r.get("C0")) c.C0 = v->as_double();
    if (auto v = r.get("alpha0")) c.alpha0 = v->as_double();
  }
  {
    SectionReader r(t, "fit");
    if (auto v = r.get("input")) c.fit_input = v->as_string();
    if (auto v = r.get("r_min")) c.fit_r_min = v->as_double();
    if (auto v = r.get("outer_fraction")) c.fit_outer_fraction = v->as_double();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ModelSpec build_model(const ExperimentConfig& cfg) {
  ModelInput in;
  in.lattice = cfg.lower.empty() ? Lattice(cfg.extents) : Lattice(cfg.lower, cfg.extents);
  if (cfg.potential == "gaussian") {
    in.potentials = {Potential::gaussian()};
  } else if (cfg.potential == "quartic") {
    in.potentials = {Potential::quartic()};
  } else {
    in.potentials = {Potential::bumped_quartic(cfg.potential_amplitude)};
  }
  const auto n = static_cast<Eigen::Index>(in.lattice.size());
  if (cfg.field != 0.0) in.field = Eigen::VectorXd::Constant(n, cfg.field);
  in.coupling_cutoff = cfg.cutoff;
  in.shell_width = cfg.shell_width;
  if (cfg.decay_constant || cfg.decay_exponent) {
    if (!cfg.decay_constant || !cfg.decay_exponent) {
      throw Error(ErrorKind::ConfigParse, "decay_constant and decay_exponent must be given together");
    }
    in.decay = DecayClaim{*cfg.decay_constant, *cfg.decay_exponent};
  }
  if (cfg.interaction == "explicit") {
    if (static_cast<Eigen::Index>(cfg.matrix.size()) != n) {
      throw Error(ErrorKind::ConfigParse, "explicit matrix needs " + std::to_string(n) + " rows");
    }
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = cfg.matrix[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw Error(ErrorKind::ConfigParse, "matrix row " + std::to_string(i) + " needs " + std::to_string(n) + " entries");
      }
      for (Eigen::Index j = 0; j < n; ++j) M(i, j) = row[static_cast<std::size_t>(j)];
    }
    in.interaction = M;
  } else if (cfg.interaction == "power_law") {
    in.kernel = InteractionKernel::power_law(cfg.amplitude, cfg.exponent, cfg.diagonal, cfg.ferromagnetic);
  } else {
    in.kernel = InteractionKernel::nearest_neighbor(cfg.coupling, cfg.diagonal);
  }
  ModelSpec model = build_model(in);
  if (cfg.boundary == "zero") return model;
  std::vector<ExteriorSpin> spins;
  const CounterRng rng{cfg.boundary_seed};
  std::uint64_t k = 0;
  for (auto& s : coupled_shell(model)) {
    const double v = cfg.boundary == "constant" ? cfg.boundary_value
                                                : cfg.boundary_value * (2.0 * rng.uniform(k, 0, 0) - 1.0);
    spins.push_back({s, v});
    ++k;
  }
  return with_boundary(model, std::move(spins));
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace gibbslab

#include "steklov/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace steklov {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// JSON access with field-path diagnostics
// ---------------------------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path.empty() ? what : path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const ordered_json* opt_member(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const ordered_json& member(const ordered_json& obj, const std::string& path,
                           const char* key) {
  const ordered_json* v = opt_member(obj, key);
  if (!v) fail(join(path, key), "required field is missing");
  return *v;
}

void require_object(const ordered_json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
}

double as_double(const ordered_json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const ordered_json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

bool as_bool(const ordered_json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const ordered_json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

void reject_unknown_keys(const ordered_json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) fail(join(path, key), "unknown field");
  }
}

// ---------------------------------------------------------------------------
// Field coefficient tables
// ---------------------------------------------------------------------------

Complex parse_coefficient(const ordered_json& v, const std::string& path) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  fail(path, "expected a number or [re, im] pair");
}

// Parses one boundary's field entry (shorthand string or term array) into
// `out`, recording the basis each term declares in `basis`/`has_basis`.
void parse_boundary_field(const ordered_json& v, const std::string& path,
                          int dim, CoeffMap& out, Basis& basis,
                          bool& has_basis) {
  auto merge_basis = [&](Basis b) {
    if (has_basis && basis != b)
      fail(path, "mixed real and complex bases in one deformation field");
    basis = b;
    has_basis = true;
  };
  if (v.is_string()) {
    try {
      out = parse_field_shorthand(v.get<std::string>(), dim);
    } catch (const ConfigError& e) {
      fail(path, e.what());
    }
    merge_basis(Basis::Real);
    return;
  }
  if (!v.is_array()) fail(path, "expected a shorthand string or a term array");
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string tpath = path + "[" + std::to_string(i) + "]";
    const ordered_json& term = v[i];
    require_object(term, tpath);
    reject_unknown_keys(term, tpath, {"l", "m", "coefficient", "basis"});
    const int l = as_int(member(term, tpath, "l"), join(tpath, "l"));
    const int m = as_int(member(term, tpath, "m"), join(tpath, "m"));
    const Complex c = parse_coefficient(member(term, tpath, "coefficient"),
                                        join(tpath, "coefficient"));
    const std::string bs =
        as_string(member(term, tpath, "basis"), join(tpath, "basis"));
    Basis b;
    if (bs == "real") b = Basis::Real;
    else if (bs == "complex") b = Basis::ComplexStandard;
    else fail(join(tpath, "basis"), "expected \"real\" or \"complex\"");
    merge_basis(b);
    if (!valid_index({l, m}, dim, b))
      fail(tpath, "(l=" + std::to_string(l) + ", m=" + std::to_string(m) +
                      ") is not a valid harmonic index for dim " +
                      std::to_string(dim));
    out[{l, m}] += c;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == Complex{}; });
}

ordered_json coefficient_json(Complex c) {
  if (c.imag() == 0.0) return ordered_json(c.real());
  return ordered_json::array({c.real(), c.imag()});
}

ordered_json terms_json(const CoeffMap& coeffs, Basis basis) {
  ordered_json arr = ordered_json::array();
  for (const auto& [key, value] : coeffs) {
    ordered_json term;
    term["l"] = key.l;
    term["m"] = key.m;
    term["coefficient"] = coefficient_json(value);
    term["basis"] = basis == Basis::Real ? "real" : "complex";
    arr.push_back(std::move(term));
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Mode-dependent block checks
// ---------------------------------------------------------------------------

void check_mode_blocks(const ExperimentConfig& config) {
  const bool has_field =
      !config.field.outer.empty() || !config.field.inner.empty();
  switch (config.mode) {
    case RunMode::Spectrum:
      break;
    case RunMode::Branches:
      if (!has_field)
        fail("field", "required for mode \"branches\"");
      break;
    case RunMode::Emp:
    case RunMode::Compare:
      if (!has_field)
        fail("field", "required for mode \"" + to_string(config.mode) + "\"");
      if (config.targets.empty())
        fail("targets",
             "required for mode \"" + to_string(config.mode) + "\"");
      break;
  }
}

std::string describe(const EigenSelector& sel) {
  return "target (degree " + std::to_string(sel.degree) + ", branch " +
         std::to_string(sel.branch) + ")";
}

// Max over ascending-paired entries of |got - want| / max(1, |want|).
double paired_residual(std::vector<double> got,
                       const std::vector<double>& want) {
  std::sort(got.begin(), got.end());
  double worst = 0.0;
  for (size_t i = 0; i < want.size(); ++i)
    worst = std::max(worst, std::abs(got[i] - want[i]) /
                                std::max(1.0, std::abs(want[i])));
  return worst;
}

std::string format_double(double v, const char* fmt = "%.17g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// ---------------------------------------------------------------------------
// SVG helpers
// ---------------------------------------------------------------------------

std::vector<double> nice_ticks(double lo, double hi, int target) {
  const double range = hi - lo;
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step =
      (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + 1e-9 * step; v += step)
    ticks.push_back(v == 0.0 ? 0.0 : v);  // normalize -0
  return ticks;
}

}  // namespace

// ---------------------------------------------------------------------------
// Run modes
// ---------------------------------------------------------------------------

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Spectrum: return "spectrum";
    case RunMode::Emp: return "emp";
    case RunMode::Branches: return "branches";
    case RunMode::Compare: return "compare";
  }
  throw std::logic_error("unreachable run mode");
}

RunMode run_mode_from_string(const std::string& text) {
  if (text == "spectrum") return RunMode::Spectrum;
  if (text == "emp") return RunMode::Emp;
  if (text == "branches") return RunMode::Branches;
  if (text == "compare") return RunMode::Compare;
  throw ConfigError("unknown mode \"" + text +
                    "\"; expected spectrum, emp, branches, or compare");
}

// ---------------------------------------------------------------------------
// Shorthand parsing
// ---------------------------------------------------------------------------

CoeffMap parse_field_shorthand(const std::string& raw, int dim) {
  if (dim != 2 && dim != 3)
    throw ConfigError("deformation shorthand supports dim 2 and 3 only");

  // Normalize: strip whitespace, spell out the Greek theta.
  std::string text;
  for (size_t i = 0; i < raw.size();) {
    if (raw.compare(i, 2, "\xce\xb8") == 0) {
      text += "theta";
      i += 2;
    } else if (std::isspace(static_cast<unsigned char>(raw[i]))) {
      ++i;
    } else {
      text += raw[i];
      ++i;
    }
  }
  if (text.empty()) throw ConfigError("empty deformation shorthand");

  // Split into signed terms at top-level +/- (exponent signs excluded).
  std::vector<std::string> pieces;
  size_t start = 0;
  int depth = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '(' || c == '{') ++depth;
    else if (c == ')' || c == '}') --depth;
    else if ((c == '+' || c == '-') && depth == 0 && i > start &&
             text[i - 1] != 'e' && text[i - 1] != 'E') {
      pieces.push_back(text.substr(start, i - start));
      start = i;
    }
  }
  pieces.push_back(text.substr(start));

  static const std::regex trig_re(R"(^(cos|sin)\((\d+)theta\)$)");
  static const std::regex harm_re(R"(^Y_\{(\d+),(-?\d+)\}$)");

  CoeffMap out;
  auto add = [&](HarmonicIndex idx, double c) {
    out[idx] += Complex(c, 0.0);
  };
  auto add_constant = [&](double c) {
    // The constant function c equals c * sqrt(area) times the orthonormal
    // constant harmonic.
    if (dim == 2) add({0, 1}, c * std::sqrt(2.0 * kPi));
    else add({0, 0}, c * std::sqrt(4.0 * kPi));
  };

  for (const std::string& piece : pieces) {
    const char* begin = piece.c_str();
    char* end = nullptr;
    double coef = std::strtod(begin, &end);
    std::string rest = end;
    if (end == begin) {
      coef = 1.0;
      if (!rest.empty() && (rest[0] == '+' || rest[0] == '-')) {
        if (rest[0] == '-') coef = -1.0;
        rest.erase(0, 1);
      }
    }
    if (!rest.empty() && rest[0] == '*') rest.erase(0, 1);

    std::smatch m;
    if (rest.empty()) {
      if (end == begin)
        throw ConfigError("cannot parse shorthand term \"" + piece + "\"");
      add_constant(coef);
    } else if (std::regex_match(rest, m, trig_re)) {
      if (dim != 2)
        throw ConfigError(
            "cos/sin shorthand describes a planar field; use Y_{l,m} for "
            "dim 3");
      const int k = std::stoi(m[2]);
      const bool cosine = m[1] == "cos";
      if (k == 0) {
        if (cosine) add_constant(coef);  // cos(0 theta) = 1; sin vanishes
      } else {
        // cos(k theta) = sqrt(pi) * (orthonormal cosine element), same for sin
        add({k, cosine ? 1 : 2}, coef * std::sqrt(kPi));
      }
    } else if (std::regex_match(rest, m, harm_re)) {
      if (dim != 3)
        throw ConfigError(
            "Y_{l,m} shorthand describes a dim-3 field; use cos/sin for "
            "dim 2");
      const int l = std::stoi(m[1]);
      const int mm = std::stoi(m[2]);
      if (!valid_index({l, mm}, 3, Basis::Real))
        throw ConfigError("Y_{" + std::to_string(l) + "," +
                          std::to_string(mm) + "} is not a valid harmonic");
      add({l, mm}, coef);
    } else {
      throw ConfigError("cannot parse shorthand term \"" + piece + "\"");
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == Complex{}; });
  return out;
}

// ---------------------------------------------------------------------------
// Config parsing / printing
// ---------------------------------------------------------------------------

ExperimentConfig parse_config(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  require_object(doc, "");
  reject_unknown_keys(doc, "",
                      {"mode", "label", "domain", "spectrum_count", "field",
                       "targets", "mps", "zero_tolerance", "tangents",
                       "out_dir"});

  ExperimentConfig config;
  config.mode = run_mode_from_string(
      as_string(member(doc, "", "mode"), "mode"));

  if (const ordered_json* v = opt_member(doc, "label")) {
    config.label = as_string(*v, "label");
    if (config.label.empty() ||
        config.label.find_first_not_of(
            "abcdefghijklmnopqrstuvwxyz"
            "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") != std::string::npos)
      fail("label", "must be a nonempty [A-Za-z0-9_-] name (used in file "
                    "names)");
  }

  {
    const ordered_json& dom = member(doc, "", "domain");
    require_object(dom, "domain");
    reject_unknown_keys(dom, "domain", {"kind", "dim", "r_outer", "r_inner"});
    const std::string kind =
        as_string(member(dom, "domain", "kind"), "domain.kind");
    if (kind == "ball") config.domain.kind = DomainKind::Ball;
    else if (kind == "annulus") config.domain.kind = DomainKind::Annulus;
    else fail("domain.kind", "expected \"ball\" or \"annulus\"");
    config.domain.dim = as_int(member(dom, "domain", "dim"), "domain.dim");
    config.domain.r_outer =
        as_double(member(dom, "domain", "r_outer"), "domain.r_outer");
    if (const ordered_json* v = opt_member(dom, "r_inner"))
      config.domain.r_inner = as_double(*v, "domain.r_inner");
    else if (config.domain.is_annulus())
      fail("domain.r_inner", "required for annulus domains");
    try {
      config.domain.validate();
    } catch (const std::invalid_argument& e) {
      fail("domain", e.what());
    }
    if (config.domain.dim != 2 && config.domain.dim != 3)
      fail("domain.dim", "experiments support dim 2 and 3");
  }

  if (const ordered_json* v = opt_member(doc, "spectrum_count")) {
    config.spectrum_count = as_int(*v, "spectrum_count");
    if (config.spectrum_count < 1) fail("spectrum_count", "must be >= 1");
  }

  config.field.dim = config.domain.dim;
  if (const ordered_json* v = opt_member(doc, "field")) {
    require_object(*v, "field");
    reject_unknown_keys(*v, "field", {"outer", "inner"});
    Basis basis = Basis::ComplexStandard;
    bool has_basis = false;
    if (const ordered_json* b = opt_member(*v, "outer"))
      parse_boundary_field(*b, "field.outer", config.domain.dim,
                           config.field.outer, basis, has_basis);
    if (const ordered_json* b = opt_member(*v, "inner")) {
      if (!config.domain.is_annulus())
        fail("field.inner", "ball domains have no inner boundary");
      parse_boundary_field(*b, "field.inner", config.domain.dim,
                           config.field.inner, basis, has_basis);
    }
    // Canonical basis for an empty field, so print/parse round-trips.
    if (config.field.outer.empty() && config.field.inner.empty())
      basis = Basis::ComplexStandard;
    config.field.basis = basis;
    if (config.field.reality_defect_max() >
        1e-10 * config.field.coefficient_scale())
      fail("field", "coefficients do not describe a real-valued deformation");
  }

  if (const ordered_json* v = opt_member(doc, "targets")) {
    if (!v->is_array()) fail("targets", "expected an array");
    for (size_t i = 0; i < v->size(); ++i) {
      const std::string tpath = "targets[" + std::to_string(i) + "]";
      const ordered_json& t = (*v)[i];
      require_object(t, tpath);
      reject_unknown_keys(t, tpath, {"degree", "branch"});
      EigenSelector sel;
      sel.degree = as_int(member(t, tpath, "degree"), join(tpath, "degree"));
      if (sel.degree < 0) fail(join(tpath, "degree"), "must be >= 0");
      if (const ordered_json* b = opt_member(t, "branch"))
        sel.branch = as_int(*b, join(tpath, "branch"));
      if (sel.branch != 1 && sel.branch != 2)
        fail(join(tpath, "branch"), "must be 1 or 2");
      if (!config.domain.is_annulus() && sel.branch != 1)
        fail(join(tpath, "branch"), "ball eigenvalues have a single branch");
      config.targets.push_back(sel);
    }
  }

  if (const ordered_json* v = opt_member(doc, "mps")) {
    require_object(*v, "mps");
    reject_unknown_keys(*v, "mps",
                        {"degree_max", "outer_points", "inner_points",
                         "oversampling", "rank_cutoff", "branch_count",
                         "t_grid"});
    if (const ordered_json* x = opt_member(*v, "degree_max"))
      config.mps.degree_max = as_int(*x, "mps.degree_max");
    if (const ordered_json* x = opt_member(*v, "outer_points"))
      config.mps.outer_points = as_int(*x, "mps.outer_points");
    if (const ordered_json* x = opt_member(*v, "inner_points"))
      config.mps.inner_points = as_int(*x, "mps.inner_points");
    if (const ordered_json* x = opt_member(*v, "oversampling"))
      config.mps.oversampling = as_double(*x, "mps.oversampling");
    if (const ordered_json* x = opt_member(*v, "rank_cutoff"))
      config.mps.rank_cutoff = as_double(*x, "mps.rank_cutoff");
    if (const ordered_json* x = opt_member(*v, "branch_count"))
      config.mps.branch_count = as_int(*x, "mps.branch_count");
    if (const ordered_json* x = opt_member(*v, "t_grid")) {
      if (!x->is_array()) fail("mps.t_grid", "expected an array of numbers");
      for (size_t i = 0; i < x->size(); ++i)
        config.mps.t_grid.push_back(as_double(
            (*x)[i], "mps.t_grid[" + std::to_string(i) + "]"));
    }
    try {
      config.mps.validate();
    } catch (const std::invalid_argument& e) {
      fail("mps", e.what());
    }
  }

  if (const ordered_json* v = opt_member(doc, "zero_tolerance")) {
    config.zero_tolerance = as_double(*v, "zero_tolerance");
    if (!(config.zero_tolerance > 0.0)) fail("zero_tolerance", "must be > 0");
  }
  if (const ordered_json* v = opt_member(doc, "tangents"))
    config.tangents = as_bool(*v, "tangents");
  if (const ordered_json* v = opt_member(doc, "out_dir"))
    config.out_dir = as_string(*v, "out_dir");

  check_mode_blocks(config);
  return config;
}

std::string print_config(const ExperimentConfig& config) {
  ordered_json j;
  j["mode"] = to_string(config.mode);
  j["label"] = config.label;
  ordered_json dom;
  dom["kind"] = config.domain.is_annulus() ? "annulus" : "ball";
  dom["dim"] = config.domain.dim;
  dom["r_outer"] = config.domain.r_outer;
  if (config.domain.is_annulus()) dom["r_inner"] = config.domain.r_inner;
  j["domain"] = std::move(dom);
  j["spectrum_count"] = config.spectrum_count;
  if (!config.field.outer.empty() || !config.field.inner.empty()) {
    ordered_json f;
    if (!config.field.outer.empty())
      f["outer"] = terms_json(config.field.outer, config.field.basis);
    if (!config.field.inner.empty())
      f["inner"] = terms_json(config.field.inner, config.field.basis);
    j["field"] = std::move(f);
  }
  if (!config.targets.empty()) {
    ordered_json arr = ordered_json::array();
    for (const EigenSelector& sel : config.targets) {
      ordered_json t;
      t["degree"] = sel.degree;
      t["branch"] = sel.branch;
      arr.push_back(std::move(t));
    }
    j["targets"] = std::move(arr);
  }
  {
    ordered_json m;
    m["degree_max"] = config.mps.degree_max;
    m["outer_points"] = config.mps.outer_points;
    m["inner_points"] = config.mps.inner_points;
    m["oversampling"] = config.mps.oversampling;
    m["rank_cutoff"] = config.mps.rank_cutoff;
    m["branch_count"] = config.mps.branch_count;
    if (!config.mps.t_grid.empty()) m["t_grid"] = config.mps.t_grid;
    j["mps"] = std::move(m);
  }
  j["zero_tolerance"] = config.zero_tolerance;
  j["tangents"] = config.tangents;
  if (!config.out_dir.empty()) j["out_dir"] = config.out_dir;
  return j.dump(2) + "\n";
}

void apply_mode(ExperimentConfig& config, RunMode mode) {
  config.mode = mode;
  check_mode_blocks(config);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kRefinedGrid =
    "[-0.02, -0.0175, -0.015, -0.0125, -0.01, -0.008, -0.006, -0.004, "
    "-0.002, -0.001, -0.0005, 0.0, 0.0005, 0.001, 0.002, 0.004, 0.006, "
    "0.008, 0.01, 0.0125, 0.015, 0.0175, 0.02]";

std::string annulus_2d_preset(const std::string& label,
                              const std::string& field) {
  return std::string("{\n")
      + "  \"mode\": \"compare\",\n"
      + "  \"label\": \"" + label + "\",\n"
      + "  \"domain\": {\"kind\": \"annulus\", \"dim\": 2, \"r_outer\": 1.0, "
        "\"r_inner\": 0.4},\n"
      + "  \"spectrum_count\": 24,\n"
      + "  \"field\": {\"outer\": \"" + field + "\", \"inner\": \"" + field +
        "\"},\n"
      + "  \"targets\": [{\"degree\": 3, \"branch\": 1}, {\"degree\": 3, "
        "\"branch\": 2}],\n"
      + "  \"mps\": {\n"
      + "    \"degree_max\": 7,\n"
      + "    \"outer_points\": 28,\n"
      + "    \"inner_points\": 20,\n"
      + "    \"branch_count\": 24,\n"
      + "    \"t_grid\": " + kRefinedGrid + "\n"
      + "  },\n"
      + "  \"zero_tolerance\": 1e-10,\n"
      + "  \"tangents\": true\n"
      + "}\n";
}

std::string ball_preset(const std::string& label, int dim,
                        const std::string& field, int degree, int count,
                        int points) {
  return std::string("{\n")
      + "  \"mode\": \"compare\",\n"
      + "  \"label\": \"" + label + "\",\n"
      + "  \"domain\": {\"kind\": \"ball\", \"dim\": " + std::to_string(dim) +
        ", \"r_outer\": 1.0},\n"
      + "  \"spectrum_count\": " + std::to_string(count) + ",\n"
      + "  \"field\": {\"outer\": \"" + field + "\"},\n"
      + "  \"targets\": [{\"degree\": " + std::to_string(degree) +
        ", \"branch\": 1}],\n"
      + "  \"mps\": {\n"
      + "    \"degree_max\": 7,\n"
      + (points > 0
             ? "    \"outer_points\": " + std::to_string(points) + ",\n"
             : std::string())
      + "    \"branch_count\": " + std::to_string(count) + ",\n"
      + "    \"t_grid\": " + kRefinedGrid + "\n"
      + "  },\n"
      + "  \"zero_tolerance\": 1e-10,\n"
      + "  \"tangents\": true\n"
      + "}\n";
}

std::string annulus_3d_preset() {
  return std::string("{\n")
      + "  \"mode\": \"compare\",\n"
      + "  \"label\": \"fig5\",\n"
      + "  \"domain\": {\"kind\": \"annulus\", \"dim\": 3, \"r_outer\": 1.0, "
        "\"r_inner\": 0.4},\n"
      + "  \"spectrum_count\": 40,\n"
      + "  \"field\": {\"outer\": \"Y_{8,1}\", \"inner\": \"Y_{8,1}\"},\n"
      + "  \"targets\": [{\"degree\": 4, \"branch\": 1}, {\"degree\": 5, "
        "\"branch\": 1}],\n"
      + "  \"mps\": {\n"
      + "    \"degree_max\": 7,\n"
      + "    \"outer_points\": 512,\n"
      + "    \"inner_points\": 512,\n"
      + "    \"branch_count\": 40,\n"
      + "    \"t_grid\": " + kRefinedGrid + "\n"
      + "  },\n"
      + "  \"zero_tolerance\": 1e-10,\n"
      + "  \"tangents\": true\n"
      + "}\n";
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig3a", "fig3b", "fig4", "fig5", "fig6"};
}

std::string preset_text(const std::string& name) {
  if (name == "fig3a") return annulus_2d_preset("fig3a", "2cos(6theta)");
  if (name == "fig3b") return annulus_2d_preset("fig3b", "2cos(5theta)");
  if (name == "fig4") return ball_preset("fig4", 2, "cos(7theta)", 5, 14, 0);
  if (name == "fig5") return annulus_3d_preset();
  // The fixed spherical collocation lattice needs extra density to keep the
  // sweep's branch noise below the tangent-line scale of the plot.
  if (name == "fig6") return ball_preset("fig6", 3, "Y_{7,1}", 2, 12, 512);
  throw ConfigError("unknown preset \"" + name +
                    "\"; available: fig3a fig3b fig4 fig5 fig6");
}

// ---------------------------------------------------------------------------
// Experiment dispatch
// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentConfig& config) {
  check_mode_blocks(config);
  ExperimentResult result;
  result.config = config;
  result.spectrum = enumerate_spectrum(config.domain, config.spectrum_count);

  const bool want_emp =
      config.mode == RunMode::Emp || config.mode == RunMode::Compare;
  const bool want_sweep =
      config.mode == RunMode::Branches || config.mode == RunMode::Compare;

  std::vector<SteklovEigen> eigens;
  for (const EigenSelector& sel : config.targets) {
    if (config.domain.is_annulus()) {
      auto pair = annulus_eigen(config.domain, sel.degree);
      eigens.push_back(sel.branch == 1 ? pair.first : pair.second);
    } else {
      eigens.push_back(ball_eigen(config.domain, sel.degree));
    }
  }

  if (want_emp) {
    const DeformationField complex_field = config.field.to_complex();
    for (size_t i = 0; i < eigens.size(); ++i) {
      TargetReport report;
      report.eigen = eigens[i];
      try {
        report.emp = emp_matrix(config.domain, eigens[i], complex_field,
                                TripleProductMethod::ClosedForm);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(describe(config.targets[i]) + ": " +
                                    e.what());
      }
      report.classification = subdifferential_and_classify(
          report.emp, complex_field, config.zero_tolerance);
      report.volume_preserving_outer =
          complex_field.volume_preserving(true, config.zero_tolerance);
      report.volume_preserving_inner =
          !config.domain.is_annulus() ||
          complex_field.volume_preserving(false, config.zero_tolerance);
      result.targets.push_back(std::move(report));
    }
  }

  if (want_sweep) {
    result.sweep = branch_sweep(config.domain, config.field, config.mps);
    result.has_sweep = true;
    result.warnings = result.sweep.warnings;
    if (config.mode == RunMode::Compare) {
      for (size_t i = 0; i < eigens.size(); ++i) {
        TargetReport& report = result.targets[i];
        try {
          report.slopes = slopes_at_zero(result.sweep, eigens[i]);
        } catch (const std::invalid_argument& e) {
          throw std::invalid_argument(describe(config.targets[i]) + ": " +
                                      e.what());
        } catch (const std::runtime_error& e) {
          throw std::runtime_error(describe(config.targets[i]) + ": " +
                                   e.what());
        }
        std::vector<double> right, left;
        for (const SlopeEstimate& s : report.slopes) {
          right.push_back(s.right);
          left.push_back(s.left);
        }
        report.residual_right =
            paired_residual(right, report.emp.eigenvalues);
        report.residual_left = paired_residual(left, report.emp.eigenvalues);
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Artifact rendering
// ---------------------------------------------------------------------------

std::string render_branch_csv(const BranchSweep& sweep) {
  std::string out = "t";
  for (Eigen::Index b = 0; b < sweep.eigenvalues.cols(); ++b)
    out += ",lambda_" + std::to_string(b);
  out += "\n";
  for (size_t i = 0; i < sweep.t_values.size(); ++i) {
    out += format_double(sweep.t_values[i]);
    for (Eigen::Index b = 0; b < sweep.eigenvalues.cols(); ++b) {
      out += ',';
      out += format_double(sweep.eigenvalues(static_cast<Eigen::Index>(i), b));
    }
    out += "\n";
  }
  return out;
}

std::string render_report_json(const ExperimentResult& result) {
  const ExperimentConfig& config = result.config;
  ordered_json j;
  j["label"] = config.label;
  j["mode"] = to_string(config.mode);
  {
    ordered_json dom;
    dom["kind"] = config.domain.is_annulus() ? "annulus" : "ball";
    dom["dim"] = config.domain.dim;
    dom["r_outer"] = config.domain.r_outer;
    if (config.domain.is_annulus()) dom["r_inner"] = config.domain.r_inner;
    j["domain"] = std::move(dom);
  }
  if (!config.field.outer.empty() || !config.field.inner.empty()) {
    ordered_json f;
    if (!config.field.outer.empty())
      f["outer"] = terms_json(config.field.outer, config.field.basis);
    if (!config.field.inner.empty())
      f["inner"] = terms_json(config.field.inner, config.field.basis);
    j["field"] = std::move(f);
  }

  ordered_json spec = ordered_json::array();
  for (const SteklovEigen& e : result.spectrum) {
    ordered_json row;
    row["index"] = e.index;
    row["value"] = e.value;
    row["degree"] = e.degree;
    row["branch"] = e.branch;
    row["multiplicity"] = e.multiplicity;
    spec.push_back(std::move(row));
  }
  j["spectrum"] = std::move(spec);

  if (result.has_sweep) {
    ordered_json b;
    b["t_values"] = result.sweep.t_values;
    b["branch_count"] = result.sweep.eigenvalues.cols();
    b["resolved_counts"] = result.sweep.resolved_counts;
    j["branches"] = std::move(b);
  }

  if (!result.targets.empty()) {
    ordered_json targets = ordered_json::array();
    for (const TargetReport& report : result.targets) {
      ordered_json t;
      t["degree"] = report.eigen.degree;
      t["branch"] = report.eigen.branch;
      t["value"] = report.eigen.value;
      t["index"] = report.eigen.index;
      t["multiplicity"] = report.eigen.multiplicity;
      {
        ordered_json emp;
        ordered_json matrix = ordered_json::array();
        for (Eigen::Index r = 0; r < report.emp.matrix.rows(); ++r) {
          ordered_json row = ordered_json::array();
          for (Eigen::Index c = 0; c < report.emp.matrix.cols(); ++c)
            row.push_back(ordered_json::array(
                {report.emp.matrix(r, c).real(),
                 report.emp.matrix(r, c).imag()}));
          matrix.push_back(std::move(row));
        }
        emp["matrix"] = std::move(matrix);
        emp["eigenvalues"] = report.emp.eigenvalues;
        emp["trace"] = report.emp.trace();
        t["emp"] = std::move(emp);
      }
      {
        const Classification& cls = report.classification;
        ordered_json c;
        c["subdifferential"] = ordered_json::array(
            {cls.subdifferential.lo, cls.subdifferential.hi});
        c["critical"] = cls.critical;
        c["trace_zero"] = cls.trace_zero;
        c["zero_matrix"] = cls.zero_matrix;
        c["strict_saddle_pair"] = cls.strict_saddle_pair;
        c["label"] = cls.label();
        ordered_json vp;
        vp["outer"] = report.volume_preserving_outer;
        if (config.domain.is_annulus())
          vp["inner"] = report.volume_preserving_inner;
        c["volume_preserving"] = std::move(vp);
        t["classification"] = std::move(c);
      }
      if (!report.slopes.empty()) {
        ordered_json s;
        ordered_json right = ordered_json::array();
        ordered_json left = ordered_json::array();
        ordered_json branches = ordered_json::array();
        for (const SlopeEstimate& est : report.slopes) {
          right.push_back(est.right);
          left.push_back(est.left);
          branches.push_back(est.branch);
        }
        s["branches"] = std::move(branches);
        s["right"] = std::move(right);
        s["left"] = std::move(left);
        t["slopes"] = std::move(s);
        ordered_json res;
        res["right"] = report.residual_right;
        res["left"] = report.residual_left;
        t["residuals"] = std::move(res);
      }
      targets.push_back(std::move(t));
    }
    j["targets"] = std::move(targets);
  }

  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

std::string render_plot_svg(const ExperimentResult& result) {
  if (!result.has_sweep || result.sweep.eigenvalues.cols() < 1)
    throw std::invalid_argument("render_plot_svg: needs at least one branch");
  const BranchSweep& sweep = result.sweep;
  const auto n_t = static_cast<Eigen::Index>(sweep.t_values.size());
  const Eigen::Index n_b = sweep.eigenvalues.cols();

  const double width = 800, height = 600;
  const double ml = 72, mr = 24, mt = 46, mb = 58;
  double x0 = sweep.t_values.front(), x1 = sweep.t_values.back();
  if (x0 == x1) {
    x0 -= 1.0;
    x1 += 1.0;
  }
  double y0 = sweep.eigenvalues.minCoeff(), y1 = sweep.eigenvalues.maxCoeff();
  {
    const double pad = y1 > y0 ? 0.05 * (y1 - y0) : 1.0;
    y0 -= pad;
    y1 += pad;
  }
  auto sx = [&](double t) {
    return ml + (t - x0) / (x1 - x0) * (width - ml - mr);
  };
  auto sy = [&](double v) {
    return height - mb - (v - y0) / (y1 - y0) * (height - mt - mb);
  };
  auto num = [](double v) { return format_double(v, "%.2f"); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
         "viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" "
         "fill=\"#ffffff\"/>\n";
  svg += "<clipPath id=\"plot\"><rect x=\"" + num(ml) + "\" y=\"" + num(mt) +
         "\" width=\"" + num(width - ml - mr) + "\" height=\"" +
         num(height - mt - mb) + "\"/></clipPath>\n";

  // Branch polylines.
  svg += "<g clip-path=\"url(#plot)\">\n";
  for (Eigen::Index b = 0; b < n_b; ++b) {
    svg += "<polyline fill=\"none\" stroke=\"#2b6cb3\" stroke-width=\"1.2\" "
           "points=\"";
    for (Eigen::Index i = 0; i < n_t; ++i) {
      if (i) svg += ' ';
      svg += num(sx(sweep.t_values[i])) + "," +
             num(sy(sweep.eigenvalues(i, b)));
    }
    svg += "\"/>\n";
  }
  // First-order tangent lines through (0, value) with the EMP slopes.
  if (result.config.tangents) {
    for (const TargetReport& report : result.targets) {
      for (double slope : report.emp.eigenvalues) {
        const double v = report.eigen.value;
        svg += "<line stroke=\"#111111\" stroke-width=\"1\" "
               "stroke-dasharray=\"6 4\" x1=\"" +
               num(sx(x0)) + "\" y1=\"" + num(sy(v + slope * x0)) +
               "\" x2=\"" + num(sx(x1)) + "\" y2=\"" +
               num(sy(v + slope * x1)) + "\"/>\n";
      }
    }
  }
  svg += "</g>\n";

  // Frame and ticks.
  svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" +
         num(width - ml - mr) + "\" height=\"" + num(height - mt - mb) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  for (double t : nice_ticks(x0, x1, 6)) {
    const double x = sx(t);
    svg += "<line stroke=\"#333333\" stroke-width=\"1\" x1=\"" + num(x) +
           "\" y1=\"" + num(height - mb) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(height - mb + 5) + "\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(height - mb + 20) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\" "
           "text-anchor=\"middle\">" +
           format_double(t, "%g") + "</text>\n";
  }
  for (double v : nice_ticks(y0, y1, 6)) {
    const double y = sy(v);
    svg += "<line stroke=\"#333333\" stroke-width=\"1\" x1=\"" + num(ml - 5) +
           "\" y1=\"" + num(y) + "\" x2=\"" + num(ml) + "\" y2=\"" + num(y) +
           "\"/>\n";
    svg += "<text x=\"" + num(ml - 9) + "\" y=\"" + num(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\" "
           "text-anchor=\"end\">" +
           format_double(v, "%g") + "</text>\n";
  }

  // Axis titles and heading.
  svg += "<text x=\"" + num(ml + (width - ml - mr) / 2) + "\" y=\"" +
         num(height - 14) +
         "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#222222\" "
         "text-anchor=\"middle\">perturbation amplitude t</text>\n";
  svg += "<text x=\"18\" y=\"" + num(mt + (height - mt - mb) / 2) +
         "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#222222\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(mt + (height - mt - mb) / 2) +
         ")\">Steklov eigenvalue</text>\n";
  svg += "<text x=\"" + num(width / 2) + "\" y=\"26\" "
         "font-family=\"sans-serif\" font-size=\"16\" fill=\"#111111\" "
         "text-anchor=\"middle\">" +
         result.config.label + ": eigenvalue branches</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> write_outputs(
    const ExperimentResult& result, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory " +
                             out_dir.string() + ": " + ec.message());

  auto emit = [&](const std::string& name, const std::string& content) {
    const fs::path path = out_dir / name;
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw std::runtime_error("cannot write " + path.string());
    stream << content;
    if (!stream.good())
      throw std::runtime_error("write failed for " + path.string());
    return path;
  };

  std::vector<fs::path> written;
  const std::string& label = result.config.label;
  written.push_back(emit(label + "_report.json", render_report_json(result)));
  if (result.has_sweep) {
    written.push_back(
        emit(label + "_branches.csv", render_branch_csv(result.sweep)));
    written.push_back(emit(label + "_branches.svg", render_plot_svg(result)));
  }
  return written;
}

}  // namespace steklov

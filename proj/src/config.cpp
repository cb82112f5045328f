#include "fracham/config.hpp"

#include "fracham/errors.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fracham {

namespace {

namespace pt = boost::property_tree;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string s = boost::algorithm::trim_copy(v);
  double out = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(out))
    throw ConfigError("field " + key + ": cannot parse '" + v + "' as a number");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  const std::string s = boost::algorithm::trim_copy(v);
  std::uint64_t out = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("field " + key + ": cannot parse '" + v + "' as a nonnegative integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = boost::algorithm::trim_copy(v);
  if (s == "true" || s == "1" || s == "yes")
    return true;
  if (s == "false" || s == "0" || s == "no")
    return false;
  throw ConfigError("field " + key + ": cannot parse '" + v + "' as a boolean");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          const std::function<T(const std::string&, const std::string&)>& one) {
  std::vector<T> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ','))
    out.push_back(one(key, item));
  if (out.empty())
    throw ConfigError("field " + key + ": empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + fmt_double(v[i]);
  return s;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

/// One entry per key: how to read it into a RunConfig and how to print it.
struct Field {
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
  std::function<nlohmann::ordered_json(const RunConfig&)> json;
};

#define FRACHAM_DOUBLE(name)                                                                         \
  Field {                                                                                            \
    [](RunConfig& r, const std::string& k, const std::string& v) { r.name = parse_double(k, v); },  \
        [](const RunConfig& r) { return fmt_double(r.name); },                                       \
        [](const RunConfig& r) { return nlohmann::ordered_json(r.name); }                            \
  }
#define FRACHAM_SIZE(name)                                                                           \
  Field {                                                                                            \
    [](RunConfig& r, const std::string& k, const std::string& v) {                                   \
      r.name = static_cast<std::size_t>(parse_uint(k, v));                                           \
    },                                                                                               \
        [](const RunConfig& r) { return std::to_string(r.name); },                                   \
        [](const RunConfig& r) { return nlohmann::ordered_json(r.name); }                            \
  }
#define FRACHAM_STRING(name)                                                                         \
  Field {                                                                                            \
    [](RunConfig& r, const std::string&, const std::string& v) {                                     \
      r.name = boost::algorithm::trim_copy(v);                                                       \
    },                                                                                               \
        [](const RunConfig& r) { return r.name; },                                                   \
        [](const RunConfig& r) { return nlohmann::ordered_json(r.name); }                            \
  }

// Ordered by section then key; to_ini relies on this order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"problem.alpha", FRACHAM_DOUBLE(alpha)},
      {"problem.n_components", FRACHAM_SIZE(n_components)},
      {"problem.lambda", FRACHAM_DOUBLE(lambda)},
      {"problem.truncation_R", FRACHAM_DOUBLE(truncation_R)},
      {"problem.n_nodes", FRACHAM_SIZE(n_nodes)},
      {"problem.T_end", FRACHAM_DOUBLE(T_end)},
      {"problem.bvp_derivative_extent", FRACHAM_STRING(bvp_derivative_extent)},
      {"potential.name", FRACHAM_STRING(potential)},
      {"potential.theta", FRACHAM_DOUBLE(theta)},
      {"potential.epsilon", FRACHAM_DOUBLE(epsilon)},
      {"potential.a0", FRACHAM_DOUBLE(a0)},
      {"potential.a_amplitude", FRACHAM_DOUBLE(a_amplitude)},
      {"potential.a_period", FRACHAM_DOUBLE(a_period)},
      {"weight.name", FRACHAM_STRING(weight)},
      {"weight.c", FRACHAM_DOUBLE(c)},
      {"weight.l_max", FRACHAM_DOUBLE(l_max)},
      {"weight.J_lo", FRACHAM_DOUBLE(J_lo)},
      {"weight.J_hi", FRACHAM_DOUBLE(J_hi)},
      {"weight.ramp", FRACHAM_DOUBLE(ramp)},
      {"solver.gradient_tol", FRACHAM_DOUBLE(gradient_tol)},
      {"solver.max_iterations", FRACHAM_SIZE(max_iterations)},
      {"solver.fibering_tol", FRACHAM_DOUBLE(fibering_tol)},
      {"solver.multistart", FRACHAM_SIZE(multistart)},
      {"solver.threads", FRACHAM_SIZE(threads)},
      {"solver.boundary_tol", FRACHAM_DOUBLE(boundary_tol)},
      {"solver.boundary_layer", FRACHAM_DOUBLE(boundary_layer)},
      {"embedding.c_inf",
       Field{[](RunConfig& r, const std::string& k, const std::string& v) {
               const std::string s = boost::algorithm::trim_copy(v);
               if (s == "auto")
                 r.c_inf.reset();
               else
                 r.c_inf = parse_double(k, s);
             },
             [](const RunConfig& r) { return r.c_inf ? fmt_double(*r.c_inf) : std::string("auto"); },
             [](const RunConfig& r) { return r.c_inf ? nlohmann::ordered_json(*r.c_inf) : nlohmann::ordered_json("auto"); }}},
      {"embedding.samples", FRACHAM_SIZE(c_inf_samples)},
      {"sweep.lambda_list",
       Field{[](RunConfig& r, const std::string& k, const std::string& v) {
               r.lambda_list = parse_list<double>(k, v, parse_double);
             },
             [](const RunConfig& r) { return join(r.lambda_list); },
             [](const RunConfig& r) { return nlohmann::ordered_json(r.lambda_list); }}},
      {"sweep.warm_start",
       Field{[](RunConfig& r, const std::string& k, const std::string& v) { r.warm_start = parse_bool(k, v); },
             [](const RunConfig& r) { return std::string(r.warm_start ? "true" : "false"); },
             [](const RunConfig& r) { return nlohmann::ordered_json(r.warm_start); }}},
      {"operators.alpha", FRACHAM_DOUBLE(operator_alpha)},
      {"operators.sizes",
       Field{[](RunConfig& r, const std::string& k, const std::string& v) {
               r.operator_sizes = parse_list<std::size_t>(k, v, [](const std::string& kk, const std::string& vv) {
                 return static_cast<std::size_t>(parse_uint(kk, vv));
               });
             },
             [](const RunConfig& r) { return join(r.operator_sizes); },
             [](const RunConfig& r) { return nlohmann::ordered_json(r.operator_sizes); }}},
      {"run.seed",
       Field{[](RunConfig& r, const std::string& k, const std::string& v) { r.seed = parse_uint(k, v); },
             [](const RunConfig& r) { return std::to_string(r.seed); },
             [](const RunConfig& r) { return nlohmann::ordered_json(r.seed); }}},
      {"run.output_dir", FRACHAM_STRING(output_dir)},
  };
  return table;
}

#undef FRACHAM_DOUBLE
#undef FRACHAM_SIZE
#undef FRACHAM_STRING

const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : fields())
    if (k == key)
      return &f;
  return nullptr;
}

void apply(RunConfig& rc, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f)
    throw ConfigError("unknown configuration key '" + key + "'");
  f->set(rc, key, value);
}

} // namespace

RunConfig parse_run_config(const std::string& ini_text, const std::vector<std::string>& overrides) {
  RunConfig rc;
  pt::ptree tree;
  try {
    std::istringstream in(ini_text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config parse error at line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' appears outside a section");
    for (const auto& [key, node] : body)
      apply(rc, section + "." + key, node.data());
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + ov + "' is not of the form section.key=value");
    apply(rc, boost::algorithm::trim_copy(ov.substr(0, eq)), ov.substr(eq + 1));
  }
  return rc;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::string>& overrides) {
  std::string text;
  if (path) {
    std::ifstream in(*path);
    if (!in)
      throw ConfigError("cannot open config file '" + path->string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_run_config(text, overrides);
}

std::string to_ini(const RunConfig& rc) {
  std::ostringstream os;
  std::string current;
  for (const auto& [key, f] : fields()) {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    if (section != current) {
      if (!current.empty())
        os << '\n';
      os << '[' << section << "]\n";
      current = section;
    }
    os << key.substr(dot + 1) << " = " << f.get(rc) << '\n';
  }
  return os.str();
}

std::string to_json_text(const RunConfig& rc, int indent) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, f] : fields()) {
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = f.json(rc);
  }
  return j.dump(indent);
}

ProblemConfig build_problem(const RunConfig& rc, bool enforce_embedding) {
  ProblemConfig pc;
  try {
    pc.order = FracOrder(rc.alpha);
    pc.order.require_problem_range();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem.alpha: ") + e.what());
  }
  if (rc.n_components < 1)
    throw ConfigError("problem.n_components must be >= 1");
  if (!(rc.truncation_R > 0.0))
    throw ConfigError("problem.truncation_R must be positive");
  if (rc.n_nodes < 3)
    throw ConfigError("problem.n_nodes must be >= 3");
  if (!(rc.T_end > 0.0 && rc.T_end < rc.truncation_R))
    throw ConfigError("problem.T_end must lie in (0, truncation_R)");

  pc.lambda = rc.lambda;
  pc.truncation_R = rc.truncation_R;
  pc.grid = Grid1D(-rc.truncation_R, rc.truncation_R, rc.n_nodes);
  pc.t_end = rc.T_end;
  pc.n_components = rc.n_components;
  pc.bvp_extent = derivative_extent_from_string(rc.bvp_derivative_extent);

  Profile profile;
  try {
    profile = rc.a_amplitude == 0.0 ? constant_profile(rc.a0) : cosine_profile(rc.a0, rc.a_amplitude, rc.a_period);
    if (rc.potential == "builtin")
      pc.potential = builtin_potential(rc.theta, rc.epsilon, profile);
    else if (rc.potential == "power")
      pc.potential = power_potential(rc.theta, profile);
    else
      throw ConfigError("potential.name: unknown potential '" + rc.potential + "' (builtin, power)");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }

  if (rc.weight != "builtin")
    throw ConfigError("weight.name: unknown weight '" + rc.weight + "' (builtin)");
  const double c_inf = enforce_embedding ? rc.c_inf.value_or(c_inf_sharp(pc.order)) : 0.0;
  try {
    pc.weight = builtin_weight(rc.n_components, rc.c, rc.l_max, {rc.J_lo, rc.J_hi}, rc.ramp, {0.0, rc.T_end}, c_inf);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("weight: ") + e.what());
  }

  pc.optimizer.gradient_tol = rc.gradient_tol;
  pc.optimizer.max_iterations = rc.max_iterations;
  pc.optimizer.fibering_tol = rc.fibering_tol;
  pc.multistart = rc.multistart;
  pc.threads = std::max<std::size_t>(1, rc.threads);
  pc.boundary_tol = rc.boundary_tol;
  pc.boundary_layer = rc.boundary_layer;
  pc.c_inf_override = rc.c_inf;
  pc.c_inf_samples = rc.c_inf_samples;
  pc.seed = rc.seed;
  check_config(pc);
  return pc;
}

} // namespace fracham

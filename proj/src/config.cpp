#include "mpet/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace mpet {

namespace {

constexpr std::pair<Experiment, std::string_view> kExperimentNames[] = {
    {Experiment::BiotErrors, "biot-errors"}, {Experiment::BiotMinres, "biot-minres"},
    {Experiment::Barenblatt, "barenblatt"},  {Experiment::FourNetwork, "four-network"},
    {Experiment::Spectra, "spectra"},        {Experiment::Converge, "converge"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::string origin;  // "line 3" or "flag"
};

[[noreturn]] void fail(const Entry& e, const std::string& key, const std::string& what) {
  throw ConfigError(e.origin + ": " + key + ": " + what);
}

double to_double(std::string_view tok, const Entry& e, const std::string& key) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    fail(e, key, "not a number: '" + std::string(tok) + "'");
  return v;
}

long long to_int(std::string_view tok, const Entry& e, const std::string& key) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail(e, key, "not an integer: '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split_list(const Entry& e, const std::string& key) {
  std::vector<std::string_view> out;
  std::string_view rest = e.value;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view tok = trim(rest.substr(0, comma));
    if (tok.empty()) fail(e, key, "empty entry in list '" + e.value + "'");
    out.push_back(tok);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<double> to_double_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  for (std::string_view tok : split_list(e, key)) {
    if (tok.substr(0, 4) != "log:") {
      out.push_back(to_double(tok, e, key));
      continue;
    }
    std::vector<double> abs;
    std::string_view r = tok.substr(4);
    for (int k = 0; k < 3; ++k) {
      const auto colon = r.find(':');
      if ((k < 2) == (colon == std::string_view::npos)) fail(e, key, "log range must be log:a:b:step");
      abs.push_back(to_double(trim(r.substr(0, colon)), e, key));
      if (colon != std::string_view::npos) r.remove_prefix(colon + 1);
    }
    if (!(abs[2] > 0.0) || abs[1] < abs[0]) fail(e, key, "log range needs step > 0 and b >= a");
    for (double x = abs[0]; x <= abs[1] + 1e-9 * abs[2]; x += abs[2]) out.push_back(std::pow(10.0, x));
  }
  return out;
}

std::vector<int> to_int_list(const Entry& e, const std::string& key) {
  std::vector<int> out;
  for (std::string_view tok : split_list(e, key)) out.push_back(static_cast<int>(to_int(tok, e, key)));
  return out;
}

bool to_bool(const Entry& e, const std::string& key) {
  const std::string_view v = trim(e.value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(e, key, "expected true or false, got '" + e.value + "'");
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

template <class T>
void require_nonempty(const std::vector<T>& v, const char* key) {
  require(!v.empty(), std::string(key) + ": grid must not be empty");
}

void require_nonnegative(const std::vector<double>& v, const char* key) {
  for (double x : v) require(x >= 0.0, std::string(key) + ": values must be >= 0");
}

void require_positive(const std::vector<double>& v, const char* key) {
  for (double x : v) require(x > 0.0, std::string(key) + ": values must be > 0");
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& [k, name] : kExperimentNames)
    if (k == e) return name;
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kExperimentNames)
    if (n == name) return k;
  return std::nullopt;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "mesh",        "max_mesh",      "alpha_p",         "lambda",    "r_inv",
      "k1_factors", "k2_factors",  "betas",         "lambda_factors",  "k_factors", "k3_factors",
      "networks",   "samples",     "tau",           "h2_term",         "penalty",   "quad_degree",
      "rhs_quad_degree", "reduction_tol", "polish_tol", "refine_passes", "max_iters",   "policy",    "format",
      "output",     "seed"};
  return keys;
}

RunConfig default_config(Experiment e) {
  RunConfig c;
  c.experiment = e;
  const std::vector<double> r_cols = {1.0, 1e2, 1e3, 1e4, 1e8, 1e16};
  c.alpha_p = {1e-4};
  c.lambda = {1e4};
  c.r_inv = r_cols;
  c.mesh = {8, 16, 32, 64};
  c.k1_factors = {1e-2, 1e-1, 1.0};
  c.k2_factors = {1.0, 1e2, 1e4, 1e6};
  c.betas = {5e-10, 1e-8};
  c.lambda_factors = {1.0, 1e4, 1e8};
  c.k_factors = {1e-2, 1.0, 1e2};
  c.k3_factors = {1e-2, 1.0, 1e2, 1e4, 1e6, 1e10};
  c.networks = {1, 2};
  // Iteration counts are read at reduction_tol; the extra reduction keeps
  // the cellwise mass balance at round-off level.
  c.solver.polish_tol = 1e-13;
  c.solver.refine_passes = 3;
  switch (e) {
    case Experiment::BiotErrors:
    case Experiment::Converge:
      break;
    case Experiment::BiotMinres:
      c.mesh = {16, 64};
      c.alpha_p = {1.0, 1e-4, 1e-8, 0.0};
      c.lambda = {1.0, 1e4, 1e8};
      break;
    case Experiment::Barenblatt:
      c.mesh = {16, 64};
      break;
    case Experiment::FourNetwork:
      c.mesh = {32, 64};
      break;
    case Experiment::Spectra:
      c.mesh = {2, 4};
      c.alpha_p = {1.0, 1e4, 1e8};
      c.lambda = {1.0, 1e4, 1e8};
      c.r_inv = {1.0, 1e4, 1e8};
      break;
  }
  return c;
}

void RunConfig::validate() const {
  require_nonempty(mesh, "mesh");
  require(max_mesh >= 1, "max_mesh: must be >= 1");
  for (int n : mesh)
    require(is_power_of_two(n) && n <= max_mesh,
            "mesh: " + std::to_string(n) + " is not a power of two <= max_mesh (" + std::to_string(max_mesh) + ")");
  switch (experiment) {
    case Experiment::BiotErrors:
    case Experiment::BiotMinres:
    case Experiment::Converge:
    case Experiment::Spectra:
      require_nonempty(alpha_p, "alpha_p");
      require_nonempty(lambda, "lambda");
      require_nonempty(r_inv, "r_inv");
      break;
    case Experiment::Barenblatt:
      require_nonempty(k1_factors, "k1_factors");
      require_nonempty(k2_factors, "k2_factors");
      require_nonempty(betas, "betas");
      break;
    case Experiment::FourNetwork:
      require_nonempty(lambda_factors, "lambda_factors");
      require_nonempty(k_factors, "k_factors");
      require_nonempty(k3_factors, "k3_factors");
      break;
  }
  if (experiment == Experiment::Converge) require(mesh.size() >= 2, "mesh: converge needs at least two sizes");
  if (experiment == Experiment::Spectra) {
    require_nonempty(networks, "networks");
    for (int n : networks) require(n >= 1 && n <= 8, "networks: values must lie in [1, 8]");
  }
  require(samples >= 0, "samples: must be >= 0");
  require_nonnegative(alpha_p, "alpha_p");
  require_positive(lambda, "lambda");
  require_positive(r_inv, "r_inv");
  require_positive(k1_factors, "k1_factors");
  require_positive(k2_factors, "k2_factors");
  require_nonnegative(betas, "betas");
  require_positive(lambda_factors, "lambda_factors");
  require_positive(k_factors, "k_factors");
  require_positive(k3_factors, "k3_factors");
  require(tau > 0.0, "tau: must be > 0");
  try {
    assembly.validate();
    solver.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  std::map<std::string, Entry> entries;
  auto add = [&](std::string_view raw, const std::string& origin) {
    const std::string_view line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(origin + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(origin + ": missing key before '='");
    bool known = false;
    for (const auto& k : config_keys()) known = known || k == key;
    if (!known) throw ConfigError(origin + ": unknown key '" + key + "'");
    entries[key] = Entry{std::string(trim(line.substr(eq + 1))), origin};
  };

  int line_no = 0;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    ++line_no;
    add(rest.substr(0, nl), "line " + std::to_string(line_no));
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    add(o, "flag '" + (eq == std::string::npos ? o : o.substr(0, eq)) + "'");
  }

  Experiment exp = Experiment::BiotErrors;
  if (auto it = entries.find("experiment"); it != entries.end()) {
    const auto parsed = parse_experiment(trim(it->second.value));
    if (!parsed) fail(it->second, "experiment", "unknown experiment '" + it->second.value + "'");
    exp = *parsed;
  }
  RunConfig c = default_config(exp);

  for (const auto& [key, e] : entries) {
    if (key == "experiment") continue;
    if (e.value.empty()) fail(e, key, "empty value");
    if (key == "mesh") c.mesh = to_int_list(e, key);
    else if (key == "max_mesh") c.max_mesh = static_cast<int>(to_int(trim(e.value), e, key));
    else if (key == "alpha_p") c.alpha_p = to_double_list(e, key);
    else if (key == "lambda") c.lambda = to_double_list(e, key);
    else if (key == "r_inv") c.r_inv = to_double_list(e, key);
    else if (key == "k1_factors") c.k1_factors = to_double_list(e, key);
    else if (key == "k2_factors") c.k2_factors = to_double_list(e, key);
    else if (key == "betas") c.betas = to_double_list(e, key);
    else if (key == "lambda_factors") c.lambda_factors = to_double_list(e, key);
    else if (key == "k_factors") c.k_factors = to_double_list(e, key);
    else if (key == "k3_factors") c.k3_factors = to_double_list(e, key);
    else if (key == "networks") c.networks = to_int_list(e, key);
    else if (key == "samples") c.samples = static_cast<int>(to_int(trim(e.value), e, key));
    else if (key == "tau") c.tau = to_double(trim(e.value), e, key);
    else if (key == "h2_term") c.h2_term = to_bool(e, key);
    else if (key == "penalty") c.assembly.penalty = to_double(trim(e.value), e, key);
    else if (key == "quad_degree") c.assembly.quad_degree = static_cast<int>(to_int(trim(e.value), e, key));
    else if (key == "rhs_quad_degree") c.assembly.rhs_quad_degree = static_cast<int>(to_int(trim(e.value), e, key));
    else if (key == "reduction_tol") c.solver.reduction_tol = to_double(trim(e.value), e, key);
    else if (key == "polish_tol") c.solver.polish_tol = to_double(trim(e.value), e, key);
    else if (key == "refine_passes") c.solver.refine_passes = static_cast<int>(to_int(trim(e.value), e, key));
    else if (key == "max_iters") c.solver.max_iters = static_cast<int>(to_int(trim(e.value), e, key));
    else if (key == "policy") {
      const std::string_view v = trim(e.value);
      if (v == "serial") c.assembly.policy = c.solver.policy = ExecPolicy::Serial;
      else if (v == "parallel") c.assembly.policy = c.solver.policy = ExecPolicy::Parallel;
      else fail(e, key, "expected serial or parallel, got '" + e.value + "'");
    } else if (key == "format") {
      const std::string_view v = trim(e.value);
      if (v == "csv") c.format = OutputFormat::Csv;
      else if (v == "markdown") c.format = OutputFormat::Markdown;
      else fail(e, key, "expected csv or markdown, got '" + e.value + "'");
    } else if (key == "output") c.output = e.value;
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(trim(e.value), e, key));
  }
  // A polish target looser than the reduction target would be a no-op.
  if (c.solver.polish_tol >= c.solver.reduction_tol) c.solver.polish_tol = 0.0;
  c.validate();
  return c;
}

}  // namespace mpet

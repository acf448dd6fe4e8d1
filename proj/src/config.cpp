#include "mems/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mems/errors.hpp"

namespace mems {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> make_initial(const InitialSpec& spec, const Grid1D& grid,
                                 const FractionalNormContext& ctx) {
  const int n = grid.n_interior;
  std::vector<double> u(n, 0.0);
  switch (spec.kind) {
    case InitialSpec::Kind::Zero:
      break;
    case InitialSpec::Kind::Eigenmode: {
      const std::vector<double> e1 = ctx.eigenvector(0);
      for (int i = 0; i < n; ++i) u[i] = spec.scale * e1[i];
      break;
    }
    case InitialSpec::Kind::Bump:
      for (int i = 0; i < n; ++i) {
        const double q = 1.0 - grid.x[i] * grid.x[i];
        u[i] = spec.scale * q * q;
      }
      break;
    case InitialSpec::Kind::File: {
      std::ifstream in(spec.path);
      if (!in) throw ArgumentError("initial data file not readable: " + spec.path);
      for (int i = 0; i < n; ++i) {
        if (!(in >> u[i])) {
          throw ArgumentError("initial data file too short (need " + std::to_string(n) +
                              " values): " + spec.path);
        }
      }
      break;
    }
  }
  return u;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ParameterError("config key '" + key + "': not a number: '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return static_cast<int>(d);
  } catch (const std::exception&) {
    throw ParameterError("config key '" + key + "': not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ParameterError("config key '" + key + "': expected on/off: '" + v + "'");
}

InitialSpec parse_initial(const std::string& key, const std::string& v) {
  InitialSpec s;
  if (v == "zero") {
    s.kind = InitialSpec::Kind::Zero;
    return s;
  }
  const std::size_t colon = v.find(':');
  if (colon == std::string::npos) {
    throw ParameterError("config key '" + key +
                         "': expected zero | eigenmode:<c> | bump:<a> | file:<path>, got '" + v + "'");
  }
  const std::string head = v.substr(0, colon);
  const std::string rest = v.substr(colon + 1);
  if (head == "eigenmode") {
    s.kind = InitialSpec::Kind::Eigenmode;
    s.scale = parse_double(key, rest);
  } else if (head == "bump") {
    s.kind = InitialSpec::Kind::Bump;
    s.scale = parse_double(key, rest);
  } else if (head == "file") {
    s.kind = InitialSpec::Kind::File;
    s.path = rest;
  } else {
    throw ParameterError("config key '" + key + "': unknown initial kind '" + head + "'");
  }
  return s;
}

std::string initial_to_string(const InitialSpec& s) {
  switch (s.kind) {
    case InitialSpec::Kind::Zero: return "zero";
    case InitialSpec::Kind::Eigenmode: return "eigenmode:" + format_double(s.scale);
    case InitialSpec::Kind::Bump: return "bump:" + format_double(s.scale);
    case InitialSpec::Kind::File: return "file:" + s.path;
  }
  return "zero";
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ParameterError("config key '" + key + "': empty list");
  return out;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  for (double g : gamma_list) {
    if (!(g > 0.0)) throw ParameterError("gamma_list entries must be > 0");
  }
  for (std::size_t i = 1; i < gamma_list.size(); ++i) {
    if (!(gamma_list[i] < gamma_list[i - 1])) {
      throw ParameterError("gamma_list must be strictly descending");
    }
  }
  if (xi > 0.0 && !(xi < model.alpha())) {
    throw ParameterError("xi must lie in (0, alpha)");
  }
  if (lambda_hi != 0.0 && !(lambda_hi > lambda_lo)) {
    throw ParameterError("require lambda_lo < lambda_hi");
  }
  if (!(horizon > 0.0)) throw ParameterError("horizon must be > 0");
  if (!(bisect_tol > 0.0)) throw ParameterError("bisect_tol must be > 0");
  if (!(lambda_start > 0.0) || !(lambda_step > 0.0)) {
    throw ParameterError("lambda_start and lambda_step must be > 0");
  }
  if (max_branch_points < 2) throw ParameterError("max_branch_points must be >= 2");
  if (c3_samples < 1) throw ParameterError("c3_samples must be >= 1");
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("config file not readable: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ParameterError("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!seen.insert(key).second) {
      throw ParameterError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    if (key == "gamma") cfg.model.gamma = parse_double(key, val);
    else if (key == "beta") cfg.model.beta = parse_double(key, val);
    else if (key == "tau") cfg.model.tau = parse_double(key, val);
    else if (key == "lambda") cfg.model.lambda = parse_double(key, val);
    else if (key == "eps") cfg.model.eps = parse_double(key, val);
    else if (key == "alpha2") cfg.model.alpha2 = parse_double(key, val);
    else if (key == "kappa") cfg.model.kappa = parse_double(key, val);
    else if (key == "kappa_stop") cfg.model.kappa_stop = parse_double(key, val);
    else if (key == "gamma1") cfg.model.gamma1 = parse_double(key, val);
    else if (key == "n_interior") cfg.model.n_interior = parse_int(key, val);
    else if (key == "m_interior") cfg.model.m_interior = parse_int(key, val);
    else if (key == "dt") cfg.model.dt = parse_double(key, val);
    else if (key == "t_end") cfg.model.t_end = parse_double(key, val);
    else if (key == "stride") cfg.model.stride = parse_int(key, val);
    else if (key == "tol_newton") cfg.model.tol_newton = parse_double(key, val);
    else if (key == "tol_linear") cfg.model.tol_linear = parse_double(key, val);
    else if (key == "closed_form_g") cfg.model.closed_form_g = parse_bool(key, val);
    else if (key == "initial_condition") cfg.u0 = parse_initial(key, val);
    else if (key == "initial_velocity") cfg.u1 = parse_initial(key, val);
    else if (key == "gamma_list") cfg.gamma_list = parse_list(key, val);
    else if (key == "xi") cfg.xi = parse_double(key, val);
    else if (key == "lambda_lo") cfg.lambda_lo = parse_double(key, val);
    else if (key == "lambda_hi") cfg.lambda_hi = parse_double(key, val);
    else if (key == "horizon") cfg.horizon = parse_double(key, val);
    else if (key == "bisect_tol") cfg.bisect_tol = parse_double(key, val);
    else if (key == "lambda_start") cfg.lambda_start = parse_double(key, val);
    else if (key == "lambda_step") cfg.lambda_step = parse_double(key, val);
    else if (key == "arclength") cfg.arclength = parse_bool(key, val);
    else if (key == "eps_compare") cfg.eps_compare = parse_bool(key, val);
    else if (key == "max_branch_points") cfg.max_branch_points = parse_int(key, val);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_double(key, val));
    else if (key == "c3_samples") cfg.c3_samples = parse_int(key, val);
    else if (key == "output_dir") cfg.output_dir = val;
    else {
      throw ParameterError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os << "gamma = " << format_double(model.gamma) << "\n";
  os << "beta = " << format_double(model.beta) << "\n";
  os << "tau = " << format_double(model.tau) << "\n";
  os << "lambda = " << format_double(model.lambda) << "\n";
  os << "eps = " << format_double(model.eps) << "\n";
  os << "alpha2 = " << format_double(model.alpha2) << "\n";
  os << "kappa = " << format_double(model.kappa) << "\n";
  os << "kappa_stop = " << format_double(model.kappa_stop) << "\n";
  os << "gamma1 = " << format_double(model.gamma1) << "\n";
  os << "n_interior = " << model.n_interior << "\n";
  os << "m_interior = " << model.m_interior << "\n";
  os << "dt = " << format_double(model.dt) << "\n";
  os << "t_end = " << format_double(model.t_end) << "\n";
  os << "stride = " << model.stride << "\n";
  os << "tol_newton = " << format_double(model.tol_newton) << "\n";
  os << "tol_linear = " << format_double(model.tol_linear) << "\n";
  os << "closed_form_g = " << (model.closed_form_g ? "on" : "off") << "\n";
  os << "initial_condition = " << initial_to_string(u0) << "\n";
  os << "initial_velocity = " << initial_to_string(u1) << "\n";
  if (!gamma_list.empty()) {
    os << "gamma_list = ";
    for (std::size_t i = 0; i < gamma_list.size(); ++i) {
      if (i) os << ",";
      os << format_double(gamma_list[i]);
    }
    os << "\n";
  }
  if (xi > 0.0) os << "xi = " << format_double(xi) << "\n";
  os << "lambda_lo = " << format_double(lambda_lo) << "\n";
  os << "lambda_hi = " << format_double(lambda_hi) << "\n";
  os << "horizon = " << format_double(horizon) << "\n";
  os << "bisect_tol = " << format_double(bisect_tol) << "\n";
  os << "lambda_start = " << format_double(lambda_start) << "\n";
  os << "lambda_step = " << format_double(lambda_step) << "\n";
  os << "arclength = " << (arclength ? "on" : "off") << "\n";
  os << "eps_compare = " << (eps_compare ? "on" : "off") << "\n";
  os << "max_branch_points = " << max_branch_points << "\n";
  os << "seed = " << seed << "\n";
  os << "c3_samples = " << c3_samples << "\n";
  os << "output_dir = " << output_dir << "\n";
  return os.str();
}

}  // namespace mems

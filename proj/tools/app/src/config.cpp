#include "limcom_app/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "limcom/error.hpp"

namespace limcom::app {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::CONFIG_ERROR, "'" + key + "' expects a number, got '" + v + "'");
  }
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::CONFIG_ERROR, "'" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<std::string> config_keys() {
  return {"rho",         "r",         "mu",        "sigma",         "gamma",          "T",
          "y0",          "w",         "boundary_steps", "boundary_rule", "quad_tol", "tail_tol",
          "fd_time_steps", "fd_space_steps", "sim_steps", "paths", "csv_paths", "seed", "out"};
}

void apply_setting(RunConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in), v = trim(value_in);
  auto& p = cfg.params;
  if (key == "rho") p.rho = parse_double(key, v);
  else if (key == "r") p.r = parse_double(key, v);
  else if (key == "mu") p.mu = parse_double(key, v);
  else if (key == "sigma") p.sigma = parse_double(key, v);
  else if (key == "gamma") p.gamma = parse_double(key, v);
  else if (key == "T") p.T = parse_double(key, v);
  else if (key == "y0") p.y0 = parse_double(key, v);
  else if (key == "w" || key == "w0") p.w0 = parse_double(key, v);
  else if (key == "boundary_steps") cfg.boundary_steps = parse_int<int>(key, v);
  else if (key == "boundary_rule") {
    if (v == "gauss") cfg.boundary_rule = BoundaryRule::GaussSqrt;
    else if (v == "trapezoid") cfg.boundary_rule = BoundaryRule::Trapezoid;
    else throw Error(ErrorCode::CONFIG_ERROR, "boundary_rule must be 'gauss' or 'trapezoid'");
  } else if (key == "quad_tol") cfg.quad_tol = parse_double(key, v);
  else if (key == "tail_tol") cfg.tail_tol = parse_double(key, v);
  else if (key == "fd_time_steps") cfg.fd_time_steps = parse_int<int>(key, v);
  else if (key == "fd_space_steps") cfg.fd_space_steps = parse_int<int>(key, v);
  else if (key == "sim_steps") cfg.sim_steps = parse_int<int>(key, v);
  else if (key == "paths") cfg.paths = parse_int<std::size_t>(key, v);
  else if (key == "csv_paths") cfg.csv_paths = parse_int<std::size_t>(key, v);
  else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, v);
  else if (key == "out") cfg.out_dir = v;
  else throw Error(ErrorCode::CONFIG_ERROR, "unknown config key '" + key + "'");
}

void apply_assignment(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::CONFIG_ERROR, "expected key=value, got '" + assignment + "'");
  }
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO_ERROR, "cannot open config " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_assignment(cfg, line);
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "rho=" << fmt(params.rho) << "\nr=" << fmt(params.r) << "\nmu=" << fmt(params.mu)
     << "\nsigma=" << fmt(params.sigma) << "\ngamma=" << fmt(params.gamma) << "\nT=" << fmt(params.T)
     << "\ny0=" << fmt(params.y0) << "\nw=" << fmt(params.w0) << "\nboundary_steps=" << boundary_steps
     << "\nboundary_rule=" << (boundary_rule == BoundaryRule::GaussSqrt ? "gauss" : "trapezoid")
     << "\nquad_tol=" << fmt(quad_tol) << "\ntail_tol=" << fmt(tail_tol) << "\nfd_time_steps=" << fd_time_steps
     << "\nfd_space_steps=" << fd_space_steps << "\nsim_steps=" << sim_steps << "\npaths=" << paths
     << "\ncsv_paths=" << csv_paths << "\nseed=" << seed << '\n';
  return os.str();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::comment() const { return "config_hash=" + hash(); }

BoundaryOptions RunConfig::boundary_options() const {
  BoundaryOptions o;
  o.rule = boundary_rule;
  return o;
}

DerivedConstants validate(const RunConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.boundary_steps <= 0) bad.push_back("boundary_steps");
  if (!(cfg.quad_tol > 0.0)) bad.push_back("quad_tol");
  if (!(cfg.tail_tol > 0.0)) bad.push_back("tail_tol");
  if (cfg.fd_time_steps <= 0) bad.push_back("fd_time_steps");
  if (cfg.fd_space_steps <= 0) bad.push_back("fd_space_steps");
  if (cfg.sim_steps <= 0) bad.push_back("sim_steps");
  if (cfg.paths == 0) bad.push_back("paths");
  if (!bad.empty()) {
    std::string msg = "knobs must be positive:";
    for (const auto& k : bad) msg += " " + k;
    throw Error(ErrorCode::CONFIG_ERROR, msg);
  }
  return derive_constants(cfg.params);
}

}  // namespace limcom::app

#include "dpshdg/scenario.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

#ifndef DPSHDG_VERSION
#define DPSHDG_VERSION "unknown"
#endif
#ifndef DPSHDG_GIT_REV
#define DPSHDG_GIT_REV "unknown"
#endif

namespace dpshdg {

std::string_view version() { return DPSHDG_VERSION; }
std::string_view git_revision() { return DPSHDG_GIT_REV; }

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Mms: return "mms";
    case Scenario::WellboreVertical: return "wellbore-vertical";
    case Scenario::WellboreHorizontal: return "wellbore-horizontal";
    case Scenario::RandomPerm: return "random-perm";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::Mms, Scenario::WellboreVertical, Scenario::WellboreHorizontal, Scenario::RandomPerm}) {
    if (to_string(s) == name) {
      return s;
    }
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "' (expected mms, wellbore-vertical, wellbore-horizontal or random-perm)");
}

RunConfig RunConfig::defaults(Scenario s) {
  RunConfig c;
  c.scenario = s;
  if (s == Scenario::Mms) {
    const UniformParams p = example1_params();
    c.levels = 5;
    c.n = 4;
    c.mu = p.mu;
    c.kappa_f = p.kappa_f;
    c.kappa_m = p.kappa_m;
    c.sigma = p.sigma;
    c.alpha = p.alpha;
    return c;
  }
  c.levels = 1;
  c.n = 64;
  c.mu = 1e-3;
  c.kappa_f = 1e-1;
  c.kappa_m = 1e-5;
  c.sigma = 0.9;
  c.alpha = 1.0;
  c.pressure_fracture = 1e4;
  c.pressure_matrix = 5e4;
  return c;
}

DiscretizationParams RunConfig::discretization() const {
  DiscretizationParams d = DiscretizationParams::with_degree(k);
  if (beta) {
    d.beta = *beta;
  }
  return d;
}

UniformParams RunConfig::physical() const {
  UniformParams p;
  p.mu = mu;
  p.kappa_f = kappa_f;
  p.kappa_m = kappa_m;
  p.sigma = sigma;
  p.alpha = alpha;
  return p;
}

void RunConfig::validate() const {
  discretization().validate();
  if (levels < 1) {
    throw std::invalid_argument("levels must be >= 1");
  }
  if (n < 1) {
    throw std::invalid_argument("n must be >= 1");
  }
  for (double v : {mu, kappa_f, kappa_m, sigma, alpha}) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("physical parameters must be positive");
    }
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("invalid value '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") {
    return true;
  }
  if (value == "false" || value == "0") {
    return false;
  }
  throw std::invalid_argument("invalid boolean '" + value + "' for " + key);
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = unquote(trim(raw));
  if (key == "scenario") {
    if (parse_scenario(value) != c.scenario) {
      throw std::invalid_argument("configuration is for scenario '" + value + "', run requested '" +
                                  std::string(to_string(c.scenario)) + "'");
    }
  } else if (key == "k") {
    c.k = parse_number<int>(key, value);
  } else if (key == "beta") {
    c.beta = parse_number<double>(key, value);
  } else if (key == "levels") {
    c.levels = parse_number<int>(key, value);
  } else if (key == "n") {
    c.n = parse_number<int>(key, value);
  } else if (key == "mu") {
    c.mu = parse_number<double>(key, value);
  } else if (key == "kappa_f") {
    c.kappa_f = parse_number<double>(key, value);
  } else if (key == "kappa_m") {
    c.kappa_m = parse_number<double>(key, value);
  } else if (key == "sigma") {
    c.sigma = parse_number<double>(key, value);
  } else if (key == "alpha") {
    c.alpha = parse_number<double>(key, value);
  } else if (key == "pressure_fracture") {
    c.pressure_fracture = parse_number<double>(key, value);
  } else if (key == "pressure_matrix") {
    c.pressure_matrix = parse_number<double>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "condense") {
    c.condense = parse_bool(key, value);
  } else if (key == "write_fields") {
    c.write_fields = parse_bool(key, value);
  } else if (key == "out") {
    c.out = value;
  } else {
    throw std::invalid_argument("unknown configuration key '" + key + "'");
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read configuration file " + path.string());
  }
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') {
        quoted = !quoted;
      } else if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    if (section == "build") {
      continue;
    }
    try {
      apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void write_manifest(const RunConfig& c, std::ostream& out) {
  const auto old = out.precision(17);
  const DiscretizationParams d = c.discretization();
  out << "[run]\n"
      << "scenario = \"" << to_string(c.scenario) << "\"\n"
      << "k = " << c.k << '\n'
      << "beta = " << d.beta << '\n'
      << "levels = " << c.levels << '\n'
      << "n = " << c.n << '\n'
      << "mu = " << c.mu << '\n'
      << "kappa_f = " << c.kappa_f << '\n'
      << "kappa_m = " << c.kappa_m << '\n'
      << "sigma = " << c.sigma << '\n'
      << "alpha = " << c.alpha << '\n'
      << "pressure_fracture = " << c.pressure_fracture << '\n'
      << "pressure_matrix = " << c.pressure_matrix << '\n'
      << "seed = " << c.seed << '\n'
      << "condense = " << (c.condense ? "true" : "false") << '\n'
      << "write_fields = " << (c.write_fields ? "true" : "false") << '\n'
      << "out = \"" << c.out.string() << "\"\n"
      << "\n[build]\n"
      << "version = \"" << version() << "\"\n"
      << "git_revision = \"" << git_revision() << "\"\n";
  out.precision(old);
}

}  // namespace dpshdg

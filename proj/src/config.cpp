// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <sstream>

namespace cdosr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(trim(v), &used);
    if (used != trim(v).size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(trim(v), &used);
    if (used != trim(v).size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ';';
    if constexpr (std::is_floating_point_v<T>)
      os << fmt(v[i]);
    else
      os << v[i];
  }
  return os.str();
}

void apply_key(RunConfig& c, const std::string& section, const std::string& key,
               const std::string& value) {
  const std::string k = section + "." + key;
  HyperConfig& h = c.study.hyper;
  if (k == "data.path") c.dataset = trim(value);
  else if (k == "data.omega") c.study.omega = static_cast<int>(to_integer(k, value));
  else if (k == "data.standardize") c.study.standardize = to_bool(k, value);
  else if (k == "data.pca_retain") c.study.pca_retain = to_real(k, value);
  else if (k == "hdp.gamma") h.conc.gamma = to_real(k, value);
  else if (k == "hdp.alpha0") h.conc.alpha0 = to_real(k, value);
  else if (k == "hdp.gamma_shape") h.conc.gamma_prior.shape = to_real(k, value);
  else if (k == "hdp.gamma_rate") h.conc.gamma_prior.rate = to_real(k, value);
  else if (k == "hdp.alpha0_shape") h.conc.alpha0_prior.shape = to_real(k, value);
  else if (k == "hdp.alpha0_rate") h.conc.alpha0_prior.rate = to_real(k, value);
  else if (k == "hdp.resample_concentrations") h.sampler.resample_concentrations = to_bool(k, value);
  else if (k == "hdp.init_components") h.init_components = static_cast<int>(to_integer(k, value));
  else if (k == "hdp.sweeps") h.sweeps = static_cast<int>(to_integer(k, value));
  else if (k == "hdp.parallel_scoring")
    h.sampler.execution = to_bool(k, value) ? Execution::kParallel : Execution::kSerial;
  else if (k == "prior.beta") h.beta = to_real(k, value);
  else if (k == "prior.nu_offset") h.nu_offset = to_real(k, value);
  else if (k == "prior.varsigma") h.varsigma = to_real(k, value);
  else if (k == "cdosr.epsilon") h.epsilon = to_real(k, value);
  else if (k == "study.repeats") c.study.repeats = static_cast<int>(to_integer(k, value));
  else if (k == "study.unknown_counts") c.unknown_counts = parse_int_list(value);
  else if (k == "study.unknown_count") c.unknown_count = static_cast<int>(to_integer(k, value));
  else if (k == "study.fractions") c.fractions = parse_real_list(value);
  else if (k == "study.eps_grid") c.eps_grid = parse_real_list(value);
  else if (k == "study.nu_grid") c.nu_grid = parse_real_list(value);
  else if (k == "study.varsigma_grid") c.varsigma_grid = parse_real_list(value);
  else if (k == "study.parallel_jobs")
    c.study.jobs = to_bool(k, value) ? Execution::kParallel : Execution::kSerial;
  else if (k == "output.dir") c.output_dir = trim(value);
  else if (k == "run.seed") c.study.root_seed = static_cast<std::uint64_t>(to_integer(k, value));
  else throw ConfigError("unknown setting '" + k + "'");
}

}  // namespace

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::kFit: return "fit";
    case StudyKind::kSweep: return "sweep";
    case StudyKind::kBatch: return "batch";
    case StudyKind::kEpsilon: return "epsilon";
    case StudyKind::kDiscover: return "discover";
    case StudyKind::kReport: return "report";
  }
  return "unknown";
}

StudyKind parse_study_kind(const std::string& name) {
  for (auto k : {StudyKind::kFit, StudyKind::kSweep, StudyKind::kBatch, StudyKind::kEpsilon,
                 StudyKind::kDiscover, StudyKind::kReport})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown study kind '" + name + "'");
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(to_real("list", item));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(static_cast<int>(to_integer("list", item)));
  return out;
}

void RunConfig::validate() const {
  if (kind == StudyKind::kReport) {
    if (input.empty()) throw ConfigError("report: no input artifact given");
    if (!std::filesystem::exists(input))
      throw ConfigError("report: input '" + input.string() + "' does not exist");
    return;
  }
  if (dataset.empty()) throw ConfigError("no dataset path given");
  try {
    study.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (kind == StudyKind::kFit && (nu_grid.empty() || varsigma_grid.empty()))
    throw ConfigError("fit: nu and varsigma grids must be nonempty");
  if (kind == StudyKind::kSweep && unknown_counts.empty())
    throw ConfigError("sweep: unknown_counts must be nonempty");
  if (kind == StudyKind::kBatch && fractions.empty())
    throw ConfigError("batch: fractions must be nonempty");
  if (kind == StudyKind::kEpsilon && eps_grid.empty())
    throw ConfigError("epsilon: eps_grid must be nonempty");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("fractions must lie in (0, 1]");
  for (double e : eps_grid)
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError("eps_grid values must lie in [0, 1)");
  for (int u : unknown_counts)
    if (u < 0) throw ConfigError("unknown_counts must be >= 0");
}

ConfigEcho RunConfig::echo() const {
  const HyperConfig& h = study.hyper;
  ConfigEcho e = {
      {"kind", to_string(kind)},
      {"dataset", dataset.string()},
      {"omega", std::to_string(study.omega)},
      {"standardize", study.standardize ? "1" : "0"},
      {"pca_retain", fmt(study.pca_retain)},
      {"gamma", fmt(h.conc.gamma)},
      {"alpha0", fmt(h.conc.alpha0)},
      {"gamma_prior", fmt(h.conc.gamma_prior.shape) + ";" + fmt(h.conc.gamma_prior.rate)},
      {"alpha0_prior", fmt(h.conc.alpha0_prior.shape) + ";" + fmt(h.conc.alpha0_prior.rate)},
      {"resample_concentrations", h.sampler.resample_concentrations ? "1" : "0"},
      {"init_components", std::to_string(h.init_components)},
      {"sweeps", std::to_string(h.sweeps)},
      {"beta", fmt(h.beta)},
      {"nu_offset", fmt(h.nu_offset)},
      {"varsigma", fmt(h.varsigma)},
      {"epsilon", fmt(h.epsilon)},
      {"repeats", std::to_string(study.repeats)},
      {"seed", std::to_string(study.root_seed)},
  };
  switch (kind) {
    case StudyKind::kSweep: e.emplace_back("unknown_counts", join(unknown_counts)); break;
    case StudyKind::kBatch: e.emplace_back("fractions", join(fractions)); break;
    case StudyKind::kEpsilon: e.emplace_back("eps_grid", join(eps_grid)); break;
    case StudyKind::kFit:
      e.emplace_back("nu_grid", join(nu_grid));
      e.emplace_back("varsigma_grid", join(varsigma_grid));
      break;
    default: break;
  }
  if (kind == StudyKind::kBatch || kind == StudyKind::kEpsilon || kind == StudyKind::kDiscover)
    e.emplace_back("unknown_count", std::to_string(unknown_count));
  return e;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config '" + path.string() + "': " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("setting '" + section + "' must be inside a section");
    for (const auto& [key, value] : body) apply_key(base, section, key, value.data());
  }
  return base;
}

}  // namespace cdosr

#include "config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace ycv {

namespace {

const std::array<const char*, 22> kKnownKeys = {
    "delta",          "maturities",   "labels",        "theta",
    "scaling_floor",  "extrapolate_flat",              "data",
    "matrix",         "sigma",        "initial_curve", "initial_flat",
    "steps",          "window_start", "stride",        "annuity_maturities",
    "m1",             "m2",           "coarse_factor", "samples",
    "convergence",    "lambda",       "seed",
};

bool known_key(const std::string& key) {
  if (key == "threads") return true;
  return std::find_if(kKnownKeys.begin(), kKnownKeys.end(),
                      [&](const char* k) { return key == k; }) != kKnownKeys.end();
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

double parse_number_token(const std::string& token, const std::string& context) {
  auto to_double = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (...) {
      fail(ErrorCode::kParse, context + ": bad number '" + token + "'");
    }
  };
  auto slash = token.find('/');
  if (slash != std::string::npos) {
    double num = to_double(trim(token.substr(0, slash)));
    double den = to_double(trim(token.substr(slash + 1)));
    if (den == 0.0) fail(ErrorCode::kParse, context + ": division by zero in '" + token + "'");
    return num / den;
  }
  return to_double(token);
}

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kParse, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config '" + path + "'");
  return parse(in);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) fail(ErrorCode::kParse, "unknown config key '" + key + "'");
  values_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) != 0; }

std::string RunConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::kInvalidArgument, "config: missing key '" + key + "'");
  return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key) const {
  return parse_number_token(get_string(key), "config key '" + key + "'");
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long RunConfig::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    fail(ErrorCode::kParse, "config key '" + key + "': bad integer '" + v + "'");
  }
}

long RunConfig::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t RunConfig::get_seed() const {
  if (!has("seed")) return 0;
  const std::string v = get_string("seed");
  try {
    std::size_t pos = 0;
    unsigned long long out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    fail(ErrorCode::kParse, "config key 'seed': bad unsigned integer '" + v + "'");
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::kParse, "config key '" + key + "': bad boolean '" + v + "'");
}

std::vector<double> RunConfig::get_number_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& token : split_list(get_string(key))) {
    out.push_back(parse_number_token(token, "config key '" + key + "'"));
  }
  if (out.empty()) fail(ErrorCode::kParse, "config key '" + key + "': empty list");
  return out;
}

MaturityGrid RunConfig::grid() const {
  MaturityGrid grid;
  grid.delta = get_double("delta");
  auto tokens = split_list(get_string("maturities"));
  if (tokens.empty()) fail(ErrorCode::kParse, "config: empty maturities");
  for (const auto& t : tokens) grid.maturities.push_back(parse_number_token(t, "maturities"));
  if (has("labels")) {
    grid.labels = split_list(get_string("labels"));
  } else {
    grid.labels = tokens;
  }
  grid.validate();
  return grid;
}

ScalingSpec RunConfig::scaling() const {
  ScalingSpec spec;
  spec.theta = get_double("theta", 0.025);
  std::string floor = get_string("scaling_floor", "0.0001");
  std::string lowered = floor;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lowered == "off") {
    spec.floor.reset();
  } else {
    spec.floor = parse_number_token(floor, "config key 'scaling_floor'");
  }
  spec.validate();
  return spec;
}

int RunConfig::threads() const {
  long t = get_int("threads", 1);
  if (t < 1) fail(ErrorCode::kInvalidArgument, "config: threads must be >= 1");
  return static_cast<int>(t);
}

}  // namespace ycv

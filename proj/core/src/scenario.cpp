#include "symctrl/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace symctrl {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw config_error("scenario line " + std::to_string(line) + ": " + what);
}

struct Entry {
  std::string key;
  std::vector<std::string> tokens;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
  int line = 0;
  bool used = false;
};

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<Section> read_sections(std::istream& in) {
  std::vector<Section> sections;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const std::size_t hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string text = trim(raw);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) fail(line, "malformed section header");
      const std::string name = trim(text.substr(1, text.size() - 2));
      if (name.empty()) fail(line, "malformed section header");
      for (const Section& s : sections) {
        if (s.name == name) fail(line, "duplicate section [" + name + "]");
      }
      sections.push_back(Section{name, {}, line, false});
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    if (sections.empty()) fail(line, "key outside any section");
    Entry entry;
    entry.key = trim(text.substr(0, eq));
    entry.line = line;
    if (entry.key.empty()) fail(line, "empty key");
    std::istringstream values(text.substr(eq + 1));
    std::string token;
    while (values >> token) entry.tokens.push_back(token);
    if (entry.tokens.empty()) fail(line, "no value for key '" + entry.key + "'");
    sections.back().entries.push_back(std::move(entry));
  }
  return sections;
}

double parse_double(const std::string& token, int line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + token.size()) fail(line, "malformed number '" + token + "'");
  if (!std::isfinite(v)) fail(line, "number '" + token + "' is not finite");
  return v;
}

std::uint64_t parse_uint(const std::string& token, int line) {
  if (token.empty() || token.front() == '-' || token.front() == '+') {
    fail(line, "malformed count '" + token + "'");
  }
  const char* begin = token.c_str();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + token.size()) fail(line, "malformed count '" + token + "'");
  return v;
}

std::vector<double> parse_doubles(const Entry& e, std::size_t expect) {
  if (e.tokens.size() != expect) {
    fail(e.line, "key '" + e.key + "' expects " + std::to_string(expect) +
                     (expect == 1 ? " value, got " : " values, got ") +
                     std::to_string(e.tokens.size()));
  }
  std::vector<double> out;
  out.reserve(expect);
  for (const std::string& t : e.tokens) out.push_back(parse_double(t, e.line));
  return out;
}

Section* find_section(std::vector<Section>& sections, const std::string& name) {
  for (Section& s : sections) {
    if (s.name == name) {
      s.used = true;
      return &s;
    }
  }
  return nullptr;
}

Entry* find_entry(Section& section, const std::string& key) {
  Entry* found = nullptr;
  for (Entry& e : section.entries) {
    if (e.key != key) continue;
    if (found) fail(e.line, "key '" + key + "' given twice in [" + section.name + "]");
    e.used = true;
    found = &e;
  }
  return found;
}

Entry& need_entry(Section& section, const std::string& key) {
  Entry* e = find_entry(section, key);
  if (!e) fail(section.line, "[" + section.name + "] is missing '" + key + "'");
  return *e;
}

std::vector<Entry*> all_entries(Section& section, const std::string& key) {
  std::vector<Entry*> out;
  for (Entry& e : section.entries) {
    if (e.key != key) continue;
    e.used = true;
    out.push_back(&e);
  }
  return out;
}

Box parse_box(const Entry& e, int dim) {
  const std::vector<double> v = parse_doubles(e, static_cast<std::size_t>(2 * dim));
  Box box;
  box.lo.assign(v.begin(), v.begin() + dim);
  box.hi.assign(v.begin() + dim, v.end());
  for (int k = 0; k < dim; ++k) {
    if (box.lo[k] > box.hi[k]) {
      fail(e.line, "box lower corner exceeds the upper corner in dimension " +
                       std::to_string(k + 1));
    }
  }
  return box;
}

Region parse_region(Section& section, const std::string& key, int dim) {
  std::vector<Box> boxes;
  for (const Entry* e : all_entries(section, key)) boxes.push_back(parse_box(*e, dim));
  if (boxes.empty()) fail(section.line, "[" + section.name + "] needs at least one '" + key + "'");
  return Region(dim, Norm::l2, std::move(boxes));
}

SwitchedSystem parse_system(Section& section) {
  const Entry& dim_entry = need_entry(section, "dim");
  if (dim_entry.tokens.size() != 1) fail(dim_entry.line, "'dim' expects one value");
  const std::uint64_t dim_raw = parse_uint(dim_entry.tokens.front(), dim_entry.line);
  if (dim_raw == 0 || dim_raw > 64) fail(dim_entry.line, "'dim' must be between 1 and 64");
  const int dim = static_cast<int>(dim_raw);

  SwitchedSystem sys;
  sys.dim = dim;
  for (std::size_t mode = 1;; ++mode) {
    const std::string suffix = "_" + std::to_string(mode);
    Entry* a = find_entry(section, "a" + suffix);
    Entry* b = find_entry(section, "b" + suffix);
    if (!a && !b) break;
    if (!a || !b) {
      fail((a ? a : b)->line, "mode " + std::to_string(mode) + " needs both 'a" + suffix +
                                  "' and 'b" + suffix + "'");
    }
    AffineMode m;
    m.a = parse_doubles(*a, static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
    m.b = parse_doubles(*b, static_cast<std::size_t>(dim));
    sys.modes.push_back(std::move(m));
  }
  if (sys.modes.empty()) fail(section.line, "[system] defines no modes");
  return sys;
}

double parse_positive(Section& section, const std::string& key) {
  const Entry& e = need_entry(section, key);
  if (e.tokens.size() != 1) fail(e.line, "'" + key + "' expects one value");
  const double v = parse_double(e.tokens.front(), e.line);
  if (v <= 0.0) fail(e.line, "'" + key + "' must be positive");
  return v;
}

SimPolicy parse_policy(const Entry& e) {
  if (e.tokens.size() != 1) fail(e.line, "'policy' expects one value");
  const std::string& t = e.tokens.front();
  if (t == "lazy") return SimPolicy::lazy;
  if (t == "min") return SimPolicy::min_action;
  if (t == "random") return SimPolicy::random_action;
  fail(e.line, "unknown policy '" + t + "' (expected lazy, min, or random)");
}

void reject_leftovers(const std::vector<Section>& sections) {
  for (const Section& s : sections) {
    if (!s.used) fail(s.line, "unknown section [" + s.name + "]");
    for (const Entry& e : s.entries) {
      if (!e.used) fail(e.line, "unrecognized key '" + e.key + "' in [" + s.name + "]");
    }
  }
}

}  // namespace

Scenario parse_scenario(std::istream& in, std::string name) {
  std::vector<Section> sections = read_sections(in);

  Scenario sc;
  sc.name = std::move(name);

  Section* system = find_section(sections, "system");
  if (!system) throw config_error("scenario has no [system] section");
  sc.system = parse_system(*system);
  const int dim = sc.system.dim;

  Section* abstraction = find_section(sections, "abstraction");
  if (!abstraction) throw config_error("scenario has no [abstraction] section");
  sc.tau = parse_positive(*abstraction, "tau");
  sc.epsilon = parse_positive(*abstraction, "epsilon");
  {
    const Entry& eta = need_entry(*abstraction, "eta");
    if (eta.tokens.size() != 1 && eta.tokens.size() != static_cast<std::size_t>(dim)) {
      fail(eta.line, "'eta' expects 1 or " + std::to_string(dim) + " values");
    }
    for (const std::string& t : eta.tokens) {
      const double v = parse_double(t, eta.line);
      if (v <= 0.0) fail(eta.line, "'eta' must be positive");
      sc.eta.push_back(v);
    }
    if (sc.eta.size() == 1) sc.eta.assign(static_cast<std::size_t>(dim), sc.eta.front());
    sc.domain = parse_box(need_entry(*abstraction, "domain"), dim);
  }

  if (Section* safety = find_section(sections, "safety")) {
    sc.safety_region = parse_region(*safety, "box", dim);
  }
  if (Section* reach = find_section(sections, "reach")) {
    if (sc.safety_region) {
      fail(reach->line, "a scenario is either a safety or a reachability scenario, not both");
    }
    sc.reach_safe = parse_region(*reach, "safe_box", dim);
    sc.reach_target = parse_region(*reach, "target_box", dim);
  }

  if (Section* simulate = find_section(sections, "simulate")) {
    SimulateSpec spec;
    spec.x0 = parse_doubles(need_entry(*simulate, "x0"), static_cast<std::size_t>(dim));
    const Entry& steps = need_entry(*simulate, "steps");
    if (steps.tokens.size() != 1) fail(steps.line, "'steps' expects one value");
    spec.steps = parse_uint(steps.tokens.front(), steps.line);
    if (Entry* policy = find_entry(*simulate, "policy")) spec.policy = parse_policy(*policy);
    if (Entry* seed = find_entry(*simulate, "seed")) {
      if (seed->tokens.size() != 1) fail(seed->line, "'seed' expects one value");
      spec.seed = parse_uint(seed->tokens.front(), seed->line);
    }
    sc.simulate = std::move(spec);
  }

  if (Section* validate = find_section(sections, "validate")) {
    if (Entry* refinement = find_entry(*validate, "refinement")) {
      if (refinement->tokens.size() != 1) fail(refinement->line, "'refinement' expects one value");
      const std::uint64_t v = parse_uint(refinement->tokens.front(), refinement->line);
      if (v == 0 || v > 64) fail(refinement->line, "'refinement' must be between 1 and 64");
      sc.validate.refinement = static_cast<int>(v);
    }
    if (Entry* samples = find_entry(*validate, "samples")) {
      if (samples->tokens.size() != 1) fail(samples->line, "'samples' expects one value");
      sc.validate.samples = parse_uint(samples->tokens.front(), samples->line);
      if (sc.validate.samples == 0) fail(samples->line, "'samples' must be positive");
    }
  }

  reject_leftovers(sections);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open scenario file: " + path);
  return parse_scenario(in, std::filesystem::path(path).stem().string());
}

}  // namespace symctrl

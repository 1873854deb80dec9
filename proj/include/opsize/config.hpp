#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "opsize/csv.hpp"
#include "opsize/ensemble.hpp"
#include "opsize/hamiltonian.hpp"
#include "opsize/pauli_string.hpp"
#include "opsize/spectral.hpp"

namespace opsize {

struct TimeGrid {
  std::vector<double> list;
  double start = 0.0;
  double stop = 10.0;
  int count = 51;

  std::vector<double> resolve() const {
    if (!list.empty()) return list;
    if (count < 1) throw std::invalid_argument("times: count must be at least 1");
    std::vector<double> t(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
      t[static_cast<size_t>(i)] =
          count == 1 ? start : start + (stop - start) * i / (count - 1);
    return t;
  }
};

enum class EnsembleChoice { haar_product, pauli6, clustered };

inline const char* ensemble_name(EnsembleChoice c) {
  switch (c) {
    case EnsembleChoice::haar_product: return "haar_product";
    case EnsembleChoice::pauli6: return "pauli6";
    case EnsembleChoice::clustered: return "clustered";
  }
  return "";
}

// All knobs of one experiment run.  Sites are 1-based on this boundary
// (config files, flags, CSV masks use bit i-1 for site i); the library
// underneath counts from 0.
struct ExperimentConfig {
  ChainSpec chain{10, 2};
  SpinChainParams model;
  std::vector<int> observable_sites;
  std::vector<int> observable_letters;
  TimeGrid times;
  EnsembleChoice ensemble = EnsembleChoice::haar_product;
  int cluster_block = 2;
  i64 samples = 100;
  int trajectories = 100;
  double prep_error = 0.0;
  int prep_reps = 256;
  i64 shots = 0;
  std::vector<int> region_sites;
  bool region_sampled = false;
  int w_site = 1;
  int w_letter = 1;
  int v_site = 0;
  int v_letter = 3;
  double t1 = 0.0;
  std::string out_dir = "out";
  u64 seed = 1;
  int threads = 1;

  void finalize() {
    model.chain = chain;
    if (observable_sites.empty()) {
      observable_sites = {(chain.n_sites + 1) / 2};
      observable_letters = {1};
    }
    if (v_site == 0) v_site = chain.n_sites;
  }

  void validate() const {
    chain.validate();
    if (observable_sites.size() != observable_letters.size() || observable_sites.empty())
      throw std::invalid_argument("observable: sites and letters must pair up");
    for (int s : observable_sites)
      if (s < 1 || s > chain.n_sites)
        throw std::invalid_argument("observable: site out of range");
    for (int l : observable_letters)
      if (l < 1 || l >= chain.letters_per_site())
        throw std::invalid_argument("observable: letter out of range");
    const auto t = times.resolve();
    if (t.empty()) throw std::invalid_argument("times: empty grid");
    for (double v : t)
      if (!std::isfinite(v)) throw std::invalid_argument("times: non-finite entry");
    if (samples < 0) throw std::invalid_argument("run: samples must be nonnegative");
    if (samples > (i64{1} << 30)) throw std::invalid_argument("run: samples too large");
    if (trajectories < 0) throw std::invalid_argument("run: trajectories must be nonnegative");
    if (prep_error < 0.0 || prep_error > 1.0)
      throw std::invalid_argument("run: prep_error must lie in [0, 1]");
    if (prep_reps < 0) throw std::invalid_argument("run: prep_reps must be nonnegative");
    if (shots < 0) throw std::invalid_argument("run: shots must be nonnegative");
    if (threads < 1) throw std::invalid_argument("run: threads must be positive");
    for (int s : region_sites)
      if (s < 1 || s > chain.n_sites)
        throw std::invalid_argument("region: site out of range");
    if (region_sites.size() > 12)
      throw std::invalid_argument("region: subset enumeration is guarded at 12 sites");
    for (int s : {w_site, v_site})
      if (s < 1 || s > chain.n_sites)
        throw std::invalid_argument("otoc: probe site out of range");
    for (int l : {w_letter, v_letter})
      if (l < 1 || l >= chain.letters_per_site())
        throw std::invalid_argument("otoc: probe letter out of range");
    if (!std::isfinite(t1)) throw std::invalid_argument("otoc: t1 must be finite");
  }

  PauliString observable() const {
    std::vector<int> letters(static_cast<size_t>(chain.n_sites), 0);
    for (size_t i = 0; i < observable_sites.size(); ++i)
      letters[static_cast<size_t>(observable_sites[i] - 1)] = observable_letters[i];
    return PauliString(chain, letters);
  }

  u32 region_mask() const {
    u32 mask = 0;
    for (int s : region_sites) mask |= u32{1} << (s - 1);
    return mask;
  }

  EnsembleSpec ensemble_spec() const {
    switch (ensemble) {
      case EnsembleChoice::haar_product: return haar_product_ensemble(seed);
      case EnsembleChoice::pauli6: return pauli6_ensemble(seed);
      case EnsembleChoice::clustered: return clustered_ensemble(chain, cluster_block, seed);
    }
    throw std::logic_error("unreachable ensemble kind");
  }

  // Everything that shapes the numbers, with seed, threads, and the output
  // directory left out: the hash names the experiment, the header lines
  // carry the seed, and thread count must never alter a file.
  std::string canonical_text() const {
    std::ostringstream s;
    auto put = [&s](const char* key, const std::string& v) { s << key << '=' << v << '\n'; };
    put("chain.sites", fmt_int(chain.n_sites));
    put("chain.local_dim", fmt_int(chain.local_dim));
    put("model.jx", fmt_double(model.jx));
    put("model.jy", fmt_double(model.jy));
    put("model.jz", fmt_double(model.jz));
    put("model.hx", fmt_double(model.hx));
    put("model.hy", fmt_double(model.hy));
    put("model.hz", fmt_double(model.hz));
    std::string sites, letters;
    for (size_t i = 0; i < observable_sites.size(); ++i) {
      sites += (i ? "," : "") + fmt_int(observable_sites[i]);
      letters += (i ? "," : "") + fmt_int(observable_letters[i]);
    }
    put("observable.sites", sites);
    put("observable.letters", letters);
    std::string grid;
    const auto t = times.resolve();
    for (size_t i = 0; i < t.size(); ++i) grid += (i ? "," : "") + fmt_double(t[i]);
    put("times", grid);
    put("ensemble.kind", ensemble_name(ensemble));
    put("ensemble.block", fmt_int(cluster_block));
    put("run.samples", fmt_int(samples));
    put("run.trajectories", fmt_int(trajectories));
    put("run.prep_error", fmt_double(prep_error));
    put("run.prep_reps", fmt_int(prep_reps));
    put("run.shots", fmt_int(shots));
    std::string region;
    for (size_t i = 0; i < region_sites.size(); ++i)
      region += (i ? "," : "") + fmt_int(region_sites[i]);
    put("region.sites", region);
    put("region.sampled", region_sampled ? "1" : "0");
    put("otoc.w_site", fmt_int(w_site));
    put("otoc.w_letter", fmt_int(w_letter));
    put("otoc.v_site", fmt_int(v_site));
    put("otoc.v_letter", fmt_int(v_letter));
    put("otoc.t1", fmt_double(t1));
    return s.str();
  }

  std::string config_hash() const {
    const std::string text = canonical_text();
    const u64 h = detail::fnv1a(text.data(), text.size());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

inline ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  if (name == "fig2-chaotic") {
    c.chain = {10, 2};
    c.model.jz = 1.0;
    c.model.hx = 1.05;
    c.model.hz = 0.5;
  } else if (name == "fig2-integrable") {
    c.chain = {10, 2};
    c.model.jz = 1.0;
    c.model.hx = 1.0;
    c.model.hz = 0.0;
  } else if (name == "fig5-xxz") {
    c.chain = {8, 2};
    c.model.jx = 1.0;
    c.model.jy = 1.0;
    c.model.jz = 0.3;
    c.model.hx = 0.9;
    c.model.hz = 0.8;
  } else if (name == "fig6-ising") {
    c.chain = {8, 2};
    c.model.jz = 1.0;
    c.model.hx = 1.05;
    c.model.hz = 0.5;
    c.times.stop = 6.0;
    c.times.count = 31;
    c.samples = 2000;
    c.w_site = 1;
    c.w_letter = 1;
    c.v_site = 8;
    c.v_letter = 3;
  } else {
    throw std::invalid_argument(
        "unknown preset '" + name +
        "' (available: fig2-chaotic, fig2-integrable, fig5-xxz, fig6-ising)");
  }
  return c;
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

inline double parse_double(const std::string& key, const std::string& v) {
  size_t used = 0;
  double out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": cannot parse '" + v + "' as a number");
  }
  if (used != v.size())
    throw std::invalid_argument(key + ": cannot parse '" + v + "' as a number");
  return out;
}

inline i64 parse_int(const std::string& key, const std::string& v) {
  size_t used = 0;
  i64 out;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": cannot parse '" + v + "' as an integer");
  }
  if (used != v.size())
    throw std::invalid_argument(key + ": cannot parse '" + v + "' as an integer");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + v + "'");
}

inline int parse_letter(const std::string& key, const std::string& v) {
  if (v == "x") return 1;
  if (v == "y") return 2;
  if (v == "z") return 3;
  return static_cast<int>(parse_int(key, v));
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& item : split_list(v))
    out.push_back(static_cast<int>(parse_int(key, item)));
  return out;
}

}

// Key-value sections, '#' and ';' comments, unknown keys rejected outright.
inline void apply_config_text(ExperimentConfig& c, std::istream& in,
                              const std::string& origin) {
  std::string line, section;
  int line_no = 0;
  bool saw_time_list = false, saw_time_grid = false;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument(where + ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const std::string full = section + "." + key;

    if (full == "chain.sites") c.chain.n_sites = static_cast<int>(detail::parse_int(full, value));
    else if (full == "chain.local_dim")
      c.chain.local_dim = static_cast<int>(detail::parse_int(full, value));
    else if (full == "model.jx") c.model.jx = detail::parse_double(full, value);
    else if (full == "model.jy") c.model.jy = detail::parse_double(full, value);
    else if (full == "model.jz") c.model.jz = detail::parse_double(full, value);
    else if (full == "model.hx") c.model.hx = detail::parse_double(full, value);
    else if (full == "model.hy") c.model.hy = detail::parse_double(full, value);
    else if (full == "model.hz") c.model.hz = detail::parse_double(full, value);
    else if (full == "observable.sites")
      c.observable_sites = detail::parse_int_list(full, value);
    else if (full == "observable.letters") {
      c.observable_letters.clear();
      for (const std::string& item : detail::split_list(value))
        c.observable_letters.push_back(detail::parse_letter(full, item));
    } else if (full == "times.list") {
      c.times.list.clear();
      for (const std::string& item : detail::split_list(value))
        c.times.list.push_back(detail::parse_double(full, item));
      saw_time_list = true;
    } else if (full == "times.start") {
      c.times.start = detail::parse_double(full, value);
      saw_time_grid = true;
    } else if (full == "times.stop") {
      c.times.stop = detail::parse_double(full, value);
      saw_time_grid = true;
    } else if (full == "times.count") {
      c.times.count = static_cast<int>(detail::parse_int(full, value));
      saw_time_grid = true;
    } else if (full == "ensemble.kind") {
      if (value == "haar_product") c.ensemble = EnsembleChoice::haar_product;
      else if (value == "pauli6") c.ensemble = EnsembleChoice::pauli6;
      else if (value == "clustered") c.ensemble = EnsembleChoice::clustered;
      else
        throw std::invalid_argument(
            full + ": expected haar_product, pauli6, or clustered, got '" + value + "'");
    } else if (full == "ensemble.block")
      c.cluster_block = static_cast<int>(detail::parse_int(full, value));
    else if (full == "run.samples") c.samples = detail::parse_int(full, value);
    else if (full == "run.trajectories")
      c.trajectories = static_cast<int>(detail::parse_int(full, value));
    else if (full == "run.seed")
      c.seed = static_cast<u64>(detail::parse_int(full, value));
    else if (full == "run.threads")
      c.threads = static_cast<int>(detail::parse_int(full, value));
    else if (full == "run.prep_error") c.prep_error = detail::parse_double(full, value);
    else if (full == "run.prep_reps")
      c.prep_reps = static_cast<int>(detail::parse_int(full, value));
    else if (full == "run.shots") c.shots = detail::parse_int(full, value);
    else if (full == "region.sites") c.region_sites = detail::parse_int_list(full, value);
    else if (full == "region.sampled") c.region_sampled = detail::parse_bool(full, value);
    else if (full == "otoc.w_site")
      c.w_site = static_cast<int>(detail::parse_int(full, value));
    else if (full == "otoc.w_letter") c.w_letter = detail::parse_letter(full, value);
    else if (full == "otoc.v_site")
      c.v_site = static_cast<int>(detail::parse_int(full, value));
    else if (full == "otoc.v_letter") c.v_letter = detail::parse_letter(full, value);
    else if (full == "otoc.t1") c.t1 = detail::parse_double(full, value);
    else
      throw std::invalid_argument(where + ": unknown key '" + full + "'");
  }
  if (saw_time_list && saw_time_grid)
    throw std::invalid_argument(origin +
                                ": give either times.list or times.start/stop/count, not both");
  if (saw_time_grid) c.times.list.clear();
}

inline void apply_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  apply_config_text(c, in, path);
}

}

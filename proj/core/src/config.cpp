#include "ipdd/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ipdd {

namespace {

struct Entry {
  std::string value;
  int line = 0;  // 0 = override or default
};

using EntryMap = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& where, int line, const std::string& msg) {
  if (line > 0)
    throw ConfigError(where + ":" + std::to_string(line) + ": " + msg);
  throw ConfigError(where + ": " + msg);
}

EntryMap parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  EntryMap entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(path.string(), line_no, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(path.string(), line_no, "empty key");
    entries[key] = Entry{trim(line.substr(eq + 1)), line_no};
  }
  return entries;
}

void apply_overrides(EntryMap& entries, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + item + "' is not of the form key=value");
    entries[trim(item.substr(0, eq))] = Entry{trim(item.substr(eq + 1)), 0};
  }
}

class Reader {
 public:
  Reader(EntryMap entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) {
    return entries_.find(key) != entries_.end();
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.line = consume(it);
    return it->second.value;
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return parse_int(it->second.value, key, consume(it));
  }

  double get_double(const std::string& key, double fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return parse_double(it->second.value, key, consume(it));
  }

  std::vector<std::string> get_list(const std::string& key,
                                    std::vector<std::string> fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const int line = consume(it);
    std::vector<std::string> items;
    std::stringstream ss(it->second.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) items.push_back(item);
    }
    if (items.empty()) fail(source_, line, "key '" + key + "' has an empty list");
    return items;
  }

  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const int line = it->second.line;
    std::vector<double> out;
    for (const auto& item : get_list(key, {}))
      out.push_back(parse_double(item, key, line));
    return out;
  }

  std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const int line = it->second.line;
    std::vector<int> out;
    for (const auto& item : get_list(key, {}))
      out.push_back(static_cast<int>(parse_int(item, key, line)));
    return out;
  }

  std::vector<std::uint64_t> get_seed_list(const std::string& key,
                                           std::vector<std::uint64_t> fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const int line = it->second.line;
    std::vector<std::uint64_t> out;
    for (const auto& item : get_list(key, {}))
      out.push_back(static_cast<std::uint64_t>(parse_int(item, key, line)));
    return out;
  }

  /// Every key must have been consumed by a getter.
  void reject_unknown() const {
    for (const auto& [key, entry] : entries_)
      if (!consumed_.count(key))
        fail(source_, entry.line, "unknown key '" + key + "'");
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) {
    auto it = entries_.find(key);
    fail(source_, it == entries_.end() ? 0 : it->second.line,
         "key '" + key + "': " + msg);
  }

 private:
  int consume(EntryMap::iterator it) {
    consumed_.insert(it->first);
    return it->second.line;
  }

  std::int64_t parse_int(const std::string& value, const std::string& key, int line) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE)
      fail(source_, line, "key '" + key + "': '" + value + "' is not an integer");
    return v;
  }

  double parse_double(const std::string& value, const std::string& key, int line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE)
      fail(source_, line, "key '" + key + "': '" + value + "' is not a number");
    return v;
  }

  EntryMap entries_;
  std::string source_;
  std::set<std::string> consumed_;
};

ExperimentConfig build_config(Reader& r) {
  ExperimentConfig cfg;

  cfg.dataset.kind = r.get_string("dataset.kind", cfg.dataset.kind);
  if (cfg.dataset.kind != "sine" && cfg.dataset.kind != "csv")
    r.fail_key("dataset.kind", "must be 'sine' or 'csv'");
  cfg.dataset.n = static_cast<int>(r.get_int("dataset.n", cfg.dataset.n));
  cfg.dataset.drift = r.get_string("dataset.drift", cfg.dataset.drift);
  cfg.dataset.drift_positions = r.get_int_list("dataset.drift_positions", {});
  cfg.dataset.transition_length =
      static_cast<int>(r.get_int("dataset.transition_length", cfg.dataset.transition_length));
  cfg.dataset.seed = static_cast<std::uint64_t>(r.get_int("dataset.seed", 7));
  cfg.dataset.csv_path = r.get_string("dataset.csv", "");
  cfg.dataset.label_column = r.get_string("dataset.label_column", cfg.dataset.label_column);
  cfg.dataset.class_count = static_cast<int>(r.get_int("dataset.class_count", 0));
  cfg.dataset.delimiter = r.get_string("dataset.delimiter", ",");
  if (cfg.dataset.delimiter.size() != 1)
    r.fail_key("dataset.delimiter", "must be a single character");
  if (cfg.dataset.kind == "csv" && cfg.dataset.csv_path.empty())
    r.fail_key("dataset.csv", "required when dataset.kind=csv");

  cfg.arch = r.get_string("arch", cfg.arch);
  cfg.delta = r.get_double("delta", cfg.delta);
  if (!(cfg.delta > 0.0)) r.fail_key("delta", "must be positive");
  cfg.adwin_delta = r.get_double("adwin.delta", cfg.adwin_delta);
  if (!(cfg.adwin_delta > 0.0 && cfg.adwin_delta < 1.0))
    r.fail_key("adwin.delta", "must lie in (0, 1)");

  cfg.m = static_cast<int>(r.get_int("ensemble.m", cfg.m));
  if (cfg.m < 1) r.fail_key("ensemble.m", "must be >= 1");
  cfg.subsample_size = static_cast<int>(r.get_int("ensemble.subsample_size", 0));
  cfg.k = static_cast<int>(r.get_int("ensemble.k", cfg.k));
  if (cfg.k < 1) r.fail_key("ensemble.k", "must be >= 1");
  cfg.init_seed_count = static_cast<int>(r.get_int("ensemble.init_seed_count", 1));
  if (cfg.init_seed_count < 1) r.fail_key("ensemble.init_seed_count", "must be >= 1");

  cfg.train.epochs = static_cast<int>(r.get_int("train.epochs", cfg.train.epochs));
  if (cfg.train.epochs < 1) r.fail_key("train.epochs", "must be >= 1");
  cfg.train.batch_size = static_cast<int>(r.get_int("train.batch", cfg.train.batch_size));
  if (cfg.train.batch_size < 1) r.fail_key("train.batch", "must be >= 1");
  cfg.train.learning_rate = r.get_double("train.lr", cfg.train.learning_rate);
  if (cfg.train.learning_rate < 0.0) r.fail_key("train.lr", "must be >= 0");

  cfg.init_frac = r.get_double("stream.init_frac", cfg.init_frac);
  cfg.chunk_frac = r.get_double("stream.chunk_frac", cfg.chunk_frac);
  if (!(cfg.init_frac > 0.0) || !(cfg.chunk_frac > 0.0) ||
      cfg.init_frac + cfg.chunk_frac > 1.0)
    r.fail_key("stream.init_frac", "fractions out of range");
  cfg.window_capacity = static_cast<int>(r.get_int("stream.window_capacity", 0));

  cfg.methods = r.get_list("methods", cfg.methods);
  cfg.dp_epsilons = r.get_double_list("dp.epsilons", cfg.dp_epsilons);
  for (const double eps : cfg.dp_epsilons)
    if (!(eps > 0.0)) r.fail_key("dp.epsilons", "epsilons must be positive");
  cfg.seeds = r.get_seed_list("seeds", cfg.seeds);

  cfg.theory.deltas = r.get_double_list("theory.deltas", cfg.theory.deltas);
  for (const double d : cfg.theory.deltas)
    if (!(d > 0.0)) r.fail_key("theory.deltas", "deltas must be positive");
  cfg.theory.ms = r.get_int_list("theory.ms", cfg.theory.ms);
  cfg.theory.init_counts = r.get_int_list("theory.init_counts", cfg.theory.init_counts);
  cfg.theory.trials = static_cast<int>(r.get_int("theory.trials", cfg.theory.trials));
  if (cfg.theory.trials < 1) r.fail_key("theory.trials", "must be >= 1");
  cfg.theory.pool_n = static_cast<int>(r.get_int("theory.pool_n", cfg.theory.pool_n));
  cfg.theory.subsample_size =
      static_cast<int>(r.get_int("theory.subsample_size", 0));

  r.reject_unknown();

  // Method tokens are validated eagerly so a bad token fails at load time.
  resolve_methods(cfg);
  resolve_architecture(cfg.arch, 4, 2);
  return cfg;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  EntryMap entries = parse_file(path);
  apply_overrides(entries, overrides);
  Reader reader(std::move(entries), path.string());
  return build_config(reader);
}

ExperimentConfig config_from_overrides(const std::vector<std::string>& overrides) {
  EntryMap entries;
  apply_overrides(entries, overrides);
  Reader reader(std::move(entries), "<overrides>");
  return build_config(reader);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& to_string) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += to_string(items[i]);
  }
  return out;
}

}  // namespace

std::vector<std::string> canonical_config_lines(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  auto add = [&](const std::string& key, const std::string& value) {
    lines.push_back(key + "=" + value);
  };
  add("adwin.delta", fmt(cfg.adwin_delta));
  add("arch", cfg.arch);
  add("dataset.class_count", std::to_string(cfg.dataset.class_count));
  add("dataset.csv", cfg.dataset.csv_path);
  add("dataset.delimiter", cfg.dataset.delimiter);
  add("dataset.drift", cfg.dataset.drift);
  add("dataset.drift_positions",
      join(cfg.dataset.drift_positions, [](int v) { return std::to_string(v); }));
  add("dataset.kind", cfg.dataset.kind);
  add("dataset.label_column", cfg.dataset.label_column);
  add("dataset.n", std::to_string(cfg.dataset.n));
  add("dataset.seed", std::to_string(cfg.dataset.seed));
  add("dataset.transition_length", std::to_string(cfg.dataset.transition_length));
  add("delta", fmt(cfg.delta));
  add("dp.epsilons", join(cfg.dp_epsilons, [](double v) { return fmt(v); }));
  add("ensemble.init_seed_count", std::to_string(cfg.init_seed_count));
  add("ensemble.k", std::to_string(cfg.k));
  add("ensemble.m", std::to_string(cfg.m));
  add("ensemble.subsample_size", std::to_string(cfg.subsample_size));
  add("methods", join(cfg.methods, [](const std::string& s) { return s; }));
  add("seeds", join(cfg.seeds, [](std::uint64_t v) { return std::to_string(v); }));
  add("stream.chunk_frac", fmt(cfg.chunk_frac));
  add("stream.init_frac", fmt(cfg.init_frac));
  add("stream.window_capacity", std::to_string(cfg.window_capacity));
  add("theory.deltas", join(cfg.theory.deltas, [](double v) { return fmt(v); }));
  add("theory.init_counts",
      join(cfg.theory.init_counts, [](int v) { return std::to_string(v); }));
  add("theory.ms", join(cfg.theory.ms, [](int v) { return std::to_string(v); }));
  add("theory.pool_n", std::to_string(cfg.theory.pool_n));
  add("theory.subsample_size", std::to_string(cfg.theory.subsample_size));
  add("theory.trials", std::to_string(cfg.theory.trials));
  add("train.batch", std::to_string(cfg.train.batch_size));
  add("train.epochs", std::to_string(cfg.train.epochs));
  add("train.lr", fmt(cfg.train.learning_rate));
  std::sort(lines.begin(), lines.end());
  return lines;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& line : canonical_config_lines(cfg)) {
    for (const char ch : line) {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Architecture resolve_architecture(const std::string& name, int input_dim,
                                  int num_classes) {
  Architecture arch;
  arch.input_dim = input_dim;
  arch.num_classes = num_classes;
  if (name == "ann") {
    arch.hidden_layers = {10};
    return arch;
  }
  if (name == "dnn") {
    arch.hidden_layers = {10, 20, 10};
    return arch;
  }
  // Explicit dashed hidden widths, e.g. "16-8".
  std::stringstream ss(name);
  std::string item;
  while (std::getline(ss, item, '-')) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || end != item.c_str() + item.size() || v < 1 || errno == ERANGE)
      throw ConfigError("arch '" + name + "' is not ann, dnn or dashed widths");
    arch.hidden_layers.push_back(static_cast<int>(v));
  }
  if (arch.hidden_layers.empty())
    throw ConfigError("arch '" + name + "' is not ann, dnn or dashed widths");
  return arch;
}

LabeledDataset make_dataset(const DatasetSpec& spec, double init_frac) {
  if (spec.kind == "sine") {
    DriftSpec drift;
    if (spec.drift == "none") {
      drift = DriftSpec::none();
    } else if (spec.drift == "abrupt") {
      drift.kind = DriftKind::abrupt;
    } else if (spec.drift == "gradual") {
      drift.kind = DriftKind::gradual;
    } else if (spec.drift == "incremental") {
      drift.kind = DriftKind::incremental;
    } else {
      throw ConfigError("dataset.drift '" + spec.drift + "' is unknown");
    }
    if (spec.drift != "none") drift.positions = spec.drift_positions;
    drift.transition_length = spec.transition_length;
    return gen_sine(spec.n, drift, spec.seed);
  }
  CsvSchema schema;
  schema.label_column = spec.label_column;
  schema.class_count = spec.class_count;
  schema.delimiter = spec.delimiter[0];
  schema.scale_prefix_frac = init_frac;
  return load_csv(spec.csv_path, schema);
}

std::vector<Method> resolve_methods(const ExperimentConfig& cfg) {
  std::vector<Method> out;
  for (const auto& token : cfg.methods) {
    if (token == "dp") {
      for (const double eps : cfg.dp_epsilons) out.push_back({MethodKind::dp, eps});
      continue;
    }
    try {
      out.push_back(Method::parse(token));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("methods: ") + e.what());
    }
  }
  if (out.empty()) throw ConfigError("methods: empty method list");
  return out;
}

StreamConfig make_stream_config(const ExperimentConfig& cfg, const LabeledDataset& ds,
                                std::uint64_t seed) {
  StreamConfig sc;
  sc.arch = resolve_architecture(cfg.arch, ds.cols(), ds.num_classes);
  sc.arch_name = cfg.arch;
  sc.train = cfg.train;
  sc.m = cfg.m;
  sc.subsample_size = cfg.subsample_size;
  sc.k = cfg.k;
  sc.delta = cfg.delta;
  sc.adwin_delta = cfg.adwin_delta;
  sc.init_frac = cfg.init_frac;
  sc.chunk_frac = cfg.chunk_frac;
  sc.window_capacity = cfg.window_capacity;
  sc.init_seed_count = cfg.init_seed_count;
  sc.seed = seed;
  return sc;
}

}  // namespace ipdd

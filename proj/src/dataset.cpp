#include "aigforge/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aigforge/aiger.hpp"
#include "aigforge/transforms.hpp"

namespace aigforge {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string hex16(uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("dataset: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void check_design_name(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("dataset: design has an empty name");
  for (const char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) throw std::invalid_argument("dataset: design name not file-safe: " + name);
  }
}

void check_designs(const std::vector<Aig>& designs) {
  std::vector<std::string> names;
  for (const Aig& design : designs) {
    check_design_name(design.name);
    names.push_back(design.name);
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end())
    throw std::invalid_argument("dataset: duplicate design name");
}

/*! \brief Resume key that stays total even for out-of-range tokens. */
std::string recipe_key(const Recipe& recipe) {
  try {
    return format_recipe(recipe);
  } catch (const std::exception&) {
    std::string key = "#ids";
    for (const Transform t : recipe) key += ':' + std::to_string(static_cast<int>(t));
    return key;
  }
}

bool ends_with_newline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in || in.tellg() == std::streampos(0)) return true;
  in.seekg(-1, std::ios::end);
  char last = '\n';
  in.get(last);
  return last == '\n';
}

/*! \brief Per-design record lists keyed by first-appearance order. */
struct Grouped {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const DatasetRecord*>> by_design;
};

Grouped group_records(const std::vector<DatasetRecord>& records) {
  Grouped g;
  for (const DatasetRecord& r : records) {
    auto [it, inserted] = g.by_design.try_emplace(r.design);
    if (inserted) g.order.push_back(r.design);
    it->second.push_back(&r);
  }
  return g;
}

}  // namespace

std::vector<Recipe> sample_recipes(uint32_t k, size_t l, uint64_t seed) {
  if (k < 1) throw std::invalid_argument("sample_recipes: k must be >= 1");
  if (l < 1) throw std::invalid_argument("sample_recipes: l must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> token(0, static_cast<int>(kNumTransforms) - 1);
  std::vector<Recipe> recipes(k);
  for (Recipe& recipe : recipes) {
    recipe.resize(l);
    for (Transform& t : recipe) t = transform_from_id(token(rng));
  }
  return recipes;
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t hash = 14695981039346656037ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string record_to_line(const DatasetRecord& record) {
  ordered_json j;
  j["design"] = record.design;
  j["recipe"] = format_recipe(record.recipe);
  j["raw_nodes"] = record.raw_nodes;
  j["raw_depth"] = record.raw_depth;
  j["label"] = record.label;
  j["wall_time"] = record.wall_time;
  return j.dump();
}

std::optional<DatasetRecord> record_from_line(const std::string& line) {
  const ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (!j.contains("design") || !j["design"].is_string()) return std::nullopt;
  if (!j.contains("recipe") || !j["recipe"].is_string()) return std::nullopt;
  if (!j.contains("raw_nodes") || !j["raw_nodes"].is_number_unsigned()) return std::nullopt;
  if (!j.contains("raw_depth") || !j["raw_depth"].is_number_unsigned()) return std::nullopt;
  if (!j.contains("label") || !j["label"].is_number()) return std::nullopt;
  if (!j.contains("wall_time") || !j["wall_time"].is_number()) return std::nullopt;
  DatasetRecord record;
  record.design = j["design"].get<std::string>();
  try {
    record.recipe = parse_recipe(j["recipe"].get<std::string>());
  } catch (const std::exception&) {
    return std::nullopt;
  }
  record.raw_nodes = j["raw_nodes"].get<uint64_t>();
  record.raw_depth = j["raw_depth"].get<uint32_t>();
  record.label = j["label"].get<double>();
  record.wall_time = j["wall_time"].get<double>();
  return record;
}

void init_store(const std::filesystem::path& root, const std::vector<Aig>& designs,
                const std::vector<Recipe>& recipes, const std::map<std::string, uint64_t>& seeds) {
  check_designs(designs);
  const DatasetPaths paths{root};
  std::filesystem::create_directories(paths.designs_dir());
  std::filesystem::create_directories(paths.records_dir());
  std::filesystem::create_directories(paths.recipes_file().parent_path());

  {
    std::ofstream out(paths.recipes_file());
    if (!out) throw std::runtime_error("dataset: cannot write " + paths.recipes_file().string());
    for (const Recipe& recipe : recipes) out << format_recipe(recipe) << '\n';
  }

  ordered_json manifest;
  manifest["version"] = 1;
  manifest["seeds"] = ordered_json::object();
  for (const auto& [key, value] : seeds) manifest["seeds"][key] = value;
  manifest["recipes"] = {{"file", "recipes/recipes.txt"},
                         {"count", recipes.size()},
                         {"hash", hex16(fnv1a64(slurp(paths.recipes_file())))}};
  manifest["designs"] = ordered_json::array();
  for (const Aig& design : designs) {
    write_aiger_file(design, paths.design_file(design.name).string());
    const AigStats s = stats(design);
    manifest["designs"].push_back({{"name", design.name},
                                   {"file", "designs/" + design.name + ".aag"},
                                   {"hash", hex16(fnv1a64(slurp(paths.design_file(design.name))))},
                                   {"nodes", s.nodes},
                                   {"depth", s.depth},
                                   {"pis", s.pis},
                                   {"pos", s.pos}});
  }
  std::ofstream out(paths.manifest_file());
  if (!out) throw std::runtime_error("dataset: cannot write " + paths.manifest_file().string());
  out << manifest.dump(2) << '\n';
}

bool verify_store(const std::filesystem::path& root, std::string* reason) {
  const DatasetPaths paths{root};
  const auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  if (!std::filesystem::exists(paths.manifest_file())) return fail("manifest missing");
  const ordered_json manifest = ordered_json::parse(slurp(paths.manifest_file()), nullptr, false);
  if (manifest.is_discarded()) return fail("manifest unreadable");
  const auto check_file = [&](const std::string& rel, const std::string& hash) {
    const std::filesystem::path path = root / rel;
    if (!std::filesystem::exists(path)) return fail("missing file " + rel);
    if (hex16(fnv1a64(slurp(path))) != hash) return fail("stale file " + rel);
    return true;
  };
  try {
    if (!check_file(manifest.at("recipes").at("file").get<std::string>(),
                    manifest.at("recipes").at("hash").get<std::string>()))
      return false;
    for (const ordered_json& entry : manifest.at("designs"))
      if (!check_file(entry.at("file").get<std::string>(), entry.at("hash").get<std::string>()))
        return false;
  } catch (const nlohmann::json::exception&) {
    return fail("manifest malformed");
  }
  return true;
}

std::vector<Recipe> read_recipes_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot read " + path.string());
  std::vector<Recipe> recipes;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) recipes.push_back(parse_recipe(line));
  return recipes;
}

std::vector<DatasetRecord> read_records(const std::filesystem::path& root,
                                        const std::string& design) {
  const DatasetPaths paths{root};
  std::ifstream in(paths.records_file(design));
  std::vector<DatasetRecord> records;
  if (!in) return records;
  std::string line;
  while (std::getline(in, line)) {
    std::optional<DatasetRecord> record = record_from_line(line);
    if (record && record->design == design) records.push_back(std::move(*record));
  }
  return records;
}

std::vector<DatasetRecord> generate_dataset(const std::vector<Aig>& designs,
                                            const std::vector<Recipe>& recipes,
                                            const GenerateOptions& options) {
  check_designs(designs);
  const size_t n_designs = designs.size();
  const size_t n_recipes = recipes.size();
  std::vector<uint64_t> unopt(n_designs);
  for (size_t d = 0; d < n_designs; ++d) {
    unopt[d] = stats(designs[d]).nodes;
    if (unopt[d] == 0)
      throw std::invalid_argument("dataset: design has no gates: " + designs[d].name);
  }

  const bool persist = !options.store.empty();
  const DatasetPaths paths{options.store};
  if (persist) std::filesystem::create_directories(paths.records_dir());

  std::vector<std::optional<DatasetRecord>> slots(n_designs * n_recipes);
  struct Job {
    uint32_t design;
    uint32_t recipe;
  };
  std::vector<Job> jobs;

  /*! Per-design writer: appends finished lines in recipe order only. */
  struct Shard {
    std::ofstream out;
    std::vector<uint32_t> order;
    size_t next{0};
    std::map<uint32_t, std::string> ready;
  };
  std::vector<Shard> shards(n_designs);

  for (uint32_t d = 0; d < n_designs; ++d) {
    std::map<std::string, std::vector<DatasetRecord>> recorded;
    if (persist)
      for (DatasetRecord& record : read_records(options.store, designs[d].name))
        recorded[recipe_key(record.recipe)].push_back(std::move(record));
    for (uint32_t r = 0; r < n_recipes; ++r) {
      auto it = recorded.find(recipe_key(recipes[r]));
      if (it != recorded.end() && !it->second.empty()) {
        slots[d * n_recipes + r] = std::move(it->second.front());
        it->second.erase(it->second.begin());
      } else {
        jobs.push_back({d, r});
        shards[d].order.push_back(r);
      }
    }
  }

  std::mutex mutex;
  uint64_t failures = 0;
  const auto run_job = [&](const Job job) {
    std::optional<DatasetRecord> record;
    std::string line;
    try {
      const SynthesisResult result = apply_recipe(designs[job.design], recipes[job.recipe]);
      const AigStats s = stats(result.final);
      DatasetRecord r;
      r.design = designs[job.design].name;
      r.recipe = recipes[job.recipe];
      r.raw_nodes = s.nodes;
      r.raw_depth = s.depth;
      r.label = static_cast<double>(s.nodes) / static_cast<double>(unopt[job.design]);
      r.wall_time = result.wall_time;
      line = record_to_line(r);
      record = std::move(r);
    } catch (const std::exception& ex) {
      ordered_json err;
      err["design"] = designs[job.design].name;
      err["recipe"] = recipe_key(recipes[job.recipe]);
      err["error"] = ex.what();
      line = err.dump();
    }

    const std::lock_guard<std::mutex> lock(mutex);
    if (record)
      slots[job.design * n_recipes + job.recipe] = std::move(record);
    else
      ++failures;
    if (persist) {
      Shard& shard = shards[job.design];
      shard.ready.emplace(job.recipe, std::move(line));
      while (shard.next < shard.order.size()) {
        const auto it = shard.ready.find(shard.order[shard.next]);
        if (it == shard.ready.end()) break;
        if (!shard.out.is_open()) {
          const std::filesystem::path file = paths.records_file(designs[job.design].name);
          const bool heal = std::filesystem::exists(file) && !ends_with_newline(file);
          shard.out.open(file, std::ios::app);
          if (!shard.out)
            throw std::runtime_error("dataset: cannot append records for " +
                                     designs[job.design].name);
          if (heal) shard.out << '\n';
        }
        shard.out << it->second << '\n' << std::flush;
        shard.ready.erase(it);
        ++shard.next;
      }
    }
  };

  const size_t workers =
      std::min<size_t>(std::max<uint32_t>(options.jobs, 1), std::max<size_t>(jobs.size(), 1));
  if (workers <= 1) {
    for (const Job job : jobs) run_job(job);
  } else {
    std::atomic<size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        try {
          for (size_t i = cursor.fetch_add(1); i < jobs.size(); i = cursor.fetch_add(1))
            run_job(jobs[i]);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  if (options.failures) *options.failures += failures;
  std::vector<DatasetRecord> out;
  out.reserve(slots.size());
  for (std::optional<DatasetRecord>& slot : slots)
    if (slot) out.push_back(std::move(*slot));
  return out;
}

std::vector<std::string> design_order(const std::vector<DatasetRecord>& records) {
  return group_records(records).order;
}

std::vector<std::vector<double>> top_k_commonality_matrix(
    const std::vector<DatasetRecord>& records, double k_percent) {
  if (!(k_percent > 0.0) || k_percent > 100.0)
    throw std::invalid_argument("commonality: k_percent must be in (0, 100]");
  const Grouped g = group_records(records);
  if (g.order.empty()) throw std::invalid_argument("commonality: no records");

  const std::vector<const DatasetRecord*>& head = g.by_design.at(g.order.front());
  std::vector<std::string> pool;
  for (const DatasetRecord* r : head) pool.push_back(format_recipe(r->recipe));
  {
    std::vector<std::string> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("commonality: duplicate recipe within a design");
  }
  for (const std::string& name : g.order) {
    const std::vector<const DatasetRecord*>& list = g.by_design.at(name);
    if (list.size() != pool.size())
      throw std::invalid_argument("commonality: recipe sets differ across designs");
    for (size_t i = 0; i < list.size(); ++i)
      if (format_recipe(list[i]->recipe) != pool[i])
        throw std::invalid_argument("commonality: recipe sets differ across designs");
  }

  const size_t n = pool.size();
  const size_t top = std::max<size_t>(1, static_cast<size_t>(std::floor(k_percent * static_cast<double>(n) / 100.0 + 1e-9)));
  std::vector<std::vector<bool>> membership;
  for (const std::string& name : g.order) {
    const std::vector<const DatasetRecord*>& list = g.by_design.at(name);
    std::vector<uint32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    std::sort(ids.begin(), ids.end(), [&](uint32_t a, uint32_t b) {
      if (list[a]->raw_nodes != list[b]->raw_nodes) return list[a]->raw_nodes < list[b]->raw_nodes;
      return a < b;
    });
    std::vector<bool> in_top(n, false);
    for (size_t i = 0; i < top; ++i) in_top[ids[i]] = true;
    membership.push_back(std::move(in_top));
  }

  const size_t d = g.order.size();
  std::vector<std::vector<double>> matrix(d, std::vector<double>(d, 0.0));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      size_t shared = 0;
      for (size_t r = 0; r < n; ++r)
        if (membership[i][r] && membership[j][r]) ++shared;
      matrix[i][j] = static_cast<double>(shared) / static_cast<double>(top);
    }
  return matrix;
}

DatasetSplit make_split(const std::vector<DatasetRecord>& records, const SplitSpec& spec) {
  const Grouped g = group_records(records);
  const auto require_known = [&](const std::string& name) {
    if (!g.by_design.count(name))
      throw std::invalid_argument("split: unknown design " + name);
  };
  for (const std::string& name : spec.train_designs) require_known(name);
  for (const std::string& name : spec.held_out_designs) {
    require_known(name);
    if (std::find(spec.train_designs.begin(), spec.train_designs.end(), name) !=
        spec.train_designs.end())
      throw std::invalid_argument("split: design listed in both pools: " + name);
  }
  for (const auto& [name, pool] : spec.candidate_pools) {
    (void)pool;
    if (std::find(spec.held_out_designs.begin(), spec.held_out_designs.end(), name) ==
        spec.held_out_designs.end())
      throw std::invalid_argument("split: candidate pool for non-held-out design " + name);
  }

  DatasetSplit split;
  for (const std::string& name : spec.train_designs)
    for (const DatasetRecord* record : g.by_design.at(name)) split.train.push_back(*record);

  std::mt19937_64 rng(spec.seed);
  for (const std::string& name : spec.held_out_designs) {
    const std::vector<const DatasetRecord*>& list = g.by_design.at(name);
    const uint32_t n = static_cast<uint32_t>(list.size());
    std::vector<uint32_t> candidate_ids;
    const auto pool_it = spec.candidate_pools.find(name);
    if (pool_it != spec.candidate_pools.end()) {
      candidate_ids = pool_it->second;
      std::sort(candidate_ids.begin(), candidate_ids.end());
      if (std::adjacent_find(candidate_ids.begin(), candidate_ids.end()) != candidate_ids.end())
        throw std::invalid_argument("split: duplicate candidate id for " + name);
      if (!candidate_ids.empty() && candidate_ids.back() >= n)
        throw std::invalid_argument("split: candidate id out of range for " + name);
    } else if (spec.candidate_count > 0) {
      if (spec.candidate_count > n)
        throw std::invalid_argument("split: candidate count exceeds pool for " + name);
      std::vector<uint32_t> ids(n);
      std::iota(ids.begin(), ids.end(), 0u);
      for (uint32_t i = 0; i < spec.candidate_count; ++i) {
        std::uniform_int_distribution<uint32_t> pick(i, n - 1);
        std::swap(ids[i], ids[pick(rng)]);
      }
      candidate_ids.assign(ids.begin(), ids.begin() + spec.candidate_count);
      std::sort(candidate_ids.begin(), candidate_ids.end());
    } else {
      candidate_ids.resize(n);
      std::iota(candidate_ids.begin(), candidate_ids.end(), 0u);
    }

    HeldOutPools pools;
    pools.design = name;
    std::vector<bool> is_candidate(n, false);
    for (const uint32_t id : candidate_ids) is_candidate[id] = true;
    for (uint32_t id = 0; id < n; ++id) {
      if (is_candidate[id])
        pools.candidates.push_back(*list[id]);
      else
        pools.evaluation.push_back(*list[id]);
    }
    split.held_out.push_back(std::move(pools));
  }
  return split;
}

}  // namespace aigforge

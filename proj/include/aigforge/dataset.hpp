/*!
  \file dataset.hpp
  \brief Corpus generation: recipe sampling, synthesis records, stores, splits
*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aigforge/aig.hpp"
#include "aigforge/recipe.hpp"

namespace aigforge {

/*! \brief One synthesized (design, recipe) pair with a normalized label.
 *
 * label == raw_nodes / unoptimized nodes of the design, so the label times
 * the unoptimized count recovers raw_nodes. Node discipline keeps it in
 * (0, 1]; values above 1 are recorded faithfully, never clamped.
 */
struct DatasetRecord {
  std::string design;
  Recipe recipe;
  uint64_t raw_nodes{0};
  uint32_t raw_depth{0};
  double label{0.0};
  double wall_time{0.0};
};

/*! \brief K length-L recipes with i.i.d. uniform tokens; deterministic per seed. */
std::vector<Recipe> sample_recipes(uint32_t k, size_t l, uint64_t seed);

/*! \brief FNV-1a 64-bit hash; stale-data detection, not cryptographic. */
uint64_t fnv1a64(std::string_view bytes);

/*! \brief Renders one record as a single JSON line; wall_time is the last field. */
std::string record_to_line(const DatasetRecord& record);

/*! \brief Parses one record line; nullopt for torn, malformed, or error lines. */
std::optional<DatasetRecord> record_from_line(const std::string& line);

/*! \brief File layout inside a dataset store directory. */
struct DatasetPaths {
  std::filesystem::path root;

  std::filesystem::path designs_dir() const { return root / "designs"; }
  std::filesystem::path records_dir() const { return root / "records"; }
  std::filesystem::path design_file(const std::string& name) const {
    return designs_dir() / (name + ".aag");
  }
  std::filesystem::path records_file(const std::string& name) const {
    return records_dir() / (name + ".jsonl");
  }
  std::filesystem::path recipes_file() const { return root / "recipes" / "recipes.txt"; }
  std::filesystem::path manifest_file() const { return root / "manifest"; }
};

/*! \brief Writes designs, the recipe pool, and a byte-deterministic manifest.
 *
 * Design names become file names and must be unique, non-empty, and limited
 * to [A-Za-z0-9._-]. The manifest lists the caller's seeds plus an FNV-1a
 * hash and size statistics per design file, so later runs can detect stale
 * or edited inputs.
 */
void init_store(const std::filesystem::path& root, const std::vector<Aig>& designs,
                const std::vector<Recipe>& recipes, const std::map<std::string, uint64_t>& seeds);

/*! \brief Re-hashes store files against the manifest; false sets the reason. */
bool verify_store(const std::filesystem::path& root, std::string* reason = nullptr);

/*! \brief Reads the recipe pool, one recipe per line. */
std::vector<Recipe> read_recipes_file(const std::filesystem::path& path);

/*! \brief Parses a design's record shard, skipping torn and error lines. */
std::vector<DatasetRecord> read_records(const std::filesystem::path& root,
                                        const std::string& design);

struct GenerateOptions {
  /*! \brief Store root for persistence and resume; empty runs in memory. */
  std::filesystem::path store;
  uint32_t jobs{1};
  /*! \brief When set, incremented once per failed (design, recipe) pair. */
  uint64_t* failures{nullptr};
};

/*! \brief Runs every (design, recipe) pair and records stats plus labels.
 *
 * Returns records ordered by (design, recipe) input position. With a store,
 * records append to records/<design>.jsonl in recipe order and pairs already
 * recorded there are not re-run, so an interrupted generation resumes to the
 * identical record set. Independent pairs run on `jobs` worker threads; each
 * shard has a single writer. A pair failure is appended as an error line and
 * counted, never fatal, and is retried on the next run.
 */
std::vector<DatasetRecord> generate_dataset(const std::vector<Aig>& designs,
                                            const std::vector<Recipe>& recipes,
                                            const GenerateOptions& options = {});

/*! \brief Design names in record order (first appearance). */
std::vector<std::string> design_order(const std::vector<DatasetRecord>& records);

/*! \brief Symmetric design-by-design overlap of top-k% recipe sets.
 *
 * Entry (i, j) is |top(i) intersect top(j)| / |top(i)| where top sets hold
 * the max(1, floor(k% of N)) recipes with the lowest raw_nodes, ties broken
 * by recipe id (position in the shared pool). Every design must carry the
 * same recipe sequence.
 */
std::vector<std::vector<double>> top_k_commonality_matrix(
    const std::vector<DatasetRecord>& records, double k_percent);

/*! \brief Design-level split plus per-held-out-design recipe pools.
 *
 * Held-out designs never reach zero-shot training. Within a held-out design
 * the recipe pool splits into budget candidates and evaluation recipes:
 * an explicit candidate_pools entry wins; otherwise candidate_count > 0
 * samples that many candidates with the seed; otherwise every recipe stays
 * a candidate and the evaluation pool is materialized downstream as the
 * complement of the selected budget.
 */
struct SplitSpec {
  std::vector<std::string> train_designs;
  std::vector<std::string> held_out_designs;
  std::map<std::string, std::vector<uint32_t>> candidate_pools;
  uint32_t candidate_count{0};
  uint64_t seed{0};
};

struct HeldOutPools {
  std::string design;
  std::vector<DatasetRecord> candidates;
  std::vector<DatasetRecord> evaluation;
};

struct DatasetSplit {
  std::vector<DatasetRecord> train;
  std::vector<HeldOutPools> held_out;
};

/*! \brief Partitions records per the spec; throws on overlap or unknown names. */
DatasetSplit make_split(const std::vector<DatasetRecord>& records, const SplitSpec& spec);

}  // namespace aigforge

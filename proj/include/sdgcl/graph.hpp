#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace sdgcl {

using Index = Eigen::Index;
using Rng = std::mt19937_64;

struct EdgeRecord {
  Index src = 0;
  Index dst = 0;
  int sign = 1;  // +1 or -1

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// Directed graph with at most one sign per ordered node pair and no self-loops.
class SignedDiGraph {
 public:
  SignedDiGraph() = default;

  /// Validates and builds. Same-sign duplicates collapse to the first occurrence;
  /// a pair carrying both signs, a self-loop or an out-of-range id throws InputError.
  static SignedDiGraph from_edges(Index num_nodes, std::span<const EdgeRecord> edges);

  Index num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t num_positive() const noexcept { return num_positive_; }
  std::size_t num_negative() const noexcept { return edges_.size() - num_positive_; }

  /// Edges in insertion order.
  const std::vector<EdgeRecord>& edges() const noexcept { return edges_; }
  std::vector<EdgeRecord> positive_edges() const;
  std::vector<EdgeRecord> negative_edges() const;

  /// Sign of the directed edge u->v, if present.
  std::optional<int> sign_of(Index u, Index v) const;
  bool has_edge(Index u, Index v) const { return sign_of(u, v).has_value(); }

  friend bool operator==(const SignedDiGraph& a, const SignedDiGraph& b);

 private:
  static std::uint64_t key(Index u, Index v) noexcept {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
  }

  Index num_nodes_ = 0;
  std::size_t num_positive_ = 0;
  std::vector<EdgeRecord> edges_;
  std::unordered_map<std::uint64_t, int> lookup_;
};

/// Same as SignedDiGraph::from_edges.
SignedDiGraph graph_from_edges(Index num_nodes, std::span<const EdgeRecord> edges);

enum class EdgeListFormat { ThreeColumn, SnapRating };

EdgeListFormat parse_format(const std::string& name);
std::string format_name(EdgeListFormat format);

struct LoadedGraph {
  SignedDiGraph graph;
  /// original_ids[dense] is the identifier as written in the file.
  std::vector<std::string> original_ids;
  std::size_t dropped_self_loops = 0;
};

LoadedGraph load_edge_list(const std::filesystem::path& path, EdgeListFormat format);

struct DataSplit {
  std::vector<EdgeRecord> train;
  std::vector<EdgeRecord> valid;
  std::vector<EdgeRecord> test;
  std::uint64_t seed = 0;
};

/// Uniform 60/20/20 edge split (train = round(0.6 n), valid = round(0.2 n), test = rest).
DataSplit split_edges(const SignedDiGraph& g, std::uint64_t seed);

/// All negative edges plus min(ratio * #neg, #pos) positives drawn without replacement.
std::vector<EdgeRecord> sample_training_edges(std::span<const EdgeRecord> train, double ratio,
                                              std::uint64_t seed);

void write_edges(const std::filesystem::path& path, std::span<const EdgeRecord> edges);
std::vector<EdgeRecord> read_edges(const std::filesystem::path& path);

/// Prepared dataset directory: train/valid/test edge files, node map and split.json sidecar.
struct PreparedData {
  Index num_nodes = 0;
  DataSplit split;
  std::vector<std::string> original_ids;
  std::size_t dropped_self_loops = 0;  // from the raw file; not stored on disk
};

void write_prepared(const std::filesystem::path& dir, const PreparedData& data);
PreparedData read_prepared(const std::filesystem::path& dir);

}  // namespace sdgcl

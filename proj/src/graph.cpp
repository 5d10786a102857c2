#include "sdgcl/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sdgcl/error.hpp"

namespace sdgcl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

SignedDiGraph SignedDiGraph::from_edges(Index num_nodes, std::span<const EdgeRecord> edges) {
  if (num_nodes < 0) throw InputError("negative node count");
  SignedDiGraph g;
  g.num_nodes_ = num_nodes;
  g.edges_.reserve(edges.size());
  g.lookup_.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.src < 0 || e.dst < 0 || e.src >= num_nodes || e.dst >= num_nodes) {
      throw InputError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                       ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    if (e.src == e.dst) throw InputError("self-loop on node " + std::to_string(e.src));
    if (e.sign != 1 && e.sign != -1) throw InputError("edge sign must be +1 or -1");
    const auto [it, inserted] = g.lookup_.emplace(key(e.src, e.dst), e.sign);
    if (!inserted) {
      if (it->second != e.sign) {
        throw InputError("conflicting signs on edge (" + std::to_string(e.src) + "," +
                         std::to_string(e.dst) + ")");
      }
      continue;
    }
    g.edges_.push_back(e);
    if (e.sign > 0) ++g.num_positive_;
  }
  return g;
}

std::vector<EdgeRecord> SignedDiGraph::positive_edges() const {
  std::vector<EdgeRecord> out;
  std::copy_if(edges_.begin(), edges_.end(), std::back_inserter(out),
               [](const EdgeRecord& e) { return e.sign > 0; });
  return out;
}

std::vector<EdgeRecord> SignedDiGraph::negative_edges() const {
  std::vector<EdgeRecord> out;
  std::copy_if(edges_.begin(), edges_.end(), std::back_inserter(out),
               [](const EdgeRecord& e) { return e.sign < 0; });
  return out;
}

std::optional<int> SignedDiGraph::sign_of(Index u, Index v) const {
  if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_) return std::nullopt;
  const auto it = lookup_.find(key(u, v));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const SignedDiGraph& a, const SignedDiGraph& b) {
  if (a.num_nodes_ != b.num_nodes_ || a.edges_.size() != b.edges_.size()) return false;
  for (const auto& e : a.edges_) {
    if (b.sign_of(e.src, e.dst) != e.sign) return false;
  }
  return true;
}

SignedDiGraph graph_from_edges(Index num_nodes, std::span<const EdgeRecord> edges) {
  return SignedDiGraph::from_edges(num_nodes, edges);
}

EdgeListFormat parse_format(const std::string& name) {
  if (name == "three-column") return EdgeListFormat::ThreeColumn;
  if (name == "snap-rating") return EdgeListFormat::SnapRating;
  throw InputError("unknown edge-list format '" + name + "' (expected three-column or snap-rating)");
}

std::string format_name(EdgeListFormat format) {
  return format == EdgeListFormat::ThreeColumn ? "three-column" : "snap-rating";
}

LoadedGraph load_edge_list(const std::filesystem::path& path, EdgeListFormat format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());

  LoadedGraph out;
  std::unordered_map<std::string, Index> ids;
  const auto intern = [&](std::string_view token) {
    const auto [it, inserted] = ids.emplace(std::string(token), static_cast<Index>(ids.size()));
    if (inserted) out.original_ids.emplace_back(token);
    return it->second;
  };

  std::vector<EdgeRecord> edges;
  std::unordered_map<std::uint64_t, int> seen;
  std::string line;
  std::size_t line_no = 0;
  const auto where = path.string();
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;

    std::string_view src_tok, dst_tok;
    int sign = 0;
    if (format == EdgeListFormat::ThreeColumn) {
      const auto fields = split_whitespace(text);
      if (fields.size() != 3) throw ParseError(where, line_no, "expected 'src dst sign'");
      const auto s = parse_number<int>(fields[2]);
      if (!s || (*s != 1 && *s != -1)) throw ParseError(where, line_no, "sign must be 1 or -1");
      src_tok = fields[0];
      dst_tok = fields[1];
      sign = *s;
    } else {
      const auto fields = split_commas(text);
      if (fields.size() != 3 && fields.size() != 4) {
        throw ParseError(where, line_no, "expected 'src,dst,rating[,time]'");
      }
      const auto rating = parse_number<double>(fields[2]);
      if (!rating || !std::isfinite(*rating)) throw ParseError(where, line_no, "bad rating");
      if (*rating == 0.0) throw ParseError(where, line_no, "rating 0 has no sign");
      src_tok = fields[0];
      dst_tok = fields[1];
      sign = *rating > 0 ? 1 : -1;
    }
    if (src_tok.empty() || dst_tok.empty()) throw ParseError(where, line_no, "empty node id");
    if (src_tok == dst_tok) {
      ++out.dropped_self_loops;
      continue;
    }
    const Index u = intern(src_tok);
    const Index v = intern(dst_tok);
    const auto k = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
    const auto [it, inserted] = seen.emplace(k, sign);
    if (!inserted) {
      if (it->second != sign) throw ParseError(where, line_no, "conflicting sign on duplicate edge");
      continue;
    }
    edges.push_back({u, v, sign});
  }
  out.graph = SignedDiGraph::from_edges(static_cast<Index>(out.original_ids.size()), edges);
  return out;
}

DataSplit split_edges(const SignedDiGraph& g, std::uint64_t seed) {
  const auto n = g.num_edges();
  if (n < 5) throw InputError("need at least 5 edges to split, got " + std::to_string(n));
  const auto n_train = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(n)));
  const auto n_valid = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
  if (n_train == 0 || n_valid == 0 || n_train + n_valid >= n) {
    throw InputError("too few edges for three non-empty splits");
  }

  std::vector<EdgeRecord> edges = g.edges();
  Rng rng(seed);
  std::shuffle(edges.begin(), edges.end(), rng);

  DataSplit split;
  split.seed = seed;
  split.train.assign(edges.begin(), edges.begin() + n_train);
  split.valid.assign(edges.begin() + n_train, edges.begin() + n_train + n_valid);
  split.test.assign(edges.begin() + n_train + n_valid, edges.end());
  return split;
}

std::vector<EdgeRecord> sample_training_edges(std::span<const EdgeRecord> train, double ratio,
                                              std::uint64_t seed) {
  if (!(ratio >= 0.0)) throw InputError("sampling ratio must be non-negative");
  std::vector<EdgeRecord> out;
  std::vector<EdgeRecord> positives;
  for (const auto& e : train) (e.sign > 0 ? positives : out).push_back(e);
  if (out.empty()) throw InputError("training edges contain no negative edge");

  const auto wanted = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(out.size())));
  const auto take = std::min(wanted, positives.size());
  // partial Fisher-Yates
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, positives.size() - 1);
    std::swap(positives[i], positives[pick(rng)]);
  }
  out.insert(out.end(), positives.begin(), positives.begin() + take);
  return out;
}

void write_edges(const std::filesystem::path& path, std::span<const EdgeRecord> edges) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& e : edges) out << e.src << ' ' << e.dst << ' ' << e.sign << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<EdgeRecord> read_edges(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<EdgeRecord> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split_whitespace(text);
    const auto u = fields.size() == 3 ? parse_number<Index>(fields[0]) : std::nullopt;
    const auto v = fields.size() == 3 ? parse_number<Index>(fields[1]) : std::nullopt;
    const auto s = fields.size() == 3 ? parse_number<int>(fields[2]) : std::nullopt;
    if (!u || !v || !s || (*s != 1 && *s != -1)) {
      throw ParseError(path.string(), line_no, "expected 'src dst sign' with dense integer ids");
    }
    edges.push_back({*u, *v, *s});
  }
  return edges;
}

void write_prepared(const std::filesystem::path& dir, const PreparedData& data) {
  std::filesystem::create_directories(dir);
  write_edges(dir / "train.tsv", data.split.train);
  write_edges(dir / "valid.tsv", data.split.valid);
  write_edges(dir / "test.tsv", data.split.test);
  {
    std::ofstream nodes(dir / "nodes.tsv");
    if (!nodes) throw InputError("cannot write " + (dir / "nodes.tsv").string());
    for (std::size_t i = 0; i < data.original_ids.size(); ++i) {
      nodes << i << '\t' << data.original_ids[i] << '\n';
    }
  }
  nlohmann::ordered_json sidecar;
  sidecar["seed"] = data.split.seed;
  sidecar["num_nodes"] = data.num_nodes;
  sidecar["counts"] = {{"train", data.split.train.size()},
                       {"valid", data.split.valid.size()},
                       {"test", data.split.test.size()}};
  std::ofstream out(dir / "split.json");
  if (!out) throw InputError("cannot write " + (dir / "split.json").string());
  out << sidecar.dump(2) << '\n';
}

PreparedData read_prepared(const std::filesystem::path& dir) {
  const auto sidecar_path = dir / "split.json";
  std::ifstream in(sidecar_path);
  if (!in) throw InputError("not a prepared dataset directory (missing " + sidecar_path.string() + ")");
  nlohmann::json sidecar;
  try {
    in >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(sidecar_path.string() + ": " + e.what());
  }

  PreparedData data;
  try {
    data.num_nodes = sidecar.at("num_nodes").get<Index>();
    data.split.seed = sidecar.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(sidecar_path.string() + ": " + e.what());
  }
  data.split.train = read_edges(dir / "train.tsv");
  data.split.valid = read_edges(dir / "valid.tsv");
  data.split.test = read_edges(dir / "test.tsv");

  const auto counts = sidecar.value("counts", nlohmann::json::object());
  const auto check = [&](const char* name, std::size_t actual) {
    if (counts.contains(name) && counts[name].get<std::size_t>() != actual) {
      throw InputError(std::string("split.json count mismatch for ") + name);
    }
  };
  check("train", data.split.train.size());
  check("valid", data.split.valid.size());
  check("test", data.split.test.size());

  std::ifstream nodes(dir / "nodes.tsv");
  std::string line;
  while (nodes && std::getline(nodes, line)) {
    const auto tab = line.find('\t');
    if (tab != std::string::npos) data.original_ids.push_back(line.substr(tab + 1));
  }
  // validates indices and sign consistency across the three files
  std::vector<EdgeRecord> all;
  all.reserve(data.split.train.size() + data.split.valid.size() + data.split.test.size());
  for (const auto* part : {&data.split.train, &data.split.valid, &data.split.test}) {
    all.insert(all.end(), part->begin(), part->end());
  }
  (void)SignedDiGraph::from_edges(data.num_nodes, all);
  return data;
}

}  // namespace sdgcl

#pragma once

// Ingestion of RST parse trees and PDTB connective records, and the
// per-sentence discourse features derived from them: depth, nuclearity,
// governing relation, connective senses and positions.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "simpdel/error.hpp"

namespace simpdel {

enum class Nuclearity { Nucleus, Satellite };

enum class Relation { Root, Elaboration, Contrast, Background, Evaluation, Explanation, OtherRel };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::Root: return "root";
    case Relation::Elaboration: return "elaboration";
    case Relation::Contrast: return "contrast";
    case Relation::Background: return "background";
    case Relation::Evaluation: return "evaluation";
    case Relation::Explanation: return "explanation";
    case Relation::OtherRel: return "other";
  }
  return "?";
}

// Parser label variants are matched case-insensitively on prefixes
// ("Elaboration-additional" -> Elaboration).
inline Relation classify_relation(const std::string& label) {
  std::string lower;
  for (char c : label)
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  auto has_prefix = [&](const char* p) { return lower.rfind(p, 0) == 0; };
  if (has_prefix("elaboration")) return Relation::Elaboration;
  if (has_prefix("contrast")) return Relation::Contrast;
  if (has_prefix("background")) return Relation::Background;
  if (has_prefix("evaluation")) return Relation::Evaluation;
  if (has_prefix("explanation")) return Relation::Explanation;
  return Relation::OtherRel;
}

enum class ConnectiveSense { Contingency, Comparison, Expansion, Temporal };

inline const char* to_string(ConnectiveSense s) {
  switch (s) {
    case ConnectiveSense::Contingency: return "contingency";
    case ConnectiveSense::Comparison: return "comparison";
    case ConnectiveSense::Expansion: return "expansion";
    case ConnectiveSense::Temporal: return "temporal";
  }
  return "?";
}

// Fine-grained PDTB senses collapse to their top-level class by prefix;
// anything outside the four classes is rejected.
inline std::optional<ConnectiveSense> parse_sense(const std::string& s) {
  std::string head = s.substr(0, s.find('.'));
  std::string lower;
  for (char c : head)
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "contingency") return ConnectiveSense::Contingency;
  if (lower == "comparison") return ConnectiveSense::Comparison;
  if (lower == "expansion") return ConnectiveSense::Expansion;
  if (lower == "temporal") return ConnectiveSense::Temporal;
  return std::nullopt;
}

struct RstTree {
  struct Node {
    int id = 0;
    std::string relation;                 // empty for leaves
    std::vector<int> children;            // node ids
    std::vector<Nuclearity> child_nuc;    // parallel to children
    std::optional<int> leaf_sentence;     // set for leaves
    int parent = -1;
    int pos_in_parent = -1;

    bool is_leaf() const { return children.empty(); }
  };

  std::vector<Node> nodes;  // node 0 is the root

  const Node& root() const { return nodes.at(0); }

  int depth_of(int node_id) const {
    int d = 0;
    for (int cur = node_id; nodes[cur].parent != -1; cur = nodes[cur].parent) ++d;
    return d;
  }

  std::vector<int> leaves_of_sentence(int sentence_index) const {
    std::vector<int> out;
    for (const auto& n : nodes)
      if (n.is_leaf() && n.leaf_sentence && *n.leaf_sentence == sentence_index)
        out.push_back(n.id);
    return out;
  }

  int leaf_count() const {
    int c = 0;
    for (const auto& n : nodes)
      if (n.is_leaf()) ++c;
    return c;
  }

  std::set<int> sentence_indices() const {
    std::set<int> out;
    for (const auto& n : nodes)
      if (n.is_leaf() && n.leaf_sentence) out.insert(*n.leaf_sentence);
    return out;
  }
};

struct SentenceDiscourse {
  int depth = 0;
  bool is_nucleus = true;
  Relation governing_relation = Relation::Root;
  bool has_connective = false;
  std::set<ConnectiveSense> senses;
  std::optional<bool> connective_sent_initial;  // present iff has_connective
};

struct ConnectiveRecord {
  std::string connective_text;
  ConnectiveSense sense = ConnectiveSense::Expansion;
  int token_offset = 0;
};

using ConnectiveMap = std::map<std::pair<std::string, int>, std::vector<ConnectiveRecord>>;

namespace detail {

inline int build_rst_node(RstTree& tree, const nlohmann::json& j, int parent, int pos,
                          const std::string& article_id) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[id].id = id;
  tree.nodes[id].parent = parent;
  tree.nodes[id].pos_in_parent = pos;

  if (j.contains("leaf") && j["leaf"].is_boolean() && j["leaf"].get<bool>()) {
    if (!j.contains("sentence") || !j["sentence"].is_number_integer())
      fail("rst: article \"", article_id, "\": leaf node ", id, " without sentence index");
    tree.nodes[id].leaf_sentence = j["sentence"].get<int>();
    return id;
  }

  if (!j.contains("relation") || !j.contains("children") || !j.contains("nuclearity"))
    fail("rst: article \"", article_id, "\": node ", id,
         " must be a leaf or carry relation/children/nuclearity");
  tree.nodes[id].relation = j["relation"].get<std::string>();
  const auto& children = j["children"];
  const auto& nuc = j["nuclearity"];
  if (!children.is_array() || children.size() < 2)
    fail("rst: article \"", article_id, "\": node ", id, " needs at least 2 children");
  if (!nuc.is_array() || nuc.size() != children.size())
    fail("rst: article \"", article_id, "\": node ", id,
         " nuclearity entries do not match children");
  int nucleus_count = 0;
  std::vector<Nuclearity> child_nuc;
  for (const auto& tag : nuc) {
    const std::string t = tag.get<std::string>();
    if (t == "N") {
      child_nuc.push_back(Nuclearity::Nucleus);
      ++nucleus_count;
    } else if (t == "S") {
      child_nuc.push_back(Nuclearity::Satellite);
    } else {
      fail("rst: article \"", article_id, "\": node ", id, " has nuclearity tag \"", t,
           "\" (want N or S)");
    }
  }
  if (nucleus_count == 0)
    fail("rst: article \"", article_id, "\": node ", id, " has no Nucleus child");
  tree.nodes[id].child_nuc = std::move(child_nuc);
  int child_pos = 0;
  for (const auto& cj : children) {
    const int cid = build_rst_node(tree, cj, id, child_pos, article_id);
    tree.nodes[id].children.push_back(cid);
    ++child_pos;
  }
  return id;
}

inline nlohmann::json rst_node_to_json(const RstTree& tree, int node_id) {
  const auto& n = tree.nodes[node_id];
  if (n.is_leaf()) return {{"leaf", true}, {"sentence", *n.leaf_sentence}};
  nlohmann::json children = nlohmann::json::array();
  for (int cid : n.children) children.push_back(rst_node_to_json(tree, cid));
  nlohmann::json nuc = nlohmann::json::array();
  for (Nuclearity x : n.child_nuc) nuc.push_back(x == Nuclearity::Nucleus ? "N" : "S");
  return {{"relation", n.relation}, {"children", std::move(children)},
          {"nuclearity", std::move(nuc)}};
}

}  // namespace detail

inline RstTree parse_rst_tree(const nlohmann::json& root, const std::string& article_id) {
  RstTree tree;
  detail::build_rst_node(tree, root, -1, -1, article_id);
  return tree;
}

// RST file: one JSON object per line, {"id": str, "root": node}.
inline std::map<std::string, RstTree> load_rst(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("rst: cannot open ", path);
  std::map<std::string, RstTree> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("rst: line ", line_no, ": malformed JSON: ", e.what());
    }
    const std::string id = j.at("id").get<std::string>();
    if (out.count(id)) fail("rst: line ", line_no, ": duplicate article id \"", id, "\"");
    out.emplace(id, parse_rst_tree(j.at("root"), id));
  }
  return out;
}

inline nlohmann::json to_json(const std::string& id, const RstTree& tree) {
  return {{"id", id}, {"root", detail::rst_node_to_json(tree, 0)}};
}

inline void save_rst(const std::map<std::string, RstTree>& trees, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("rst: cannot write ", path);
  for (const auto& [id, tree] : trees) out << to_json(id, tree).dump() << "\n";
}

// The node standing in for a sentence: the lowest common ancestor of its
// leaves. When a single node spans exactly the sentence's leaves that node is
// the LCA itself, so the two cases of the depth definition coincide.
inline int sentence_node(const RstTree& tree, int sentence_index) {
  const auto leaves = tree.leaves_of_sentence(sentence_index);
  if (leaves.empty()) fail("rst: sentence index ", sentence_index, " not in tree");
  std::vector<std::vector<int>> paths;
  for (int leaf : leaves) {
    std::vector<int> path;
    for (int cur = leaf; cur != -1; cur = tree.nodes[cur].parent) path.push_back(cur);
    std::reverse(path.begin(), path.end());
    paths.push_back(std::move(path));
  }
  size_t common = 0;
  while (true) {
    if (common >= paths[0].size()) break;
    const int candidate = paths[0][common];
    bool all = true;
    for (const auto& p : paths)
      if (common >= p.size() || p[common] != candidate) all = false;
    if (!all) break;
    ++common;
  }
  return paths[0][common - 1];
}

inline int sentence_depth(const RstTree& tree, int sentence_index) {
  return tree.depth_of(sentence_node(tree, sentence_index));
}

// Walk from the sentence's node toward the root; the first ascent out of a
// Satellite position names the governing relation. All-Nucleus paths govern
// as Root.
inline Relation governing_relation(const RstTree& tree, int sentence_index) {
  int cur = sentence_node(tree, sentence_index);
  while (tree.nodes[cur].parent != -1) {
    const auto& parent = tree.nodes[tree.nodes[cur].parent];
    if (parent.child_nuc[tree.nodes[cur].pos_in_parent] == Nuclearity::Satellite)
      return classify_relation(parent.relation);
    cur = parent.id;
  }
  return Relation::Root;
}

inline Nuclearity nuclearity(const RstTree& tree, int sentence_index) {
  const int node = sentence_node(tree, sentence_index);
  if (tree.nodes[node].parent == -1) return Nuclearity::Nucleus;  // root convention
  const auto& parent = tree.nodes[tree.nodes[node].parent];
  return parent.child_nuc[tree.nodes[node].pos_in_parent];
}

// Connectives file: JSONL {"id", "sentence", "connective", "sense", "offset"}.
inline ConnectiveMap load_connectives(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("connectives: cannot open ", path);
  ConnectiveMap out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("connectives: line ", line_no, ": malformed JSON: ", e.what());
    }
    const std::string sense_str = j.at("sense").get<std::string>();
    auto sense = parse_sense(sense_str);
    if (!sense)
      fail("connectives: line ", line_no, ": unknown sense \"", sense_str, "\"");
    ConnectiveRecord rec;
    rec.connective_text = j.value("connective", std::string());
    rec.sense = *sense;
    rec.token_offset = j.at("offset").get<int>();
    out[{j.at("id").get<std::string>(), j.at("sentence").get<int>()}].push_back(std::move(rec));
  }
  return out;
}

inline void save_connectives(const ConnectiveMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("connectives: cannot write ", path);
  for (const auto& [key, records] : map) {
    for (const auto& r : records) {
      nlohmann::json j = {{"id", key.first},
                          {"sentence", key.second},
                          {"connective", r.connective_text},
                          {"sense", to_string(r.sense)},
                          {"offset", r.token_offset}};
      out << j.dump() << "\n";
    }
  }
}

struct ConnectiveFeatures {
  bool has_connective = false;
  std::set<ConnectiveSense> senses;
  std::optional<bool> sent_initial;
};

inline ConnectiveFeatures connective_features(const std::vector<ConnectiveRecord>& records) {
  ConnectiveFeatures f;
  if (records.empty()) return f;
  f.has_connective = true;
  bool initial = false;
  for (const auto& r : records) {
    f.senses.insert(r.sense);
    if (r.token_offset == 0) initial = true;
  }
  f.sent_initial = initial;
  return f;
}

}  // namespace simpdel

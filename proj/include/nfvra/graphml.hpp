#pragma once

// GraphML topology ingestion. Nodes are indexed in file order; numeric
// <data> values become per-element attributes keyed by the <key attr.name>.

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "nfvra/errors.hpp"
#include "nfvra/topology.hpp"

namespace nfvra {

namespace detail {

inline std::optional<double> parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline std::shared_ptr<Topology> parse_graphml(std::istream& in, const std::string& origin) {
  namespace pt = boost::property_tree;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw FormatError(origin + ": empty file");

  pt::ptree tree;
  try {
    std::istringstream src(text);
    pt::read_xml(src, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw FormatError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  auto root = tree.get_child_optional("graphml");
  if (!root) throw FormatError(origin + ": missing <graphml> root element");

  // key id -> (domain, attr.name)
  std::map<std::string, std::pair<std::string, std::string>> keys;
  for (const auto& [tag, child] : *root) {
    if (tag != "key") continue;
    const auto id = child.get<std::string>("<xmlattr>.id", "");
    const auto domain = child.get<std::string>("<xmlattr>.for", "all");
    const auto name =
        child.get<std::string>(boost::property_tree::ptree::path_type("<xmlattr>/attr.name", '/'), id);
    if (id.empty()) throw FormatError(origin + ": <key> without id");
    keys[id] = {domain, name};
  }

  auto graph = root->get_child_optional("graph");
  if (!graph) throw FormatError(origin + ": missing <graph> element");

  std::unordered_map<std::string, NodeId> ids;
  std::map<std::string, std::vector<double>> node_attrs;
  std::vector<std::pair<std::string, std::string>> raw_edges;
  std::vector<std::map<std::string, double>> edge_data;
  std::size_t node_index = 0, edge_index = 0;
  const double missing = std::numeric_limits<double>::quiet_NaN();

  for (const auto& [tag, child] : *graph) {
    if (tag == "node") {
      const auto id = child.get<std::string>("<xmlattr>.id", "");
      const std::string where = origin + ": <node> #" + std::to_string(node_index);
      if (id.empty()) throw FormatError(where + " has no id");
      if (!ids.emplace(id, NodeId(node_index)).second)
        throw FormatError(where + " duplicates id '" + id + "'");
      for (const auto& [dtag, data] : child) {
        if (dtag != "data") continue;
        const auto key = data.get<std::string>("<xmlattr>.key", "");
        auto it = keys.find(key);
        const std::string name = it == keys.end() ? key : it->second.second;
        if (auto value = detail::parse_number(data.get_value<std::string>())) {
          auto& column = node_attrs[name];
          column.resize(node_index + 1, missing);
          column[node_index] = *value;
        }
      }
      ++node_index;
    } else if (tag == "edge") {
      const auto s = child.get<std::string>("<xmlattr>.source", "");
      const auto t = child.get<std::string>("<xmlattr>.target", "");
      if (s.empty() || t.empty())
        throw FormatError(origin + ": <edge> #" + std::to_string(edge_index) +
                          " needs source and target");
      raw_edges.emplace_back(s, t);
      std::map<std::string, double> values;
      for (const auto& [dtag, data] : child) {
        if (dtag != "data") continue;
        const auto key = data.get<std::string>("<xmlattr>.key", "");
        auto it = keys.find(key);
        const std::string name = it == keys.end() ? key : it->second.second;
        if (auto value = detail::parse_number(data.get_value<std::string>())) values[name] = *value;
      }
      edge_data.push_back(std::move(values));
      ++edge_index;
    }
  }
  if (node_index == 0) throw FormatError(origin + ": graph has no nodes");

  std::vector<Link> links;
  links.reserve(raw_edges.size());
  for (std::size_t i = 0; i < raw_edges.size(); ++i) {
    const auto& [s, t] = raw_edges[i];
    auto si = ids.find(s), ti = ids.find(t);
    if (si == ids.end() || ti == ids.end())
      throw FormatError(origin + ": <edge> #" + std::to_string(i) + " references unknown node '" +
                        (si == ids.end() ? s : t) + "'");
    links.push_back({si->second, ti->second});
  }

  std::shared_ptr<Topology> topo;
  try {
    topo = std::make_shared<Topology>(node_index, links);
  } catch (const ValidationError& e) {
    throw FormatError(origin + ": " + e.what());
  }
  for (auto& [name, column] : node_attrs) {
    column.resize(node_index, missing);
    topo->set_node_attribute(name, column);
  }
  std::map<std::string, std::vector<double>> link_attrs;
  for (std::size_t i = 0; i < edge_data.size(); ++i)
    for (const auto& [name, value] : edge_data[i]) {
      auto& column = link_attrs[name];
      column.resize(edge_data.size(), missing);
      column[i] = value;
    }
  for (auto& [name, column] : link_attrs) topo->set_link_attribute(name, column);

  if (!topo->connected()) throw ValidationError(origin + ": topology is disconnected");
  return topo;
}

inline std::shared_ptr<Topology> load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open file");
  return parse_graphml(in, path);
}

}  // namespace nfvra

#include "virtblow/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "virtblow/errors.hpp"

namespace vb {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(path, "expected a table");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) fail(path, "unknown key '" + key + "'");
  }
}

YAML::Node required(const YAML::Node& node, const std::string& path, const std::string& key) {
  YAML::Node child = node[key];
  if (!child) fail(path, "missing key '" + key + "'");
  return child;
}

long long as_integer(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected an integer");
  try {
    return node.as<long long>();
  } catch (const YAML::Exception&) {
    fail(path, "expected an integer, got '" + node.Scalar() + "'");
  }
}

Rational as_rational(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected a rational");
  try {
    return parse_rational(node.Scalar());
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

template <class Fn>
auto as_list(const YAML::Node& node, const std::string& path, Fn&& item) {
  if (!node.IsSequence()) fail(path, "expected a list");
  std::vector<decltype(item(node, path))> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(item(node[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

SurfaceData parse_surface(const YAML::Node& node) {
  const std::string path = "surface";
  check_keys(node, path, {"chi_O", "K2", "basic_classes", "gram"});
  SurfaceData s;
  s.chi_O = as_integer(required(node, path, "chi_O"), path + ".chi_O");
  s.K2 = as_integer(required(node, path, "K2"), path + ".K2");
  s.classes = as_list(required(node, path, "basic_classes"), path + ".basic_classes",
                      [](const YAML::Node& c, const std::string& p) {
                        check_keys(c, p, {"sw", "pair_K", "self_sq", "role"});
                        BasicClass b;
                        b.sw = as_integer(required(c, p, "sw"), p + ".sw");
                        b.pair_K = as_integer(required(c, p, "pair_K"), p + ".pair_K");
                        b.self_sq = as_integer(required(c, p, "self_sq"), p + ".self_sq");
                        if (c["role"]) b.role = parse_class_role(c["role"].as<std::string>());
                        return b;
                      });
  s.gram = as_list(required(node, path, "gram"), path + ".gram", [](const YAML::Node& row, const std::string& p) {
    return as_list(row, p, as_integer);
  });
  s.validate();
  return s;
}

Setup parse_setup(const YAML::Node& node) {
  const std::string path = "setup";
  check_keys(node, path, {"rho", "c1_pair", "c1_sq", "c1_K", "L", "alpha", "u"});
  Setup st;
  if (node["rho"]) st.rho = static_cast<int>(as_integer(node["rho"], path + ".rho"));
  if (node["c1_pair"]) st.c1_pair = as_list(node["c1_pair"], path + ".c1_pair", as_integer);
  if (node["c1_sq"]) st.c1_sq = as_integer(node["c1_sq"], path + ".c1_sq");
  if (node["c1_K"]) st.c1_K = as_integer(node["c1_K"], path + ".c1_K");
  if (node["u"]) st.point_weight = as_rational(node["u"], path + ".u");
  if (const auto line_node = node["L"]) {
    const std::string p = path + ".L";
    check_keys(line_node, p, {"L2", "LK", "L_a", "chi_L"});
    if (line_node["L2"]) st.line.L2 = as_rational(line_node["L2"], p + ".L2");
    if (line_node["LK"]) st.line.LK = as_rational(line_node["LK"], p + ".LK");
    if (line_node["L_a"]) st.line.L_a = as_list(line_node["L_a"], p + ".L_a", as_rational);
    if (line_node["chi_L"]) st.line.chi_L = as_integer(line_node["chi_L"], p + ".chi_L");
  }
  if (const auto a = node["alpha"]) {
    const std::string p = path + ".alpha";
    check_keys(a, p, {"s", "c1a_sq", "c1a_K", "c1a_L", "c1a_a", "c2a"});
    if (a["s"]) st.alpha.rank = static_cast<int>(as_integer(a["s"], p + ".s"));
    if (a["c1a_sq"]) st.alpha.c1a_sq = as_rational(a["c1a_sq"], p + ".c1a_sq");
    if (a["c1a_K"]) st.alpha.c1a_K = as_rational(a["c1a_K"], p + ".c1a_K");
    if (a["c1a_L"]) st.alpha.c1a_L = as_rational(a["c1a_L"], p + ".c1a_L");
    if (a["c1a_a"]) st.alpha.c1a_a = as_list(a["c1a_a"], p + ".c1a_a", as_rational);
    if (a["c2a"]) st.alpha.c2a = as_rational(a["c2a"], p + ".c2a");
  }
  return st;
}

}  // namespace

SurfaceConfig parse_surface_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  check_keys(root, "config", {"surface", "setup"});
  SurfaceConfig cfg;
  cfg.surface = parse_surface(required(root, "config", "surface"));
  if (root["setup"]) {
    cfg.setup = parse_setup(root["setup"]);
    cfg.setup->validate(cfg.surface);
  }
  return cfg;
}

SurfaceConfig load_surface_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_surface_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace vb

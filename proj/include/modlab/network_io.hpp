#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "modlab/error.hpp"
#include "modlab/plane_network.hpp"

namespace modlab {

using Json = nlohmann::json;

inline Json toJson(const PlaneNetwork& net) {
  Json vs = Json::array();
  for (const Vertex& v : net.vertices()) vs.push_back({{"id", v.id}, {"x", v.position.x}, {"y", v.position.y}});
  Json es = Json::array();
  for (const Edge& e : net.edges()) {
    Json j{{"id", e.id}, {"u", e.u}, {"v", e.v}, {"sigma", e.sigma}};
    if (e.bend) j["bend"] = {e.bend->x, e.bend->y};
    es.push_back(std::move(j));
  }
  return Json{{"vertices", std::move(vs)},
              {"edges", std::move(es)},
              {"A", net.boundaryA()},
              {"B", net.boundaryB()},
              {"boundary", net.outerBoundary()}};
}

inline PlaneNetwork networkFromJson(const Json& j) {
  try {
    std::vector<Vertex> vs;
    for (const auto& v : j.at("vertices"))
      vs.push_back({v.at("id").get<VertexId>(), {v.at("x").get<double>(), v.at("y").get<double>()}});
    std::vector<Edge> es;
    for (const auto& e : j.at("edges")) {
      Edge ed{e.at("id").get<EdgeId>(), e.at("u").get<VertexId>(), e.at("v").get<VertexId>(),
              e.at("sigma").get<double>(), std::nullopt};
      if (e.contains("bend")) {
        const auto& b = e.at("bend");
        if (!b.is_array() || b.size() != 2) throw ParseError("edge bend must be [x, y]");
        ed.bend = Point{b[0].get<double>(), b[1].get<double>()};
      }
      es.push_back(ed);
    }
    auto ids = [&](const char* key) { return j.at(key).get<std::vector<VertexId>>(); };
    return PlaneNetwork(std::move(vs), std::move(es), ids("A"), ids("B"), ids("boundary"));
  } catch (const Json::exception& ex) {
    throw ParseError(std::string("network json: ") + ex.what());
  }
}

inline Json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& ex) {
    throw ParseError(path + ": " + ex.what());
  }
}

inline void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

inline std::string dumpJson(const Json& j) { return j.dump(1) + "\n"; }

}  // namespace modlab

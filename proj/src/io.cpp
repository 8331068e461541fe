#include "diamond/io.hpp"

#include <fstream>

#include "diamond/error.hpp"

namespace diamond::io {

namespace {

void expect_format(const Json& j, const char* format) {
  if (!j.is_object() || !j.contains("format") || j["format"] != format) {
    throw FormatError(std::string("expected a ") + format + " document");
  }
}

// Wraps nlohmann's type errors so that callers see a FormatError.
template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

FuncSpec spec_field(const Json& j, const char* key) {
  try {
    return FuncSpec::parse(field<std::string>(j, key));
  } catch (const ParseError& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json encode_bits(const BitString& s) {
  if (s.size() <= kMaxTextNode) return s.str();
  Json j = Json::object();
  j["size"] = s.size();
  j["ones"] = std::vector<std::uint64_t>(s.ones().begin(), s.ones().end());
  return j;
}

BitString decode_bits(const Json& j) {
  try {
    if (j.is_string()) return BitString::parse(j.get<std::string>());
    return BitString(field<std::uint64_t>(j, "size"), field<std::vector<std::uint64_t>>(j, "ones"));
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("bad bit-string: ") + e.what());
  }
}

Json encode_levels(const LevelMap& levels) {
  Json out = Json::array();
  for (const Level& level : levels.levels()) {
    Json nodes = Json::array();
    for (const BitString& s : level.nodes) nodes.push_back(encode_bits(s));
    out.push_back(Json{{"index", level.index}, {"nodes", std::move(nodes)}});
  }
  return out;
}

LevelMap decode_levels(const Json& j) {
  if (!j.is_array()) throw FormatError("levels must be an array");
  std::map<std::uint64_t, std::vector<BitString>> raw;
  for (const Json& level : j) {
    const auto index = field<std::uint64_t>(level, "index");
    const Json& nodes = level.at("nodes");
    if (!nodes.is_array()) throw FormatError("level nodes must be an array");
    auto& slot = raw[index];
    for (const Json& node : nodes) slot.push_back(decode_bits(node));
  }
  return LevelMap(std::move(raw));
}

Json tree_to_json(const PseudoTree& tree) {
  Json j;
  j["format"] = "diamond.tree";
  j["pi"] = tree.pi().str();
  j["f"] = tree.f().str();
  j["horizon"] = tree.horizon();
  j["stage_marks"] = std::vector<std::uint64_t>(tree.stage_marks().begin(), tree.stage_marks().end());
  j["levels"] = encode_levels(tree.levels());
  return j;
}

PseudoTree tree_from_json(const Json& j) {
  expect_format(j, "diamond.tree");
  return PseudoTree(spec_field(j, "pi"), spec_field(j, "f"), field<std::uint64_t>(j, "horizon"),
                    decode_levels(j.at("levels")), field<std::vector<std::uint64_t>>(j, "stage_marks"));
}

Json structure_to_json(const GuessingStructure& g) {
  Json j;
  j["format"] = "diamond.structure";
  j["pi"] = g.pi().str();
  j["f"] = g.f().str();
  j["horizon"] = g.horizon();
  j["levels"] = encode_levels(g.levels());
  return j;
}

GuessingStructure structure_from_json(const Json& j) {
  expect_format(j, "diamond.structure");
  return GuessingStructure(spec_field(j, "pi"), spec_field(j, "f"), field<std::uint64_t>(j, "horizon"),
                           decode_levels(j.at("levels")));
}

Json stage_to_json(const StageLog& log) {
  Json j;
  j["stage"] = log.stage;
  j["odd"] = log.odd;
  j["mark_begin"] = log.mark_begin;
  j["mark_end"] = log.mark_end;
  j["maximal_before"] = Json::array();
  for (const BitString& s : log.maximal_before) j["maximal_before"].push_back(encode_bits(s));
  j["added"] = Json::array();
  for (const TreeNode& n : log.added) j["added"].push_back(Json{{"level", n.level}, {"bits", encode_bits(n.bits)}});
  j["allocation"] = Json::array();
  for (const StageAllocation& a : log.allocation) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < 32; ++i) {
      if ((a.members >> i) & 1U) members.push_back(i);
    }
    j["allocation"].push_back(Json{{"members", members}, {"level", a.level}, {"exact", a.exact}});
  }
  j["maximal_after"] = Json::array();
  for (const TreeNode& n : log.maximal_after) {
    j["maximal_after"].push_back(Json{{"level", n.level}, {"bits", encode_bits(n.bits)}});
  }
  j["fallback_used"] = log.fallback_used;
  return j;
}

Json base_to_json(const FilterBase& base) {
  Json j;
  j["format"] = "diamond.base";
  j["horizon"] = base.horizon();
  j["generators"] = Json::array();
  for (const NamedWindow& g : base.generators()) {
    j["generators"].push_back(Json{{"name", g.name}, {"hex", g.window.to_hex()}});
  }
  return j;
}

FilterBase base_from_json(const Json& j) {
  expect_format(j, "diamond.base");
  const auto horizon = field<std::uint64_t>(j, "horizon");
  FilterBase base(horizon);
  for (const Json& g : j.at("generators")) {
    try {
      base.add(field<std::string>(g, "name"), SetWindow::from_hex(field<std::string>(g, "hex"), horizon));
    } catch (const PreconditionError& e) {
      throw FormatError(std::string("bad generator: ") + e.what());
    }
  }
  return base;
}

Json fip_to_json(const FipReport& report) {
  Json j;
  j["arity"] = report.arity;
  j["subfamilies"] = report.entries.size();
  j["passed"] = report.passed();
  if (auto failure = report.first_failure()) {
    j["first_failure"] = failure->members;
  } else {
    j["first_failure"] = nullptr;
  }
  Json entries = Json::array();
  for (const FipEntry& e : report.entries) {
    entries.push_back(Json{{"members", e.members},
                           {"witness", e.witness ? Json(*e.witness) : Json(nullptr)}});
  }
  j["entries"] = std::move(entries);
  return j;
}

Json certificate_to_json(const DiagonalCertificate& cert) {
  Json j;
  j["format"] = "diamond.certificate";
  j["horizon"] = cert.b.horizon();
  j["b"] = cert.b.members();
  j["chosen"] = Json::array();
  for (const auto& [n, x] : cert.chosen) j["chosen"].push_back(Json{{"level", n}, {"bits", encode_bits(x)}});
  j["pairs"] = Json::array();
  for (const PairCheck& p : cert.pairs) {
    j["pairs"].push_back(Json{{"c1", p.c1}, {"c2", p.c2}, {"position", p.position}});
  }
  j["verified"] = cert.verified;
  return j;
}

Json partition_to_json(const FinitePartition& p) {
  Json j;
  j["format"] = "diamond.partition";
  j["boundaries"] = std::vector<std::uint64_t>(p.boundaries().begin(), p.boundaries().end());
  return j;
}

FinitePartition partition_from_json(const Json& j) {
  expect_format(j, "diamond.partition");
  try {
    return FinitePartition(field<std::vector<std::uint64_t>>(j, "boundaries"));
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("bad partition: ") + e.what());
  }
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump() << '\n';
}

}  // namespace diamond::io

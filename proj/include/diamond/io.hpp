#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "diamond/bits.hpp"
#include "diamond/diagonal.hpp"
#include "diamond/filter_lab.hpp"
#include "diamond/guessing.hpp"
#include "diamond/pseudo_tree.hpp"
#include "diamond/selector.hpp"

namespace diamond::io {

using Json = nlohmann::ordered_json;

/// Strings up to this length are written as '0'/'1' text, longer ones as
/// {"size": n, "ones": [...]}.
inline constexpr std::uint64_t kMaxTextNode = 256;

Json encode_bits(const BitString& s);
BitString decode_bits(const Json& j);

Json encode_levels(const LevelMap& levels);
LevelMap decode_levels(const Json& j);

Json tree_to_json(const PseudoTree& tree);
PseudoTree tree_from_json(const Json& j);

Json structure_to_json(const GuessingStructure& g);
GuessingStructure structure_from_json(const Json& j);

/// One stage-log record, written one per line.
Json stage_to_json(const StageLog& log);

Json base_to_json(const FilterBase& base);
FilterBase base_from_json(const Json& j);

Json fip_to_json(const FipReport& report);

Json certificate_to_json(const DiagonalCertificate& cert);

Json partition_to_json(const FinitePartition& p);
FinitePartition partition_from_json(const Json& j);

/// Throws FormatError when the file is missing or not JSON.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace diamond::io

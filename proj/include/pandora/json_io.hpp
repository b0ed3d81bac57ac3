#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pandora/exact.hpp"
#include "pandora/instance.hpp"
#include "pandora/policies.hpp"
#include "pandora/ptas.hpp"

namespace pandora {

using Json = nlohmann::ordered_json;

/// {"boxes": [{"cost": "1/8", "support": [["0", "1/2"], ["1", "1/2"]]}, ...]}
/// Parsing checks shape only; call validate_instance for the invariants.
/// Throws ParseError naming the offending box.
PnoiInstance instance_from_json(const Json& j);
Json instance_to_json(const PnoiInstance& inst);

PnoiInstance load_instance(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// "quit", "take-unopened:i", "open:i" with 1-based i. `quit_name` lets the
/// SSDP export say "end".
std::string action_to_string(const Action& a, const char* quit_name = "quit");

/// Boxes as 1-based indices.
Json box_set_to_json(BoxSet s, std::size_t n);

Json value_table_to_json(const ValueTable& table);

/// {"sigma": [1-based], "thresholds": ["scalar" | "never", ...]}
Json structured_policy_to_json(const StructuredPolicy& pol);
StructuredPolicy structured_policy_from_json(const Json& j);

Json ssdp_policy_to_json(const SsdpPolicy& pol);

/// {"steps": [{"action": "open:1", "value": "1", "cost": "1/8"}, ...], "payoff": "..."}
Json trace_to_json(const PolicyTrace& trace);

}  // namespace pandora

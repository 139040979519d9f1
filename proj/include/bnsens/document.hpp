#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bnsens/model.hpp"

namespace bnsens {

/// A network as read from, or written to, the canonical text format
/// (grammar in docs/network-format.md).
struct NetworkDocument {
  std::string name;
  BayesianNetwork network;
};

/// Throws ParseError (with line/column) on syntax errors and on semantic
/// errors: unknown or repeated names, wrong row length, duplicate or missing
/// rows, rows not summing to 1 within 1e-9, cycles.
NetworkDocument parse_document(std::string_view text);
BayesianNetwork parse_network(std::string_view text);

/// Canonical form: declaration order, rows in canonical instantiation order,
/// shortest round-trip number formatting.
std::string serialize_network(const BayesianNetwork& net, std::string_view name = {});

NetworkDocument load_network_file(const std::filesystem::path& path);

}  // namespace bnsens

// SPDX-License-Identifier: Apache-2.0
//
// JSON documents for the matrix-valued inputs and outputs of the CLI.
//
// A matrix is {"rows": r, "cols": c, "data": [[re, im], ...]} with r * c pairs in
// row-major order. Map documents declare m and n and one encoding:
//   "choi"        : "choi" is the mn x mn Choi matrix,
//   "unit-action" : "units" lists phi(E_ij) in row-major unit order,
//   "kraus"       : "kraus" lists n x m operators K_r, optional "weights".
#pragma once

#include <string>

#include "json.hpp"
#include "posmap/choi.hpp"

namespace posmap::cli {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const ComplexMatrix& a);
Json vector_to_json(const ComplexVector& v);
/// `path` names the location in diagnostics, e.g. "/units/3".
ComplexMatrix matrix_from_json(const Json& j, const std::string& path);
ComplexVector vector_from_json(const Json& j, const std::string& path);

/// Parses text; throws Error(ParseError) with the byte offset on malformed JSON.
Json parse_document(const std::string& text, const std::string& source);
Json read_document(const std::string& file);

struct MapDocument {
  int m = 0;
  int n = 0;
  std::string encoding;
  std::string name;
  LinearMapRep map;
};

/// Validates declared dimensions against every matrix (DimensionMismatch with the
/// offending path) and builds the map.
MapDocument map_from_document(const Json& doc);
Json map_document(const LinearMapRep& phi, const std::string& name);

/// Accepts either a bare matrix document or {"rho": matrix}.
ComplexMatrix state_from_document(const Json& doc, const std::string& key = "rho");

/// FNV-1a 64-bit digest of the compact serialization, as "fnv1a64:<16 hex digits>".
std::string digest(const Json& doc);

}  // namespace posmap::cli

#pragma once

#include <string>

#include "opbmo/symbol.hpp"

namespace opbmo {

/// Reads a symbol file ({"schema":"opbmo-symbol/1", ...}). Violations raise
/// IoError with a JSON-pointer-style location ("/coeffs/3/matrix").
HaarSymbol read_symbol_json(const std::string& path);

/// Writes the symbol in the same schema; round-trips bit-exactly for any
/// double-precision values.
void write_symbol_json(const std::string& path, const HaarSymbol& B);

std::string symbol_to_json(const HaarSymbol& B);
HaarSymbol symbol_from_json(const std::string& text, const std::string& origin = "<string>");

/// Binary matrix dump: 32-byte header (magic "OPBMOMAT", version, rows, cols
/// as little-endian u32, zero padding), then column-major little-endian
/// float64 re/im pairs.
void write_matrix_dump(const std::string& path, const Mat& M);
Mat read_matrix_dump(const std::string& path);

}  // namespace opbmo

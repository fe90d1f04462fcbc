#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "wscond/descriptor.hpp"
#include "wscond/urelation.hpp"
#include "wscond/world_table.hpp"

namespace wscond {

// Locale-independent shortest round-trip decimal form.
std::string format_double(double x);
// Fixed-point with `digits` decimals ("0.757800000000" for digits = 12).
std::string format_fixed(double x, int digits = 12);
double parse_double(std::string_view s);

// World table CSV: header `var,value,prob`, one row per (variable, value).
// Rows of one variable may be interleaved with others; variables get ids in
// order of first appearance.
WorldTable parse_world_table(std::string_view csv);
std::string serialize(const WorldTable& w);

// Descriptor text form `{x=1;y=2}`, the empty descriptor is `{}`.
WsDescriptor parse_descriptor(std::string_view text, const WorldTable& w);
std::string serialize(const WsDescriptor& d, const WorldTable& w);

// One descriptor per line; blank lines and lines starting with '#' are skipped.
WsSet parse_wsset(std::string_view text, const WorldTable& w);
std::string serialize(const WsSet& s, const WorldTable& w);

// U-relation CSV: header `wsd,<col1>,...,<colk>`. Unquoted fields that parse
// as integers are integers; everything else (and every quoted field) is a string.
URelation parse_urelation(std::string_view csv, const WorldTable& w);
std::string serialize(const URelation& u, const WorldTable& w);

// Database directory: `world.csv` plus `<name>.csv` per relation.
ProbabilisticDatabase read_database(const std::filesystem::path& dir);
void write_database(const ProbabilisticDatabase& db, const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view contents);

// S-expression evidence queries:
//   query := (scan R) | (select Q PRED) | (project (COL...) Q)
//          | (join Q Q PRED) | (union Q Q)
//   top   := query | (not query)
//   PRED  := true | false | (and PRED...) | (or PRED...) | (not PRED)
//          | (OP TERM TERM) with OP in = != < <= > >=
//   TERM  := integer | "string" | column-name
// Join output columns are prefixed `1.` (left) and `2.` (right).
BooleanQuery parse_boolean_query(std::string_view text);

}  // namespace wscond

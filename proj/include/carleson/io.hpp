#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleson/critical.hpp"
#include "carleson/discretize.hpp"
#include "carleson/estimate.hpp"
#include "carleson/forest.hpp"
#include "carleson/partition.hpp"

namespace carleson {

using json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// git describe of the source tree at build time.
std::string build_id();

// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

// {"k","m"}
json to_json(const DyadicInterval& I);
DyadicInterval dyadic_from_json(const json& j);
// {"lo","hi"}
json to_json(const RealInterval& I);
RealInterval real_from_json(const json& j);
json to_json(const DyadicUnion& A);
DyadicUnion dyadic_union_from_json(const json& j);
json to_json(const IntervalUnion& A);
IntervalUnion interval_union_from_json(const json& j);
json to_json(const CountingFunction& c);
CountingFunction counting_from_json(const json& j);
// {"coeffs":[...]}
json to_json(const Poly& q);
Poly poly_from_json(const json& j);
// {"I":{"k","m"},"alpha":[...]}
json to_json(const Tile& P);
Tile tile_from_json(const json& j);

// Header {K, count} as int32 and uint64, then interleaved float64 re, im.
void write_grid_binary(std::ostream& os, const GridFunction& f);
GridFunction read_grid_binary(std::istream& is);
// x, re, im
void write_grid_csv(std::ostream& os, const GridFunction& f);
GridFunction read_grid_csv(std::istream& is);

// x, a_1 .. a_d
void write_choice_csv(std::ostream& os, const ChoiceFunction& c);
ChoiceFunction read_choice_csv(std::istream& is);

// Tiles with A0 and mass, then generations with per-layer tile lists, A_n^k and BMO values.
json partition_to_json(const PartitionResult& r);
// The assignment is rebuilt from the layer lists; a tile listed twice or never is an error.
PartitionResult partition_from_json(const json& j);

json forest_to_json(const Forest& f);
Forest forest_from_json(const json& j);

// n, tiles, norm, lp_<p>..., slope (log2 of the ratio to the previous norm)
void write_decay_csv(std::ostream& os, const DecayTable& t, const std::vector<double>& ps);
// delta, n, ratio_v15, ratio_v16, ratio_v17
void write_lemma0_csv(std::ostream& os, const std::vector<Lemma0Report>& reports);

// Shortest round-trip decimal form.
std::string format_double(double x);

void write_text(const std::filesystem::path& p, const std::string& text);
std::string read_text(const std::filesystem::path& p);

}  // namespace carleson

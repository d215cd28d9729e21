#include "carleson/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef CARLESON_BUILD_ID
#define CARLESON_BUILD_ID "unknown"
#endif

namespace carleson {

std::string build_id() { return CARLESON_BUILD_ID; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <typename T>
T number(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw FormatError(std::string("field \"") + key + "\" is not a number");
  return v.get<T>();
}

const json& array(const json& j) {
  if (!j.is_array()) throw FormatError("expected an array");
  return j;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw FormatError("bad number \"" + s + "\"");
  return v;
}

}  // namespace

json to_json(const DyadicInterval& I) { return {{"k", I.level}, {"m", I.index}}; }

DyadicInterval dyadic_from_json(const json& j) {
  return {number<int>(j, "k"), number<std::int64_t>(j, "m")};
}

json to_json(const RealInterval& I) { return {{"lo", I.lo}, {"hi", I.hi}}; }

RealInterval real_from_json(const json& j) { return {number<double>(j, "lo"), number<double>(j, "hi")}; }

json to_json(const DyadicUnion& A) {
  json out = json::array();
  for (const auto& I : A.pieces()) out.push_back(to_json(I));
  return out;
}

DyadicUnion dyadic_union_from_json(const json& j) {
  std::vector<DyadicInterval> pieces;
  for (const auto& e : array(j)) pieces.push_back(dyadic_from_json(e));
  return DyadicUnion(std::move(pieces));
}

json to_json(const IntervalUnion& A) {
  json out = json::array();
  for (const auto& I : A.pieces()) out.push_back(to_json(I));
  return out;
}

IntervalUnion interval_union_from_json(const json& j) {
  std::vector<RealInterval> pieces;
  for (const auto& e : array(j)) pieces.push_back(real_from_json(e));
  return IntervalUnion(std::move(pieces));
}

json to_json(const CountingFunction& c) {
  json out = json::array();
  for (const auto& I : c.members()) out.push_back(to_json(I));
  return out;
}

CountingFunction counting_from_json(const json& j) {
  CountingFunction c;
  for (const auto& e : array(j)) c.add(dyadic_from_json(e));
  return c;
}

json to_json(const Poly& q) {
  json c = json::array();
  for (Eigen::Index i = 0; i < q.size(); ++i) c.push_back(q.coeffs()(i));
  return {{"coeffs", c}};
}

Poly poly_from_json(const json& j) {
  const auto& c = array(field(j, "coeffs"));
  Poly::Coeffs v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c[i].is_number()) throw FormatError("coefficient is not a number");
    v(static_cast<Eigen::Index>(i)) = c[i].get<double>();
  }
  return Poly(std::move(v));
}

json to_json(const Tile& P) {
  json alpha = json::array();
  for (const auto& a : P.freq) alpha.push_back(to_json(a));
  return {{"I", to_json(P.time)}, {"alpha", alpha}};
}

Tile tile_from_json(const json& j) {
  Tile P;
  P.time = dyadic_from_json(field(j, "I"));
  for (const auto& a : array(field(j, "alpha"))) P.freq.push_back(dyadic_from_json(a));
  if (!P.valid()) throw FormatError("tile frequency boxes do not match its interval");
  return P;
}

void write_grid_binary(std::ostream& os, const GridFunction& f) {
  const std::int32_t K = f.K;
  const std::uint64_t count = static_cast<std::uint64_t>(f.size());
  os.write(reinterpret_cast<const char*>(&K), sizeof K);
  os.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double re = f.values(i).real();
    const double im = f.values(i).imag();
    os.write(reinterpret_cast<const char*>(&re), sizeof re);
    os.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
}

GridFunction read_grid_binary(std::istream& is) {
  std::int32_t K = 0;
  std::uint64_t count = 0;
  is.read(reinterpret_cast<char*>(&K), sizeof K);
  is.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!is || K < 0 || K > 30 || count != (std::uint64_t{1} << K))
    throw FormatError("bad grid function header");
  GridFunction f(K);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double re = 0.0, im = 0.0;
    is.read(reinterpret_cast<char*>(&re), sizeof re);
    is.read(reinterpret_cast<char*>(&im), sizeof im);
    f.values(i) = {re, im};
  }
  if (!is) throw FormatError("truncated grid function");
  return f;
}

void write_grid_csv(std::ostream& os, const GridFunction& f) {
  os << "x,re,im\n";
  for (Eigen::Index i = 0; i < f.size(); ++i)
    os << format_double(f.x(i)) << ',' << format_double(f.values(i).real()) << ','
       << format_double(f.values(i).imag()) << '\n';
}

GridFunction read_grid_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);
  std::vector<Complex> v;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 3) throw FormatError("grid csv rows need x,re,im");
    v.emplace_back(parse_double(c[1]), parse_double(c[2]));
  }
  int K = 0;
  while ((std::size_t{1} << K) < v.size()) ++K;
  if ((std::size_t{1} << K) != v.size()) throw FormatError("grid csv length is not a power of two");
  GridFunction f(K);
  for (std::size_t i = 0; i < v.size(); ++i) f.values(static_cast<Eigen::Index>(i)) = v[i];
  return f;
}

void write_choice_csv(std::ostream& os, const ChoiceFunction& c) {
  os << 'x';
  for (int j = 1; j <= c.d; ++j) os << ",a_" << j;
  os << '\n';
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    os << format_double(grid_point(c.K, i));
    for (int j = 0; j < c.d; ++j) os << ',' << format_double(c.coeffs(i, j));
    os << '\n';
  }
}

ChoiceFunction read_choice_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty choice csv");
  const int d = static_cast<int>(split(line).size()) - 1;
  if (d < 1) throw FormatError("choice csv needs at least one coefficient column");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (static_cast<int>(c.size()) != d + 1) throw FormatError("ragged choice csv");
    std::vector<double> r;
    for (int j = 1; j <= d; ++j) r.push_back(parse_double(c[j]));
    rows.push_back(std::move(r));
  }
  int K = 0;
  while ((std::size_t{1} << K) < rows.size()) ++K;
  if ((std::size_t{1} << K) != rows.size()) throw FormatError("choice csv length is not a power of two");
  ChoiceFunction c(K, d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < d; ++j) c.coeffs(static_cast<Eigen::Index>(i), j) = rows[i][j];
  return c;
}

json partition_to_json(const PartitionResult& r) {
  json tiles = json::array();
  for (std::size_t i = 0; i < r.tiles.size(); ++i) {
    json t = to_json(r.tiles[i].tile);
    t["A0"] = r.tiles[i].density;
    t["mass"] = r.assignment[i].mass;
    tiles.push_back(std::move(t));
  }
  json gens = json::array();
  for (const auto& g : r.generations) {
    json layers = json::array();
    for (const auto& L : g.layers)
      layers.push_back({{"k", L.k},
                        {"region", to_json(L.region)},
                        {"maximal", L.maximal},
                        {"counting", to_json(L.counting)},
                        {"bmo", L.bmo},
                        {"gamma", L.gamma},
                        {"tiles", L.tiles}});
    gens.push_back({{"n", g.n},
                    {"stalled", g.stalled},
                    {"overshoot", g.overshoot},
                    {"tail", to_json(g.tail)},
                    {"layers", std::move(layers)}});
  }
  return {{"tiles", std::move(tiles)}, {"null_tiles", r.null_tiles}, {"generations", std::move(gens)}};
}

PartitionResult partition_from_json(const json& j) {
  PartitionResult r;
  std::vector<double> masses;
  for (const auto& t : array(field(j, "tiles"))) {
    r.tiles.push_back({tile_from_json(t), number<double>(t, "A0")});
    masses.push_back(number<double>(t, "mass"));
  }
  const std::size_t N = r.tiles.size();
  r.assignment.assign(N, {});
  std::vector<int> seen(N, 0);
  auto claim = [&](const json& idx, int n, int k) {
    if (!idx.is_number_unsigned() || idx.get<std::size_t>() >= N) throw FormatError("bad tile index");
    const std::size_t i = idx.get<std::size_t>();
    if (seen[i]++) throw FormatError("tile " + std::to_string(i) + " is listed twice");
    r.assignment[i] = {n, k, masses[i]};
    return i;
  };
  for (const auto& idx : array(field(j, "null_tiles"))) r.null_tiles.push_back(claim(idx, 0, 0));
  for (const auto& gj : array(field(j, "generations"))) {
    Generation g;
    g.n = number<int>(gj, "n");
    if (g.n < 1) throw FormatError("generation numbers start at 1");
    g.stalled = field(gj, "stalled").get<bool>();
    g.overshoot = number<int>(gj, "overshoot");
    g.tail = dyadic_union_from_json(field(gj, "tail"));
    for (const auto& lj : array(field(gj, "layers"))) {
      PartitionLayer L;
      L.n = g.n;
      L.k = number<int>(lj, "k");
      if (L.k != static_cast<int>(g.layers.size())) throw FormatError("layers out of order");
      L.region = dyadic_union_from_json(field(lj, "region"));
      for (const auto& idx : array(field(lj, "maximal"))) {
        if (!idx.is_number_unsigned() || idx.get<std::size_t>() >= N) throw FormatError("bad tile index");
        L.maximal.push_back(idx.get<std::size_t>());
      }
      L.counting = counting_from_json(field(lj, "counting"));
      L.bmo = number<double>(lj, "bmo");
      L.gamma = number<double>(lj, "gamma");
      for (const auto& idx : array(field(lj, "tiles"))) L.tiles.push_back(claim(idx, g.n, L.k));
      g.layers.push_back(std::move(L));
    }
    r.generations.push_back(std::move(g));
  }
  for (std::size_t i = 0; i < N; ++i)
    if (!seen[i]) throw FormatError("tile " + std::to_string(i) + " is in no layer");
  return r;
}

json forest_to_json(const Forest& f) {
  json layers = json::array();
  for (const auto& L : f.layers) {
    json trees = json::array();
    for (const auto& t : L.trees) {
      json members = json::array();
      for (const auto& P : t.members) members.push_back(to_json(P));
      trees.push_back({{"top", to_json(t.top)}, {"tiles", std::move(members)}});
    }
    const auto c = top_counting(L.trees);
    layers.push_back({{"k", L.k},
                      {"trees", std::move(trees)},
                      {"counting", {{"tops", L.trees.size()}, {"sup", c.sup()}, {"bmo", bmo_c_norm(c)}}}});
  }
  return {{"n", f.n}, {"tiles", f.tile_count()}, {"layers", std::move(layers)}};
}

Forest forest_from_json(const json& j) {
  Forest f;
  f.n = number<int>(j, "n");
  for (const auto& lj : array(field(j, "layers"))) {
    ForestLayer L;
    L.k = number<int>(lj, "k");
    for (const auto& tj : array(field(lj, "trees"))) {
      Tree t;
      t.top = tile_from_json(field(tj, "top"));
      for (const auto& P : array(field(tj, "tiles"))) t.members.push_back(tile_from_json(P));
      L.trees.push_back(std::move(t));
    }
    f.layers.push_back(std::move(L));
  }
  return f;
}

void write_decay_csv(std::ostream& os, const DecayTable& t, const std::vector<double>& ps) {
  os << "n,tiles,norm";
  for (double p : ps) os << ",lp_" << format_double(p);
  os << ",slope\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    os << r.n << ',' << r.tiles << ',' << format_double(r.norm);
    for (double v : r.lp) os << ',' << format_double(v);
    os << ',';
    if (i > 0 && r.norm > 0 && t.rows[i - 1].norm > 0)
      os << format_double(std::log2(r.norm / t.rows[i - 1].norm));
    os << '\n';
  }
}

void write_lemma0_csv(std::ostream& os, const std::vector<Lemma0Report>& reports) {
  os << "delta,n,ratio_v15,ratio_v16,ratio_v17\n";
  for (const auto& r : reports)
    os << format_double(r.delta) << ',' << r.n << ',' << format_double(r.ratio_v15) << ','
       << format_double(r.ratio_v16) << ',' << format_double(r.ratio_v17) << '\n';
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace carleson

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "latepoints/lattice.hpp"
#include "latepoints/torus_walk.hpp"

namespace lp {

using Json = nlohmann::json;

/// Sorted-key compact dump; the basis of the config digest.
std::string canonicalJson(const Json& j);
/// SHA-1 of the canonical JSON, hex.
std::string configDigest(const Json& config);

/// Shortest round-trip decimal form.
std::string fmtDouble(double v);
std::string csvField(const std::string& s);

/// RFC 4180 rows (CRLF line ends, quoted when needed).
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& fields);

private:
  std::ostream& os_;
};

struct StatsReport {
  std::string statistic;
  double value = 0;
  double se = 0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  std::string configDigest;
  Json details = Json::object();
};

Json toJson(const StatsReport& r);
void writeReportsJson(std::ostream& os, const std::vector<StatsReport>& reports);
void writeReportsCsv(std::ostream& os, const std::vector<StatsReport>& reports);

/// One row per site: coordinates, then digest and seed.
void writeSitesCsv(std::ostream& os, const std::vector<std::uint64_t>& sites, const Torus& T, const std::string& digest,
                   std::uint64_t seed);

/// Raw little-endian uint64 hit times plus a JSON sidecar describing them.
void writeAlphaField(const std::string& binPath, const std::string& sidecarPath, const AlphaField& field,
                     const std::string& digest);

struct FigurePanel {
  std::string title;
  std::vector<std::uint64_t> sites;
};

struct FigureOptions {
  std::string projection = "axonometric"; // or "slice"
  int sliceLo = 0, sliceHi = 1;           // third-coordinate slab for "slice"
  double size = 480;                      // panel width in px
};

/// Sites with a torus neighbour in the same set.
std::vector<bool> hasNeighbourIn(const std::vector<std::uint64_t>& sites, const Torus& T);

void writeFigureSvg(std::ostream& os, const std::vector<FigurePanel>& panels, const Torus& T, const FigureOptions& opt,
                    const std::string& digest, std::uint64_t seed);
void writeFigureCsv(std::ostream& os, const std::vector<FigurePanel>& panels, const Torus& T, const FigureOptions& opt,
                    const std::string& digest, std::uint64_t seed);

} // namespace lp

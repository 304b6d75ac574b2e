#include "latepoints/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <boost/uuid/detail/sha1.hpp>

namespace lp {

std::string canonicalJson(const Json& j) { return j.dump(); }

std::string configDigest(const Json& config) {
  const std::string s = canonicalJson(config);
  boost::uuids::detail::sha1 h;
  h.process_bytes(s.data(), s.size());
  boost::uuids::detail::sha1::digest_type dg;
  h.get_digest(dg);
  char buf[41];
  for (int i = 0; i < 5; ++i) std::snprintf(buf + 8 * i, 9, "%08x", dg[i]);
  return std::string(buf, 40);
}

std::string fmtDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    os_ << csvField(fields[i]);
  }
  os_ << "\r\n";
}

Json toJson(const StatsReport& r) {
  Json j;
  j["statistic"] = r.statistic;
  j["value"] = r.value;
  j["se"] = r.se;
  j["replicas"] = r.replicas;
  j["seed"] = r.seed;
  j["config_digest"] = r.configDigest;
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

void writeReportsJson(std::ostream& os, const std::vector<StatsReport>& reports) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(toJson(r));
  os << arr.dump(2) << '\n';
}

void writeReportsCsv(std::ostream& os, const std::vector<StatsReport>& reports) {
  CsvWriter w(os);
  w.row({"statistic", "value", "se", "replicas", "seed", "config_digest"});
  for (const auto& r : reports)
    w.row({r.statistic, fmtDouble(r.value), fmtDouble(r.se), std::to_string(r.replicas), std::to_string(r.seed), r.configDigest});
}

void writeSitesCsv(std::ostream& os, const std::vector<std::uint64_t>& sites, const Torus& T, const std::string& digest,
                   std::uint64_t seed) {
  CsvWriter w(os);
  std::vector<std::string> head;
  for (int k = 0; k < T.d(); ++k) head.push_back("x" + std::to_string(k));
  head.push_back("config_digest");
  head.push_back("seed");
  w.row(head);
  for (auto s : sites) {
    auto x = T.coords(s);
    std::vector<std::string> f;
    for (int v : x) f.push_back(std::to_string(v));
    f.push_back(digest);
    f.push_back(std::to_string(seed));
    w.row(f);
  }
}

void writeAlphaField(const std::string& binPath, const std::string& sidecarPath, const AlphaField& field,
                     const std::string& digest) {
  std::ofstream bin(binPath, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + binPath);
  for (auto h : field.firstHit) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(h >> (8 * i));
    bin.write(reinterpret_cast<const char*>(b), 8);
  }
  Json j;
  j["format"] = "uint64 little-endian first hitting times, row-major sites, 18446744073709551615 = unhit";
  j["N"] = field.config.N;
  j["d"] = field.config.d;
  j["seed"] = field.config.seed;
  j["stream"] = field.config.stream;
  j["horizon"] = field.horizon;
  j["g0"] = field.g0;
  j["sites"] = field.firstHit.size();
  j["config_digest"] = digest;
  std::ofstream side(sidecarPath);
  if (!side) throw std::runtime_error("cannot write " + sidecarPath);
  side << j.dump(2) << '\n';
}

std::vector<bool> hasNeighbourIn(const std::vector<std::uint64_t>& sites, const Torus& T) {
  std::vector<bool> out(sites.size(), false);
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (int k = 0; k < T.d() && !out[i]; ++k)
      for (int sgn : {-1, 1})
        if (std::binary_search(sites.begin(), sites.end(), T.neighbour(sites[i], k, sgn))) out[i] = true;
  return out;
}

namespace {

struct Projected {
  double px, py;
  bool shown;
};

Projected project(const std::vector<int>& x, const Torus& T, const FigureOptions& opt) {
  const double N = T.N();
  const double s = opt.size;
  double a = x[0], b = T.d() > 1 ? x[1] : 0, c = T.d() > 2 ? x[2] : 0;
  if (opt.projection == "slice") return {a / N * s, b / N * s, c >= opt.sliceLo && c < opt.sliceHi};
  if (opt.projection != "axonometric") throw std::invalid_argument("figure: unknown projection " + opt.projection);
  // cabinet-style oblique view: the third axis recedes at 30 degrees, half scale
  const double scale = s / (N * 1.45);
  return {(a + 0.433 * c) * scale, s - (b + 0.25 * c) * scale - 0.05 * s, true};
}

std::string xmlEscape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else if (c == '"') o += "&quot;";
    else o += c;
  }
  return o;
}

} // namespace

void writeFigureSvg(std::ostream& os, const std::vector<FigurePanel>& panels, const Torus& T, const FigureOptions& opt,
                    const std::string& digest, std::uint64_t seed) {
  const double gap = 20, top = 30;
  const double W = panels.size() * (opt.size + gap) + gap, H = opt.size + top + gap;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmtDouble(W) << "\" height=\"" << fmtDouble(H)
     << "\" viewBox=\"0 0 " << fmtDouble(W) << ' ' << fmtDouble(H) << "\">\n";
  os << "<!-- config_digest=" << digest << " seed=" << seed << " -->\n";
  os << "<metadata>config_digest=" << digest << ";seed=" << seed << ";N=" << T.N() << ";d=" << T.d()
     << ";projection=" << xmlEscape(opt.projection) << "</metadata>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmtDouble(W) << "\" height=\"" << fmtDouble(H) << "\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double ox = gap + p * (opt.size + gap), oy = top;
    os << "<g transform=\"translate(" << fmtDouble(ox) << ',' << fmtDouble(oy) << ")\">\n";
    os << "<text x=\"0\" y=\"-10\" font-family=\"sans-serif\" font-size=\"14\">" << xmlEscape(panels[p].title) << "</text>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << fmtDouble(opt.size) << "\" height=\"" << fmtDouble(opt.size)
       << "\" fill=\"none\" stroke=\"#888\"/>\n";
    const auto& S = panels[p].sites;
    auto red = hasNeighbourIn(S, T);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < S.size(); ++i) {
        if (red[i] != (pass == 1)) continue;
        auto pr = project(T.coords(S[i]), T, opt);
        if (!pr.shown) continue;
        char buf[160];
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.1f\" fill=\"%s\"/>\n", pr.px, pr.py,
                      red[i] ? 2.5 : 1.2, red[i] ? "red" : "black");
        os << buf;
      }
    os << "</g>\n";
  }
  os << "</svg>\n";
}

void writeFigureCsv(std::ostream& os, const std::vector<FigurePanel>& panels, const Torus& T, const FigureOptions& opt,
                    const std::string& digest, std::uint64_t seed) {
  CsvWriter w(os);
  std::vector<std::string> head{"panel"};
  for (int k = 0; k < T.d(); ++k) head.push_back("x" + std::to_string(k));
  for (const char* h : {"red", "config_digest", "seed"}) head.push_back(h);
  w.row(head);
  for (const auto& pnl : panels) {
    auto red = hasNeighbourIn(pnl.sites, T);
    for (std::size_t i = 0; i < pnl.sites.size(); ++i) {
      auto x = T.coords(pnl.sites[i]);
      if (!project(x, T, opt).shown) continue;
      std::vector<std::string> f{pnl.title};
      for (int v : x) f.push_back(std::to_string(v));
      f.push_back(red[i] ? "1" : "0");
      f.push_back(digest);
      f.push_back(std::to_string(seed));
      w.row(f);
    }
  }
}

} // namespace lp

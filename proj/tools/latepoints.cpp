#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "latepoints/experiments.hpp"
#include "latepoints/parallel.hpp"
#include "latepoints/report.hpp"

using namespace lp;

namespace {

constexpr int kSchemaVersion = 1;

// Reference values used by --check.
constexpr double kG0d3 = 1.516386059151978018156012159681;
constexpr double kG0d4 = 1.239467121848481712678697664859;
const char* kG0d3Digits = "1.516386059151978018156012159681";
const char* kG0d4Digits = "1.239467121848481712678697664859";

using Ref = std::variant<int*, double*, std::uint64_t*, std::string*, bool*, std::vector<double>*, std::vector<int>*>;

// One list of named parameters drives the flags, the --config override and the digest.
struct Params {
  std::vector<std::pair<std::string, Ref>> items;

  void add(CLI::App* app, const std::string& name, Ref ref, const std::string& help) {
    items.emplace_back(name, ref);
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, bool>)
            app->add_flag("--" + name, *p, help);
          else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>)
            app->add_option("--" + name, *p, help)->delimiter(',')->capture_default_str();
          else
            app->add_option("--" + name, *p, help)->capture_default_str();
        },
        ref);
  }

  void apply(const Json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      auto f = std::find_if(items.begin(), items.end(), [&](const auto& kv) { return kv.first == it.key(); });
      if (f == items.end()) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
      std::visit([&](auto* p) { *p = it.value().get<std::remove_pointer_t<decltype(p)>>(); }, f->second);
    }
  }

  Json toJson() const {
    Json j = Json::object();
    for (const auto& [name, ref] : items) std::visit([&](auto* p) { j[name] = *p; }, ref);
    return j;
  }
};

struct Globals {
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string out = ".";
  std::string config;
  bool check = false;
};

struct Command {
  std::string name;
  Params params;
  std::function<int(const std::string& digest)> run;
};

std::string outPath(const Globals& g, const std::string& file) { return g.out + "/" + file; }

void emit(const Globals& g, const std::string& cmd, const std::vector<StatsReport>& reports) {
  std::ofstream js(outPath(g, cmd + ".json"));
  writeReportsJson(js, reports);
  std::ofstream cs(outPath(g, cmd + ".csv"));
  writeReportsCsv(cs, reports);
  writeReportsJson(std::cout, reports);
}

StatsReport rep(const std::string& statistic, double value, double se, std::size_t replicas, const Globals& g,
                const std::string& digest, Json details = Json::object()) {
  StatsReport r;
  r.statistic = statistic;
  r.value = value;
  r.se = se;
  r.replicas = replicas;
  r.seed = g.seed;
  r.configDigest = digest;
  r.details = std::move(details);
  return r;
}

FiniteSet parsePoints(const std::string& text, int d) {
  // "0,0,0;1,0,0"
  std::vector<Point> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    Point p;
    std::stringstream is(item);
    std::string v;
    while (std::getline(is, v, ',')) p.push_back(std::stoi(v));
    if (static_cast<int>(p.size()) != d) throw std::invalid_argument("point '" + item + "' does not have d coordinates");
    pts.push_back(p);
  }
  if (pts.empty()) throw std::invalid_argument("empty point set");
  return FiniteSet(d, pts);
}

int digitsAgree(const std::string& a, const std::string& b) {
  int n = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] != b[i]) break;
    if (std::isdigit(static_cast<unsigned char>(a[i]))) ++n;
  }
  return n;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Late points of random walk on the torus: potential theory, simulation and statistics"};
  app.require_subcommand(1);
  Globals g;

  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](const std::string& name, const std::string& help) {
    auto c = std::make_unique<Command>();
    c->name = name;
    CLI::App* sub = app.add_subcommand(name, help);
    c->params.add(sub, "seed", &g.seed, "master seed");
    sub->add_option("--jobs", g.jobs, "worker threads (default: LATEPOINTS_THREADS or all cores)");
    sub->add_option("--out", g.out, "output directory")->capture_default_str();
    sub->add_option("--config", g.config, "JSON file; its keys override flags");
    sub->add_flag("--check", g.check, "exit nonzero when an acceptance check fails");
    commands.push_back(std::move(c));
    return std::make_pair(sub, commands.back().get());
  };

  // green
  int gd = 3, gRadius = 0;
  bool gExtended = false, gRefine = false;
  {
    auto [sub, c] = make("green", "Green's function g(0) and optional table");
    c->params.add(sub, "d", &gd, "dimension");
    c->params.add(sub, "radius", &gRadius, "also tabulate g on |x|_inf <= radius");
    c->params.add(sub, "extended", &gExtended, "50-digit arithmetic");
    c->params.add(sub, "refine", &gRefine, "halve h, double M and report the change");
    c->run = [&](const std::string& digest) {
      if (gd < 3) throw std::invalid_argument("green: d must be at least 3");
      if (gd >= 5) std::cerr << "warning: d=" << gd << ": plain values only; classification is limited to d in {3,4}\n";
      std::vector<StatsReport> reps;
      GreenParams params;
      auto v = greenValue(Point(gd, 0), params);
      reps.push_back(rep("g0", v.value, v.err, 1, g, digest, {{"d", gd}}));
      std::string ext;
      if (gExtended) {
        auto e = greenValueExtended(Point(gd, 0), params);
        ext = e.value;
        reps.push_back(rep("g0_extended", e.valueDouble, e.err, 1, g, digest, {{"d", gd}, {"digits", e.value}}));
      }
      if (gRefine) {
        auto r = greenValue(Point(gd, 0), params.refined());
        reps.push_back(rep("g0_refine_delta", std::abs(r.value - v.value), 0, 1, g, digest, {{"refined", r.value}}));
      }
      if (gRadius > 0) {
        auto table = GreenTable::build(gd, gRadius, params);
        std::ofstream os(outPath(g, "green_table.csv"));
        CsvWriter w(os);
        w.row({"key", "value", "err", "config_digest", "seed"});
        for (const auto& [key, val] : table.values())
          w.row({keyString(key), fmtDouble(val.value), fmtDouble(val.err), digest, std::to_string(g.seed)});
      }
      emit(g, "green", reps);
      std::printf("g(0)=%.12f\n", v.value);
      if (g.check && (gd == 3 || gd == 4)) {
        const double ref = gd == 3 ? kG0d3 : kG0d4;
        bool ok = std::abs(v.value - ref) <= 1e-9;
        if (gExtended) ok = ok && digitsAgree(ext, gd == 3 ? kG0d3Digits : kG0d4Digits) >= 26;
        std::printf("check: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
      }
      return 0;
    };
  }

  // cap
  int cd = 3;
  std::string cPoints = "0,0,0;1,0,0";
  {
    auto [sub, c] = make("cap", "capacity and equilibrium measure of a finite set");
    c->params.add(sub, "d", &cd, "dimension");
    c->params.add(sub, "points", &cPoints, "points separated by ';', coordinates by ','");
    c->run = [&](const std::string& digest) {
      auto K = parsePoints(cPoints, cd);
      auto table = GreenTable::build(cd, std::max(1, supDiameter(K)));
      auto r = capacity(K, table);
      Json eq = Json::array();
      for (std::size_t i = 0; i < K.points.size(); ++i) eq.push_back({{"x", K.points[i]}, {"e", r.equilibrium[i]}});
      emit(g, "cap",
           {rep("cap", r.cap, r.errEstimate, 1, g, digest,
                {{"set", K.str()}, {"alpha_star", r.alphaStar}, {"residual", r.residual}, {"admissible", r.admissible},
                 {"equilibrium", eq}, {"solver", r.solver}})});
      if (g.check) {
        bool ok = r.cap > 0 && r.residual < 1e-10 &&
                  std::all_of(r.equilibrium.begin(), r.equilibrium.end(), [](double e) { return e >= -1e-14; });
        std::printf("check: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
      }
      return 0;
    };
  }

  // classify
  int kd = 3;
  double kMargin = 0.015;
  {
    auto [sub, c] = make("classify", "admissibility of small sets");
    c->params.add(sub, "d", &kd, "dimension (3 or 4)");
    c->params.add(sub, "min-margin", &kMargin, "smallest accepted distance to the threshold 2/g(0)");
    c->run = [&](const std::string& digest) {
      auto cl = classifyAdmissible(kd);
      Json comps = Json::array();
      double minMargin = std::numeric_limits<double>::infinity();
      for (const auto& cmp : cl.comparisons) {
        comps.push_back({{"name", cmp.name}, {"cap", cmp.cap}, {"err", cmp.err}, {"margin", cmp.margin}, {"admissible", cmp.admissible}});
        minMargin = std::min(minMargin, std::abs(cmp.margin));
      }
      emit(g, "classify",
           {rep("min_margin", minMargin, 0, 1, g, digest,
                {{"d", kd}, {"threshold", cl.threshold}, {"verdict", cl.verdict}, {"comparisons", comps},
                 {"connected_triples_admissible", cl.connectedTriplesAdmissible}, {"notes", cl.notes}})});
      std::printf("%s\n", cl.verdict.c_str());
      if (cl.refused || minMargin < kMargin) {
        std::fprintf(stderr, "classification refused: margin %.4g below %.4g or unsupported dimension\n", minMargin, kMargin);
        return 2;
      }
      return 0;
    };
  }

  // walk
  int wN = 32, wd = 3;
  {
    auto [sub, c] = make("walk", "run a torus walk to cover and store first hitting times");
    c->params.add(sub, "N", &wN, "side length");
    c->params.add(sub, "d", &wd, "dimension");
    c->run = [&](const std::string& digest) {
      TorusConfig cfg;
      cfg.N = wN;
      cfg.d = wd;
      cfg.seed = g.seed;
      auto f = runUntilCover(cfg);
      writeAlphaField(outPath(g, "alpha_field.bin"), outPath(g, "alpha_field.json"), f, digest);
      const double nd = static_cast<double>(f.firstHit.size());
      emit(g, "walk",
           {rep("cover_time", static_cast<double>(f.horizon), 0, 1, g, digest,
                {{"cover_over_g0_Nd_logNd", static_cast<double>(f.horizon) / (f.g0 * nd * std::log(nd))}})});
      return 0;
    };
  }

  // ri
  int rSide = 3, rTrunc = 40, rReplicas = 10000;
  std::vector<double> rUs{0.5, 1, 2};
  {
    auto [sub, c] = make("ri", "interlacement vacancy of small sets against exp(-u cap K)");
    c->params.add(sub, "region", &rSide, "side of the source box Q(0, r)");
    c->params.add(sub, "truncation", &rTrunc, "truncation radius");
    c->params.add(sub, "replicas", &rReplicas, "samples");
    c->params.add(sub, "u", &rUs, "levels");
    c->run = [&](const std::string& digest) {
      auto v = vacancyStudy({{"singleton", FiniteSet(3, {Point{0, 0, 0}})},
                             {"pair", FiniteSet(3, {Point{0, 0, 0}, Point{1, 0, 0}})},
                             {"K1", shapeK1(3)}},
                            rUs, static_cast<std::size_t>(rReplicas), rSide, rTrunc, g.seed, resolveJobs(g.jobs));
      std::vector<StatsReport> reps;
      bool ok = true;
      for (const auto& cell : v.cells) {
        reps.push_back(rep("vacant_" + cell.shape + "_u" + fmtDouble(cell.u), cell.p, cell.se, cell.replicas, g, digest,
                           {{"exact", cell.exact}, {"z", cell.z}, {"truncation_bias", v.truncationBias}}));
        ok = ok && std::abs(cell.z) <= 3;
      }
      emit(g, "ri", reps);
      if (g.check) {
        std::printf("check: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
      }
      return 0;
    };
  }

  // latepoints
  int lN = 64, ld = 3, lReplicas = 1;
  double lAlpha = 0.6;
  {
    auto [sub, c] = make("latepoints", "late set of a torus walk at level alpha");
    c->params.add(sub, "N", &lN, "side length");
    c->params.add(sub, "d", &ld, "dimension");
    c->params.add(sub, "alpha", &lAlpha, "level");
    c->params.add(sub, "replicas", &lReplicas, "walks; the late set of the first is written");
    c->run = [&](const std::string& digest) {
      Torus T(lN, ld);
      const double g0 = greenAtOrigin(ld);
      std::vector<double> sizes(lReplicas), dbl(lReplicas);
      SiteSet first;
      parallelFor(static_cast<std::size_t>(lReplicas), resolveJobs(g.jobs), [&](std::size_t r) {
        TorusConfig cfg;
        cfg.N = lN;
        cfg.d = ld;
        cfg.seed = g.seed;
        cfg.stream = replicaStream(1, r);
        auto L = lateSetDirect(cfg, lAlpha, g0);
        sizes[r] = static_cast<double>(L.members.size());
        dbl[r] = static_cast<double>(doublePoints(L.members, T));
        if (r == 0) first = L.members;
      });
      std::ofstream os(outPath(g, "late_set.csv"));
      writeSitesCsv(os, first, T, digest, g.seed);
      auto ms = [](const std::vector<double>& v) {
        double m = 0, s = 0;
        for (double x : v) m += x;
        m /= v.size();
        for (double x : v) s += (x - m) * (x - m);
        return std::make_pair(m, v.size() > 1 ? std::sqrt(s / (v.size() - 1) / v.size()) : 0.0);
      };
      auto [mL, sL] = ms(sizes);
      auto [mD, sD] = ms(dbl);
      emit(g, "latepoints",
           {rep("late_count", mL, sL, sizes.size(), g, digest, {{"density_prediction", std::pow(T.sites(), 1 - lAlpha)}}),
            rep("double_points", mD, sD, dbl.size(), g, digest)});
      return 0;
    };
  }

  // phase
  std::vector<int> pNs{16, 24, 32, 48};
  std::vector<double> pAlphas{0.5, 0.6, 0.75};
  int pReplicas = 300, pd = 3;
  {
    auto [sub, c] = make("phase", "double points across an (N, alpha) grid");
    c->params.add(sub, "Ns", &pNs, "side lengths");
    c->params.add(sub, "alphas", &pAlphas, "levels");
    c->params.add(sub, "replicas", &pReplicas, "walks per N");
    c->params.add(sub, "d", &pd, "dimension");
    c->run = [&](const std::string& digest) {
      auto st = phaseStudy(pNs, pAlphas, pd, static_cast<std::size_t>(pReplicas), g.seed, resolveJobs(g.jobs));
      std::ofstream os(outPath(g, "phase_table.csv"));
      CsvWriter w(os);
      w.row({"alpha", "N", "mean_D", "se", "replicas", "config_digest", "seed"});
      for (const auto& cell : st.cells)
        w.row({fmtDouble(cell.alpha), std::to_string(cell.N), fmtDouble(cell.meanD), fmtDouble(cell.se),
               std::to_string(cell.replicas), digest, std::to_string(g.seed)});
      std::vector<StatsReport> reps;
      bool ok = true;
      for (std::size_t a = 0; a < st.fits.size(); ++a) {
        const auto& f = st.fits[a];
        reps.push_back(rep("slope_alpha_" + fmtDouble(pAlphas[a]), f.slope, (f.hi - f.lo) / 3.92, pReplicas, g, digest,
                           {{"theory", f.theory}, {"ci", {f.lo, f.hi}}, {"verdict", f.verdict}, {"means", f.means}}));
        if (f.fitted) ok = ok && std::abs(f.slope - f.theory) <= 0.3;
        else ok = ok && f.means.back() < 0.5 && std::is_sorted(f.means.rbegin(), f.means.rend());
      }
      emit(g, "phase", reps);
      if (g.check) {
        std::printf("check: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
      }
      return 0;
    };
  }

  // figure1
  int fN = 400, fd = 3;
  std::uint64_t fStream = 0;
  double fAlpha = 0.6;
  FigureOptions fOpt;
  {
    auto [sub, c] = make("figure1", "late set and matched Bernoulli field as SVG + CSV");
    c->params.add(sub, "N", &fN, "side length");
    c->params.add(sub, "d", &fd, "dimension");
    c->params.add(sub, "alpha", &fAlpha, "level");
    c->params.add(sub, "stream", &fStream, "walk stream");
    c->params.add(sub, "projection", &fOpt.projection, "axonometric or slice");
    c->params.add(sub, "slice-lo", &fOpt.sliceLo, "slab start (slice projection)");
    c->params.add(sub, "slice-hi", &fOpt.sliceHi, "slab end, exclusive");
    c->run = [&](const std::string& digest) {
      auto f = figure1Data(fN, fd, fAlpha, g.seed, fStream);
      Torus T(fN, fd);
      std::vector<FigurePanel> panels{{"late set, alpha=" + fmtDouble(fAlpha) + ", N=" + std::to_string(fN), f.late},
                                      {"Bernoulli field, same density", f.bernoulli}};
      std::ofstream svg(outPath(g, "figure1.svg"));
      writeFigureSvg(svg, panels, T, fOpt, digest, g.seed);
      std::ofstream csv(outPath(g, "figure1.csv"));
      writeFigureCsv(csv, panels, T, fOpt, digest, g.seed);
      emit(g, "figure1",
           {rep("late_double_points", static_cast<double>(f.lateDouble), 0, 1, g, digest, {{"late", f.late.size()}}),
            rep("bernoulli_double_points", static_cast<double>(f.bernoulliDouble), 0, 1, g, digest,
                {{"points", f.bernoulli.size()}})});
      if (g.check) {
        bool ok = f.lateDouble >= 1 && f.bernoulliDouble == 0;
        std::printf("check: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
      }
      return 0;
    };
  }

  // slt-demo
  int sInstances = 1000, sRuns = 20000, sCouplings = 1000;
  {
    auto [sub, c] = make("slt-demo", "soft local time round trips, two-step law and coupling inclusions");
    c->params.add(sub, "instances", &sInstances, "round-trip instances");
    c->params.add(sub, "runs", &sRuns, "forward runs for the two-step law");
    c->params.add(sub, "couplings", &sCouplings, "coupled instances");
    c->run = [&](const std::string& digest) {
      auto s = sltSuite(sInstances, sRuns, sCouplings, g.seed);
      emit(g, "slt-demo",
           {rep("roundtrip_chain_mismatches", static_cast<double>(s.chainMismatches), 0, s.instances, g, digest,
                {{"max_mark_error", s.maxMarkError}}),
            rep("two_step_tv", s.tv, 0, s.runs, g, digest, {{"ks_p_step1", s.ksStep1.p}, {"ks_p_step2", s.ksStep2.p}}),
            rep("inclusion_violations", static_cast<double>(s.violations), 0, s.couplings, g, digest, {{"checked", s.checked}})});
      if (g.check) {
        bool ok = s.chainMismatches == 0 && s.maxMarkError <= 1e-9 && s.tv < 0.01 && s.ksStep1.p > 0.01 &&
                  s.ksStep2.p > 0.01 && s.violations == 0;
        std::printf("check: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
      }
      return 0;
    };
  }

  // excursions
  std::string eModel = "ri";
  int eR1 = 3, eR2 = 5, eR3 = 11, eSource = 13, eTrunc = 60, eSamples = 1000, eN = 32;
  double eU = 1, eUM = 200;
  {
    auto [sub, c] = make("excursions", "excursion counts across the annulus B3 \\ B2");
    c->params.add(sub, "model", &eModel, "ri or rw");
    c->params.add(sub, "r1", &eR1, "side of B1");
    c->params.add(sub, "r2", &eR2, "side of B2");
    c->params.add(sub, "r3", &eR3, "side of B3");
    c->params.add(sub, "source", &eSource, "side of the interlacement source box");
    c->params.add(sub, "truncation", &eTrunc, "interlacement truncation radius");
    c->params.add(sub, "samples", &eSamples, "interlacement samples");
    c->params.add(sub, "u", &eU, "interlacement level");
    c->params.add(sub, "N", &eN, "torus side (rw)");
    c->params.add(sub, "uM", &eUM, "target u M (rw)");
    c->run = [&](const std::string& digest) {
      bool ok = true;
      if (eModel == "ri") {
        auto s = riExcursionStudy(eR1, eR2, eR3, eSource, eU, eTrunc, static_cast<std::size_t>(eSamples), g.seed,
                                  resolveJobs(g.jobs));
        emit(g, "excursions",
             {rep("N_RI_over_u", s.mean / s.u, s.se / s.u, s.samples.size(), g, digest,
                  {{"M", s.M}, {"truncation_bias", s.truncationBias}, {"trajectories", s.trajectories}})});
        ok = std::abs(s.mean / s.u - s.M) <= 3 * s.se / s.u;
      } else if (eModel == "rw") {
        auto s = rwExcursionStudy(eN, eR1, eR2, eR3, eUM, g.seed);
        const double est = static_cast<double>(s.count) / s.u;
        emit(g, "excursions",
             {rep("N_RW_over_u", est, 0, 1, g, digest,
                  {{"M", s.M}, {"M_return_time", s.M2}, {"u", s.u}, {"steps", s.steps}, {"returns", s.returns}})});
        ok = std::abs(est / s.M - 1) <= 0.15 && std::abs(est / s.M2 - 1) <= 0.15;
      } else {
        throw std::invalid_argument("excursions: model must be ri or rw");
      }
      if (g.check) {
        std::printf("check: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
      }
      return 0;
    };
  }

  // exp-law
  int xN = 64, xd = 3, xSeeds = 100;
  {
    auto [sub, c] = make("exp-law", "excess levels of isolated late points against Exp(1)");
    c->params.add(sub, "N", &xN, "side length");
    c->params.add(sub, "d", &xd, "dimension");
    c->params.add(sub, "seeds", &xSeeds, "walks");
    c->run = [&](const std::string& digest) {
      auto s = expLawStudy(xN, xd, static_cast<std::size_t>(xSeeds), g.seed, resolveJobs(g.jobs));
      std::ofstream os(outPath(g, "exp_law_samples.csv"));
      CsvWriter w(os);
      w.row({"value", "config_digest", "seed"});
      for (double v : s.pooled) w.row({fmtDouble(v), digest, std::to_string(g.seed)});
      emit(g, "exp-law",
           {rep("ks_p", s.ks.p, 0, s.pooled.size(), g, digest,
                {{"D", s.ks.D}, {"verdict", s.ks.verdict}, {"mean", s.mean}, {"R", s.R}, {"alpha_star", s.alphaStar}})});
      if (g.check) {
        bool ok = s.ks.verdict == "pass";
        std::printf("check: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
      }
      return 0;
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (auto& c : commands) {
      if (!app.got_subcommand(c->name)) continue;
      if (!g.config.empty()) {
        std::ifstream is(g.config);
        if (!is) throw std::runtime_error("cannot read " + g.config);
        c->params.apply(Json::parse(is));
      }
      Json cfg = c->params.toJson();
      cfg["command"] = c->name;
      cfg["schema_version"] = kSchemaVersion;
      {
        std::ofstream os(outPath(g, c->name + ".config.json"));
        os << cfg.dump(2) << '\n';
      }
      return c->run(configDigest(cfg));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

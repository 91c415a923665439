#include "edh/harness.hpp"

#include "edh/errors.hpp"
#include "edh/estimator.hpp"
#include "edh/tensor_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace edh {
namespace {

constexpr std::size_t kJobChunk = 4096;

std::string num(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_num(std::string_view s)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("bad number '" + std::string(s) + "'", 0);
  return v;
}

std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ','))
    out.push_back(field);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out)
    throw IoError("write failed: " + path.string());
}

void append_records(const PixelResult& r, std::size_t pair_index,
                    const PhotonPair& pair, std::uint32_t run, std::size_t pixel,
                    std::vector<SeedRecord>& out)
{
  for (const MethodOutput& m : r.methods) {
    SeedRecord base;
    base.pair_index = pair_index;
    base.pair = pair;
    base.run = run;
    base.pixel = pixel;
    base.truth_m = r.truth_m;
    base.method = m.method;
    base.boundary_sq_sum = pairwise_sum(m.boundary_sq_errors);
    base.boundary_count = m.boundary_sq_errors.size();
    if (m.estimates.empty()) {
      out.push_back(base);
      continue;
    }
    for (const Estimate& e : m.estimates) {
      SeedRecord rec = base;
      rec.estimator = e.estimator;
      rec.estimate_m = e.distance_m;
      out.push_back(rec);
    }
  }
}

}  // namespace

ExperimentConfig resolve_mode(const ExperimentConfig& cfg)
{
  ExperimentConfig out = cfg;
  if (cfg.mode == ExperimentMode::median_tracking) {
    out.q = 2;
    out.methods = {Method::hedh, Method::pedh};
    out.estimators.clear();
  }
  return out;
}

std::vector<ResultRow> aggregate(std::span<const SeedRecord> records,
                                 const ExperimentConfig& cfg, bool by_depth)
{
  auto method_rank = [&cfg](Method m) {
    return static_cast<long>(std::find(cfg.methods.begin(), cfg.methods.end(), m) -
                             cfg.methods.begin());
  };
  auto estimator_rank = [&cfg](const std::optional<EstimatorKind>& e) {
    if (!e)
      return -1L;
    return static_cast<long>(
      std::find(cfg.estimators.begin(), cfg.estimators.end(), *e) -
      cfg.estimators.begin());
  };

  using Key = std::tuple<std::size_t, double, long, long>;
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    groups[{r.pair_index, by_depth ? r.truth_m : -1.0, method_rank(r.method),
            estimator_rank(r.estimator)}]
      .push_back(i);
  }

  std::vector<ResultRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, idx] : groups) {
    const SeedRecord& first = records[idx.front()];
    ResultRow row;
    row.pair_index = first.pair_index;
    row.pair = first.pair;
    if (by_depth)
      row.depth_m = first.truth_m;
    row.method = first.method;
    row.estimator = first.estimator;

    std::vector<double> est, truth, sq;
    std::size_t count = 0;
    for (std::size_t i : idx) {
      const auto& r = records[i];
      if (r.estimate_m) {
        est.push_back(*r.estimate_m);
        truth.push_back(r.truth_m);
      }
      sq.push_back(r.boundary_sq_sum);
      count += r.boundary_count;
    }
    if (row.estimator)
      row.metrics = distance_metrics(est, truth, cfg.inlier_thresholds,
                                     cfg.sim.z_max(), cfg.inlier_mode);
    row.metrics.n_pixels = idx.size();
    if (count > 0)
      row.metrics.boundary_rmse_bins =
        std::sqrt(pairwise_sum(sq) / static_cast<double>(count));
    rows.push_back(std::move(row));
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg_in, int threads)
{
  cfg_in.validate();
  const ExperimentConfig cfg = resolve_mode(cfg_in);
  const PipelineOptions opts = PipelineOptions::from(cfg);

  ExperimentResult result;
  for (std::size_t p = 0; p < cfg.pairs.size(); ++p) {
    const PhotonPair pair = cfg.pairs[p];
    std::vector<SeedRecord> records;
    std::string error;
    try {
      const Scene scene = make_scene(cfg.scene, cfg.sim.z_max(), pair.sig, pair.bkg);
      const std::size_t pixels = scene.num_pixels();
      const std::size_t total = pixels * cfg.n_monte_carlo;
      std::vector<PixelJob> jobs;
      for (std::size_t begin = 0; begin < total && error.empty(); begin += kJobChunk) {
        const std::size_t end = std::min(total, begin + kJobChunk);
        jobs.clear();
        for (std::size_t j = begin; j < end; ++j) {
          const std::size_t run = j / pixels, pixel = j % pixels;
          jobs.push_back({scene.pixel(pixel), derive_seed(cfg.global_seed, {p, run, pixel})});
        }
        const auto outcomes = run_pixels_omp(jobs, opts, threads);
        for (std::size_t j = begin; j < end; ++j) {
          const PixelOutcome& o = outcomes[j - begin];
          if (!o.ok()) {
            error = "pixel " + std::to_string(j % pixels) + ", run " +
                    std::to_string(j / pixels) + ": " + o.error;
            break;
          }
          append_records(o.result, p, pair, static_cast<std::uint32_t>(j / pixels),
                         j % pixels, records);
        }
      }
    } catch (const std::exception& e) {
      error = e.what();
    }

    if (!error.empty()) {
      ++result.failed_conditions;
      for (Method m : cfg.methods) {
        ResultRow row;
        row.pair_index = p;
        row.pair = pair;
        row.method = m;
        row.error = error;
        result.rows.push_back(row);
        result.summary.push_back(row);
      }
      continue;
    }
    auto rows = aggregate(records, cfg, true);
    auto summary = aggregate(records, cfg, false);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    result.summary.insert(result.summary.end(), summary.begin(), summary.end());
    result.per_seed.insert(result.per_seed.end(), records.begin(), records.end());
  }
  return result;
}

std::string rows_to_csv(std::span<const ResultRow> rows, const ExperimentConfig& cfg)
{
  std::ostringstream out;
  out << "schema_version,sig,bkg,depth_m,method,estimator,n,rmse_cm,mae_cm";
  for (double p : cfg.inlier_thresholds)
    out << ",inlier_" << num(p);
  out << ",boundary_rmse_bins,status,error\n";
  for (const ResultRow& r : rows) {
    out << kCsvSchemaVersion << ',' << num(r.pair.sig) << ',' << num(r.pair.bkg) << ','
        << (r.depth_m ? num(*r.depth_m) : "all") << ',' << to_string(r.method) << ','
        << (r.estimator ? to_string(*r.estimator) : "none") << ','
        << r.metrics.n_pixels << ',';
    const bool has_distance = r.estimator && !r.failed();
    out << (has_distance ? num(r.metrics.rmse_cm) : "") << ','
        << (has_distance ? num(r.metrics.mae_cm) : "");
    for (double p : cfg.inlier_thresholds) {
      out << ',';
      if (has_distance)
        out << num(r.metrics.inlier_pct.at(p));
    }
    out << ','
        << (r.metrics.boundary_rmse_bins ? num(*r.metrics.boundary_rmse_bins) : "")
        << ',' << (r.failed() ? "error" : "ok") << ',';
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << msg << '\n';
  }
  return out.str();
}

std::string seed_records_to_csv(std::span<const SeedRecord> records)
{
  std::ostringstream out;
  out << "schema_version,pair_index,sig,bkg,run,pixel,truth_m,method,estimator,"
         "estimate_m,boundary_sq_sum,boundary_count\n";
  for (const SeedRecord& r : records)
    out << kCsvSchemaVersion << ',' << r.pair_index << ',' << num(r.pair.sig) << ','
        << num(r.pair.bkg) << ',' << r.run << ',' << r.pixel << ',' << num(r.truth_m)
        << ',' << to_string(r.method) << ','
        << (r.estimator ? to_string(*r.estimator) : "none") << ','
        << (r.estimate_m ? num(*r.estimate_m) : "") << ',' << num(r.boundary_sq_sum)
        << ',' << r.boundary_count << '\n';
  return out.str();
}

std::vector<SeedRecord> parse_seed_records(const std::string& csv)
{
  std::istringstream in(csv);
  std::string line;
  std::vector<SeedRecord> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty())
      continue;
    const auto f = split_csv(line);
    if (f.size() != 12 || f[0] != std::to_string(kCsvSchemaVersion))
      throw ParseError("malformed per-seed row", line_no);
    SeedRecord r;
    r.pair_index = static_cast<std::size_t>(std::stoull(f[1]));
    r.pair = {parse_num(f[2]), parse_num(f[3])};
    r.run = static_cast<std::uint32_t>(std::stoul(f[4]));
    r.pixel = static_cast<std::size_t>(std::stoull(f[5]));
    r.truth_m = parse_num(f[6]);
    r.method = parse_method(f[7]);
    if (f[8] != "none")
      r.estimator = parse_estimator(f[8]);
    if (!f[9].empty())
      r.estimate_m = parse_num(f[9]);
    r.boundary_sq_sum = parse_num(f[10]);
    r.boundary_count = static_cast<std::size_t>(std::stoull(f[11]));
    out.push_back(r);
  }
  return out;
}

std::string median_tracking_table(std::span<const ResultRow> summary)
{
  std::vector<double> bkgs;
  for (const auto& r : summary)
    if (std::find(bkgs.begin(), bkgs.end(), r.pair.bkg) == bkgs.end())
      bkgs.push_back(r.pair.bkg);

  std::ostringstream out;
  out << "binner";
  for (double b : bkgs)
    out << ",bkg_" << num(b);
  out << '\n';
  for (Method m : {Method::hedh, Method::pedh}) {
    out << (m == Method::hedh ? "fixed_step" : "optimized_step");
    for (double b : bkgs) {
      out << ',';
      for (const auto& r : summary)
        if (r.method == m && r.pair.bkg == b && !r.failed() &&
            r.metrics.boundary_rmse_bins) {
          out << num(*r.metrics.boundary_rmse_bins);
          break;
        }
    }
    out << '\n';
  }
  return out.str();
}

std::string format_table(std::span<const ResultRow> rows, const ExperimentConfig& cfg)
{
  std::ostringstream out;
  out << std::left << std::setw(12) << "sig:bkg" << std::setw(9) << "method"
      << std::setw(10) << "estimator" << std::right << std::setw(10) << "rmse_cm"
      << std::setw(10) << "mae_cm";
  for (double p : cfg.inlier_thresholds)
    out << std::setw(9) << ("in" + num(p) + "%");
  out << std::setw(12) << "bound_rmse" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const ResultRow& r : rows) {
    out << std::left << std::setw(12) << (num(r.pair.sig) + ":" + num(r.pair.bkg))
        << std::setw(9) << to_string(r.method) << std::setw(10)
        << (r.estimator ? to_string(*r.estimator) : "-") << std::right;
    if (r.failed()) {
      out << "  ERROR: " << r.error << '\n';
      continue;
    }
    if (r.estimator) {
      out << std::setw(10) << r.metrics.rmse_cm << std::setw(10) << r.metrics.mae_cm;
      for (double p : cfg.inlier_thresholds)
        out << std::setw(9) << r.metrics.inlier_pct.at(p);
    } else {
      out << std::setw(10) << "-" << std::setw(10) << "-";
      for (std::size_t i = 0; i < cfg.inlier_thresholds.size(); ++i)
        out << std::setw(9) << "-";
    }
    if (r.metrics.boundary_rmse_bins)
      out << std::setw(12) << *r.metrics.boundary_rmse_bins;
    else
      out << std::setw(12) << "-";
    out << '\n';
  }
  return out.str();
}

void write_experiment(const ExperimentResult& result, const ExperimentConfig& cfg,
                      const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  const ExperimentConfig resolved = resolve_mode(cfg);
  write_text(dir / "results.csv", rows_to_csv(result.rows, resolved));
  write_text(dir / "summary.csv", rows_to_csv(result.summary, resolved));
  write_text(dir / "per_seed.csv", seed_records_to_csv(result.per_seed));
  if (cfg.mode == ExperimentMode::median_tracking)
    write_text(dir / "median_tracking.csv", median_tracking_table(result.summary));
}

SweepParam parse_sweep_param(std::string_view name)
{
  if (name == "k_pct" || name == "k") return SweepParam::k_pct;
  if (name == "gamma") return SweepParam::gamma;
  if (name == "beta1") return SweepParam::beta1;
  if (name == "beta2") return SweepParam::beta2;
  throw InvalidParams("unknown sweep parameter '" + std::string(name) + "'");
}

std::string_view to_string(SweepParam p)
{
  switch (p) {
    case SweepParam::k_pct: return "k_pct";
    case SweepParam::gamma: return "gamma";
    case SweepParam::beta1: return "beta1";
    case SweepParam::beta2: return "beta2";
  }
  return "?";
}

StepParams sweep_base(SweepParam p)
{
  StepParams s;
  switch (p) {
    case SweepParam::k_pct:
      s.beta1 = 0.0;
      s.beta2 = 0.0;
      s.gamma = 1.0;
      break;
    case SweepParam::gamma:
      s.k_pct = 1.0;
      s.beta1 = 0.0;
      s.beta2 = 0.0;
      break;
    case SweepParam::beta2:
      s.k_pct = 1.0;
      s.beta1 = 0.5;
      break;
    case SweepParam::beta1:
      s.k_pct = 1.0;
      s.beta2 = 0.8;
      break;
  }
  return s;
}

StepParams with_value(StepParams params, SweepParam p, double value)
{
  switch (p) {
    case SweepParam::k_pct: params.k_pct = value; break;
    case SweepParam::gamma: params.gamma = value; break;
    case SweepParam::beta1: params.beta1 = value; break;
    case SweepParam::beta2: params.beta2 = value; break;
  }
  return params;
}

SweepPoint summarize_pedh(const ExperimentResult& result, double value)
{
  SweepPoint pt;
  pt.value = value;
  pt.failed_conditions = result.failed_conditions;
  double b = 0.0, d = 0.0;
  std::size_t n = 0;
  for (const ResultRow& r : result.rows) {
    if (r.failed() || r.method != Method::pedh || r.estimator != EstimatorKind::t0)
      continue;
    b += r.metrics.boundary_rmse_bins.value_or(0.0);
    d += r.metrics.rmse_cm;
    ++n;
  }
  if (n > 0) {
    pt.boundary_rmse_bins = b / static_cast<double>(n);
    pt.distance_rmse_cm = d / static_cast<double>(n);
  }
  return pt;
}

std::vector<SweepPoint> sweep(const SweepSpec& spec, const ExperimentConfig& base_cfg,
                              int threads)
{
  if (spec.values.empty())
    throw InvalidSweepValue("sweep needs at least one value");
  for (double v : spec.values) {
    try {
      with_value(spec.base, spec.param, v).validate(base_cfg.sim.cycles);
    } catch (const InvalidParams& e) {
      throw InvalidSweepValue(std::string(to_string(spec.param)) + " = " + num(v) +
                              ": " + e.what());
    }
  }

  std::vector<SweepPoint> points;
  for (double v : spec.values) {
    ExperimentConfig cfg = base_cfg;
    cfg.mode = ExperimentMode::standard;
    cfg.methods = {Method::pedh};
    cfg.estimators = {EstimatorKind::t0};
    cfg.step = with_value(spec.base, spec.param, v);
    points.push_back(summarize_pedh(run_experiment(cfg, threads), v));
  }
  return points;
}

std::string sweep_to_csv(SweepParam p, std::span<const SweepPoint> points)
{
  std::ostringstream out;
  out << "schema_version," << to_string(p)
      << ",boundary_rmse_bins,distance_rmse_cm,failed_conditions\n";
  for (const auto& pt : points)
    out << kCsvSchemaVersion << ',' << num(pt.value) << ','
        << num(pt.boundary_rmse_bins) << ',' << num(pt.distance_rmse_cm) << ','
        << pt.failed_conditions << '\n';
  return out.str();
}

std::vector<float> density_features(const EdhBoundaries& bounds, KnotPlacement placement)
{
  const DensityEstimate d = rho1(bounds, placement);
  return std::vector<float>(d.values.begin(), d.values.end());
}

void export_density_features(const Scene& scene, const ExperimentConfig& cfg,
                             const std::filesystem::path& path, int threads)
{
  if (std::find(cfg.methods.begin(), cfg.methods.end(), Method::pedh) == cfg.methods.end())
    throw InvalidParams("feature export needs pedh among the configured methods");
  PipelineOptions opts = PipelineOptions::from(cfg);
  opts.methods = {Method::pedh};
  opts.estimators.clear();

  std::vector<PixelJob> jobs;
  for (std::size_t i = 0; i < scene.num_pixels(); ++i)
    jobs.push_back({scene.pixel(i), derive_seed(cfg.global_seed, {0, 0, i})});
  const auto outcomes = run_pixels_omp(jobs, opts, threads);

  std::vector<float> payload;
  payload.reserve(jobs.size() * kDensityGridSize);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].ok())
      throw IoError("pixel " + std::to_string(i) + ": " + outcomes[i].error);
    const auto f = density_features(*outcomes[i].result.find(Method::pedh)->bounds,
                                    cfg.knots);
    payload.insert(payload.end(), f.begin(), f.end());
  }
  write_tensor(path, kFeatureMagic, scene.depth_map.width, scene.depth_map.height,
               static_cast<std::uint32_t>(kDensityGridSize), payload);
  auto sidecar = path;
  sidecar += ".depth.csv";
  save_depth_map(scene.depth_map, sidecar, DepthFormat::csv);
}

void write_boundaries_csv(const std::filesystem::path& path, std::uint32_t width,
                          std::uint32_t height, std::span<const EdhBoundaries> bounds)
{
  if (bounds.size() != static_cast<std::size_t>(width) * height)
    throw ShapeMismatch("boundary sets do not match the image shape");
  std::ostringstream out;
  out << "# " << width << ' ' << height << ' ' << (bounds.empty() ? 0 : bounds[0].q)
      << '\n';
  for (const auto& b : bounds) {
    for (std::size_t j = 0; j < b.bounds.size(); ++j)
      out << (j ? "," : "") << num(b.bounds[j]);
    out << '\n';
  }
  write_text(path, out.str());
}

std::vector<EdhBoundaries> read_boundaries_csv(const std::filesystem::path& path,
                                               std::uint32_t* width,
                                               std::uint32_t* height)
{
  std::ifstream in(path);
  if (!in)
    throw FileNotFound(path.string());
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw ParseError("missing '# width height q' header", 1);
  std::istringstream hs(line.substr(1));
  std::uint32_t w = 0, h = 0;
  std::size_t q = 0;
  if (!(hs >> w >> h >> q))
    throw ParseError("malformed '# width height q' header", 1);

  std::vector<EdhBoundaries> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    const auto fields = split_csv(line);
    if (fields.size() != q + 1)
      throw ParseError("expected " + std::to_string(q + 1) + " boundaries", line_no);
    EdhBoundaries b;
    b.q = q;
    for (const auto& f : fields)
      b.bounds.push_back(parse_num(f));
    b.num_bins = b.bounds.back();
    try {
      b.validate();
    } catch (const InvalidParams& e) {
      throw ParseError(e.what(), line_no);
    }
    out.push_back(std::move(b));
  }
  if (out.size() != static_cast<std::size_t>(w) * h)
    throw ParseError("row count does not match header shape", line_no);
  if (width)
    *width = w;
  if (height)
    *height = h;
  return out;
}

void write_histograms_csv(const std::filesystem::path& path, std::uint32_t width,
                          std::uint32_t height, std::span<const EwHistogram> hists)
{
  if (hists.size() != static_cast<std::size_t>(width) * height)
    throw ShapeMismatch("histograms do not match the image shape");
  std::ostringstream out;
  out << "# " << width << ' ' << height << ' '
      << (hists.empty() ? 0 : hists[0].bin_count()) << '\n';
  for (const auto& h : hists) {
    for (std::size_t j = 0; j < h.bins.size(); ++j)
      out << (j ? "," : "") << h.bins[j];
    out << '\n';
  }
  write_text(path, out.str());
}

}  // namespace edh

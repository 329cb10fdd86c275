#include "circle/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "circle/config.hpp"
#include "circle/error.hpp"
#include "circle/trig.hpp"

namespace circle {

namespace {

double grid_at(double lo, double hi, int steps, int i) {
  return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
}

void check_range(const char* name, double lo, double hi, int steps) {
  if (!(lo <= hi)) fail(ErrorKind::PreconditionFailed, std::string(name) + ": empty range");
  if (steps < 1 || (steps == 1 && lo != hi))
    fail(ErrorKind::PreconditionFailed, std::string(name) + ": need at least 2 steps");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (in_quotes) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') out.back() += line[++i];
      else if (ch == '"') in_quotes = false;
      else out.back() += ch;
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  return out;
}

constexpr const char* kReportHeader =
    "cell,eps,eta,nu,region_tag,gate_admissible,thm2_eps,thm2_nu,lambda,residual,error";

std::string report_row(int cell, const RegionReport& r) {
  std::string s = std::to_string(cell);
  s += ',' + fmt(r.eps) + ',' + fmt(r.eta) + ',' + fmt(r.nu) + ',' + to_string(r.tag);
  s += ',' + std::to_string(int(r.gate_admissible)) + ',' + std::to_string(int(r.thm2_eps)) + ',' +
       std::to_string(int(r.thm2_nu));
  s += ',' + fmt(r.lambda) + ',' + fmt(r.residual) + ',' + quoted(r.error);
  return s;
}

RegionReport parse_row(const std::string& line, const SweepSpec& spec) {
  const auto f = split_csv(line);
  if (f.size() != 11) fail(ErrorKind::ParseError, "malformed result row: " + line);
  RegionReport r;
  try {
    r.eps = std::stod(f[1]);
    r.eta = std::stod(f[2]);
    r.nu = std::stod(f[3]);
    const auto tag = parse_region_tag(f[4]);
    if (!tag) fail(ErrorKind::ParseError, "unknown region tag " + f[4]);
    r.tag = *tag;
    r.gate_admissible = f[5] == "1";
    r.thm2_eps = f[6] == "1";
    r.thm2_nu = f[7] == "1";
    if (!f[8].empty()) r.lambda = std::stod(f[8]);
    if (!f[9].empty()) r.residual = std::stod(f[9]);
  } catch (const std::logic_error&) {
    fail(ErrorKind::ParseError, "malformed result row: " + line);
  }
  r.error = f[10];
  r.c2 = spec.c2 > 0.0 ? spec.c2 : default_c2(spec.pert);
  return r;
}

RegionReport classify_cell(const SweepSpec& spec, int index) {
  const Params p = spec.cell_params(index);
  RegionOptions ro;
  ro.c = spec.c;
  ro.c2 = spec.c2;
  ro.solve_lambda = spec.pipeline == Pipeline::Full;
  try {
    return classify_region(p, spec.pert, ro);
  } catch (const std::exception& e) {
    RegionReport r;
    r.nu = p.nu;
    r.eta = p.eta;
    r.eps = p.eps;
    r.error = std::string("fatal: ") + e.what();
    return r;
  }
}

bool is_fatal(const RegionReport& r) { return r.error.rfind("fatal:", 0) == 0; }

// C_alpha on one eps slice, eta ascending; each root seeds the next bracket.
std::vector<CAlphaPoint> trace_c_alpha(const SweepSpec& spec, double eps) {
  std::vector<CAlphaPoint> out;
  std::optional<double> prev, prev2;
  std::optional<TranslatedCurve> warm;
  const double width = spec.nu_hi - spec.nu_lo;
  for (int i = 0; i < spec.eta_steps; ++i) {
    CAlphaPoint pt;
    pt.eps = eps;
    pt.eta = spec.eta_at(i);
    Params p;
    p.alpha = spec.alpha;
    p.eta = pt.eta;
    p.eps = eps;
    p.nu = spec.alpha.alpha;
    if (pt.eta <= 0.0) {
      pt.error = "eta must be positive";
      out.push_back(pt);
      continue;
    }
    auto attempt = [&](double lo, double hi) {
      const auto r = find_c_alpha(p, spec.pert, lo, hi, {}, warm);
      pt.nu_star = r.nu_star;
      pt.lambda = r.curve.lambda;
      warm = r.curve;
    };
    try {
      bool done = false;
      if (prev) {
        const double drift = prev2 ? std::abs(*prev - *prev2) : 0.0;
        const double d = std::max({4.0 * drift, 1e-3 * width, 1e-6});
        try {
          attempt(*prev - d, *prev + d);
          done = true;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NoSignChange) throw;
        }
      }
      if (!done) attempt(spec.nu_lo, spec.nu_hi);
      prev2 = prev;
      prev = pt.nu_star;
    } catch (const Error& e) {
      pt.error = e.what();
      warm.reset();
    }
    out.push_back(pt);
  }
  return out;
}

struct ExistingResults {
  std::vector<RegionReport> reports;
  std::uintmax_t valid_bytes = 0;
};

ExistingResults read_existing(const std::filesystem::path& path, const SweepSpec& spec) {
  ExistingResults ex;
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  size_t pos = 0;
  bool header = true;
  while (true) {
    const size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) break;  // a partial trailing row is dropped
    const std::string line = content.substr(pos, nl - pos);
    if (header) {
      if (line != kReportHeader) fail(ErrorKind::ParseError, path.string() + ": unexpected header");
      header = false;
    } else {
      ex.reports.push_back(parse_row(line, spec));
    }
    pos = nl + 1;
  }
  if (header) fail(ErrorKind::ParseError, path.string() + ": missing header");
  ex.valid_bytes = pos;
  return ex;
}

}  // namespace

int SweepSpec::cell_count() const {
  return static_cast<int>(eps_list.size()) * eta_steps * nu_steps;
}

double SweepSpec::eta_at(int i) const { return grid_at(eta_lo, eta_hi, eta_steps, i); }
double SweepSpec::nu_at(int j) const { return grid_at(nu_lo, nu_hi, nu_steps, j); }

Params SweepSpec::cell_params(int index) const {
  const int per_eps = eta_steps * nu_steps;
  Params p;
  p.alpha = alpha;
  p.eps = eps_list.at(index / per_eps);
  p.eta = eta_at((index % per_eps) / nu_steps);
  p.nu = nu_at(index % nu_steps);
  return p;
}

SweepSpec parse_sweep_spec(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail(ErrorKind::ParseError, "sweep spec must be a JSON object");
  SweepSpec s;
  s.source = j;
  try {
    const double q = j.contains("q") ? json_number(j["q"]) : 1.0;
    const int K = j.value("K", 2000);
    s.alpha = certify(json_number(j.value("alpha", nlohmann::json("golden"))), q, K);
    const double a = s.alpha.alpha;
    for (const auto& e : j.at("eps_list")) s.eps_list.push_back(json_number(e, a));
    if (s.eps_list.empty()) fail(ErrorKind::PreconditionFailed, "eps_list is empty");
    const auto& er = j.at("eta_range");
    const auto& nr = j.at("nu_range");
    if (er.size() != 2 || nr.size() != 2) fail(ErrorKind::ParseError, "ranges must be [lo, hi]");
    s.eta_lo = json_number(er[0], a);
    s.eta_hi = json_number(er[1], a);
    s.nu_lo = json_number(nr[0], a);
    s.nu_hi = json_number(nr[1], a);
    s.eta_steps = j.value("eta_steps", 2);
    s.nu_steps = j.value("nu_steps", 2);
    check_range("eta_range", s.eta_lo, s.eta_hi, s.eta_steps);
    check_range("nu_range", s.nu_lo, s.nu_hi, s.nu_steps);
    const std::string pipe = j.value("pipeline", std::string("gate-only"));
    if (pipe == "gate-only") s.pipeline = Pipeline::GateOnly;
    else if (pipe == "full") s.pipeline = Pipeline::Full;
    else fail(ErrorKind::ParseError, "pipeline must be gate-only or full");
    s.seed = j.value("seed", 0u);
    if (j.contains("c")) s.c = json_number(j["c"], a);
    if (j.contains("c2")) s.c2 = json_number(j["c2"], a);
    s.trace_c_alpha = j.value("trace_c_alpha", true);
    if (j.contains("perturbation")) s.pert = j["perturbation"].get<Perturbation>();
    else if (j.contains("pert_ref")) s.pert = load_perturbation(base_dir / j["pert_ref"].get<std::string>());
    else if (j.contains("perturbation_file"))
      s.pert = load_perturbation(base_dir / j["perturbation_file"].get<std::string>());
    else s.pert = default_perturbation();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("sweep spec: ") + e.what());
  }
  return s;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  return parse_sweep_spec(load_json(path), path.parent_path());
}

std::string spec_hash(const SweepSpec& spec) {
  // The perturbation is hashed by content so an edited pert_ref file is caught.
  nlohmann::json canon = spec.source;
  canon["__perturbation"] = spec.pert;
  const std::string text = canon.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int lab_threads() {
  if (const char* env = std::getenv("CIRCLE_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::filesystem::path sidecar_path(const std::filesystem::path& out) {
  auto p = out;
  p += ".json";
  return p;
}

std::filesystem::path c_alpha_path(const std::filesystem::path& out) {
  auto p = out;
  p.replace_extension(".calpha.csv");
  return p;
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opt) {
  SweepResult res;
  const int total = spec.cell_count();
  const bool persist = !opt.out.empty();
  const std::string hash = spec_hash(spec);
  std::ofstream out;

  if (persist) {
    const auto side = sidecar_path(opt.out);
    const bool have = std::filesystem::exists(opt.out) && std::filesystem::exists(side);
    if (opt.resume && have) {
      const auto meta = load_json(side);
      if (meta.value("spec_hash", std::string()) != hash)
        fail(ErrorKind::PreconditionFailed, "resume: results were produced by a different sweep spec");
      auto ex = read_existing(opt.out, spec);
      if (static_cast<int>(ex.reports.size()) > total)
        fail(ErrorKind::PreconditionFailed, "resume: more rows than cells");
      std::filesystem::resize_file(opt.out, ex.valid_bytes);
      res.reports = std::move(ex.reports);
      res.resumed = static_cast<int>(res.reports.size());
      out.open(opt.out, std::ios::binary | std::ios::app);
    } else {
      out.open(opt.out, std::ios::binary | std::ios::trunc);
      if (out) out << kReportHeader << '\n';
      std::ofstream meta(side, std::ios::binary | std::ios::trunc);
      nlohmann::json m = {{"spec_hash", hash}, {"spec", spec.source}, {"cells", total}, {"seed", spec.seed}};
      meta << m.dump(2) << '\n';
      if (!meta) fail(ErrorKind::IoError, "cannot write " + side.string());
    }
    if (!out) fail(ErrorKind::IoError, "cannot write " + opt.out.string());
  }
  for (const auto& r : res.reports) res.fatal_errors += is_fatal(r);

  const int threads = opt.threads > 0 ? opt.threads : lab_threads();
  const int batch = std::max(1, threads * 8);
  int next = res.resumed;
  int limit = total;
  if (opt.max_cells >= 0) limit = static_cast<int>(std::min<long>(total, next + opt.max_cells));

  std::vector<RegionReport> buf;
  while (next < limit) {
    const int n = std::min(batch, limit - next);
    buf.assign(n, RegionReport{});
    std::atomic<int> cursor{0};
    auto work = [&] {
      for (int i; (i = cursor.fetch_add(1)) < n;) buf[i] = classify_cell(spec, next + i);
    };
    {
      std::vector<std::jthread> pool;
      for (int t = 1; t < std::min(threads, n); ++t) pool.emplace_back(work);
      work();
    }
    for (int i = 0; i < n; ++i) {
      if (persist) out << report_row(next + i, buf[i]) << '\n';
      res.fatal_errors += is_fatal(buf[i]);
      res.reports.push_back(std::move(buf[i]));
    }
    if (persist) {
      out.flush();
      if (!out) fail(ErrorKind::IoError, "write failed: " + opt.out.string());
    }
    res.computed += n;
    next += n;
  }
  res.complete = next == total;

  if (res.complete && spec.trace_c_alpha) {
    for (double eps : spec.eps_list) {
      auto pts = trace_c_alpha(spec, eps);
      res.c_alpha.insert(res.c_alpha.end(), pts.begin(), pts.end());
    }
    if (persist) {
      std::ofstream ca(c_alpha_path(opt.out), std::ios::binary | std::ios::trunc);
      write_c_alpha_csv(ca, res.c_alpha);
      if (!ca) fail(ErrorKind::IoError, "cannot write " + c_alpha_path(opt.out).string());
    }
  }
  return res;
}

std::vector<ConeRow> cone_boundary(const std::vector<RegionReport>& reports, double eps) {
  std::map<double, ConeRow> rows;
  for (const auto& r : reports) {
    if (r.eps != eps) continue;
    auto& row = rows[r.eta];
    row.eta = r.eta;
    if (!(r.thm2_eps && r.thm2_nu)) continue;
    row.nu_left = row.nu_left ? std::min(*row.nu_left, r.nu) : r.nu;
    row.nu_right = row.nu_right ? std::max(*row.nu_right, r.nu) : r.nu;
  }
  std::vector<ConeRow> out;
  for (auto& [eta, row] : rows) out.push_back(row);
  return out;
}

std::optional<RegionTag> parse_region_tag(std::string_view text) {
  for (auto t : {RegionTag::Thm1, RegionTag::Thm2, RegionTag::OnCAlpha, RegionTag::Unresolved})
    if (text == to_string(t)) return t;
  return std::nullopt;
}

void write_reports_csv(std::ostream& out, const std::vector<RegionReport>& reports,
                       const std::optional<std::vector<RegionTag>>& tags) {
  out << kReportHeader << '\n';
  for (size_t i = 0; i < reports.size(); ++i) {
    if (tags && std::find(tags->begin(), tags->end(), reports[i].tag) == tags->end()) continue;
    out << report_row(static_cast<int>(i), reports[i]) << '\n';
  }
}

void write_c_alpha_csv(std::ostream& out, const std::vector<CAlphaPoint>& points) {
  out << "eps,eta,nu_star,lambda,error\n";
  for (const auto& p : points)
    out << fmt(p.eps) << ',' << fmt(p.eta) << ',' << fmt(p.nu_star) << ',' << fmt(p.lambda) << ','
        << quoted(p.error) << '\n';
}

namespace {

const char* tag_color(RegionTag t) {
  switch (t) {
    case RegionTag::Thm1: return "#8ecae6";
    case RegionTag::Thm2: return "#ffb703";
    case RegionTag::OnCAlpha: return "#d62828";
    case RegionTag::Unresolved: return "#e5e5e5";
  }
  return "#000000";
}

// Half the smallest positive gap between distinct sorted values, or `fallback`.
double half_spacing(std::vector<double> v, double fallback) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  double gap = 0.0;
  for (size_t i = 1; i < v.size(); ++i) gap = gap == 0.0 ? v[i] - v[i - 1] : std::min(gap, v[i] - v[i - 1]);
  return gap > 0.0 ? gap / 2 : fallback;
}

}  // namespace

void write_svg(std::ostream& out, const std::vector<RegionReport>& reports, const std::vector<CAlphaPoint>& c_alpha,
               double alpha) {
  // Only the first eps slice is drawn; x = nu, y = eta (upwards).
  const double eps = reports.front().eps;
  std::vector<const RegionReport*> cells;
  std::vector<double> nus, etas;
  for (const auto& r : reports)
    if (r.eps == eps) {
      cells.push_back(&r);
      nus.push_back(r.nu);
      etas.push_back(r.eta);
    }
  const double hx = half_spacing(nus, 1e-3), hy = half_spacing(etas, 1e-3);
  const double x0 = *std::min_element(nus.begin(), nus.end()) - hx;
  const double x1 = *std::max_element(nus.begin(), nus.end()) + hx;
  const double y0 = *std::min_element(etas.begin(), etas.end()) - hy;
  const double y1 = *std::max_element(etas.begin(), etas.end()) + hy;
  const double W = 600, H = 600, pad = 50;
  auto X = [&](double nu) { return pad + (nu - x0) / (x1 - x0) * W; };
  auto Y = [&](double eta) { return pad + (y1 - eta) / (y1 - y0) * H; };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", v);
    return std::string(b);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * pad << "\" height=\"" << H + 2 * pad
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << W + 2 * pad << "\" height=\"" << H + 2 * pad
      << "\" fill=\"white\"/>\n<g id=\"cells\">\n";
  for (const auto* r : cells)
    out << "<rect x=\"" << num(X(r->nu - hx)) << "\" y=\"" << num(Y(r->eta + hy)) << "\" width=\""
        << num(X(r->nu + hx) - X(r->nu - hx)) << "\" height=\"" << num(Y(r->eta - hy) - Y(r->eta + hy))
        << "\" fill=\"" << tag_color(r->tag) << "\"><title>" << to_string(r->tag) << "</title></rect>\n";
  out << "</g>\n";

  auto polyline = [&](const std::string& id, const std::vector<std::pair<double, double>>& pts,
                      const char* color, const char* dash) {
    if (pts.empty()) return;
    out << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (dash) out << " stroke-dasharray=\"" << dash << "\"";
    out << " points=\"";
    for (const auto& [nu, eta] : pts) out << num(X(nu)) << ',' << num(Y(eta)) << ' ';
    out << "\"/>\n";
  };
  std::vector<std::pair<double, double>> left, right, trace;
  for (const auto& row : cone_boundary(reports, eps)) {
    if (row.nu_left) left.emplace_back(*row.nu_left, row.eta);
    if (row.nu_right) right.emplace_back(*row.nu_right, row.eta);
  }
  polyline("cone_left", left, "#023047", "6,3");
  polyline("cone_right", right, "#023047", "6,3");
  for (const auto& p : c_alpha)
    if (p.eps == eps && p.nu_star) trace.emplace_back(*p.nu_star, p.eta);
  polyline("c_alpha", trace, "#d62828", nullptr);

  out << "<line x1=\"" << num(X(alpha)) << "\" y1=\"" << pad << "\" x2=\"" << num(X(alpha)) << "\" y2=\"" << pad + H
      << "\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n";
  out << "<text x=\"" << pad + W / 2 << "\" y=\"" << H + 2 * pad - 15 << "\" text-anchor=\"middle\">nu ["
      << num(x0) << ", " << num(x1) << "]</text>\n";
  out << "<text x=\"15\" y=\"" << pad + H / 2 << "\" transform=\"rotate(-90 15 " << pad + H / 2
      << ")\" text-anchor=\"middle\">eta [" << num(y0) << ", " << num(y1) << "]</text>\n";
  out << "</svg>\n";
}

void emit_figures(const std::vector<RegionReport>& reports, const std::vector<CAlphaPoint>& c_alpha,
                  FigureFormat format, const std::filesystem::path& path, double alpha,
                  const std::optional<std::vector<RegionTag>>& tags) {
  if (reports.empty()) fail(ErrorKind::PreconditionFailed, "no reports to draw");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  if (format == FigureFormat::Csv) write_reports_csv(out, reports, tags);
  else write_svg(out, reports, c_alpha, alpha);
  out.flush();
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace circle

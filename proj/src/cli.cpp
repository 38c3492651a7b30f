#include "cokrig/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cokrig/errors.hpp"
#include "cokrig/model_io.hpp"

namespace cokrig::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

const std::set<std::string> kConfigKeys{"dim",       "n1_list",     "nx_list",
                                        "secondary_factors", "model_true", "model_mis",
                                        "seed",      "out",         "monte_carlo",
                                        "delta_list"};

template <class T>
std::vector<T> read_list(const Json& j, const char* key) {
  if (!j.is_array()) throw ParseError(std::string("config: \"") + key + "\" must be an array");
  std::vector<T> out;
  for (const auto& v : j) {
    if (!v.is_number())
      throw ParseError(std::string("config: \"") + key + "\" must contain numbers");
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer())
        throw ParseError(std::string("config: \"") + key + "\" must contain integers");
    }
    out.push_back(v.get<T>());
  }
  return out;
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void append_record_fields(std::string& line, const RatioRecord& r) {
  line += std::to_string(r.dim) + ',' + std::to_string(r.n1) + ',' + std::to_string(r.n2) + ',' +
          format_double(r.factor) + ',' + format_double(r.grid_spacing) + ',' +
          optional_field(r.ratio_efficiency) + ',' + optional_field(r.ratio_variance) + ',' +
          optional_field(r.sk_over_ck) + ',' + (r.unstable ? "true" : "false") + ',' +
          optional_field(r.mc_mspe) + ',' + optional_field(r.mc_se);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
  if (!out) throw ParseError("error writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- SVG ----

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  out.push_back(field);
  return out;
}

std::optional<double> parse_optional(const std::string& s, const char* column) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(std::string("csv: bad number in column ") + column + ": \"" + s + "\"");
  return v;
}

struct PlotRow {
  double n1 = 0.0;
  double factor = 1.0;
  std::optional<double> delta;
  std::array<std::optional<double>, 3> values;
  bool unstable = false;
};

std::string fmt_coord(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << v;
  return ss.str();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

// ---------------------------------------------------------- commands ----

struct CommonFlags {
  int dim = 2;
  double tol = 1e-9;
};

int cmd_validity(const std::string& model_path, int dim, std::ostream& out) {
  const BivModel model = read_model_file(model_path);
  validate_parameters(model, dim);
  const double bound = rho_bound(model, dim);
  const double rho = std::visit([](const auto& m) { return m.rho12; }, model);
  const bool pass = std::abs(rho) < bound - 1e-12;
  out << "model: " << (std::holds_alternative<BivMatern>(model) ? "matern" : "wendland") << '\n'
      << "dimension: " << dim << '\n'
      << "rho_bound: " << format_double(bound) << '\n'
      << "rho12: " << format_double(rho) << '\n'
      << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitNegative;
}

int cmd_compat(const std::string& p0, const std::string& p1, int dim, double tol,
               bool diagnostic, std::ostream& out) {
  const BivModel m0 = read_model_file(p0);
  const BivModel m1 = read_model_file(p1);
  const CompatReport report = compatible(m0, m1, dim, tol);
  Json j = to_json(report);
  if (diagnostic) j["tail_diagnostic"] = to_json(theorem2_tail_diagnostic(m0, m1, dim));
  out << j.dump(2) << '\n';
  return report.compatible ? kExitOk : kExitNegative;
}

struct DeriveOptions {
  std::string model;
  double kappa = 0.0;
  double mu = 0.0;
  std::optional<double> sigma11;
  std::optional<double> sigma22;
  std::optional<double> rho12;
  int dim = 2;
  std::string out;
};

int cmd_derive_gw(const DeriveOptions& o, std::ostream& out) {
  const BivModel model = read_model_file(o.model);
  const auto* th = std::get_if<BivMatern>(&model);
  if (!th) throw ParseError(o.model + ": derive-gw needs a Matern model");
  const BivGW la = derive_gw(*th, o.kappa, o.mu, o.sigma11.value_or(th->sigma11),
                             o.sigma22.value_or(th->sigma22), o.rho12.value_or(th->rho12), o.dim);
  const CompatReport check = matern_gw_compatible(*th, la, o.dim, 1e-10);
  const Json j = to_json(la);
  if (o.out.empty())
    out << j.dump(2) << '\n';
  else
    write_json_file(o.out, j);
  return check.compatible ? kExitOk : kExitNegative;
}

struct StudyOverrides {
  std::string config;
  std::optional<int> dim;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> monte_carlo;
};

StudyConfig load_with_overrides(const StudyOverrides& o) {
  StudyConfig cfg = load_study_config(o.config);
  if (o.dim) {
    if (*o.dim != cfg.dim && !cfg.counts.empty() && cfg.counts == default_counts(cfg.dim))
      cfg.counts = default_counts(*o.dim);
    cfg.dim = *o.dim;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.monte_carlo) cfg.monte_carlo = *o.monte_carlo;
  cfg.validate();
  return cfg;
}

void emit(const StudyConfig& cfg, const std::string& csv, std::size_t rows, std::ostream& out) {
  if (cfg.out.empty()) {
    out << csv;
    return;
  }
  write_text(cfg.out, csv);
  out << "wrote " << rows << " rows to " << cfg.out.string() << '\n';
}

int cmd_convergence(const StudyOverrides& o, std::ostream& out) {
  const StudyConfig cfg = load_with_overrides(o);
  const BivModel truth = read_model_file(cfg.model_true);
  const BivModel mis = read_model_file(cfg.model_mis);
  const auto records = run_convergence(cfg, truth, mis, thread_count_from_env());
  emit(cfg, convergence_csv(records), records.size(), out);
  return kExitOk;
}

int cmd_range_sweep(const StudyOverrides& o, std::ostream& out) {
  const StudyConfig cfg = load_with_overrides(o);
  const BivModel truth = read_model_file(cfg.model_true);
  const BivModel mis = read_model_file(cfg.model_mis);
  const auto* th = std::get_if<BivMatern>(&truth);
  const auto* la = std::get_if<BivGW>(&mis);
  if (!th || !la)
    throw ParseError("range-sweep needs a Matern model_true and a Wendland model_mis");
  const auto rows = run_range_sweep(cfg, *th, *la, thread_count_from_env());
  emit(cfg, range_sweep_csv(rows), rows.size(), out);
  return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& svg_path, std::ostream& out) {
  const std::string svg = render_svg(read_text(csv_path));
  if (svg_path.empty()) {
    out << svg;
  } else {
    write_text(svg_path, svg);
    out << "wrote " << svg_path << '\n';
  }
  return kExitOk;
}

int cmd_predict(const std::string& p_true, const std::string& p_mis, int dim, int n,
                double factor, std::ostream& out) {
  const BivModel truth = read_model_file(p_true);
  const BivModel mis = read_model_file(p_mis);
  const PredictionReport rep = predict(section6_design(dim, n, factor), truth, mis);
  out << to_json(rep).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

// ------------------------------------------------------------ config ----

void StudyConfig::validate() const {
  if (dim != 1 && dim != 2) throw DomainError("config: dim must be 1 or 2");
  if (counts.empty()) throw DomainError("config: empty count list");
  for (int n : counts)
    if (n < 4 || n % 2 != 0) throw DomainError("config: counts must be even and at least 4");
  if (secondary_factors.empty()) throw DomainError("config: empty secondary_factors");
  for (double f : secondary_factors)
    if (f != 1.0 && f != 1.5 && f != 3.0)
      throw DomainError("config: secondary factors must be 1, 1.5 or 3");
  if (model_true.empty() || model_mis.empty())
    throw DomainError("config: model_true and model_mis are required");
  if (monte_carlo < 0 || monte_carlo == 1)
    throw DomainError("config: monte_carlo must be 0 or at least 2");
}

std::vector<int> default_counts(int dim) {
  if (dim == 2) return {4, 6, 8, 10, 12, 14, 16};
  return {8, 16, 24, 32, 48, 64, 96, 128};
}

std::vector<double> default_delta_list() { return {-0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6}; }

StudyConfig load_study_config(const fs::path& path) {
  const Json j = read_json_file(path);
  if (!j.is_object()) throw ParseError(path.string() + ": config must be a JSON object");
  for (const auto& item : j.items())
    if (!kConfigKeys.count(item.key()))
      throw ParseError(path.string() + ": unknown config key \"" + item.key() + "\"");
  const fs::path base = path.parent_path();
  StudyConfig cfg;
  try {
    if (j.contains("dim")) {
      if (!j["dim"].is_number_integer()) throw ParseError("config: \"dim\" must be an integer");
      cfg.dim = j["dim"].get<int>();
    }
    if (j.contains("n1_list") && j.contains("nx_list"))
      throw ParseError("config: give only one of \"n1_list\" and \"nx_list\"");
    if (j.contains("n1_list")) {
      cfg.counts = read_list<int>(j["n1_list"], "n1_list");
      if (cfg.dim != 1) throw ParseError("config: \"n1_list\" is for dim 1; use \"nx_list\"");
    } else if (j.contains("nx_list")) {
      cfg.counts = read_list<int>(j["nx_list"], "nx_list");
      if (cfg.dim != 2) throw ParseError("config: \"nx_list\" is for dim 2; use \"n1_list\"");
    } else {
      cfg.counts = default_counts(cfg.dim);
    }
    if (j.contains("secondary_factors"))
      cfg.secondary_factors = read_list<double>(j["secondary_factors"], "secondary_factors");
    for (const char* key : {"model_true", "model_mis", "out"}) {
      if (!j.contains(key)) continue;
      if (!j[key].is_string())
        throw ParseError(std::string("config: \"") + key + "\" must be a string");
      const fs::path p = resolve(base, j[key].get<std::string>());
      if (std::string(key) == "model_true")
        cfg.model_true = p;
      else if (std::string(key) == "model_mis")
        cfg.model_mis = p;
      else
        cfg.out = p;
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned())
        throw ParseError("config: \"seed\" must be a nonnegative integer");
      cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("monte_carlo")) {
      if (!j["monte_carlo"].is_number_integer())
        throw ParseError("config: \"monte_carlo\" must be an integer");
      cfg.monte_carlo = j["monte_carlo"].get<int>();
    }
    cfg.delta_list = j.contains("delta_list") ? read_list<double>(j["delta_list"], "delta_list")
                                              : default_delta_list();
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

int thread_count_from_env() {
  const char* v = std::getenv("COKRIG_THREADS");
  if (!v || !*v) return 0;
  int n = 0;
  const std::string s(v);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || n < 0)
    throw DomainError("COKRIG_THREADS must be a nonnegative integer, got \"" + s + "\"");
  return n;
}

// ------------------------------------------------------------ sweeps ----

namespace {

struct Cell {
  int n;
  double factor;
};

std::vector<Cell> cells_of(const StudyConfig& cfg) {
  std::vector<int> counts = cfg.counts;
  std::vector<double> factors = cfg.secondary_factors;
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  std::sort(factors.begin(), factors.end());
  factors.erase(std::unique(factors.begin(), factors.end()), factors.end());
  std::vector<Cell> cells;
  for (int n : counts)
    for (double f : factors) cells.push_back({n, f});
  return cells;
}

}  // namespace

std::vector<RatioRecord> run_convergence(const StudyConfig& cfg, const BivModel& model_true,
                                         const BivModel& model_mis, int threads) {
  const std::vector<Cell> cells = cells_of(cfg);
  std::vector<RatioRecord> records(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t k) {
    records[k] = ratio_record(cfg.dim, cells[k].n, cells[k].factor, model_true, model_mis,
                              cfg.monte_carlo, cfg.seed, k);
  });
  return records;
}

std::vector<SweepRow> run_range_sweep(const StudyConfig& cfg, const BivMatern& model_true,
                                      const BivGW& base, int threads) {
  std::vector<double> deltas = cfg.delta_list;
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  const std::vector<Cell> cells = cells_of(cfg);

  std::vector<SweepRow> rows(deltas.size() * cells.size());
  std::vector<std::optional<BivGW>> models(deltas.size());
  std::vector<std::string> derive_errors(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double s11 = base.sigma11 + deltas[i];
    const double s22 = base.sigma22 - deltas[i];
    if (!(s11 > 0.0) || !(s22 > 0.0)) {
      derive_errors[i] = "shifted standard deviation is not positive";
      continue;
    }
    try {
      models[i] = derive_gw(model_true, base.kappa, base.mu, s11, s22, base.rho12, cfg.dim);
    } catch (const std::exception& e) {
      derive_errors[i] = e.what();
    }
  }

  parallel_for(rows.size(), threads, [&](std::size_t k) {
    const std::size_t i = k / cells.size();
    const Cell& cell = cells[k % cells.size()];
    SweepRow& row = rows[k];
    row.delta = deltas[i];
    if (!models[i]) {
      row.record.dim = cfg.dim;
      row.record.n1 = cfg.dim == 2 ? cell.n * cell.n : cell.n;
      row.record.factor = cell.factor;
      row.record.grid_spacing = 1.0 / (cell.n - 1);
      row.record.unstable = true;
      row.record.error = derive_errors[i];
      return;
    }
    const BivGW& la = *models[i];
    row.betas = GwRanges{la.beta11, la.beta22, la.beta12};
    row.record = ratio_record(cfg.dim, cell.n, cell.factor, model_true, la, cfg.monte_carlo,
                              cfg.seed, k);
  });
  return rows;
}

// --------------------------------------------------------------- CSV ----

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string convergence_csv(const std::vector<RatioRecord>& records) {
  std::string text = std::string(kConvergenceHeader) + '\n';
  for (const RatioRecord& r : records) {
    append_record_fields(text, r);
    text += '\n';
  }
  return text;
}

std::string range_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string text = std::string(kRangeSweepHeader) + '\n';
  for (const SweepRow& row : rows) {
    text += format_double(row.delta) + ',';
    if (row.betas)
      text += format_double(row.betas->beta11) + ',' + format_double(row.betas->beta22) + ',' +
              format_double(row.betas->beta12) + ',';
    else
      text += ",,,";
    append_record_fields(text, row.record);
    text += '\n';
  }
  return text;
}

// --------------------------------------------------------------- SVG ----

std::string render_svg(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::vector<PlotRow> rows;
  std::map<std::string, std::size_t> col;
  if (std::getline(in, line) && !line.empty() && line != "\r") {
    const auto header = split_csv_line(line);
    for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
    for (const char* need :
         {"n1", "factor", "ratio_efficiency", "ratio_variance", "sk_over_ck", "unstable"})
      if (!col.count(need)) throw ParseError(std::string("csv: missing column ") + need);
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      const auto f = split_csv_line(line);
      if (f.size() != header.size()) throw ParseError("csv: row width differs from the header");
      PlotRow r;
      r.n1 = parse_optional(f[col["n1"]], "n1").value_or(0.0);
      r.factor = parse_optional(f[col["factor"]], "factor").value_or(1.0);
      if (col.count("delta")) r.delta = parse_optional(f[col["delta"]], "delta");
      r.values[0] = parse_optional(f[col["ratio_efficiency"]], "ratio_efficiency");
      r.values[1] = parse_optional(f[col["ratio_variance"]], "ratio_variance");
      r.values[2] = parse_optional(f[col["sk_over_ck"]], "sk_over_ck");
      const std::string& u = f[col["unstable"]];
      if (u != "true" && u != "false") throw ParseError("csv: unstable must be true or false");
      r.unstable = u == "true";
      for (auto& v : r.values)
        if (v && !(*v > 0.0)) v.reset();  // no logarithm
      rows.push_back(r);
    }
  }

  constexpr double width = 800.0;
  constexpr double height = 500.0;
  constexpr double left = 70.0;
  constexpr double right = 200.0;
  constexpr double top = 40.0;
  constexpr double bottom = 60.0;
  const std::array<const char*, 3> names{"log ratio_efficiency", "log ratio_variance",
                                         "log sk_over_ck"};
  const std::array<const char*, 3> colors{"#1f77b4", "#d62728", "#2ca02c"};
  const std::array<const char*, 4> dashes{"", "6,3", "2,3", "8,3,2,3"};

  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = -0.01;
  double ymax = 0.01;
  if (!rows.empty()) {
    xmin = xmax = rows.front().n1;
    for (const auto& r : rows) {
      xmin = std::min(xmin, r.n1);
      xmax = std::max(xmax, r.n1);
      for (const auto& v : r.values) {
        if (!v) continue;
        ymin = std::min(ymin, std::log(*v));
        ymax = std::max(ymax, std::log(*v));
      }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
  const auto py = [&](double y) {
    return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  // Axes, zero line and tick labels.
  svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fmt_coord(left) << "\" y1=\"" << fmt_coord(height - bottom) << "\" x2=\""
      << fmt_coord(width - right) << "\" y2=\"" << fmt_coord(height - bottom) << "\"/>\n"
      << "<line x1=\"" << fmt_coord(left) << "\" y1=\"" << fmt_coord(top) << "\" x2=\""
      << fmt_coord(left) << "\" y2=\"" << fmt_coord(height - bottom) << "\"/>\n"
      << "<line stroke-dasharray=\"1,3\" x1=\"" << fmt_coord(left) << "\" y1=\"" << fmt_coord(py(0.0))
      << "\" x2=\"" << fmt_coord(width - right) << "\" y2=\"" << fmt_coord(py(0.0)) << "\"/>\n"
      << "</g>\n";
  svg << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = xmin + (xmax - xmin) * k / 4.0;
    const double y = ymin + (ymax - ymin) * k / 4.0;
    svg << "<text x=\"" << fmt_coord(px(x)) << "\" y=\"" << fmt_coord(height - bottom + 16)
        << "\" text-anchor=\"middle\">" << std::setprecision(4) << x << "</text>\n"
        << "<text x=\"" << fmt_coord(left - 6) << "\" y=\"" << fmt_coord(py(y) + 4)
        << "\" text-anchor=\"end\">" << std::setprecision(3) << y << "</text>\n";
  }
  svg << "<text x=\"" << fmt_coord((left + width - right) / 2) << "\" y=\""
      << fmt_coord(height - 15) << "\" text-anchor=\"middle\">n1</text>\n"
      << "<text x=\"15\" y=\"" << fmt_coord((top + height - bottom) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << fmt_coord((top + height - bottom) / 2)
      << ")\">log ratio</text>\n</g>\n";

  // Curve groups: secondary factor, then delta for range-sweep files.
  std::vector<std::pair<double, std::optional<double>>> groups;
  for (const auto& r : rows) {
    const std::pair<double, std::optional<double>> g{r.factor, r.delta};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  std::sort(groups.begin(), groups.end());

  double legend_y = top;
  for (std::size_t s = 0; s < names.size(); ++s) {
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      std::vector<const PlotRow*> members;
      for (const auto& r : rows)
        if (r.factor == groups[gi].first && r.delta == groups[gi].second) members.push_back(&r);
      std::stable_sort(members.begin(), members.end(),
                       [](const PlotRow* a, const PlotRow* b) { return a->n1 < b->n1; });
      std::string label = std::string(names[s]) + " factor " + format_double(groups[gi].first);
      if (groups[gi].second) label += " delta " + format_double(*groups[gi].second);
      const char* dash = dashes[gi % dashes.size()];

      svg << "<polyline class=\"series\" data-series=\"" << xml_escape(label)
          << "\" fill=\"none\" stroke=\"" << colors[s] << "\" stroke-width=\"1.5\"";
      if (*dash) svg << " stroke-dasharray=\"" << dash << '"';
      svg << " points=\"";
      bool first = true;
      for (const PlotRow* r : members) {
        if (r->unstable || !r->values[s]) continue;
        svg << (first ? "" : " ") << fmt_coord(px(r->n1)) << ',' << fmt_coord(py(std::log(*r->values[s])));
        first = false;
      }
      svg << "\"/>\n";

      // Unstable cells in gray, joined to their neighbours along the curve.
      for (std::size_t m = 0; m < members.size(); ++m) {
        const PlotRow* r = members[m];
        if (!r->unstable) continue;
        if (!r->values[s]) {
          svg << "<line class=\"unstable\" stroke=\"gray\" stroke-dasharray=\"2,2\" x1=\""
              << fmt_coord(px(r->n1)) << "\" y1=\"" << fmt_coord(top) << "\" x2=\""
              << fmt_coord(px(r->n1)) << "\" y2=\"" << fmt_coord(height - bottom) << "\"/>\n";
          continue;
        }
        const double x = px(r->n1);
        const double y = py(std::log(*r->values[s]));
        svg << "<circle class=\"unstable\" fill=\"gray\" r=\"2.5\" cx=\"" << fmt_coord(x)
            << "\" cy=\"" << fmt_coord(y) << "\"/>\n";
        for (const std::size_t nb : {m - 1, m + 1}) {
          if (nb >= members.size() || !members[nb]->values[s]) continue;
          svg << "<line class=\"unstable\" stroke=\"gray\" stroke-width=\"1.5\" x1=\""
              << fmt_coord(x) << "\" y1=\"" << fmt_coord(y) << "\" x2=\""
              << fmt_coord(px(members[nb]->n1)) << "\" y2=\""
              << fmt_coord(py(std::log(*members[nb]->values[s]))) << "\"/>\n";
        }
      }

      svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"10\">"
          << "<line x1=\"" << fmt_coord(width - right + 10) << "\" y1=\"" << fmt_coord(legend_y)
          << "\" x2=\"" << fmt_coord(width - right + 30) << "\" y2=\"" << fmt_coord(legend_y)
          << "\" stroke=\"" << colors[s] << "\"";
      if (*dash) svg << " stroke-dasharray=\"" << dash << '"';
      svg << "/><text x=\"" << fmt_coord(width - right + 34) << "\" y=\""
          << fmt_coord(legend_y + 3) << "\">" << xml_escape(label) << "</text></g>\n";
      legend_y += 14.0;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

// ------------------------------------------------------------ driver ----

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bivariate Matern / Generalized Wendland models, compatibility checks and "
               "cokriging convergence studies"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string model_path;
  auto* validity = app.add_subcommand("validity", "Check the colocated-correlation bound");
  validity->add_option("model", model_path, "Model JSON file")->required();
  validity->add_option("--dim", flags.dim, "Dimension (1, 2 or 3)")->capture_default_str();

  std::string compat0;
  std::string compat1;
  bool diagnostic = false;
  auto* compat = app.add_subcommand("compat", "Check the compatibility conditions of two models");
  compat->add_option("model0", compat0, "First model JSON file")->required();
  compat->add_option("model1", compat1, "Second model JSON file")->required();
  compat->add_option("--dim", flags.dim, "Dimension (1, 2 or 3)")->capture_default_str();
  compat->add_option("--tol", flags.tol, "Relative tolerance")->capture_default_str();
  compat->add_flag("--diagnostic", diagnostic,
                   "Add the high-frequency spectral-closeness diagnostic");

  DeriveOptions derive;
  double sigma11 = 0.0;
  double sigma22 = 0.0;
  double rho12 = 0.0;
  auto* derive_cmd =
      app.add_subcommand("derive-gw", "Wendland model compatible with a Matern model");
  derive_cmd->add_option("model", derive.model, "Matern model JSON file")->required();
  derive_cmd->add_option("--kappa", derive.kappa, "Wendland smoothness")->required();
  derive_cmd->add_option("--mu", derive.mu, "Wendland tail exponent")->required();
  auto* opt_s11 = derive_cmd->add_option("--sigma11", sigma11, "Wendland sigma11");
  auto* opt_s22 = derive_cmd->add_option("--sigma22", sigma22, "Wendland sigma22");
  auto* opt_rho = derive_cmd->add_option("--rho12", rho12, "Wendland rho12");
  derive_cmd->add_option("--dim", derive.dim, "Dimension (1, 2 or 3)")->capture_default_str();
  derive_cmd->add_option("--out", derive.out, "Output JSON file (default: standard output)");

  StudyOverrides study;
  int study_dim = 0;
  std::uint64_t study_seed = 0;
  std::string study_out;
  int study_mc = 0;
  std::vector<CLI::App*> studies;
  std::vector<std::array<CLI::Option*, 4>> study_opts;
  for (const char* name : {"convergence", "range-sweep"}) {
    auto* sub = app.add_subcommand(
        name, std::string(name) == "convergence"
                  ? "Efficiency and variance ratios as the grids densify (CSV)"
                  : "Convergence study across shifted Wendland deviations (CSV)");
    sub->add_option("--config", study.config, "Study configuration JSON")->required();
    study_opts.push_back({sub->add_option("--dim", study_dim, "Override the dimension"),
                          sub->add_option("--seed", study_seed, "Override the seed"),
                          sub->add_option("--out", study_out, "Override the output CSV path"),
                          sub->add_option("--monte-carlo", study_mc,
                                          "Monte Carlo replicates per cell")});
    studies.push_back(sub);
  }

  std::string plot_csv;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "Render a study CSV as SVG");
  plot->add_option("csv", plot_csv, "Study CSV file")->required();
  plot->add_option("--out", plot_out, "Output SVG file (default: standard output)");

  std::string pred_true;
  std::string pred_mis;
  int pred_dim = 1;
  int pred_n = 16;
  double pred_factor = 1.0;
  auto* pred = app.add_subcommand("predict", "Prediction report for one grid design (JSON)");
  pred->add_option("model_true", pred_true, "True model JSON file")->required();
  pred->add_option("model_mis", pred_mis, "Misspecified model JSON file")->required();
  pred->add_option("--dim", pred_dim, "Dimension (1 or 2)")->capture_default_str();
  pred->add_option("--n", pred_n, "n1 (dim 1) or nx (dim 2)")->capture_default_str();
  pred->add_option("--factor", pred_factor, "Secondary factor (1, 1.5, 3)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (validity->parsed()) return cmd_validity(model_path, flags.dim, out);
    if (compat->parsed()) return cmd_compat(compat0, compat1, flags.dim, flags.tol, diagnostic, out);
    if (derive_cmd->parsed()) {
      if (opt_s11->count()) derive.sigma11 = sigma11;
      if (opt_s22->count()) derive.sigma22 = sigma22;
      if (opt_rho->count()) derive.rho12 = rho12;
      return cmd_derive_gw(derive, out);
    }
    for (std::size_t k = 0; k < studies.size(); ++k) {
      if (!studies[k]->parsed()) continue;
      const auto& o = study_opts[k];
      if (o[0]->count()) study.dim = study_dim;
      if (o[1]->count()) study.seed = study_seed;
      if (o[2]->count()) study.out = study_out;
      if (o[3]->count()) study.monte_carlo = study_mc;
      return k == 0 ? cmd_convergence(study, out) : cmd_range_sweep(study, out);
    }
    if (plot->parsed()) return cmd_plot(plot_csv, plot_out, out);
    if (pred->parsed()) return cmd_predict(pred_true, pred_mis, pred_dim, pred_n, pred_factor, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  err << "error: no subcommand\n";
  return kExitError;
}

}  // namespace cokrig::cli

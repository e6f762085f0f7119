#include "rprior/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "rprior/errors.hpp"

namespace rprior {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

std::string where(const std::string& source, std::size_t line, const std::string& column) {
  return source + ":" + std::to_string(line) + ", column '" + column + "'";
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

std::string read_all(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Round step for roughly `target` ticks over `span`.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

LoadedDataset parse_dataset(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw InputError(source + ": empty file, expected a header row");

  int y_col = -1, sigma_col = -1, c_col = -1;
  std::map<std::size_t, int> x_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& name = header[j];
    const int col = static_cast<int>(j);
    auto claim = [&](int& slot) {
      if (slot >= 0) throw InputError(source + ": duplicate column '" + name + "'");
      slot = col;
    };
    if (name == "y") {
      claim(y_col);
    } else if (name == "sigma") {
      claim(sigma_col);
    } else if (name == "c") {
      claim(c_col);
    } else if (name.size() > 1 && name[0] == 'x' && name[1] != '0' &&
               std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const std::size_t idx = std::stoul(name.substr(1));
      if (!x_cols.emplace(idx, col).second) {
        throw InputError(source + ": duplicate column '" + name + "'");
      }
    } else {
      throw InputError(source + ": unknown column '" + name + "' (header column " +
                       std::to_string(j + 1) + ")");
    }
  }
  if (y_col < 0) throw InputError(source + ": missing required column 'y'");
  if (x_cols.empty()) throw InputError(source + ": no predictor columns x1..xK");
  const std::size_t k = x_cols.size();
  if (x_cols.rbegin()->first != k) {
    for (std::size_t i = 1; i <= k; ++i) {
      if (!x_cols.count(i)) throw InputError(source + ": missing predictor column 'x" + std::to_string(i) + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = parse_double(cells[j]);
      if (!v || !std::isfinite(*v)) {
        throw InputError(where(source, line_no, header[j]) + ": not a finite number: '" +
                         cells[j] + "'");
      }
      if (static_cast<int>(j) == sigma_col && !(*v > 0.0)) {
        throw InputError(where(source, line_no, header[j]) + ": sigma must be positive");
      }
      row[j] = *v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(source + ": no data rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  LoadedDataset out;
  out.data.y.resize(n);
  out.design.resize(n, static_cast<Eigen::Index>(k));
  if (c_col >= 0) out.data.c.resize(n);
  if (sigma_col >= 0) out.data.sigma = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    out.data.y[i] = row[static_cast<std::size_t>(y_col)];
    for (const auto& [idx, col] : x_cols) {
      out.design(i, static_cast<Eigen::Index>(idx - 1)) = row[static_cast<std::size_t>(col)];
    }
    if (c_col >= 0) out.data.c[i] = row[static_cast<std::size_t>(c_col)];
    if (sigma_col >= 0) (*out.data.sigma)[i] = row[static_cast<std::size_t>(sigma_col)];
  }
  for (std::size_t i = 1; i <= k; ++i) out.predictor_names.push_back("x" + std::to_string(i));
  return out;
}

LoadedDataset load_dataset(const std::string& path) {
  std::ifstream in = open_input(path);
  return parse_dataset(in, path);
}

SimConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("config must be a JSON object");

  SimConfig c;
  auto count = [](const json& v, const std::string& key) -> std::size_t {
    if (!v.is_number_unsigned()) throw InputError("config key '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
  };
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    const json& v = item.value();
    if (key == "n") {
      c.n = count(v, key);
    } else if (key == "k_max") {
      c.k_max = count(v, key);
    } else if (key == "reps") {
      c.reps = count(v, key);
    } else if (key == "threads") {
      c.threads = count(v, key);
    } else if (key == "base_seed") {
      if (!v.is_number_unsigned()) throw InputError("config key 'base_seed' must be an unsigned 64-bit integer");
      c.base_seed = v.get<std::uint64_t>();
    } else if (key == "signal_scale" || key == "hyper_g_a") {
      if (!v.is_number()) throw InputError("config key '" + key + "' must be a number");
      (key == "signal_scale" ? c.signal_scale : c.hyper_g_a) = v.get<double>();
    } else if (key == "schemes") {
      if (!v.is_array()) throw InputError("config key 'schemes' must be an array of strings");
      c.schemes.clear();
      for (const json& s : v) {
        if (!s.is_string()) throw InputError("config key 'schemes' must be an array of strings");
        c.schemes.push_back(s.get<std::string>());
      }
    } else if (key == "zs_mode") {
      const std::string mode = v.is_string() ? v.get<std::string>() : std::string();
      if (mode == "exact") {
        c.zs_mode = SimConfig::ZsEvaluation::Exact;
      } else if (mode == "asymptotic") {
        c.zs_mode = SimConfig::ZsEvaluation::Asymptotic;
      } else {
        throw InputError("config key 'zs_mode' must be \"exact\" or \"asymptotic\"");
      }
    } else if (key == "candidate_strategy") {
      if (!v.is_string()) throw InputError("config key 'candidate_strategy' must be a string");
      c.candidate_strategy = v.get<std::string>();
    } else if (key == "redraw_design") {
      if (!v.is_boolean()) throw InputError("config key 'redraw_design' must be a boolean");
      c.redraw_design = v.get<bool>();
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path) { return parse_config(read_all(path)); }

std::string config_to_json(const SimConfig& c) {
  json doc = {
      {"n", c.n},
      {"k_max", c.k_max},
      {"reps", c.reps},
      {"signal_scale", c.signal_scale},
      {"base_seed", c.base_seed},
      {"schemes", c.schemes},
      {"hyper_g_a", c.hyper_g_a},
      {"zs_mode", c.zs_mode == SimConfig::ZsEvaluation::Exact ? "exact" : "asymptotic"},
      {"candidate_strategy", c.candidate_strategy},
      {"redraw_design", c.redraw_design},
      {"threads", c.threads},
  };
  return doc.dump(2);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_mse_table(const ExperimentReport& report, std::ostream& out) {
  out << "k_true,scheme,mean_mse,std_err,reps\n";
  for (const ReportRow& r : report.rows) {
    out << r.k_true << ',' << r.scheme << ',' << format_number(r.mean_mse) << ','
        << format_number(r.std_err) << ',' << r.reps << '\n';
  }
}

std::vector<ReportRow> read_mse_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "k_true,scheme,mean_mse,std_err,reps") {
    throw InputError("mse table: unexpected header");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 5) throw InputError("mse table line " + std::to_string(line_no) + ": expected 5 cells");
    const auto k = parse_double(cells[0]);
    const auto mean = parse_double(cells[2]);
    const auto se = parse_double(cells[3]);
    const auto reps = parse_double(cells[4]);
    if (!k || !mean || !se || !reps) {
      throw InputError("mse table line " + std::to_string(line_no) + ": bad number");
    }
    rows.push_back({static_cast<std::size_t>(*k), cells[1], *mean, *se, static_cast<std::size_t>(*reps)});
  }
  return rows;
}

std::string metadata_json(const ExperimentReport& report) {
  json failures = json::object();
  json selected = json::array();
  for (std::size_t i = 0; i < report.scheme_names.size(); ++i) {
    failures[report.scheme_names[i]] = report.failures[i];
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    selected.push_back({{"k_true", report.rows[i].k_true},
                        {"scheme", report.rows[i].scheme},
                        {"mean_selected_k", number_or_null(report.mean_selected_k[i])}});
  }
  json doc = {
      {"schema", "rprior.simulate/1"},
      {"config", json::parse(config_to_json(report.config))},
      {"schemes", report.scheme_names},
      {"failed_replicates", failures},
      {"mean_selected_k", selected},
      {"threads_used", report.threads_used},
      {"wall_seconds", report.wall_seconds},
  };
  return doc.dump(2) + "\n";
}

std::string mse_chart_svg(const ExperimentReport& report, bool minus_oracle) {
  constexpr double kWidth = 720, kHeight = 440;
  constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  static const char* const kColors[] = {"#000000", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
                                        "#17becf"};

  const std::size_t k_max = report.config.k_max;
  std::vector<std::string> names;
  for (const std::string& s : report.scheme_names) {
    if (!(minus_oracle && s == "Oracle")) names.push_back(s);
  }
  auto value = [&](std::size_t k, const std::string& s) {
    const double v = report.row(k, s).mean_mse;
    return minus_oracle ? v - report.row(k, "Oracle").mean_mse : v;
  };

  double lo = minus_oracle ? 0.0 : std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const std::string& s : names) {
    for (std::size_t k = 1; k <= k_max; ++k) {
      const double v = value(k, s);
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) lo = 0.0, hi = 1.0;
  if (!minus_oracle) lo = std::min(lo, 0.0);
  if (hi - lo < 1e-9) hi = lo + 1.0;
  const double step = nice_step(hi - lo, 6);
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;

  const double x_span = k_max > 1 ? static_cast<double>(k_max - 1) : 1.0;
  auto px = [&](double k) { return kLeft + (k - 1.0) / x_span * plot_w; };
  auto py = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << (minus_oracle ? "Mean MSE minus Oracle" : "Mean MSE") << " (signal scale "
      << format_number(report.config.signal_scale) << ")</text>\n";

  for (double v = lo; v <= hi + 0.5 * step; v += step) {
    const double y = py(v);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(y, 2) << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << fixed(y, 2) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(y + 4, 2) << "\" text-anchor=\"end\">"
        << format_number(std::round(v / step) * step) << "</text>\n";
  }
  const std::size_t x_every = k_max > 20 ? (k_max + 9) / 10 : 1;
  for (std::size_t k = 1; k <= k_max; k += x_every) {
    svg << "<text x=\"" << fixed(px(static_cast<double>(k)), 2) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">true model size K</text>\n";
  svg << "<text transform=\"translate(18," << kTop + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << (minus_oracle ? "MSE - Oracle" : "MSE")
      << "</text>\n";

  for (std::size_t i = 0; i < names.size(); ++i) {
    const char* color = kColors[i % (sizeof kColors / sizeof *kColors)];
    std::string points;
    for (std::size_t k = 1; k <= k_max; ++k) {
      const double v = value(k, names[i]);
      if (!std::isfinite(v)) continue;
      if (!points.empty()) points += ' ';
      points += fixed(px(static_cast<double>(k)), 2) + "," + fixed(py(v), 2);
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\""
        << points << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << kLeft + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\""
        << kLeft + plot_w + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w + 46 << "\" y=\"" << ly + 4 << "\">" << escape_xml(names[i])
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace rprior

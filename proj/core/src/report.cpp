#include "obslab/report.hpp"

#include "obslab/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace obslab {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

void write_run_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "# schema = " << kRunCsvSchema << '\n';
  out << "observer,t_s,x_tilde_norm,y_tilde_norm,eq_norm,pde_gap,lambda_min_P,lambda_max_P";
  for (int i = 1; i <= 6; ++i) out << ",x" << i;
  for (int i = 1; i <= 6; ++i) out << ",x_hat" << i;
  out << '\n';
  for (const auto& r : records) {
    const bool eq = !r.eq_norm.empty();
    const bool pde = !r.pde_gap.empty();
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      out << to_string(r.kind) << ',' << num(r.t[k]) << ',' << num(r.x_tilde_norm[k]) << ','
          << num(r.y_tilde_norm[k]) << ',' << (eq ? num(r.eq_norm[k]) : "") << ','
          << (pde ? num(r.pde_gap[k]) : "") << ',' << num(r.lambda_min_p[k]) << ',' << num(r.lambda_max_p[k]);
      for (int i = 0; i < 6; ++i) out << ',' << num(r.x[k](i));
      for (int i = 0; i < 6; ++i) out << ',' << num(r.x_hat[k](i));
      out << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "# schema = " << kSweepCsvSchema << '\n';
  out << "# observer = " << to_string(result.kind) << '\n';
  out << "delay_s,epsilon_per_s,verdict,final_error,divergence_time_s\n";
  for (const auto& c : result.cells) {
    out << num(c.delay) << ',' << num(c.epsilon) << ',' << to_string(c.verdict) << ',' << num(c.final_error)
        << ',' << (c.divergence_time >= 0.0 ? num(c.divergence_time) : "") << '\n';
  }
  for (const auto& [d, eps] : result.thresholds) {
    out << "# threshold delay_s=" << num(d) << " epsilon_per_s=" << (std::isnan(eps) ? "none" : num(eps)) << '\n';
  }
}

std::string render_error_svg(const std::vector<RunRecord>& records, std::string_view title) {
  constexpr double kWidth = 720, kHeight = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;

  double t_max = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (!r.t.empty()) t_max = std::max(t_max, r.t.back());
    for (double e : r.x_tilde_norm) {
      if (e > 0.0 && std::isfinite(e)) {
        lo = std::min(lo, std::log10(e));
        hi = std::max(hi, std::log10(e));
      }
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  lo = std::max(std::floor(lo), std::ceil(hi) - 16.0);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1.0;
  if (t_max <= 0.0) t_max = 1.0;

  auto sx = [&](double t) { return kLeft + pw * t / t_max; };
  auto sy = [&](double l) { return kTop + ph * (hi - std::clamp(l, lo, hi)) / (hi - lo); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
     << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  const int decades = static_cast<int>(hi - lo);
  const int ystep = std::max(1, decades / 8);
  for (int k = 0; k <= decades; k += ystep) {
    const double l = lo + k;
    const double y = sy(l);
    os << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(y, 2) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << fixed(y, 2)
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(y + 4, 2) << "\" text-anchor=\"end\">1e"
       << static_cast<int>(l) << "</text>\n";
  }
  for (int k = 0; k <= 10; ++k) {
    const double t = t_max * k / 10.0;
    const double x = sx(t);
    os << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fixed(x, 2) << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fixed(x, 2) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << num(std::round(t * 1000.0) / 1000.0) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">t [s]</text>\n";
  os << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kTop + ph / 2 << ")\">|X~|</text>\n";

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const char* color = kColors[i % 4];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      const double e = r.x_tilde_norm[k];
      const double l = e > 0.0 && std::isfinite(e) ? std::log10(e) : (e > 0.0 ? hi : lo);
      os << (k ? " " : "") << fixed(sx(r.t[k]), 2) << ',' << fixed(sy(l), 2);
    }
    os << "\"/>\n";
    const double ly = kTop + 16 + 16 * static_cast<double>(i);
    os << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw - 125 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw - 118 << "\" y=\"" << ly + 4 << "\">" << to_string(r.kind) << " ("
       << to_string(r.verdict) << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string format_run_summary(const std::vector<RunRecord>& records, const ScenarioConfig& config) {
  std::ostringstream os;
  const Scenario& s = config.scenario;
  const auto obs = observability_check(s.landmarks);
  os << "observability: " << (obs.ok ? "ok" : "FAILED") << " (rank " << obs.rank << " of 6)\n";
  for (const auto& r : records) {
    os << "[" << to_string(r.kind) << "]\n";
    os << "verdict = " << to_string(r.verdict) << '\n';
    os << "initial_error = " << num(r.initial_error) << '\n';
    os << "final_error = " << num(r.final_error) << '\n';
    os << "tail_max_final_10pct = " << num(r.tail_max) << '\n';
    os << "steady_band_final_20pct = " << num(r.steady_band) << '\n';
    if (r.verdict == Verdict::diverged) os << "divergence_time_s = " << num(r.divergence_time) << '\n';
    if (!r.pde_gap.empty()) {
      os << "max_pde_gap = " << num(r.max_pde_gap) << '\n';
      os << "output_scale = " << num(r.output_scale) << '\n';
    }
    for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  }
  os << "[config]\n";
  os << "noise_algorithm = " << GaussianSource::kAlgorithm << '\n';
  os << format_config(config);
  return os.str();
}

}  // namespace obslab

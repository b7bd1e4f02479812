#include "obslab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace obslab {

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find_first_of(seps, pos);
    const auto piece = trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (!piece.empty()) out.push_back(piece);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double to_number(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error("expected a number, got '" + std::string(s) + "'");
  if (!std::isfinite(v)) throw Error("number must be finite");
  return v;
}

std::vector<double> to_numbers(std::string_view s) {
  std::vector<double> out;
  for (auto piece : split(s, ", \t")) out.push_back(to_number(piece));
  return out;
}

bool to_bool(std::string_view s) {
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw Error("expected true or false, got '" + std::string(s) + "'");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> auto_or_number(std::string_view s) {
  if (s == "auto") return std::nullopt;
  return to_number(s);
}

}  // namespace

SignalProfile parse_profile(std::string_view text) {
  double offset = 0.0;
  std::vector<SineTerm> terms;
  const auto parts = split(text, ";");
  if (parts.empty()) throw Error("empty profile");
  for (auto part : parts) {
    const auto words = split(part, " \t");
    if (words.front() == "const" && words.size() == 2) {
      offset += to_number(words[1]);
    } else if (words.front() == "sine" && (words.size() == 3 || words.size() == 4)) {
      SineTerm t{to_number(words[1]), to_number(words[2]), words.size() == 4 ? to_number(words[3]) : 0.0};
      if (t.frequency_hz < 0.0) throw Error("sine frequency must be non-negative");
      terms.push_back(t);
    } else {
      throw Error("profile term must be 'const <c>' or 'sine <amplitude> <frequency_hz> [phase_rad]', got '" +
                  std::string(part) + "'");
    }
  }
  return SignalProfile(offset, std::move(terms));
}

std::string format_profile(const SignalProfile& p) {
  std::string out = "const " + num(p.offset());
  for (const auto& t : p.terms()) {
    out += "; sine " + num(t.amplitude) + " " + num(t.frequency_hz) + " " + num(t.phase_rad);
  }
  return out;
}

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
  ScenarioConfig cfg;
  Scenario& s = cfg.scenario;
  NoiseSettings noise;
  bool noise_enabled = false;
  Vec2 position = Vec2::Zero();
  double heading_deg = 0.0;

  using Setter = std::function<void(std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"landmarks_m",
       [&](std::string_view v) {
         std::vector<Vec2> pts;
         for (auto item : split(v, ";")) {
           const auto xy = to_numbers(item);
           if (xy.size() != 2) throw Error("each landmark needs two coordinates");
           pts.emplace_back(xy[0], xy[1]);
         }
         s.landmarks = LandmarkSet(std::move(pts));
       }},
      {"omega_rad_s", [&](std::string_view v) { s.profile.omega = parse_profile(v); }},
      {"vx_m_s", [&](std::string_view v) { s.profile.vx = parse_profile(v); }},
      {"vy_m_s", [&](std::string_view v) { s.profile.vy = parse_profile(v); }},
      {"x0_position_m",
       [&](std::string_view v) {
         const auto xy = to_numbers(v);
         if (xy.size() != 2) throw Error("x0_position_m needs two values");
         position = Vec2(xy[0], xy[1]);
       }},
      {"x0_heading_deg", [&](std::string_view v) { heading_deg = to_number(v); }},
      {"x_hat0_embedded",
       [&](std::string_view v) {
         const auto xs = to_numbers(v);
         if (xs.size() != 6) throw Error("x_hat0_embedded needs six values");
         for (int i = 0; i < 6; ++i) s.x_hat0(i) = xs[static_cast<std::size_t>(i)];
       }},
      {"delay_s", [&](std::string_view v) { s.delay = to_number(v); }},
      {"dt_s", [&](std::string_view v) { s.dt = to_number(v); }},
      {"t_end_s", [&](std::string_view v) { s.t_end = to_number(v); }},
      {"epsilon_per_s", [&](std::string_view v) { s.epsilon = to_number(v); }},
      {"sigma_scale", [&](std::string_view v) { s.sigma_scale = to_number(v); }},
      {"p0_scale", [&](std::string_view v) { s.p0_scale = to_number(v); }},
      {"noise_enabled", [&](std::string_view v) { noise_enabled = to_bool(v); }},
      {"noise_sigma_landmark_m", [&](std::string_view v) { noise.sigma_landmark = to_number(v); }},
      {"noise_sigma_velocity_m_s", [&](std::string_view v) { noise.sigma_velocity = to_number(v); }},
      {"noise_seed",
       [&](std::string_view v) {
         std::uint64_t seed = 0;
         const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
         if (ec != std::errc() || ptr != v.data() + v.size()) throw Error("noise_seed must be an unsigned integer");
         noise.seed = seed;
       }},
      {"phi_window", [&](std::string_view v) { s.phi_window = parse_phi_window(v); }},
      {"prime_literal_table", [&](std::string_view v) { s.prime_literal_table = to_bool(v); }},
      {"convergence_tol", [&](std::string_view v) { s.convergence_tol = to_number(v); }},
      {"divergence_factor", [&](std::string_view v) { s.divergence_factor = to_number(v); }},
      {"record_interval_s", [&](std::string_view v) { s.record_interval = to_number(v); }},
      {"pde_validate", [&](std::string_view v) { s.pde_validate = to_bool(v); }},
      {"pde_cells",
       [&](std::string_view v) {
         const double n = to_number(v);
         if (n != std::floor(n) || n < 1 || n > 1e6) throw Error("pde_cells must be a positive integer");
         s.pde_cells = static_cast<int>(n);
       }},
      {"eq_norm_enabled", [&](std::string_view v) { s.eq_norm = to_bool(v); }},
      {"eq_interval_s", [&](std::string_view v) { s.eq_interval = to_number(v); }},
      {"margin_kappa1", [&](std::string_view v) { cfg.margin.kappa1 = auto_or_number(v); }},
      {"margin_t_window_s", [&](std::string_view v) { cfg.margin.t_window = auto_or_number(v); }},
      {"margin_horizon_s", [&](std::string_view v) { cfg.margin.horizon = to_number(v); }},
      {"margin_upper_bound_rule",
       [&](std::string_view v) {
         if (v == "max") cfg.margin.rule = UpperBoundRule::max;
         else if (v == "literal_min") cfg.margin.rule = UpperBoundRule::literal_min;
         else throw Error("margin_upper_bound_rule must be max or literal_min");
       }},
  };

  std::set<std::string, std::less<>> seen;
  bool schema_seen = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "missing key");
    if (value.empty()) throw ConfigError(source, line_no, "missing value for '" + std::string(key) + "'");
    if (!schema_seen) {
      if (key != "schema") throw ConfigError(source, line_no, "first key must be 'schema'");
      if (value != kConfigSchema) {
        throw ConfigError(source, line_no,
                          "unsupported schema '" + std::string(value) + "' (expected " + std::string(kConfigSchema) + ")");
      }
      schema_seen = true;
      continue;
    }
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(source, line_no, "duplicate key '" + std::string(key) + "'");
    }
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(source, line_no, "unknown key '" + std::string(key) + "'");
    try {
      it->second(value);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(source, line_no, std::string(key) + ": " + e.what());
    }
  }
  if (!schema_seen) throw ConfigError(source, 0, "missing 'schema' line");

  const double heading = heading_deg * std::numbers::pi / 180.0;
  s.x0 = embed(Pose{Rotation2::from_angle(heading), position});
  if (noise_enabled) s.noise = noise;
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(source, 0, e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string format_config(const ScenarioConfig& config) {
  const Scenario& s = config.scenario;
  const Pose pose = unembed(s.x0);
  std::ostringstream out;
  out << "schema = " << kConfigSchema << "\n";
  out << "landmarks_m = ";
  for (std::size_t i = 0; i < s.landmarks.size(); ++i) {
    const Vec2& p = s.landmarks.points()[i];
    out << (i ? "; " : "") << num(p.x()) << " " << num(p.y());
  }
  out << "\n";
  out << "omega_rad_s = " << format_profile(s.profile.omega) << "\n";
  out << "vx_m_s = " << format_profile(s.profile.vx) << "\n";
  out << "vy_m_s = " << format_profile(s.profile.vy) << "\n";
  out << "x0_position_m = " << num(pose.position.x()) << ", " << num(pose.position.y()) << "\n";
  out << "x0_heading_deg = " << num(pose.rotation.angle() * 180.0 / std::numbers::pi) << "\n";
  out << "x_hat0_embedded = ";
  for (int i = 0; i < 6; ++i) out << (i ? ", " : "") << num(s.x_hat0(i));
  out << "\n";
  out << "delay_s = " << num(s.delay) << "\n";
  out << "dt_s = " << num(s.dt) << "\n";
  out << "t_end_s = " << num(s.t_end) << "\n";
  out << "epsilon_per_s = " << num(s.epsilon) << "\n";
  out << "sigma_scale = " << num(s.sigma_scale) << "\n";
  out << "p0_scale = " << num(s.p0_scale) << "\n";
  out << "noise_enabled = " << (s.noise ? "true" : "false") << "\n";
  const NoiseSettings noise = s.noise.value_or(NoiseSettings{});
  out << "noise_sigma_landmark_m = " << num(noise.sigma_landmark) << "\n";
  out << "noise_sigma_velocity_m_s = " << num(noise.sigma_velocity) << "\n";
  out << "noise_seed = " << noise.seed << "\n";
  out << "phi_window = " << to_string(s.phi_window) << "\n";
  out << "prime_literal_table = " << (s.prime_literal_table ? "true" : "false") << "\n";
  out << "convergence_tol = " << num(s.convergence_tol) << "\n";
  out << "divergence_factor = " << num(s.divergence_factor) << "\n";
  out << "record_interval_s = " << num(s.record_interval) << "\n";
  out << "pde_validate = " << (s.pde_validate ? "true" : "false") << "\n";
  out << "pde_cells = " << s.pde_cells << "\n";
  out << "eq_norm_enabled = " << (s.eq_norm ? "true" : "false") << "\n";
  out << "eq_interval_s = " << num(s.eq_interval) << "\n";
  out << "margin_kappa1 = " << (config.margin.kappa1 ? num(*config.margin.kappa1) : "auto") << "\n";
  out << "margin_t_window_s = " << (config.margin.t_window ? num(*config.margin.t_window) : "auto") << "\n";
  out << "margin_horizon_s = " << num(config.margin.horizon) << "\n";
  out << "margin_upper_bound_rule = " << (config.margin.rule == UpperBoundRule::max ? "max" : "literal_min")
      << "\n";
  return out.str();
}

}  // namespace obslab

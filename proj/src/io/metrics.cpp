#include "gridflux/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gridflux/errors.hpp"

namespace gridflux {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path,
                    int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                      ": not a number: '" + s + "'");
  }
}

bool needs_header(const std::filesystem::path& path) {
  std::error_code ec;
  return !std::filesystem::exists(path, ec) ||
         std::filesystem::file_size(path, ec) == 0;
}

std::ofstream open_append(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

std::ifstream open_read(const std::filesystem::path& path,
                        std::string_view header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string first;
  std::getline(in, first);
  if (!first.empty() && first.back() == '\r') first.pop_back();
  if (first != header) {
    throw SchemaError(path.string() + ": unexpected header '" + first +
                      "', expected '" + std::string(header) + "'");
  }
  return in;
}

}  // namespace

double EnergyProfile::peak() const {
  return mean_kwh.empty() ? 0.0
                          : *std::max_element(mean_kwh.begin(), mean_kwh.end());
}

BatchMetrics compute_metrics(const RolloutBatch& b) {
  const int h = b.intervals_per_day;
  if (h < 1 || b.n_steps % h != 0) {
    throw std::invalid_argument("compute_metrics: batch must cover whole days");
  }
  const int days = b.n_steps / h;
  BatchMetrics out;
  auto& m = out.metrics;
  m.iteration = b.iteration;
  m.seed = b.seed;

  double reward = 0.0, cost = 0.0, energy = 0.0;
  long arrived = 0, completed = 0;
  const std::size_t rows = static_cast<std::size_t>(b.n_steps) * b.n_agents;
  for (std::size_t i = 0; i < rows; ++i) {
    reward += b.rewards[i];
    cost += b.cost[i];
    energy += b.energy[i];
    arrived += b.arrived[i];
    completed += b.completed[i];
  }
  const double household_days = static_cast<double>(days) * b.n_agents;
  m.avg_reward_per_day = reward / household_days;
  m.avg_cost_per_day = cost / household_days;
  m.avg_energy_per_day = energy / household_days;
  m.tasks_completed_pct =
      arrived > 0 ? 100.0 * static_cast<double>(completed) / arrived : 100.0;

  double par_sum = 0.0;
  for (int d = 0; d < days; ++d) {
    double peak = 0.0, total = 0.0;
    for (int k = d * h; k < (d + 1) * h; ++k) {
      peak = std::max(peak, b.aggregate[k]);
      total += b.aggregate[k];
    }
    par_sum += total > 0.0 ? peak / (total / h) : 1.0;
  }
  m.par = par_sum / days;

  out.profile.iteration = b.iteration;
  out.profile.mean_kwh.assign(h, 0.0);
  for (int k = 0; k < b.n_steps; ++k) {
    out.profile.mean_kwh[b.interval[k]] += b.aggregate[k];
  }
  for (double& v : out.profile.mean_kwh) v /= days;
  return out;
}

std::string wall_clock_label(int interval, int intervals_per_day) {
  const int minutes = interval * (24 * 60) / intervals_per_day;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_metrics_header(const std::filesystem::path& path) {
  if (!needs_header(path)) return;
  auto out = open_append(path);
  out << kMetricsHeader << '\n';
}

void write_profile_header(const std::filesystem::path& path) {
  if (!needs_header(path)) return;
  auto out = open_append(path);
  out << kProfileHeader << '\n';
}

void append_metrics(const std::filesystem::path& path,
                    const IterationMetrics& r) {
  const bool header = needs_header(path);
  auto out = open_append(path);
  if (header) out << kMetricsHeader << '\n';
  out << r.iteration << ',' << r.seed << ',' << format_double(r.avg_reward_per_day)
      << ',' << format_double(r.avg_cost_per_day) << ','
      << format_double(r.avg_energy_per_day) << ',' << format_double(r.par)
      << ',' << format_double(r.tasks_completed_pct) << ','
      << format_double(r.wall_time) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<IterationMetrics> read_metrics(const std::filesystem::path& path) {
  auto in = open_read(path, kMetricsHeader);
  std::vector<IterationMetrics> rows;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 8 fields, got " + std::to_string(f.size()));
    }
    IterationMetrics r;
    r.iteration = static_cast<int>(parse_double(f[0], path, line_no));
    try {
      r.seed = std::stoull(f[1]);
    } catch (const std::exception&) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                        ": bad seed '" + f[1] + "'");
    }
    r.avg_reward_per_day = parse_double(f[2], path, line_no);
    r.avg_cost_per_day = parse_double(f[3], path, line_no);
    r.avg_energy_per_day = parse_double(f[4], path, line_no);
    r.par = parse_double(f[5], path, line_no);
    r.tasks_completed_pct = parse_double(f[6], path, line_no);
    r.wall_time = parse_double(f[7], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

void append_profile(const std::filesystem::path& path,
                    const EnergyProfile& profile) {
  const bool header = needs_header(path);
  auto out = open_append(path);
  if (header) out << kProfileHeader << '\n';
  const int h = static_cast<int>(profile.mean_kwh.size());
  for (int i = 0; i < h; ++i) {
    out << profile.iteration << ',' << i << ',' << wall_clock_label(i, h) << ','
        << format_double(profile.mean_kwh[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<EnergyProfile> read_profiles(const std::filesystem::path& path) {
  auto in = open_read(path, kProfileHeader);
  std::map<int, EnergyProfile> by_iter;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 4) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 4 fields");
    }
    const int it = static_cast<int>(parse_double(f[0], path, line_no));
    const int idx = static_cast<int>(parse_double(f[1], path, line_no));
    auto& p = by_iter[it];
    p.iteration = it;
    if (idx != static_cast<int>(p.mean_kwh.size())) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                        ": interval indices must be contiguous from 0");
    }
    p.mean_kwh.push_back(parse_double(f[3], path, line_no));
  }
  std::vector<EnergyProfile> out;
  for (auto& [it, p] : by_iter) out.push_back(std::move(p));
  return out;
}

}  // namespace gridflux

#include "dagmarl/episode_log.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dagmarl {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T cell_value(const std::string& cell, const std::string& source, int line) {
  T value{};
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    fail(ErrorCode::kSchemaMismatch,
         source + ":" + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return value;
}

}  // namespace

void write_episode_header(std::ostream& out, const std::vector<std::string>& agents) {
  out << kLogSchemaLine << "\n" << "episode,team_reward,goal_periods";
  for (const auto& a : agents) out << ",reward_" << a;
  for (const auto& a : agents) out << ",sr_" << a;
  out << "\n";
}

void write_episode_row(std::ostream& out, const EpisodeLog& row) {
  out << row.episode << "," << fmt(row.team_reward) << "," << row.goal_periods;
  for (double r : row.agent_reward) out << "," << fmt(r);
  for (double s : row.agent_sr) out << "," << fmt(s);
  out << "\n";
}

void write_episode_csv(const std::string& path, const EpisodeTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write '" + path + "'");
  write_episode_header(out, table.agents);
  for (const EpisodeLog& row : table.rows) write_episode_row(out, row);
  if (!out) fail(ErrorCode::kIoError, "write to '" + path + "' failed");
}

EpisodeTable parse_episode_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kLogSchemaLine) {
    fail(ErrorCode::kSchemaMismatch, source + ": missing '" + std::string(kLogSchemaLine) + "' line");
  }
  if (!std::getline(in, line)) fail(ErrorCode::kSchemaMismatch, source + ": missing header");
  const std::vector<std::string> header = split_csv(line);
  if (header.size() < 3 || header[0] != "episode" || header[1] != "team_reward" ||
      header[2] != "goal_periods" || (header.size() - 3) % 2 != 0) {
    fail(ErrorCode::kSchemaMismatch, source + ": unexpected header '" + line + "'");
  }
  EpisodeTable table;
  const size_t agents = (header.size() - 3) / 2;
  for (size_t a = 0; a < agents; ++a) {
    const std::string& r = header[3 + a];
    const std::string& s = header[3 + agents + a];
    if (r.rfind("reward_", 0) != 0 || s != "sr_" + r.substr(7)) {
      fail(ErrorCode::kSchemaMismatch, source + ": unexpected agent columns in header");
    }
    table.agents.push_back(r.substr(7));
  }
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::kSchemaMismatch, source + ":" + std::to_string(lineno) + ": expected " +
                                           std::to_string(header.size()) + " columns");
    }
    EpisodeLog row;
    row.episode = cell_value<int>(cells[0], source, lineno);
    row.team_reward = cell_value<double>(cells[1], source, lineno);
    row.goal_periods = cell_value<int>(cells[2], source, lineno);
    for (size_t a = 0; a < agents; ++a) {
      row.agent_reward.push_back(cell_value<double>(cells[3 + a], source, lineno));
      row.agent_sr.push_back(cell_value<double>(cells[3 + agents + a], source, lineno));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

EpisodeTable read_episode_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read '" + path + "'");
  return parse_episode_csv(in, path);
}

std::vector<double> team_rewards(const EpisodeTable& table) {
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (const EpisodeLog& row : table.rows) out.push_back(row.team_reward);
  return out;
}

}  // namespace dagmarl

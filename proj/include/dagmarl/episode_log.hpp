#ifndef DAGMARL_EPISODE_LOG_HPP_
#define DAGMARL_EPISODE_LOG_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "dagmarl/orchestrator.hpp"

namespace dagmarl {

inline constexpr const char* kLogSchemaLine = "# dagmarl-log v1";

// Episode CSV: the schema line, then a header
//   episode,team_reward,goal_periods,reward_<agent>...,sr_<agent>...
// then one row per episode with doubles printed at 17 significant digits.
// Wall-clock time is kept out of this file so reruns compare byte-equal.
struct EpisodeTable {
  std::vector<std::string> agents;
  std::vector<EpisodeLog> rows;  // wall_seconds is not stored
};

void write_episode_header(std::ostream& out, const std::vector<std::string>& agents);
void write_episode_row(std::ostream& out, const EpisodeLog& row);
void write_episode_csv(const std::string& path, const EpisodeTable& table);

// Throws kIoError when unreadable, kSchemaMismatch on a missing or foreign
// schema line, a malformed header, a wrong column count or a bad number.
EpisodeTable read_episode_csv(const std::string& path);
EpisodeTable parse_episode_csv(std::istream& in, const std::string& source = "<stream>");

std::vector<double> team_rewards(const EpisodeTable& table);

}  // namespace dagmarl

#endif  // DAGMARL_EPISODE_LOG_HPP_

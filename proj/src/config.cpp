#include "dagmarl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dagmarl {

namespace {

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(ErrorCode::kConfigError, "bad value '" + text + "' for " + key);
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  fail(ErrorCode::kConfigError, "bad boolean '" + text + "' for " + key);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  train.validate();
  if (episodes < 1) fail(ErrorCode::kConfigError, "episodes must be >= 1");
  if (window < 1) fail(ErrorCode::kConfigError, "window must be >= 1");
  if (bins < 1) fail(ErrorCode::kConfigError, "bins must be >= 1");
  if (eval_episodes < 1) fail(ErrorCode::kConfigError, "eval_episodes must be >= 1");
  if (out_dir.empty()) fail(ErrorCode::kConfigError, "output directory must be set");
  if (dag) {
    try {
      DagTopology::from_names(dag->nodes, dag->arcs);
    } catch (const Error& e) {
      fail(ErrorCode::kConfigError, std::string("bad [dag] section: ") + e.what());
    }
  }
}

void apply_setting(ExperimentConfig& c, const std::string& dotted_key, const std::string& raw) {
  const size_t dot = dotted_key.find('.');
  if (dot == std::string::npos) {
    fail(ErrorCode::kConfigError, "setting '" + dotted_key + "' needs the form section.key");
  }
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  const std::string value = trim(raw);
  const std::string& k = dotted_key;
  if (section == "experiment") {
    if (key == "mode") c.train.mode = parse_mode(value);
    else if (key == "seed") c.train.seed = parse_number<uint64_t>(k, value);
    else if (key == "episodes") c.episodes = parse_number<int>(k, value);
    else if (key == "out") c.out_dir = value;
    else if (key == "window") c.window = parse_number<int>(k, value);
    else if (key == "bins") c.bins = parse_number<int>(k, value);
    else if (key == "eval_episodes") c.eval_episodes = parse_number<int>(k, value);
    else if (key == "eval_stochastic") c.eval_stochastic = parse_bool(k, value);
    else fail(ErrorCode::kConfigError, "unknown setting " + k);
  } else if (section == "env") {
    if (key == "name") c.env = value;
    else c.env_overrides[key] = value;
  } else if (section == "agents") {
    if (key == "gsf_step") c.train.gsf_step = parse_number<int>(k, value);
    else if (key == "goal_dim") c.train.goal_dim = parse_number<int>(k, value);
    else if (key == "hidden") {
      c.train.hidden.clear();
      for (const std::string& h : split(value, ',')) c.train.hidden.push_back(parse_number<int>(k, h));
    } else if (key == "disable_leader") c.train.disable_leader = parse_bool(k, value);
    else if (key == "disable_rgd") c.train.disable_rgd = parse_bool(k, value);
    else if (key == "full_leader_state") c.train.full_leader_state = parse_bool(k, value);
    else fail(ErrorCode::kConfigError, "unknown setting " + k);
  } else if (section == "ppo") {
    PpoConfig& p = c.train.ppo;
    if (key == "clip_epsilon") p.clip_epsilon = parse_number<double>(k, value);
    else if (key == "learning_rate") p.learning_rate = parse_number<double>(k, value);
    else if (key == "gamma") p.gamma = parse_number<double>(k, value);
    else if (key == "gae_lambda") p.gae_lambda = parse_number<double>(k, value);
    else if (key == "entropy_coef") p.entropy_coef = parse_number<double>(k, value);
    else if (key == "batch_size") p.batch_size = parse_number<int>(k, value);
    else if (key == "epochs_per_update") p.epochs_per_update = parse_number<int>(k, value);
    else if (key == "value_coef") p.value_coef = parse_number<double>(k, value);
    else fail(ErrorCode::kConfigError, "unknown setting " + k);
  } else if (section == "dag") {
    if (!c.dag) c.dag.emplace();
    if (key == "nodes") {
      c.dag->nodes = split(value, ',');
    } else if (key == "arcs") {
      c.dag->arcs.clear();
      for (const std::string& arc : split(value, ',')) {
        const size_t arrow = arc.find("->");
        if (arrow == std::string::npos) {
          fail(ErrorCode::kConfigError, "arc '" + arc + "' must look like from->to");
        }
        c.dag->arcs.emplace_back(trim(arc.substr(0, arrow)), trim(arc.substr(arrow + 2)));
      }
    } else {
      fail(ErrorCode::kConfigError, "unknown setting " + k);
    }
  } else {
    fail(ErrorCode::kConfigError, "unknown section [" + section + "]");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::kConfigError, std::string("config syntax: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      fail(ErrorCode::kConfigError, "setting '" + section + "' must sit inside a [section]");
    }
    for (const auto& [key, node] : body) apply_setting(c, section + "." + key, node.data());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream out;
  const TrainConfig& t = c.train;
  out << "[experiment]\n"
      << "mode = " << mode_name(t.mode) << "\n"
      << "seed = " << t.seed << "\n"
      << "episodes = " << c.episodes << "\n"
      << "out = " << c.out_dir << "\n"
      << "window = " << c.window << "\n"
      << "bins = " << c.bins << "\n"
      << "eval_episodes = " << c.eval_episodes << "\n"
      << "eval_stochastic = " << (c.eval_stochastic ? "true" : "false") << "\n\n";
  out << "[env]\nname = " << c.env << "\n";
  for (const auto& [k, v] : c.env_overrides) out << k << " = " << v << "\n";
  std::vector<std::string> hidden;
  for (int h : t.hidden) hidden.push_back(std::to_string(h));
  out << "\n[agents]\n"
      << "gsf_step = " << t.gsf_step << "\n"
      << "goal_dim = " << t.goal_dim << "\n"
      << "hidden = " << join(hidden, ", ") << "\n"
      << "disable_leader = " << (t.disable_leader ? "true" : "false") << "\n"
      << "disable_rgd = " << (t.disable_rgd ? "true" : "false") << "\n"
      << "full_leader_state = " << (t.full_leader_state ? "true" : "false") << "\n";
  const PpoConfig& p = t.ppo;
  out << "\n[ppo]\n"
      << "clip_epsilon = " << fmt(p.clip_epsilon) << "\n"
      << "learning_rate = " << fmt(p.learning_rate) << "\n"
      << "gamma = " << fmt(p.gamma) << "\n"
      << "gae_lambda = " << fmt(p.gae_lambda) << "\n"
      << "entropy_coef = " << fmt(p.entropy_coef) << "\n"
      << "batch_size = " << p.batch_size << "\n"
      << "epochs_per_update = " << p.epochs_per_update << "\n"
      << "value_coef = " << fmt(p.value_coef) << "\n";
  if (c.dag) {
    std::vector<std::string> arcs;
    for (const auto& [from, to] : c.dag->arcs) arcs.push_back(from + "->" + to);
    out << "\n[dag]\nnodes = " << join(c.dag->nodes, ", ") << "\narcs = " << join(arcs, ", ") << "\n";
  }
  return out.str();
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config) {
  std::optional<DagTopology> dag;
  if (config.dag) dag = DagTopology::from_names(config.dag->nodes, config.dag->arcs);
  return make_environment(config.env, config.env_overrides, dag);
}

}  // namespace dagmarl

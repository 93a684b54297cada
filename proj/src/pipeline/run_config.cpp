// Copyright (c) 2026 The tripoint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tripoint/pipeline/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "tripoint/error.hpp"

namespace tripoint::pipeline {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kInvalidConfig,
              "bad value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad(key, value);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad(key, value);
}

std::array<std::size_t, 2> parse_pair(std::string_view key, std::string_view value) {
  const auto parts = split(value, ',');
  if (parts.size() != 2) bad(key, value);
  return {parse_number<std::size_t>(key, parts[0]), parse_number<std::size_t>(key, parts[1])};
}

std::vector<std::array<std::size_t, 3>> parse_triples(std::string_view key,
                                                      std::string_view value) {
  std::vector<std::array<std::size_t, 3>> out;
  for (const auto part : split(value, ',')) {
    const auto fields = split(part, ':');
    if (fields.size() != 3) bad(key, value);
    out.push_back({parse_number<std::size_t>(key, fields[0]),
                   parse_number<std::size_t>(key, fields[1]),
                   parse_number<std::size_t>(key, fields[2])});
  }
  return out;
}

std::vector<net::Conv1dSpec> parse_branches(std::string_view key, std::string_view value) {
  std::vector<net::Conv1dSpec> out;
  for (const auto& t : parse_triples(key, value)) out.push_back({t[0], t[1], t[2]});
  return out;
}

std::string branches_text(const std::vector<net::Conv1dSpec>& branches) {
  std::string s;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(branches[i].kernel) + ":" + std::to_string(branches[i].out) + ":" +
         std::to_string(branches[i].padding);
  }
  return s;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  synth.validate();
  if (iterations < 1) throw Error(ErrorCode::kInvalidConfig, "iterations must be at least 1");
  if (batch_size < 1) throw Error(ErrorCode::kInvalidConfig, "batch_size must be at least 1");
  if (!(lr > 0.0)) throw Error(ErrorCode::kInvalidConfig, "lr must be positive");
  if (synth.partial_points != model.n_in) {
    throw Error(ErrorCode::kInvalidConfig, "synthetic partial size must equal model.n_in");
  }
  if (output_dir.empty()) throw Error(ErrorCode::kInvalidConfig, "output_dir is empty");
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  auto& m = cfg.model;
  auto size = [&] { return parse_number<std::size_t>(key, value); };
  if (key == "model") {
    if (value == "desk") {
      m = net::ModelConfig::desk();
    } else if (value == "toy") {
      m = net::ModelConfig::toy();
    } else if (value == "tiny") {
      m = net::ModelConfig::tiny();
    } else {
      bad(key, value);
    }
    cfg.synth.partial_points = m.n_in;
  } else if (key == "model.c") {
    m.c = size();
  } else if (key == "model.n_in") {
    m.n_in = size();
    cfg.synth.partial_points = m.n_in;
  } else if (key == "model.n_coarse") {
    m.n_coarse = size();
  } else if (key == "model.merge_target") {
    m.merge_target = size();
  } else if (key == "model.up_ratios") {
    m.up_ratios = parse_pair(key, value);
  } else if (key == "model.ccm_hw") {
    m.ccm_hw = parse_pair(key, value);
  } else if (key == "model.edgeconv") {
    const auto t = parse_triples(key, value);
    if (t.size() != 2) bad(key, value);
    for (std::size_t j = 0; j < 2; ++j) m.edgeconv[j] = {t[j][0], t[j][1], t[j][2]};
  } else if (key == "model.conv1d_1") {
    m.conv1d[0] = parse_branches(key, value);
  } else if (key == "model.conv1d_2") {
    m.conv1d[1] = parse_branches(key, value);
  } else if (key == "model.heads") {
    m.heads = size();
  } else if (key == "model.decoder_depth") {
    m.decoder_depth = size();
  } else if (key == "model.group_size") {
    m.group_size = size();
  } else if (key == "model.use_ccm") {
    m.use_ccm = parse_bool(key, value);
  } else if (key == "model.use_alignment") {
    m.use_alignment = parse_bool(key, value);
  } else if (key == "model.use_inception") {
    m.use_inception = parse_bool(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "iterations") {
    cfg.iterations = size();
  } else if (key == "lr") {
    cfg.lr = parse_number<double>(key, value);
  } else if (key == "cosine_lr") {
    cfg.cosine_lr = parse_bool(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = size();
  } else if (key == "dataset") {
    cfg.dataset = std::string(value);
  } else if (key == "output_dir") {
    cfg.output_dir = std::string(value);
  } else if (key == "fixed_shape") {
    cfg.fixed_shape = parse_bool(key, value);
  } else if (key == "checkpoint_every") {
    cfg.checkpoint_every = size();
  } else if (key == "eval_every") {
    cfg.eval_every = size();
  } else if (key == "synth.family") {
    cfg.synth.family = parse_family(value);
  } else if (key == "synth.gt_points") {
    cfg.synth.gt_points = size();
  } else if (key == "synth.occlusion") {
    cfg.synth.occlusion = parse_number<double>(key, value);
  } else if (key == "synth.jitter") {
    cfg.synth.jitter = parse_number<double>(key, value);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown setting '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig cfg;
  apply_config_text(cfg, text.str());
  return cfg;
}

std::string to_text(const RunConfig& cfg) {
  const auto& m = cfg.model;
  std::ostringstream os;
  os << "model.c = " << m.c << "\n"
     << "model.n_in = " << m.n_in << "\n"
     << "model.n_coarse = " << m.n_coarse << "\n"
     << "model.merge_target = " << m.merge_target << "\n"
     << "model.up_ratios = " << m.up_ratios[0] << "," << m.up_ratios[1] << "\n"
     << "model.ccm_hw = " << m.ccm_hw[0] << "," << m.ccm_hw[1] << "\n"
     << "model.edgeconv = " << m.edgeconv[0].in << ":" << m.edgeconv[0].out << ":"
     << m.edgeconv[0].neighbors << "," << m.edgeconv[1].in << ":" << m.edgeconv[1].out << ":"
     << m.edgeconv[1].neighbors << "\n"
     << "model.conv1d_1 = " << branches_text(m.conv1d[0]) << "\n"
     << "model.conv1d_2 = " << branches_text(m.conv1d[1]) << "\n"
     << "model.heads = " << m.heads << "\n"
     << "model.decoder_depth = " << m.decoder_depth << "\n"
     << "model.group_size = " << m.group_size << "\n"
     << "model.use_ccm = " << (m.use_ccm ? "true" : "false") << "\n"
     << "model.use_alignment = " << (m.use_alignment ? "true" : "false") << "\n"
     << "model.use_inception = " << (m.use_inception ? "true" : "false") << "\n"
     << "seed = " << cfg.seed << "\n"
     << "iterations = " << cfg.iterations << "\n"
     << "lr = " << shortest(cfg.lr) << "\n"
     << "cosine_lr = " << (cfg.cosine_lr ? "true" : "false") << "\n"
     << "batch_size = " << cfg.batch_size << "\n"
     << "dataset = " << cfg.dataset.string() << "\n"
     << "output_dir = " << cfg.output_dir.string() << "\n"
     << "fixed_shape = " << (cfg.fixed_shape ? "true" : "false") << "\n"
     << "checkpoint_every = " << cfg.checkpoint_every << "\n"
     << "eval_every = " << cfg.eval_every << "\n"
     << "synth.family = " << family_name(cfg.synth.family) << "\n"
     << "synth.gt_points = " << cfg.synth.gt_points << "\n"
     << "synth.occlusion = " << shortest(cfg.synth.occlusion) << "\n"
     << "synth.jitter = " << shortest(cfg.synth.jitter) << "\n";
  return os.str();
}

}  // namespace tripoint::pipeline

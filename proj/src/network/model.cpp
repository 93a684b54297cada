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

#include "tripoint/network/model.hpp"

#include <algorithm>
#include <cmath>

#include "tripoint/error.hpp"

namespace tripoint::net {

namespace {

constexpr std::size_t kCdFrequencies = 32;

std::string stage_name(std::size_t stage) { return "upsampler" + std::to_string(stage); }


template <typename T>
void check_shape(const Tensor<T>& t, const Shape& want, const char* what) {
  if (t.shape() != want) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " expects " +
                                               ad::shape_string(want) + ", got " +
                                               ad::shape_string(t.shape()));
  }
}

void record(ShapeTrace* trace, const std::string& name, const Shape& shape) {
  if (trace != nullptr) (*trace)[name] = shape;
}


std::vector<std::size_t> ccm_widths(std::size_t c) {
  return {std::max<std::size_t>(4, c / 4), std::max<std::size_t>(4, c / 2), c, c};
}

template <typename T>
detail::MultiScale<T> make_multiscale(ParameterStore<T>& store, std::uint64_t seed,
                                      const std::string& name, const ModelConfig& cfg) {
  detail::MultiScale<T> ms;
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& spec = cfg.edgeconv[j];
    const std::string edge = name + ".edge" + std::to_string(j);
    ms.edge[j].theta = Linear<T>(store, seed, edge + ".theta", spec.in, spec.out, 1.0, false);
    ms.edge[j].phi = Linear<T>(store, seed, edge + ".phi", spec.in, spec.out);
    ms.edge[j].neighbors = spec.neighbors;

    const std::string conv = name + ".conv" + std::to_string(j);
    if (cfg.use_inception) {
      for (std::size_t b = 0; b < cfg.conv1d[j].size(); ++b) {
        const auto& bs = cfg.conv1d[j][b];
        const std::string branch = conv + ".branch" + std::to_string(b);
        detail::InceptionBranch<T> br;
        br.padding = bs.padding;
        const double bound = 1.0 / std::sqrt(static_cast<double>(spec.out * bs.kernel));
        for (std::size_t s = 0; s < bs.kernel; ++s) {
          br.taps.push_back(&add_uniform(store, seed, branch + ".tap" + std::to_string(s),
                                         {spec.out, bs.out}, bound));
        }
        br.bias = &add_constant(store, branch + ".bias", {bs.out}, 0.0);
        ms.conv[j].branches.push_back(std::move(br));
      }
    } else {
      ms.conv[j].pointwise = Linear<T>(store, seed, conv + ".pointwise", spec.out, kInceptionWidth);
    }
  }
  ms.fuse = Mlp<T>(store, seed, name + ".fuse", {2 * kInceptionWidth, cfg.width(), cfg.width()});
  return ms;
}

}  // namespace

PointCloud lexicographic_order(const PointCloud& cloud) {
  PointCloud out = cloud;
  std::stable_sort(out.points.begin(), out.points.end());
  return out;
}

template <typename T>
Tensor<T> cloud_tensor(Graph<T>& g, const PointCloud& cloud) {
  std::vector<T> data;
  data.reserve(cloud.size() * 3);
  for (const auto& p : cloud) {
    data.push_back(static_cast<T>(p.x));
    data.push_back(static_cast<T>(p.y));
    data.push_back(static_cast<T>(p.z));
  }
  return g.input({cloud.size(), 3}, std::move(data));
}

template <typename T>
PointCloud tensor_cloud(const Tensor<T>& t) {
  if (t.rank() != 2 || t.dim(1) != 3) {
    throw Error(ErrorCode::kShapeMismatch, "expected (n, 3), got " + ad::shape_string(t.shape()));
  }
  PointCloud out;
  out.points.reserve(t.dim(0));
  const auto v = t.value();
  for (std::size_t i = 0; i < t.dim(0); ++i) {
    out.points.push_back({static_cast<double>(v[3 * i]), static_cast<double>(v[3 * i + 1]),
                          static_cast<double>(v[3 * i + 2])});
  }
  return out;
}

template <typename T>
GeoFormer<T>::GeoFormer(const ModelConfig& config, std::uint64_t seed)
    : config_(config), store_(std::make_unique<ParameterStore<T>>()) {
  config_.validate();
  auto& st = *store_;
  const std::size_t c = config_.c;
  const std::size_t d = config_.width();

  point_encoder_.level1 = Mlp<T>(st, seed, "generator.points.level1", {3, c / 2, c});
  point_encoder_.level2 = Mlp<T>(st, seed, "generator.points.level2", {c + 3, c, c});
  point_encoder_.level3 = Mlp<T>(st, seed, "generator.points.level3", {c + 3, 2 * c, 2 * c});

  if (config_.use_ccm) {
    std::size_t in = 4;
    const auto widths = ccm_widths(c);
    for (std::size_t s = 0; s < widths.size(); ++s) {
      const std::string name = "generator.ccm.stage" + std::to_string(s);
      detail::CcmStage<T> stage;
      stage.down = Conv2d<T>(st, seed, name + ".down", in, widths[s], 3, 2);
      stage.res_a = Conv2d<T>(st, seed, name + ".res_a", widths[s], widths[s], 3, 1);
      stage.res_b = Conv2d<T>(st, seed, name + ".res_b", widths[s], widths[s], 3, 1);
      ccm_encoder_.stages.push_back(std::move(stage));
      in = widths[s];
    }
    ccm_encoder_.head = Linear<T>(st, seed, "generator.ccm.head", in, c);
  }

  aligner_.point_proj = Linear<T>(st, seed, "generator.align.point_proj", 2 * c, d);
  aligner_.point_embed = &add_uniform(st, seed, "generator.align.point_embed", {1, d}, 1.0);
  if (config_.use_ccm) {
    aligner_.view_proj = Linear<T>(st, seed, "generator.align.view_proj", c, d);
    aligner_.pose_proj = Linear<T>(st, seed, "generator.align.pose_proj", 9, d);
  }
  if (config_.use_alignment) {
    aligner_.attention =
        AttentionBlock<T>(st, seed, "generator.align.attention", d, config_.heads, false);
  }
  aligner_.mlp = Mlp<T>(st, seed, "generator.align.mlp", {d, d, d});

  coord_decoder_.queries =
      &add_uniform(st, seed, "generator.decoder.queries", {config_.n_coarse, d}, 1.0);
  coord_decoder_.condition = Linear<T>(st, seed, "generator.decoder.condition", 4 * c, d);
  for (std::size_t b = 0; b < config_.decoder_depth; ++b) {
    coord_decoder_.blocks.emplace_back(st, seed, "generator.decoder.block" + std::to_string(b), d,
                                       config_.heads, false);
  }
  coord_decoder_.head = Mlp<T>(st, seed, "generator.decoder.head", {d, d, 3});

  for (std::size_t s = 0; s < 2; ++s) {
    const std::string name = stage_name(s + 1);
    auto& u = upsamplers_[s];
    u.ratio = config_.up_ratios[s];
    u.multiscale = make_multiscale(st, seed, name + ".multiscale", config_);
    u.global_mlp = Mlp<T>(st, seed, name + ".global_mlp", {4 * c, d, d / 2});
    u.point_mlp = Mlp<T>(st, seed, name + ".point_mlp", {3, d / 2, d / 2});
    u.cd_proj = Linear<T>(st, seed, name + ".cd_proj", 2 * kCdFrequencies, d);
    u.self_attention = AttentionBlock<T>(st, seed, name + ".self_attention", d, config_.heads, false);
    u.cross_attention =
        AttentionBlock<T>(st, seed, name + ".cross_attention", d, config_.heads, true);
    u.fuse = Linear<T>(st, seed, name + ".fuse", 2 * d, d);
    for (std::size_t b = 0; b < config_.decoder_depth; ++b) {
      u.blocks.emplace_back(st, seed, name + ".block" + std::to_string(b), d, config_.heads, false);
    }
    u.ratio_embed = &add_uniform(st, seed, name + ".ratio_embed", {u.ratio, d}, 1.0);
    // Small initial offsets keep the untrained upsampler close to replication.
    u.head = Mlp<T>(st, seed, name + ".head", {d, d, 3}, 0.1);
  }
}

template <typename T>
std::vector<Parameter<T>*> GeoFormer<T>::parameters_with_prefix(std::string_view prefix) {
  std::vector<Parameter<T>*> out;
  for (auto* p : store_->all()) {
    if (std::string_view(p->name).substr(0, prefix.size()) == prefix) out.push_back(p);
  }
  return out;
}

template <typename T>
Tensor<T> GeoFormer<T>::encode_points(Graph<T>& g, const PointCloud& cloud) const {
  if (cloud.size() != config_.n_in) {
    throw Error(ErrorCode::kConfigMismatch, "point encoder expects " +
                                                std::to_string(config_.n_in) + " points, got " +
                                                std::to_string(cloud.size()));
  }
  const std::size_t c = config_.c;

  // Level 1: groups around farthest-point centers of the input.
  const std::size_t n1 = std::max<std::size_t>(1, cloud.size() / 4);
  const std::size_t k1 = std::min(config_.group_size, cloud.size());
  const auto idx1 = farthest_point_indices(cloud, n1, lexicographic_min_index(cloud));
  const PointCloud centers1 = select(cloud, idx1);
  const auto group1 = knn_query(cloud, centers1, k1);
  std::vector<T> rel1;
  rel1.reserve(n1 * k1 * 3);
  for (std::size_t i = 0; i < n1; ++i) {
    for (const std::size_t j : group1.row(i)) {
      rel1.push_back(static_cast<T>(cloud[j].x - centers1[i].x));
      rel1.push_back(static_cast<T>(cloud[j].y - centers1[i].y));
      rel1.push_back(static_cast<T>(cloud[j].z - centers1[i].z));
    }
  }
  const auto h1 = point_encoder_.level1(g.input({n1 * k1, 3}, std::move(rel1)));
  const auto f1 = ad::max_reduce(ad::reshape(h1, {n1, k1, c}), 1);

  // Level 2: groups of level-1 centers.
  const std::size_t n2 = std::max<std::size_t>(1, n1 / 4);
  const std::size_t k2 = std::min(config_.group_size, n1);
  const auto idx2 = farthest_point_indices(centers1, n2, lexicographic_min_index(centers1));
  const PointCloud centers2 = select(centers1, idx2);
  const auto group2 = knn_query(centers1, centers2, k2);
  std::vector<T> rel2;
  rel2.reserve(n2 * k2 * 3);
  for (std::size_t i = 0; i < n2; ++i) {
    for (const std::size_t j : group2.row(i)) {
      rel2.push_back(static_cast<T>(centers1[j].x - centers2[i].x));
      rel2.push_back(static_cast<T>(centers1[j].y - centers2[i].y));
      rel2.push_back(static_cast<T>(centers1[j].z - centers2[i].z));
    }
  }
  const auto in2 = ad::concat<T>(
      {g.input({n2 * k2, 3}, std::move(rel2)), ad::gather_rows(f1, std::span<const std::size_t>(group2.indices))}, 1);
  const auto f2 = ad::max_reduce(ad::reshape(point_encoder_.level2(in2), {n2, k2, c}), 1);

  // Level 3: all level-2 centers in one group, absolute coordinates.
  const auto in3 = ad::concat<T>({cloud_tensor(g, centers2), f2}, 1);
  const auto f3 = ad::max_reduce(point_encoder_.level3(in3), 0);
  return ad::reshape(f3, {1, 2 * c});
}

template <typename T>
Tensor<T> GeoFormer<T>::encode_ccm(Graph<T>& g, const TriPlaneSet& triplane) const {
  if (!config_.use_ccm) throw Error(ErrorCode::kInvalidConfig, "image branch is disabled");
  const std::size_t h = config_.ccm_hw[0];
  const std::size_t w = config_.ccm_hw[1];
  std::vector<Tensor<T>> rows;
  for (const auto& map : triplane) {
    if (map.height != h || map.width != w) {
      throw Error(ErrorCode::kShapeMismatch, "map is " + std::to_string(map.height) + "x" +
                                                 std::to_string(map.width) + ", config wants " +
                                                 std::to_string(h) + "x" + std::to_string(w));
    }
    std::vector<T> data(4 * h * w);
    for (std::size_t px = 0; px < h * w; ++px) {
      for (std::size_t ch = 0; ch < 3; ++ch) data[ch * h * w + px] = map.pixels[px * 3 + ch];
      data[3 * h * w + px] = static_cast<T>(map.mask[px]);
    }
    auto x = g.input({4, h, w}, std::move(data));
    for (const auto& stage : ccm_encoder_.stages) {
      x = ad::relu(stage.down(x));
      const auto y = ad::relu(stage.res_a(x));
      x = ad::relu(ad::add(x, stage.res_b(y)));
    }
    const std::size_t ch = x.dim(0);
    const auto pooled = ad::mean_reduce(ad::reshape(x, {ch, x.dim(1) * x.dim(2)}), 1);
    rows.push_back(ad::reshape(pooled, {1, ch}));
  }
  return ccm_encoder_.head(ad::concat<T>(std::span<const Tensor<T>>(rows), 0));
}

template <typename T>
Tensor<T> GeoFormer<T>::align_features(const Tensor<T>& fp, const Tensor<T>& fc,
                                       const std::array<CameraPose, 3>& poses,
                                       ShapeTrace* trace) const {
  const std::size_t c = config_.c;
  const std::size_t d = config_.width();
  check_shape(fp, {1, 2 * c}, "align_features point feature");
  auto& g = fp.graph();

  const auto point_token = ad::add(aligner_.point_proj(fp), g.param(*aligner_.point_embed));
  Tensor<T> view_tokens;
  if (config_.use_ccm) {
    check_shape(fc, {3, c}, "align_features image feature");
    std::vector<T> pose(27);
    for (std::size_t v = 0; v < 3; ++v) {
      for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t k = 0; k < 3; ++k) {
          pose[v * 9 + r * 3 + k] = static_cast<T>(poses[v].rotation[r][k]);
        }
      }
    }
    view_tokens = ad::add(aligner_.view_proj(fc), aligner_.pose_proj(g.input({3, 9}, pose)));
  } else {
    view_tokens = g.input({3, d}, std::vector<T>(3 * d, T(0)));
  }
  const auto tokens = ad::concat<T>({point_token, view_tokens}, 0);
  record(trace, "F_a'", tokens.shape());

  Tensor<T> fa;
  if (config_.use_alignment) {
    fa = ad::mean_reduce(aligner_.mlp(aligner_.attention(tokens)), 0);
  } else {
    fa = aligner_.mlp(ad::reshape(ad::mean_reduce(tokens, 0), {1, d}));
  }
  fa = ad::reshape(fa, {1, d});
  record(trace, "F_a", fa.shape());
  return ad::concat<T>({fp, fa}, 1);
}

template <typename T>
Tensor<T> GeoFormer<T>::decode_coords(const Tensor<T>& f, std::size_t n_out) const {
  if (n_out != config_.n_coarse) {
    throw Error(ErrorCode::kShapeMismatch, "decoder has " + std::to_string(config_.n_coarse) +
                                               " queries, asked for " + std::to_string(n_out));
  }
  check_shape(f, {1, 4 * config_.c}, "decode_coords feature");
  auto& g = f.graph();
  auto x = ad::add(g.param(*coord_decoder_.queries), coord_decoder_.condition(f));
  for (const auto& block : coord_decoder_.blocks) x = block(x);
  return coord_decoder_.head(x);
}

template <typename T>
typename GeoFormer<T>::Coarse GeoFormer<T>::generate_coarse(Graph<T>& g, const PointCloud& cloud,
                                                            ShapeTrace* trace) const {
  const auto fp = encode_points(g, cloud);
  record(trace, "F_p", fp.shape());
  Tensor<T> fc;
  std::array<CameraPose, 3> poses = ccm::canonical_views();
  if (config_.use_ccm) {
    const auto canonical = normalize_canonical(cloud);
    const auto triplane =
        ccm::render_triplane(canonical.cloud, config_.ccm_hw[0], config_.ccm_hw[1]);
    for (std::size_t v = 0; v < 3; ++v) poses[v] = triplane[v].pose;
    fc = encode_ccm(g, triplane);
    record(trace, "F_c", fc.shape());
  }
  const auto f = align_features(fp, fc, poses, trace);
  record(trace, "F", f.shape());
  const auto p0 = decode_coords(f, config_.n_coarse);
  record(trace, "P0", p0.shape());
  return {p0, f};
}

template <typename T>
Tensor<T> GeoFormer<T>::edge_conv(const detail::EdgeConv<T>& layer, const Tensor<T>& x,
                                  const NeighborGraph& graph) const {
  const std::size_t n = x.dim(0);
  const std::size_t k = graph.k;
  const auto u = layer.theta(x);
  const auto base = ad::sub(layer.phi(x), u);
  const auto neighbors = ad::gather_rows(u, std::span<const std::size_t>(graph.indices));
  const auto rows = ad::repeat_each(n, k);
  const auto centers = ad::gather_rows(base, std::span<const std::size_t>(rows));
  const auto h = ad::relu(ad::add(neighbors, centers));
  return ad::max_reduce(ad::reshape(h, {n, k, layer.theta.out()}), 1);
}

template <typename T>
Tensor<T> GeoFormer<T>::inception(const detail::Inception<T>& layer, const Tensor<T>& x,
                                  const NeighborGraph& graph) const {
  if (!config_.use_inception) return ad::relu(layer.pointwise(x));
  auto& g = x.graph();
  const std::size_t n = x.dim(0);
  const std::size_t len = graph.k + 1;  // self followed by neighbors nearest-first
  auto sequence = [&](std::size_t i, std::size_t t) {
    return t == 0 ? i : graph.indices[i * graph.k + t - 1];
  };
  std::vector<Tensor<T>> outs;
  for (const auto& branch : layer.branches) {
    const std::size_t o = branch.taps.front()->shape[1];
    const auto zero_row = g.input({1, o}, std::vector<T>(o, T(0)));
    Tensor<T> acc;
    for (std::size_t s = 0; s < branch.taps.size(); ++s) {
      const auto padded = ad::concat<T>({ad::matmul(x, g.param(*branch.taps[s])), zero_row}, 0);
      std::vector<std::size_t> idx(n * len);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < len; ++t) {
          const auto pos = static_cast<std::ptrdiff_t>(t + s) -
                           static_cast<std::ptrdiff_t>(branch.padding);
          idx[i * len + t] = pos >= 0 && static_cast<std::size_t>(pos) < len
                                 ? sequence(i, static_cast<std::size_t>(pos))
                                 : n;
        }
      }
      const auto tap = ad::gather_rows(padded, std::span<const std::size_t>(idx));
      acc = s == 0 ? tap : ad::add(acc, tap);
    }
    const auto h = ad::relu(ad::add(acc, g.param(*branch.bias)));
    outs.push_back(ad::max_reduce(ad::reshape(h, {n, len, o}), 1));
  }
  return outs.size() == 1 ? outs.front() : ad::concat<T>(std::span<const Tensor<T>>(outs), 1);
}

template <typename T>
Tensor<T> GeoFormer<T>::extract_multiscale(Graph<T>& g, std::size_t stage,
                                           const PointCloud& cloud, ShapeTrace* trace) const {
  if (stage < 1 || stage > 2) throw Error(ErrorCode::kInvalidConfig, "stage must be 1 or 2");
  const auto& ms = upsamplers_[stage - 1].multiscale;
  const std::string tag = "up" + std::to_string(stage) + ".";
  for (const auto& e : ms.edge) {
    if (cloud.size() <= e.neighbors) {
      throw Error(ErrorCode::kTooFewPoints, "EdgeConv needs more than " +
                                                std::to_string(e.neighbors) + " points, got " +
                                                std::to_string(cloud.size()));
    }
  }
  const auto graph1 = knn_graph(cloud, ms.edge[0].neighbors);
  const auto graph2 = ms.edge[1].neighbors == ms.edge[0].neighbors
                          ? graph1
                          : knn_graph(cloud, ms.edge[1].neighbors);

  const auto x = cloud_tensor(g, cloud);
  const auto e1 = edge_conv(ms.edge[0], x, graph1);
  const auto e2 = edge_conv(ms.edge[1], e1, graph2);
  const auto c1 = inception(ms.conv[0], e1, graph1);
  const auto c2 = inception(ms.conv[1], e2, graph2);
  const auto fused = ms.fuse(ad::concat<T>({c1, c2}, 1));
  record(trace, tag + "F_e1", e1.shape());
  record(trace, tag + "F_e2", e2.shape());
  record(trace, tag + "F_e1'", c1.shape());
  record(trace, tag + "F_e2'", c2.shape());
  record(trace, tag + "F_p'", fused.shape());
  return fused;
}

template <typename T>
Tensor<T> GeoFormer<T>::upsample(std::size_t stage, const Tensor<T>& prev,
                                 const PointCloud& partial, const Tensor<T>& f,
                                 ShapeTrace* trace) const {
  if (stage < 1 || stage > 2) throw Error(ErrorCode::kInvalidConfig, "stage must be 1 or 2");
  if (prev.rank() != 2 || prev.dim(1) != 3 || prev.dim(0) == 0) {
    throw Error(ErrorCode::kShapeMismatch, "upsample expects (n, 3), got " +
                                               ad::shape_string(prev.shape()));
  }
  check_shape(f, {1, 4 * config_.c}, "upsample feature");
  auto& g = prev.graph();
  const auto& u = upsamplers_[stage - 1];
  const std::string tag = "up" + std::to_string(stage) + ".";
  const std::size_t n = prev.dim(0);
  const std::size_t r = u.ratio;

  const auto fp = extract_multiscale(g, stage, partial, trace);

  const std::vector<std::size_t> broadcast(n, 0);
  const auto global = ad::gather_rows(u.global_mlp(f), std::span<const std::size_t>(broadcast));
  auto tokens = ad::concat<T>({global, u.point_mlp(prev)}, 1);
  record(trace, tag + "F_ai'", tokens.shape());

  // Chamfer distance to the partial input, embedded with geometric frequencies.
  const auto cd = ad::reshape(ad::chamfer_l2(cloud_tensor(g, partial), prev), {1, 1});
  std::vector<T> freq(kCdFrequencies);
  for (std::size_t k = 0; k < kCdFrequencies; ++k) {
    freq[k] = static_cast<T>(
        std::pow(1000.0, static_cast<double>(k) / static_cast<double>(kCdFrequencies - 1)));
  }
  const auto phase = ad::matmul(cd, g.input({1, kCdFrequencies}, std::move(freq)));
  const auto embed = u.cd_proj(ad::concat<T>({ad::sin(phase), ad::cos(phase)}, 1));
  tokens = ad::add(tokens, embed);

  const auto fai = u.self_attention(tokens);
  record(trace, tag + "F_ai", fai.shape());
  const auto fpi = u.cross_attention(fai, fp);
  record(trace, tag + "F_pi", fpi.shape());

  auto x = u.fuse(ad::concat<T>({fpi, fai}, 1));
  for (const auto& block : u.blocks) x = block(x);
  const auto parents = ad::repeat_each(n, r);
  std::vector<std::size_t> child(n * r);
  for (std::size_t i = 0; i < child.size(); ++i) child[i] = i % r;
  const auto expanded = ad::add(ad::gather_rows(x, std::span<const std::size_t>(parents)),
                                ad::gather_rows(g.param(*u.ratio_embed),
                                                std::span<const std::size_t>(child)));
  const auto delta = u.head(expanded);
  record(trace, tag + "Delta", delta.shape());
  const auto out = ad::add(ad::gather_rows(prev, std::span<const std::size_t>(parents)), delta);
  record(trace, tag + "P_next", out.shape());
  return out;
}

template <typename T>
Tensor<T> GeoFormer<T>::merge(const Tensor<T>& partial, const Tensor<T>& p0) const {
  auto& g = partial.graph();
  std::vector<std::size_t> idx;
  if (const auto* logged = g.next_replayed()) {
    idx = *logged;
  } else {
    const PointCloud combined = concat(tensor_cloud(partial), tensor_cloud(p0));
    if (combined.size() < config_.merge_target) {
      throw Error(ErrorCode::kBadCount, "merge target exceeds available points");
    }
    idx = farthest_point_indices(combined, config_.merge_target,
                                 lexicographic_min_index(combined));
    // The sampler is an arg-max choice like a max-pool pick.
    g.log_choice(idx);
  }
  return ad::gather_rows(ad::concat<T>({partial, p0}, 0), std::span<const std::size_t>(idx));
}

template <typename T>
typename GeoFormer<T>::Forward GeoFormer<T>::forward(Graph<T>& g, const PointCloud& partial,
                                                     ShapeTrace* trace) const {
  const PointCloud sorted = lexicographic_order(partial);
  Forward out;
  const auto coarse = generate_coarse(g, sorted, trace);
  out.p0 = coarse.points;
  out.feature = coarse.feature;
  out.merged = merge(cloud_tensor(g, sorted), coarse.points);
  record(trace, "merged", out.merged.shape());
  out.p1 = upsample(1, out.merged, sorted, coarse.feature, trace);
  out.p2 = upsample(2, out.p1, sorted, coarse.feature, trace);
  return out;
}

template <typename T>
Tensor<T> GeoFormer<T>::loss(const Forward& out, const Tensor<T>& gt,
                             std::array<Tensor<T>, 3>* terms) const {
  const std::array<Tensor<T>, 3> t = {ad::arcosh1p(ad::chamfer_l2(out.p0, gt)),
                                      ad::arcosh1p(ad::chamfer_l2(out.p1, gt)),
                                      ad::arcosh1p(ad::chamfer_l2(out.p2, gt))};
  if (terms != nullptr) *terms = t;
  return ad::add(ad::add(t[0], t[1]), t[2]);
}

template <typename T>
typename GeoFormer<T>::Completion GeoFormer<T>::complete(const PointCloud& partial) const {
  Graph<T> g;
  const auto out = forward(g, partial);
  return {tensor_cloud(out.p0), tensor_cloud(out.p1), tensor_cloud(out.p2)};
}

template class GeoFormer<float>;
template class GeoFormer<double>;
template Tensor<float> cloud_tensor<float>(Graph<float>&, const PointCloud&);
template Tensor<double> cloud_tensor<double>(Graph<double>&, const PointCloud&);
template PointCloud tensor_cloud<float>(const Tensor<float>&);
template PointCloud tensor_cloud<double>(const Tensor<double>&);

}  // namespace tripoint::net

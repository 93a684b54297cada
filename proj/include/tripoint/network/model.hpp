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

#pragma once

// Completion network: a coarse point generator conditioned on point and
// tri-plane image features, followed by two offset-based upsamplers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tripoint/ccm.hpp"
#include "tripoint/geometry.hpp"
#include "tripoint/network/config.hpp"
#include "tripoint/network/layers.hpp"

namespace tripoint::net {

using ccm::CameraPose;
using ccm::TriPlaneSet;

// Shapes of named intermediate features, filled by forward passes on request.
using ShapeTrace = std::map<std::string, Shape>;

namespace detail {

template <typename T>
struct PointEncoder {
  Mlp<T> level1;  // relative xyz -> c
  Mlp<T> level2;  // relative xyz + level-1 feature -> c
  Mlp<T> level3;  // absolute xyz + level-2 feature -> 2c, pooled globally
};

template <typename T>
struct CcmStage {
  Conv2d<T> down;
  Conv2d<T> res_a;
  Conv2d<T> res_b;
};

template <typename T>
struct CcmEncoder {
  std::vector<CcmStage<T>> stages;
  Linear<T> head;
};

template <typename T>
struct Aligner {
  Linear<T> point_proj;
  Parameter<T>* point_embed = nullptr;
  Linear<T> view_proj;  // present only with the image branch
  Linear<T> pose_proj;
  AttentionBlock<T> attention;  // present only with alignment enabled
  Mlp<T> mlp;
};

template <typename T>
struct CoordDecoder {
  Parameter<T>* queries = nullptr;
  Linear<T> condition;
  std::vector<AttentionBlock<T>> blocks;
  Mlp<T> head;
};

template <typename T>
struct EdgeConv {
  Linear<T> theta;  // applied to neighbors, no bias
  Linear<T> phi;    // applied to the center
  std::size_t neighbors = 0;
};

template <typename T>
struct InceptionBranch {
  std::vector<Parameter<T>*> taps;  // kernel x (in, out)
  Parameter<T>* bias = nullptr;
  std::size_t padding = 0;
};

template <typename T>
struct Inception {
  std::vector<InceptionBranch<T>> branches;
  Linear<T> pointwise;  // replaces the branches when inception is disabled
};

template <typename T>
struct MultiScale {
  std::array<EdgeConv<T>, 2> edge;
  std::array<Inception<T>, 2> conv;
  Mlp<T> fuse;
};

template <typename T>
struct Upsampler {
  MultiScale<T> multiscale;
  Mlp<T> global_mlp;
  Mlp<T> point_mlp;
  Linear<T> cd_proj;
  AttentionBlock<T> self_attention;
  AttentionBlock<T> cross_attention;
  Linear<T> fuse;
  std::vector<AttentionBlock<T>> blocks;
  Parameter<T>* ratio_embed = nullptr;
  Mlp<T> head;
  std::size_t ratio = 1;
};

}  // namespace detail

template <typename T>
class GeoFormer {
 public:
  struct Coarse {
    Tensor<T> points;   // (n_coarse, 3)
    Tensor<T> feature;  // (1, 4c)
  };

  struct Forward {
    Tensor<T> p0;
    Tensor<T> merged;
    Tensor<T> p1;
    Tensor<T> p2;
    Tensor<T> feature;
  };

  struct Completion {
    PointCloud p0;
    PointCloud p1;
    PointCloud p2;
  };

  GeoFormer(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ParameterStore<T>& parameters() { return *store_; }
  const ParameterStore<T>& parameters() const { return *store_; }
  std::vector<Parameter<T>*> parameters_with_prefix(std::string_view prefix);

  // (1, 2c) global point feature.
  Tensor<T> encode_points(Graph<T>& g, const PointCloud& cloud) const;
  // (3, c), one row per view.
  Tensor<T> encode_ccm(Graph<T>& g, const TriPlaneSet& triplane) const;
  // (1, 2c) + (3, c) -> (1, 4c).
  Tensor<T> align_features(const Tensor<T>& fp, const Tensor<T>& fc,
                           const std::array<CameraPose, 3>& poses,
                           ShapeTrace* trace = nullptr) const;
  // (1, 4c) -> (n_out, 3) absolute points; n_out must equal n_coarse.
  Tensor<T> decode_coords(const Tensor<T>& f, std::size_t n_out) const;
  Coarse generate_coarse(Graph<T>& g, const PointCloud& cloud, ShapeTrace* trace = nullptr) const;

  // (N_p, 2c) features of the partial cloud for upsampler `stage` (1 or 2).
  Tensor<T> extract_multiscale(Graph<T>& g, std::size_t stage, const PointCloud& cloud,
                               ShapeTrace* trace = nullptr) const;
  // (n, 3) -> (ratio * n, 3).
  Tensor<T> upsample(std::size_t stage, const Tensor<T>& prev, const PointCloud& partial,
                     const Tensor<T>& f, ShapeTrace* trace = nullptr) const;

  // Farthest point resampling of partial ∪ p0 to merge_target rows, started
  // from the lexicographically smallest point.
  Tensor<T> merge(const Tensor<T>& partial, const Tensor<T>& p0) const;

  // The partial cloud is reordered lexicographically first, so the result
  // does not depend on input order.
  Forward forward(Graph<T>& g, const PointCloud& partial, ShapeTrace* trace = nullptr) const;

  // Sum of arcosh(1 + CD-l2) over the three stages against `gt`.
  Tensor<T> loss(const Forward& out, const Tensor<T>& gt,
                 std::array<Tensor<T>, 3>* terms = nullptr) const;

  Completion complete(const PointCloud& partial) const;

 private:
  Tensor<T> edge_conv(const detail::EdgeConv<T>& layer, const Tensor<T>& x,
                      const NeighborGraph& graph) const;
  Tensor<T> inception(const detail::Inception<T>& layer, const Tensor<T>& x,
                      const NeighborGraph& graph) const;

  ModelConfig config_;
  std::unique_ptr<ParameterStore<T>> store_;
  detail::PointEncoder<T> point_encoder_;
  detail::CcmEncoder<T> ccm_encoder_;
  detail::Aligner<T> aligner_;
  detail::CoordDecoder<T> coord_decoder_;
  std::array<detail::Upsampler<T>, 2> upsamplers_;
};

// Point cloud <-> (n, 3) tensor conversions.
template <typename T>
Tensor<T> cloud_tensor(Graph<T>& g, const PointCloud& cloud);
template <typename T>
PointCloud tensor_cloud(const Tensor<T>& t);

// Stable lexicographic sort of the points.
PointCloud lexicographic_order(const PointCloud& cloud);

}  // namespace tripoint::net

// Copyright 2026 The zsrobust Authors.
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

#ifndef ZSROBUST_HARNESS_PRETRAIN_H_
#define ZSROBUST_HARNESS_PRETRAIN_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"
#include "zsrobust/model/dual_encoder.h"

namespace zsrobust {

// Image-caption corpus for the toy dual encoder. Every labelled image is
// captioned with one of `caption_templates`; on top of that, a fraction of
// extra pairs show a class name written onto a random corpus image and are
// captioned with the written word alone. The written-word pairs are what
// gives the encoder its text-reading behaviour.
struct PretrainSpec {
  std::vector<std::string> caption_templates = {"a photo of a {}", "a {}", "a picture of a {}"};
  double text_fraction = 0.5;  // written-word pairs per labelled image
  int font_scale = 0;          // 0 picks AutoFontScale(height)
  std::uint64_t seed = 0;

  void Validate() const;
};

nlohmann::json PretrainSpecToJson(const PretrainSpec& spec);
PretrainSpec PretrainSpecFromJson(const nlohmann::json& j);

std::vector<CaptionedImage> BuildPretrainingCorpus(const Dataset& images, const PretrainSpec& spec);

// Words the encoder's vocabulary must contain beyond the captions: the
// caption templates and the default zero-shot prompts.
std::vector<std::string> PretrainVocabulary(const PretrainSpec& spec,
                                            const std::vector<std::string>& prompt_templates);

}  // namespace zsrobust

#endif  // ZSROBUST_HARNESS_PRETRAIN_H_

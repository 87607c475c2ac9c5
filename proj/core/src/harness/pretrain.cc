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

#include "zsrobust/harness/pretrain.h"

#include <set>

#include "zsrobust/common/error.h"
#include "zsrobust/common/rng.h"
#include "zsrobust/shiftgen/font.h"
#include "zsrobust/shiftgen/typographic.h"

namespace zsrobust {
namespace {

std::string Fill(const std::string& tmpl, const std::string& name) {
  const auto pos = tmpl.find("{}");
  if (pos == std::string::npos) return tmpl;
  return tmpl.substr(0, pos) + name + tmpl.substr(pos + 2);
}

}  // namespace

void PretrainSpec::Validate() const {
  if (caption_templates.empty()) throw InvalidArgumentError("no caption templates");
  for (const auto& t : caption_templates) {
    if (t.find("{}") == std::string::npos) {
      throw InvalidArgumentError("caption template '" + t + "' has no {} placeholder");
    }
  }
  if (!(text_fraction >= 0 && text_fraction <= 4)) {
    throw InvalidArgumentError("text_fraction must be in [0, 4]");
  }
  if (font_scale < 0) throw InvalidArgumentError("font_scale must be >= 0");
}

nlohmann::json PretrainSpecToJson(const PretrainSpec& s) {
  return {{"caption_templates", s.caption_templates},
          {"text_fraction", s.text_fraction},
          {"font_scale", s.font_scale},
          {"seed", s.seed}};
}

PretrainSpec PretrainSpecFromJson(const nlohmann::json& j) {
  static const std::set<std::string> kKeys = {"caption_templates", "text_fraction", "font_scale",
                                              "seed"};
  if (!j.is_object()) throw ConfigError("pretraining spec must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown pretraining key '" + key + "'");
  }
  PretrainSpec s;
  try {
    s.caption_templates = j.value("caption_templates", s.caption_templates);
    s.text_fraction = j.value("text_fraction", s.text_fraction);
    s.font_scale = j.value("font_scale", s.font_scale);
    s.seed = j.value("seed", s.seed);
    s.Validate();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pretraining spec: ") + e.what());
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("pretraining spec: ") + e.what());
  }
  return s;
}

std::vector<CaptionedImage> BuildPretrainingCorpus(const Dataset& images, const PretrainSpec& spec) {
  spec.Validate();
  if (images.empty()) throw InvalidArgumentError("pretraining corpus source is empty");
  const ImageShape shape = images.input_shape();
  const auto& names = images.class_names();
  std::vector<CaptionedImage> corpus;

  Rng caption_rng = MakeRng(spec.seed, "pretrain/captions");
  std::uniform_int_distribution<std::size_t> pick_template(0, spec.caption_templates.size() - 1);
  for (const auto& ex : images.examples()) {
    corpus.push_back({ex.image, Fill(spec.caption_templates[pick_template(caption_rng)],
                                     names[static_cast<std::size_t>(ex.label)])});
  }

  const auto extra =
      static_cast<std::size_t>(spec.text_fraction * static_cast<double>(images.size()));
  const int scale = spec.font_scale > 0 ? spec.font_scale : AutoFontScale(shape.height);
  const int cell = kGlyphSize * scale;
  for (std::size_t i = 0; i < extra; ++i) {
    Rng rng = MakeRng(spec.seed, "pretrain/written", i);
    std::uniform_int_distribution<std::size_t> pick_image(0, images.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_word(0, names.size() - 1);
    Image img = images[pick_image(rng)].image;
    const std::string& word = names[pick_word(rng)];
    const int copies = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < copies; ++k) {
      std::uniform_int_distribution<int> px(0, std::max(0, shape.width - cell));
      std::uniform_int_distribution<int> py(0, std::max(0, shape.height - cell));
      const TextLayout layout = LayoutText(shape, word, {px(rng), py(rng)}, scale);
      RenderText(img, layout, scale);
    }
    corpus.push_back({std::move(img), word});
  }
  return corpus;
}

std::vector<std::string> PretrainVocabulary(const PretrainSpec& spec,
                                            const std::vector<std::string>& prompt_templates) {
  std::vector<std::string> words;
  for (const auto& t : spec.caption_templates) words.push_back(Fill(t, ""));
  for (const auto& t : prompt_templates) words.push_back(Fill(t, ""));
  return words;
}

}  // namespace zsrobust

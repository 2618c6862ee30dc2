// Copyright (c) 2026 vshadow authors. All rights reserved.
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

#include "vshadow/eval/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vshadow/eval/metrics.hpp"
#include "vshadow/features/embedder.hpp"

namespace vshadow::eval {

namespace {

const char* const kColumnHeaders[] = {"S1-CER \xe2\x86\x93", "S1-WER \xe2\x86\x93",
                                      "UTMOS \xe2\x86\x91",
                                      "SpeechBERTScore \xe2\x86\x91"};

std::string Cell(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void AppendPadded(std::string* out, const std::string& text, std::size_t width,
                  bool right_align) {
  // Arrow glyphs are 3 bytes but 1 column; pad by display width.
  std::size_t display = 0;
  for (const char c : text) {
    if ((c & 0xc0) != 0x80) ++display;
  }
  const std::size_t pad = width > display ? width - display : 0;
  if (right_align) out->append(pad, ' ');
  out->append(text);
  if (!right_align) out->append(pad, ' ');
}

}  // namespace

std::string EvalReport::Table() const {
  constexpr std::size_t kNumWidth = 18;
  std::size_t id_width = 9;  // fits "utterance" and "mean"
  for (const auto& row : rows) id_width = std::max(id_width, row.utterance_id.size());

  std::string out;
  out += "system: " + system_label + "  (target: " + target_feature +
         ", seed: " + std::to_string(seed) + ")\n";
  AppendPadded(&out, "utterance", id_width, false);
  for (const auto* header : kColumnHeaders) AppendPadded(&out, header, kNumWidth, true);
  out += '\n';
  for (const auto& row : rows) {
    AppendPadded(&out, row.utterance_id, id_width, false);
    AppendPadded(&out, Cell(row.s1_cer), kNumWidth, true);
    AppendPadded(&out, Cell(row.s1_wer), kNumWidth, true);
    AppendPadded(&out, Cell(row.mos), kNumWidth, true);
    AppendPadded(&out, Cell(row.speech_bert_score), kNumWidth, true);
    out += '\n';
  }
  AppendPadded(&out, "mean", id_width, false);
  AppendPadded(&out, Cell(mean_s1_cer), kNumWidth, true);
  AppendPadded(&out, Cell(mean_s1_wer), kNumWidth, true);
  AppendPadded(&out, Cell(mean_mos), kNumWidth, true);
  AppendPadded(&out, Cell(mean_speech_bert_score), kNumWidth, true);
  out += '\n';
  if (!warnings.empty()) {
    out += "warnings (" + std::to_string(warnings.size()) + "):\n";
    for (const auto& w : warnings) out += "  " + w + "\n";
  }
  return out;
}

std::string EvalReport::RecordsJsonl() const {
  std::ostringstream out;
  auto number_or_null = [](double v) {
    return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
  };
  for (const auto& row : rows) {
    nlohmann::json j{{"type", "utterance"},
                     {"utterance_id", row.utterance_id},
                     {"s1_cer", row.s1_cer},
                     {"s1_wer", row.s1_wer},
                     {"mos", number_or_null(row.mos)},
                     {"speech_bert_score", row.speech_bert_score}};
    out << j.dump() << '\n';
  }
  nlohmann::json summary{{"type", "summary"},
                         {"system", system_label},
                         {"target_feature", target_feature},
                         {"seed", seed},
                         {"scored", rows.size()},
                         {"mean_s1_cer", mean_s1_cer},
                         {"mean_s1_wer", mean_s1_wer},
                         {"mean_mos", number_or_null(mean_mos)},
                         {"mean_speech_bert_score", mean_speech_bert_score},
                         {"warnings", warnings}};
  out << summary.dump() << '\n';
  return out.str();
}

EvalReport EvaluateSystem(const SystemOutputs& outputs,
                          const data::Manifest& manifest,
                          const TranscriptProvider& transcripts,
                          const MosPredictor* mos,
                          const ReferenceFeatureLoader& reference_features,
                          const BertScoreEmbedder& embedder,
                          const EvalSettings& settings) {
  if (!reference_features) throw Error("reference feature loader is required");
  const auto embed = [&](const data::FeatureSequence& seq) {
    if (embedder) return embedder(seq);
    return features::PseudoProjectRows(seq.data, settings.bertscore_dim,
                                       settings.bertscore_seed);
  };

  EvalReport report;
  report.system_label = outputs.label;
  double sum_cer = 0.0, sum_wer = 0.0, sum_mos = 0.0, sum_sbs = 0.0;
  int n_mos = 0;
  for (const data::TripletRecord* rec : manifest.SplitRecords(settings.split)) {
    const auto out_it = outputs.features.find(rec->utterance_id);
    if (out_it == outputs.features.end()) {
      report.warnings.push_back("missing output for " + rec->utterance_id);
      continue;
    }
    const data::FeatureSequence& gen = out_it->second;
    if (report.target_feature.empty()) {
      report.target_feature = data::FeatureKindName(gen.kind);
    }

    EvalRow row;
    row.utterance_id = rec->utterance_id;
    const std::string ref_text = transcripts.Reference(*rec, data::Role::kL1S1);
    const std::string hyp_text = transcripts.Hypothesis(gen);
    row.s1_wer = S1ErrorRate(hyp_text, ref_text, Tokenizer::kWord);
    row.s1_cer = S1ErrorRate(hyp_text, ref_text, Tokenizer::kChar);
    row.speech_bert_score =
        SpeechBertScoreRows(embed(gen), embed(reference_features(*rec)));
    const auto audio_it = outputs.audio.find(rec->utterance_id);
    if (mos != nullptr && audio_it != outputs.audio.end()) {
      row.mos = mos->Predict(audio_it->second);
      sum_mos += row.mos;
      ++n_mos;
    }
    sum_cer += row.s1_cer;
    sum_wer += row.s1_wer;
    sum_sbs += row.speech_bert_score;
    report.rows.push_back(std::move(row));
  }

  const double n = static_cast<double>(report.rows.size());
  if (!report.rows.empty()) {
    report.mean_s1_cer = sum_cer / n;
    report.mean_s1_wer = sum_wer / n;
    report.mean_speech_bert_score = sum_sbs / n;
  }
  if (n_mos > 0) report.mean_mos = sum_mos / n_mos;
  return report;
}

}  // namespace vshadow::eval

// Copyright 2026 The eqemb Authors. All Rights Reserved.
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

#include "eqemb/grid.h"

#include <cstdio>
#include <map>

#include "eqemb/error.h"
#include "eqemb/evaluation.h"

namespace eqemb {

std::vector<ModelConfig> enumerate_grid(const GridSpec& grid, const ModelConfig& base) {
  std::vector<ModelConfig> out;
  for (Mode mode : grid.modes) {
    for (std::size_t k : grid.dims) {
      for (std::size_t w : grid.word_windows) {
        if (mode == Mode::kBaseline) {
          ModelConfig c = base;
          c.mode = mode;
          c.dim = k;
          c.word_window = w;
          c.eq_window = w;
          out.push_back(c);
          continue;
        }
        for (std::size_t e : grid.eq_windows) {
          if (e < w) continue;
          ModelConfig c = base;
          c.mode = mode;
          c.dim = k;
          c.word_window = w;
          c.eq_window = e;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

std::vector<GridRun> grid_select(std::span<const ModelConfig> configs, const TrainingData& data,
                                 std::span<const HeldOutItem> test, PseudoReading reading) {
  std::vector<GridRun> runs;
  for (const ModelConfig& config : configs) {
    GridRun run;
    run.config = config;
    try {
      const TrainedModel model = train_model(data, config);
      const ScoringModel scorer{&model.tables, config.mode, config.unit_mean};
      const EvalReport valid = evaluate("validation", data.validation, scorer, reading);
      const EvalReport tst = evaluate("test", test, scorer, reading);
      run.valid_pseudo = valid.mean_pseudo;
      run.valid_predictive = valid.mean_predictive;
      run.test_pseudo = tst.mean_pseudo;
      run.epochs = model.trace.size();
      run.ok = true;
    } catch (const Error& e) {
      run.error = e.what();
    }
    runs.push_back(std::move(run));
  }
  std::map<std::pair<Mode, std::size_t>, std::size_t> best;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].ok) continue;
    const auto key = std::make_pair(runs[i].config.mode, runs[i].config.dim);
    auto it = best.find(key);
    if (it == best.end() || runs[i].valid_pseudo > runs[it->second].valid_pseudo) {
      best[key] = i;
    }
  }
  for (const auto& [_, i] : best) runs[i].selected = true;
  return runs;
}

std::string grid_report_tsv(std::span<const GridRun> runs) {
  std::string out =
      "mode\tK\tW\tE\tvalid_pseudo_ll\ttest_pseudo_ll\tepochs\tselected\tstatus\n";
  char buf[64];
  for (const auto& r : runs) {
    const ModelConfig& c = r.config;
    out += std::string(mode_name(c.mode)) + "\t" + std::to_string(c.dim) + "\t" +
           std::to_string(c.word_window) + "\t" +
           (c.mode == Mode::kBaseline ? std::string("-") : std::to_string(c.eq_window)) + "\t";
    if (r.ok) {
      std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t", r.valid_pseudo, r.test_pseudo);
      out += buf + std::to_string(r.epochs) + "\t" + (r.selected ? "yes" : "no") + "\tok\n";
    } else {
      std::string why = r.error;
      for (char& ch : why) {
        if (ch == '\t' || ch == '\n') ch = ' ';
      }
      out += "NA\tNA\t0\tno\tfailed: " + why + "\n";
    }
  }
  return out;
}

}  // namespace eqemb

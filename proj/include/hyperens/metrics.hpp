// Copyright 2026 The hyperens Authors
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

#include <string>
#include <vector>

#include "hyperens/dataset.hpp"
#include "hyperens/ranking_list.hpp"

namespace hyperens {

using HeldOut = std::vector<std::vector<ItemIndex>>;

struct UserHits {
  int hits = 0;
  int relevant = 0;     // |T_u|
  int recommended = 0;  // |R_u|
};

/// Macro-averaged top-k accuracy of one model.
struct EvalReport {
  std::string model_name;
  int k = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<UserHits> per_user;
};

/// |T_u ∩ R_u| for every user. Throws DataError if a user has no list or
/// no held-out items.
std::vector<UserHits> count_hits(const RankingList& lists, const HeldOut& held_out);

/// Mean over users of |T_u ∩ R_u| / |R_u|.
double precision_at_k(const RankingList& lists, const HeldOut& held_out);
/// Mean over users of |T_u ∩ R_u| / |T_u|.
double recall_at_k(const RankingList& lists, const HeldOut& held_out);
/// Harmonic mean, 0 when p + r = 0.
double f1_at_k(double precision, double recall);

EvalReport evaluate(const RankingList& lists, const HeldOut& held_out);

std::string reports_json(const std::vector<EvalReport>& reports);
/// Aligned plain-text table: one row per model, precision/recall/F1 columns.
std::string reports_table(const std::vector<EvalReport>& reports);

}  // namespace hyperens

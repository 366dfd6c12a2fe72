#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "guiwb/rl/trajectory.hpp"

namespace guiwb::reward {

inline constexpr std::size_t kSummaryFeatures = 8;

/// Observable trajectory features; never reads milestone bits.
/// [0] answer/instruction token Jaccard, [1] length / maxSteps,
/// [2] missed-click fraction, [3] distinct screens visited / screens in world,
/// [4] final screen holds a flag-bearing element, [5] any Input,
/// [6] Finish answer present, [7] bias.
using Summary = std::array<double, kSummaryFeatures>;

/// Throws UnfinishedTrajectory.
Summary summarize(const rl::Trajectory& t, std::string_view instruction);

struct OrmParams {
  Summary u{};
  std::int64_t trainedOn = 0;
  bool operator==(const OrmParams&) const = default;
};

struct OrmExample {
  Summary s{};
  int label = 0;
};

struct OrmTrainResult {
  OrmParams params;
  std::vector<double> lossTrace;  // loss before each epoch's step, then the final loss
  bool degenerate = false;        // single-class data: constant predictor returned
};

/// Mean logistic loss and its gradient.
double orm_loss(const OrmParams& p, std::span<const OrmExample> data);
Summary orm_grad(const OrmParams& p, std::span<const OrmExample> data);

/// Full-batch gradient descent from u = 0. Single-class data yields the
/// constant predictor at that class's prior with `degenerate` set; fewer than
/// two examples throws EmptyData.
OrmTrainResult orm_train(std::span<const OrmExample> data, double lr, int epochs);

double orm_score(const OrmParams& p, const Summary& s) noexcept;

/// score >= 0.5.
bool orm_verdict(const OrmParams& p, const rl::Trajectory& t);

/// {"G":8,"u":[...],"trainedOn":n}
std::string orm_to_json(const OrmParams& p);
OrmParams orm_from_json(std::string_view text);
void save_orm(const OrmParams& p, const std::string& path);
OrmParams load_orm(const std::string& path);

}  // namespace guiwb::reward

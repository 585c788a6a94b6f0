#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hemascreen::svg {

/// One box pair (positives, negatives) inside a panel.
struct BoxGroup {
  std::string label;
  Eigen::VectorXd positive;
  Eigen::VectorXd negative;
};

/// Box summaries and rank-sum p-values for a titled panel, the input to box_grid.
nlohmann::json box_panel(const std::string& title, const std::vector<BoxGroup>& groups);

/// Grid of box-plot panels, positives red and negatives blue.
std::string box_grid(const nlohmann::json& panels, std::string_view title);

/// Per-fold ROC curves of an evaluation report with a legend of fold AUCs.
std::string roc_overlay(const nlohmann::json& report);

/// Normalized confusion matrix at the training cutoff of the lowest-AUC fold.
std::string confusion_heatmap(const nlohmann::json& report);

/// Horizontal bars of a normalized importance table, largest first.
std::string importance_bars(const nlohmann::json& importance, std::string_view title);

}  // namespace hemascreen::svg

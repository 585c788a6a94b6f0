#include "hemascreen/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hemascreen/stats.hpp"

namespace hemascreen::svg {

namespace {

constexpr const char* kPositive = "#d62728";
constexpr const char* kNegative = "#1f77b4";
constexpr const char* kFont = "font-family=\"Helvetica,Arial,sans-serif\"";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(double width, double height) : w_(width), h_(height) {}

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
            std::string_view extra = {}) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
          << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"" << extra << "/>\n";
  }
  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none") {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(std::max(w, 0.0)) << "\" height=\""
          << num(std::max(h, 0.0)) << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void circle(double x, double y, double r, std::string_view fill) {
    body_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << fill << "\"/>\n";
  }
  void text(double x, double y, std::string_view s, double size = 11, std::string_view anchor = "start",
            std::string_view fill = "#000", std::string_view extra = {}) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size) << "\" " << kFont
          << " text-anchor=\"" << anchor << "\" fill=\"" << fill << "\"" << extra << ">" << escape(s) << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke, double width = 1.5) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].first) << "," << num(pts[i].second);
    body_ << "\"/>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
        << "\" viewBox=\"0 0 " << num(w_) << " " << num(h_) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double w_, h_;
  std::ostringstream body_;
};

// Categorical palette for fold curves.
std::string fold_colour(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[i % 10];
}

// Blue ramp from white (0) to dark blue (1).
std::string heat_colour(double v) {
  v = std::clamp(v, 0.0, 1.0);
  auto channel = [&](int lo, int hi) { return static_cast<int>(std::lround(lo + (hi - lo) * v)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(247, 8), channel(251, 48), channel(255, 107));
  return buf;
}

void draw_box(Canvas& c, const nlohmann::json& box, double cx, double half_width, double lo, double hi, double top,
              double height, const char* colour) {
  if (box.at("n").get<std::size_t>() == 0) return;
  auto y = [&](double v) { return top + height - (v - lo) / (hi - lo) * height; };
  const double q1 = box.at("q1"), q3 = box.at("q3"), med = box.at("median");
  const double wl = box.at("whisker_low"), wh = box.at("whisker_high");
  c.line(cx, y(wl), cx, y(q1), colour);
  c.line(cx, y(q3), cx, y(wh), colour);
  c.line(cx - half_width / 2, y(wl), cx + half_width / 2, y(wl), colour);
  c.line(cx - half_width / 2, y(wh), cx + half_width / 2, y(wh), colour);
  c.rect(cx - half_width, y(q3), 2 * half_width, y(q1) - y(q3), "none", colour);
  c.line(cx - half_width, y(med), cx + half_width, y(med), colour, 2.0);
  for (const auto& o : box.at("outliers")) c.circle(cx, y(o.get<double>()), 1.6, colour);
}

void extend_range(const nlohmann::json& box, double& lo, double& hi) {
  if (box.at("n").get<std::size_t>() == 0) return;
  lo = std::min(lo, box.at("whisker_low").get<double>());
  hi = std::max(hi, box.at("whisker_high").get<double>());
  for (const auto& o : box.at("outliers")) {
    lo = std::min(lo, o.get<double>());
    hi = std::max(hi, o.get<double>());
  }
}

std::string p_label(const nlohmann::json& p) {
  if (p.is_null()) return "p n/a";
  const double v = p.get<double>();
  if (v < 1e-3) return "p<0.001";
  char buf[32];
  std::snprintf(buf, sizeof buf, "p=%.3f", v);
  return buf;
}

void legend_entry(Canvas& c, double x, double y, const char* colour, std::string_view label) {
  c.rect(x, y - 9, 12, 10, colour);
  c.text(x + 16, y, label, 11);
}

}  // namespace

nlohmann::json box_panel(const std::string& title, const std::vector<BoxGroup>& groups) {
  nlohmann::json gs = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json p = nullptr;
    if (g.positive.size() > 0 && g.negative.size() > 0) p = wilcoxon_rank_sum(g.positive, g.negative).p_value;
    gs.push_back({{"label", g.label},
                  {"positive", to_json(boxplot_summary(g.positive))},
                  {"negative", to_json(boxplot_summary(g.negative))},
                  {"p_value", p}});
  }
  return {{"title", title}, {"groups", gs}};
}

std::string box_grid(const nlohmann::json& panels, std::string_view title) {
  const std::size_t n = panels.size();
  const std::size_t cols = std::min<std::size_t>(n == 0 ? 1 : n, 4);
  const std::size_t rows = (n + cols - 1) / cols;
  const double pw = 230, ph = 200, top_margin = 60;
  Canvas c(static_cast<double>(cols) * pw + 20, top_margin + static_cast<double>(rows) * ph + 20);
  c.text(10, 22, title, 15, "start", "#000", " font-weight=\"bold\"");
  legend_entry(c, 10, 44, kPositive, "positive");
  legend_entry(c, 90, 44, kNegative, "negative");

  for (std::size_t i = 0; i < n; ++i) {
    const auto& panel = panels[i];
    const double x0 = 10 + static_cast<double>(i % cols) * pw, y0 = top_margin + static_cast<double>(i / cols) * ph;
    const double plot_top = y0 + 22, plot_h = ph - 60, plot_left = x0 + 36, plot_w = pw - 50;
    c.text(x0 + pw / 2, y0 + 12, panel.at("title").get<std::string>(), 12, "middle");

    double lo = INFINITY, hi = -INFINITY;
    for (const auto& g : panel.at("groups")) {
      extend_range(g.at("positive"), lo, hi);
      extend_range(g.at("negative"), lo, hi);
    }
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    c.rect(plot_left, plot_top, plot_w, plot_h, "none", "#999");
    for (int t = 0; t <= 4; ++t) {
      const double v = lo + (hi - lo) * t / 4.0;
      const double yy = plot_top + plot_h - plot_h * t / 4.0;
      c.line(plot_left - 3, yy, plot_left, yy, "#999");
      c.text(plot_left - 5, yy + 3, num(v), 8, "end", "#444");
    }
    const auto& groups = panel.at("groups");
    const double slot = plot_w / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double cx = plot_left + slot * (static_cast<double>(g) + 0.5);
      const double hw = std::min(14.0, slot / 6.0);
      draw_box(c, groups[g].at("positive"), cx - slot / 5, hw, lo, hi, plot_top, plot_h, kPositive);
      draw_box(c, groups[g].at("negative"), cx + slot / 5, hw, lo, hi, plot_top, plot_h, kNegative);
      c.text(cx, plot_top + plot_h + 13, groups[g].at("label").get<std::string>(), 9, "middle");
      c.text(cx, plot_top + plot_h + 25, p_label(groups[g].at("p_value")), 9, "middle", "#444");
    }
  }
  return c.str();
}

std::string roc_overlay(const nlohmann::json& report) {
  const auto& folds = report.at("folds");
  const std::size_t per_column = 20;
  const std::size_t legend_cols = std::max<std::size_t>(1, (folds.size() + per_column - 1) / per_column);
  const double plot = 360, left = 60, top = 50;
  const double legend_x = left + plot + 25, legend_w = 130;
  Canvas c(legend_x + static_cast<double>(legend_cols) * legend_w + 10, top + plot + 60);

  const auto& model = report.at("model").at("name").get_ref<const std::string&>();
  const auto& agg = report.at("aggregate").at("auc");
  c.text(10, 22, "ROC, " + model + " (" + report.at("cohort").at("filter").get<std::string>() + ")", 15, "start",
         "#000", " font-weight=\"bold\"");
  c.text(10, 40, "mean AUC " + num(agg.at("mean")) + " ± " + num(agg.at("sd")), 12);

  auto px = [&](double fpr) { return left + fpr * plot; };
  auto py = [&](double tpr) { return top + plot - tpr * plot; };
  c.rect(left, top, plot, plot, "none", "#999");
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    c.line(px(v), top + plot, px(v), top + plot + 4, "#999");
    c.text(px(v), top + plot + 16, num(v), 9, "middle", "#444");
    c.line(left - 4, py(v), left, py(v), "#999");
    c.text(left - 6, py(v) + 3, num(v), 9, "end", "#444");
  }
  c.text(left + plot / 2, top + plot + 34, "1 - specificity", 11, "middle");
  c.text(16, top + plot / 2, "sensitivity", 11, "middle", "#000",
         " transform=\"rotate(-90 16 " + num(top + plot / 2) + ")\"");
  c.line(px(0), py(0), px(1), py(1), "#bbb", 1.0, " stroke-dasharray=\"4 3\"");

  for (std::size_t i = 0; i < folds.size(); ++i) {
    const auto& roc = folds[i].at("roc");
    const auto& fpr = roc.at("fpr");
    const auto& tpr = roc.at("tpr");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < fpr.size(); ++j) pts.emplace_back(px(fpr[j].get<double>()), py(tpr[j].get<double>()));
    c.polyline(pts, fold_colour(i), 1.2);
    const double lx = legend_x + static_cast<double>(i / per_column) * legend_w;
    const double ly = top + 8 + static_cast<double>(i % per_column) * 16;
    c.line(lx, ly - 4, lx + 14, ly - 4, fold_colour(i), 2.0);
    std::string label = "fold " + std::to_string(folds[i].at("fold").get<std::size_t>() + 1);
    if (report.at("repeats").get<std::size_t>() > 1)
      label = "r" + std::to_string(folds[i].at("repeat").get<std::size_t>() + 1) + " " + label;
    c.text(lx + 18, ly, label + " AUC " + num(folds[i].at("auc")), 10);
  }
  return c.str();
}

std::string confusion_heatmap(const nlohmann::json& report) {
  const auto& folds = report.at("folds");
  std::size_t worst = 0;
  for (std::size_t i = 1; i < folds.size(); ++i)
    if (folds[i].at("auc").get<double>() < folds[worst].at("auc").get<double>()) worst = i;
  const auto& f = folds.at(worst);
  const auto& m = f.at("at_cutoff").at("normalized_confusion");

  const double cell = 120, left = 110, top = 70;
  Canvas c(left + 2 * cell + 40, top + 2 * cell + 70);
  c.text(10, 22, "Normalized confusion, " + report.at("model").at("name").get<std::string>(), 15, "start", "#000",
         " font-weight=\"bold\"");
  c.text(10, 40,
         "repeat " + std::to_string(f.at("repeat").get<std::size_t>() + 1) + ", fold " +
             std::to_string(f.at("fold").get<std::size_t>() + 1) + ", AUC " + num(f.at("auc")),
         12);
  const char* names[] = {"negative", "positive"};
  for (int r = 0; r < 2; ++r) {
    for (int col = 0; col < 2; ++col) {
      const double v = m[r][col].get<double>();
      const double x = left + col * cell, y = top + r * cell;
      c.rect(x, y, cell, cell, heat_colour(v), "#fff");
      c.text(x + cell / 2, y + cell / 2 + 6, num(v), 16, "middle", v > 0.5 ? "#fff" : "#000");
    }
    c.text(left - 8, top + r * cell + cell / 2 + 4, names[r], 12, "end");
    c.text(left + r * cell + cell / 2, top + 2 * cell + 18, names[r], 12, "middle");
  }
  c.text(left + cell, top + 2 * cell + 40, "predicted", 12, "middle");
  c.text(20, top + cell, "actual", 12, "middle", "#000", " transform=\"rotate(-90 20 " + num(top + cell) + ")\"");
  return c.str();
}

std::string importance_bars(const nlohmann::json& importance, std::string_view title) {
  const double bar_h = 20, left = 130, width = 300, top = 50;
  const double n = static_cast<double>(importance.size());
  Canvas c(left + width + 60, top + n * bar_h + 40);
  c.text(10, 22, title, 15, "start", "#000", " font-weight=\"bold\"");
  for (std::size_t i = 0; i < importance.size(); ++i) {
    const double v = importance[i].at("importance").get<double>();
    const double y = top + static_cast<double>(i) * bar_h;
    c.text(left - 6, y + 14, importance[i].at("feature").get<std::string>(), 11, "end");
    c.rect(left, y + 3, width * v / 100.0, bar_h - 6, "#4c72b0");
    c.text(left + width * v / 100.0 + 4, y + 14, num(v), 10, "start", "#444");
  }
  c.line(left, top, left, top + n * bar_h, "#999");
  for (int t = 0; t <= 4; ++t) {
    const double x = left + width * t / 4.0;
    c.line(x, top + n * bar_h, x, top + n * bar_h + 4, "#999");
    c.text(x, top + n * bar_h + 16, std::to_string(t * 25), 9, "middle", "#444");
  }
  return c.str();
}

}  // namespace hemascreen::svg

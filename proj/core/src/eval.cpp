#include "camsim/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "camsim/error.hpp"

namespace camsim {

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

MatchResult match(const std::vector<Box>& dets, const std::vector<double>& scores,
                  const std::vector<Box>& gts, double iou_threshold) {
  if (dets.size() != scores.size()) throw Error(ErrorCode::kInvalidArgument, "one score per detection");
  MatchResult m;
  m.tp.assign(dets.size(), false);
  m.matched_gt.assign(dets.size(), -1);
  m.gt_matched.assign(gts.size(), false);
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  for (std::size_t d : order) {
    long best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (m.gt_matched[g]) continue;
      const double v = iou(dets[d], gts[g]);
      if (v >= iou_threshold && v > best_iou) {
        best = static_cast<long>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      m.tp[d] = true;
      m.matched_gt[d] = best;
      m.gt_matched[static_cast<std::size_t>(best)] = true;
    }
  }
  return m;
}

std::optional<double> ap_from_flags(const std::vector<bool>& tp, std::size_t n_gt, ApMethod method) {
  if (n_gt == 0) return std::nullopt;
  const std::size_t n = tp.size();
  std::vector<double> prec(n), rec(n);
  std::size_t ctp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ctp += tp[i] ? 1 : 0;
    prec[i] = static_cast<double>(ctp) / static_cast<double>(i + 1);
    rec[i] = static_cast<double>(ctp) / static_cast<double>(n_gt);
  }
  if (method == ApMethod::kElevenPoint) {
    double sum = 0.0;
    for (int t = 0; t <= 10; ++t) {
      double p = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (rec[i] >= t / 10.0) p = std::max(p, prec[i]);
      }
      sum += p;
    }
    return sum / 11.0;
  }
  // Recall rises by exactly 1/n_gt at each true positive, so the area is the
  // sum of interpolated precisions there divided once by n_gt.
  for (std::size_t i = n; i-- > 1;) prec[i - 1] = std::max(prec[i - 1], prec[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tp[i]) sum += prec[i];
  }
  return sum / static_cast<double>(n_gt);
}

namespace {

struct Pooled {
  double score;
  bool tp;
  long gt;        // global GT index of the match, or the nearest-by-IoU GT, or -1
};

// Matches per image and returns detections in pooled rank order.
std::vector<Pooled> pool(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                         double thr) {
  std::map<std::int64_t, std::vector<std::size_t>> det_by_image, gt_by_image;
  for (std::size_t i = 0; i < dets.size(); ++i) det_by_image[dets[i].image_id].push_back(i);
  for (std::size_t i = 0; i < gts.size(); ++i) gt_by_image[gts[i].image_id].push_back(i);

  std::vector<Pooled> out;
  out.reserve(dets.size());
  for (const auto& [image, di] : det_by_image) {
    std::vector<Box> db, gb;
    std::vector<double> sc;
    for (auto i : di) {
      db.push_back(dets[i].bbox);
      sc.push_back(dets[i].score);
    }
    const auto git = gt_by_image.find(image);
    const std::vector<std::size_t> gi = git == gt_by_image.end() ? std::vector<std::size_t>{} : git->second;
    for (auto i : gi) gb.push_back(gts[i].bbox);
    const MatchResult m = match(db, sc, gb, thr);
    for (std::size_t k = 0; k < di.size(); ++k) {
      long gt = -1;
      if (m.matched_gt[k] >= 0) {
        gt = static_cast<long>(gi[static_cast<std::size_t>(m.matched_gt[k])]);
      } else {
        double best = 0.0;
        for (std::size_t g = 0; g < gb.size(); ++g) {
          const double v = iou(db[k], gb[g]);
          if (v > best) {
            best = v;
            gt = static_cast<long>(gi[g]);
          }
        }
      }
      out.push_back({sc[k], m.tp[k], gt});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Pooled& a, const Pooled& b) { return a.score > b.score; });
  return out;
}

}  // namespace

std::optional<double> average_precision(const std::vector<Detection>& dets,
                                        const std::vector<GroundTruth>& gts, double thr,
                                        ApMethod method) {
  const auto pooled = pool(dets, gts, thr);
  std::vector<bool> flags;
  flags.reserve(pooled.size());
  for (const auto& p : pooled) flags.push_back(p.tp);
  return ap_from_flags(flags, gts.size(), method);
}

APCurve ap_vs_distance(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                       double bin_m, std::optional<double> max_distance_m, double thr, ApMethod method) {
  if (!(bin_m > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bin width must be positive");
  std::size_t nbins = 0;
  if (max_distance_m) nbins = static_cast<std::size_t>(std::ceil(*max_distance_m / bin_m));
  auto bin_of = [&](double d) { return static_cast<std::size_t>(std::floor(std::max(0.0, d) / bin_m)); };
  for (const auto& g : gts) nbins = std::max(nbins, bin_of(g.distance_m) + 1);

  APCurve curve;
  curve.bins.resize(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    curve.bins[b].low_m = static_cast<double>(b) * bin_m;
    curve.bins[b].high_m = static_cast<double>(b + 1) * bin_m;
  }
  for (const auto& g : gts) ++curve.bins[bin_of(g.distance_m)].gt_count;

  std::vector<std::vector<bool>> flags(nbins);
  for (const auto& p : pool(dets, gts, thr)) {
    if (p.gt < 0) continue;  // overlaps no GT: distance unknown
    flags[bin_of(gts[static_cast<std::size_t>(p.gt)].distance_m)].push_back(p.tp);
  }
  for (std::size_t b = 0; b < nbins; ++b) {
    curve.bins[b].ap = ap_from_flags(flags[b], curve.bins[b].gt_count, method);
  }
  return curve;
}

std::string OD50Result::to_string() const {
  if (beyond_range) return "beyond-range";
  return format_number(od50_m.value_or(0.0));
}

OD50Result od50(const APCurve& curve) {
  OD50Result r;
  const APBin* prev = nullptr;
  for (std::size_t i = 0; i < curve.bins.size(); ++i) {
    const APBin& b = curve.bins[i];
    if (!b.ap) continue;
    if (*b.ap < 0.5) {
      r.crossing_bin = i;
      if (prev == nullptr) {
        r.od50_m = 0.0;
      } else {
        const double a0 = *prev->ap, a1 = *b.ap;
        const double c0 = prev->center(), c1 = b.center();
        r.od50_m = c0 + (a0 - 0.5) / (a0 - a1) * (c1 - c0);
      }
      return r;
    }
    prev = &b;
  }
  r.beyond_range = true;
  return r;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error(ErrorCode::kInvalidArgument, "number formatting failed");
  return {buf, end};
}

std::string metrics_csv(const APCurve& curve) {
  std::string out = "bin_low_m,bin_high_m,gt_count,ap\n";
  for (const auto& b : curve.bins) {
    out += format_number(b.low_m) + "," + format_number(b.high_m) + "," + std::to_string(b.gt_count) + "," +
           (b.ap ? format_number(*b.ap) : std::string{}) + "\n";
  }
  return out;
}

void write_metrics_csv(const APCurve& curve, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << metrics_csv(curve);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kValidation, "bad number '" + s + "' in metrics CSV");
  }
  return v;
}

}  // namespace

APCurve parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("bin_low_m,bin_high_m,gt_count,ap", 0) != 0) {
    throw Error(ErrorCode::kValidation, "metrics CSV header missing");
  }
  APCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 4) throw Error(ErrorCode::kValidation, "metrics CSV row needs 4 fields: " + line);
    APBin b;
    b.low_m = parse_double(f[0]);
    b.high_m = parse_double(f[1]);
    b.gt_count = static_cast<std::size_t>(parse_double(f[2]));
    if (!f[3].empty()) b.ap = parse_double(f[3]);
    curve.bins.push_back(b);
  }
  return curve;
}

APCurve read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_metrics_csv(ss.str());
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string curves_svg(const std::vector<CurveSeries>& series, const std::string& title) {
  constexpr double W = 640, H = 400, L = 60, R = 150, T = 40, B = 50;
  double x_max = 10.0;
  for (const auto& s : series) {
    for (const auto& b : s.curve.bins) x_max = std::max(x_max, b.high_m);
  }
  auto px = [&](double d) { return L + d / x_max * (W - L - R); };
  auto py = [&](double ap) { return H - B - ap * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
     << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << px(x_max) << "\" y2=\"" << py(0)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << L << "\" y2=\"" << py(1)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << py(0.5) << "\" x2=\"" << px(x_max) << "\" y2=\"" << py(0.5)
     << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    os << "<text x=\"" << L - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << v
       << "</text>\n";
  }
  const double step = x_max > 100 ? 50.0 : 10.0;
  for (double d = 0; d <= x_max + 1e-9; d += step) {
    os << "<text x=\"" << px(d) << "\" y=\"" << py(0) + 16 << "\" text-anchor=\"middle\" font-size=\"11\">" << d
       << "</text>\n";
  }
  os << "<text x=\"" << px(x_max / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << "distance (m)</text>\n";
  os << "<text x=\"16\" y=\"" << py(0.5) << "\" font-size=\"12\" transform=\"rotate(-90 16 " << py(0.5)
     << ")\" text-anchor=\"middle\">AP@0.5 IoU</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % std::size(colors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& b : series[s].curve.bins) {
      if (b.ap) os << px(b.center()) << ',' << py(*b.ap) << ' ';
    }
    os << "\"/>\n";
    const double ly = T + 20.0 * static_cast<double>(s);
    os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << xml_escape(series[s].label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_curves_svg(const std::vector<CurveSeries>& series, const std::string& title,
                      const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << curves_svg(series, title);
}

nlohmann::json detections_to_json(const std::vector<Detection>& dets) {
  auto j = nlohmann::json::array();
  for (const auto& d : dets) {
    j.push_back({{"image_id", d.image_id},
                 {"bbox", {d.bbox.x_min, d.bbox.y_min, d.bbox.width(), d.bbox.height()}},
                 {"score", d.score},
                 {"class", d.cls}});
  }
  return j;
}

std::vector<Detection> detections_from_json(const nlohmann::json& j,
                                            const std::vector<std::int64_t>& known_image_ids) {
  if (!j.is_array()) throw Error(ErrorCode::kValidation, "detections JSON must be an array");
  const std::set<std::int64_t> known(known_image_ids.begin(), known_image_ids.end());
  std::set<std::int64_t> unknown;
  std::vector<Detection> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    Detection d;
    try {
      d.image_id = e.at("image_id").get<std::int64_t>();
      const auto bb = e.at("bbox").get<std::vector<double>>();
      if (bb.size() != 4) throw Error(ErrorCode::kValidation, "bbox must be [x, y, w, h]");
      d.bbox = {bb[0], bb[1], bb[0] + bb[2], bb[1] + bb[3]};
      d.score = e.at("score").get<double>();
      d.cls = e.value("class", std::string("car"));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kValidation, "detection " + std::to_string(i) + ": " + ex.what());
    }
    if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0) {
      throw Error(ErrorCode::kValidation, "detection " + std::to_string(i) + ": score " + format_number(d.score) +
                                              " outside [0, 1]");
    }
    if (!std::isfinite(d.bbox.x_min) || !std::isfinite(d.bbox.y_min) || !d.bbox.valid() ||
        !std::isfinite(d.bbox.x_max) || !std::isfinite(d.bbox.y_max)) {
      throw Error(ErrorCode::kValidation, "detection " + std::to_string(i) + ": invalid box");
    }
    if (!known.empty() && !known.contains(d.image_id)) unknown.insert(d.image_id);
    out.push_back(std::move(d));
  }
  if (!unknown.empty()) {
    std::string list;
    for (auto id : unknown) list += (list.empty() ? "" : ", ") + std::to_string(id);
    throw Error(ErrorCode::kValidation, "detections reference unknown image ids: " + list);
  }
  return out;
}

void export_detections(const std::vector<Detection>& dets, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << detections_to_json(dets).dump(2) << '\n';
}

std::vector<Detection> import_detections(const std::filesystem::path& path,
                                         const std::vector<std::int64_t>& known_image_ids) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, "malformed detections " + path.string() + ": " + e.what());
  }
  return detections_from_json(j, known_image_ids);
}

}  // namespace camsim

#include "limelens/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace limelens {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string header(const std::string& title) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                      "\" height=\"" + num(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           title + "</text>\n";
    return out;
}

struct Scale {
    double lo, hi, pix_lo, pix_hi;
    double operator()(double v) const {
        if (hi == lo) return 0.5 * (pix_lo + pix_hi);
        return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo);
    }
};

std::string line(double x1, double y1, double x2, double y2, const std::string& color,
                 double width = 1.0) {
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

std::string axis_labels(const Scale& y, double lo, double hi) {
    std::string out;
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        out += "<text x=\"6\" y=\"" + num(y(v) + 4) +
               "\" font-family=\"sans-serif\" font-size=\"10\">" + num(v) + "</text>\n";
        out += line(kMargin - 4, y(v), kMargin, y(v), "#888");
    }
    return out;
}

}  // namespace

std::string boxplot_svg(const std::string& title, const Eigen::MatrixXd& per_rep_values,
                        const Eigen::VectorXd& reference) {
    const Eigen::Index cols = per_rep_values.cols();
    double lo = reference.size() ? reference.minCoeff() : 0.0;
    double hi = reference.size() ? reference.maxCoeff() : 1.0;
    if (per_rep_values.size()) {
        lo = std::min(lo, per_rep_values.minCoeff());
        hi = std::max(hi, per_rep_values.maxCoeff());
    }
    const double pad = 0.05 * std::max(hi - lo, 1e-12);
    const Scale y{lo - pad, hi + pad, kHeight - kMargin, kMargin};

    std::string out = header(title);
    out += axis_labels(y, lo - pad, hi + pad);
    out += line(kMargin, y(0.0), kWidth - 10, y(0.0), "#ccc");

    const double slot = (kWidth - kMargin - 20) / std::max<Eigen::Index>(cols, 1);
    for (Eigen::Index c = 0; c < cols; ++c) {
        std::vector<double> v(per_rep_values.col(c).data(),
                              per_rep_values.col(c).data() + per_rep_values.rows());
        std::sort(v.begin(), v.end());
        const auto q = [&](double p) {
            const double h = p * static_cast<double>(v.size() - 1);
            const std::size_t i = static_cast<std::size_t>(h);
            return i + 1 < v.size() ? v[i] + (h - std::floor(h)) * (v[i + 1] - v[i]) : v.back();
        };
        const double q1 = q(0.25), med = q(0.5), q3 = q(0.75);
        const double iqr = q3 - q1;
        double wlo = q1, whi = q3;
        for (double s : v) {
            if (s >= q1 - 1.5 * iqr) {
                wlo = std::min(wlo, s);
                break;
            }
        }
        for (auto it = v.rbegin(); it != v.rend(); ++it) {
            if (*it <= q3 + 1.5 * iqr) {
                whi = std::max(whi, *it);
                break;
            }
        }
        const double cx = kMargin + slot * (static_cast<double>(c) + 0.5);
        const double bw = slot * 0.3;
        out += line(cx, y(wlo), cx, y(q1), "#333");
        out += line(cx, y(q3), cx, y(whi), "#333");
        out += line(cx - bw / 2, y(wlo), cx + bw / 2, y(wlo), "#333");
        out += line(cx - bw / 2, y(whi), cx + bw / 2, y(whi), "#333");
        out += "<rect x=\"" + num(cx - bw) + "\" y=\"" + num(y(q3)) + "\" width=\"" +
               num(2 * bw) + "\" height=\"" + num(std::abs(y(q1) - y(q3))) +
               "\" fill=\"#cfe2ff\" stroke=\"#333\"/>\n";
        out += line(cx - bw, y(med), cx + bw, y(med), "#1f4e9c", 2.0);
        for (double s : v) {
            if (s < q1 - 1.5 * iqr || s > q3 + 1.5 * iqr) {
                out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(y(s)) +
                       "\" r=\"2\" fill=\"#333\"/>\n";
            }
        }
        if (c < reference.size()) {
            const double ry = y(reference(c));
            out += line(cx - 5, ry - 5, cx + 5, ry + 5, "#c0392b", 2.0);
            out += line(cx - 5, ry + 5, cx + 5, ry - 5, "#c0392b", 2.0);
        }
        out += "<text x=\"" + num(cx) + "\" y=\"" + num(kHeight - kMargin + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
               std::to_string(c) + "</text>\n";
    }
    return out + "</svg>\n";
}

std::string histogram_svg(const std::string& title, const std::vector<double>& values,
                          int bins, double marker) {
    double lo = marker, hi = marker;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double pad = 0.05 * std::max(hi - lo, 1e-12);
    lo -= pad;
    hi += pad;
    std::vector<int> counts(static_cast<std::size_t>(std::max(bins, 1)), 0);
    for (double v : values) {
        auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * counts.size());
        if (idx >= counts.size()) idx = counts.size() - 1;
        ++counts[idx];
    }
    const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
    const Scale x{lo, hi, kMargin, kWidth - 20};
    const Scale y{0.0, static_cast<double>(peak), kHeight - kMargin, kMargin};

    std::string out = header(title);
    out += line(kMargin, kHeight - kMargin, kWidth - 20, kHeight - kMargin, "#333");
    const double bw = (x(hi) - x(lo)) / static_cast<double>(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const double top = y(counts[b]);
        out += "<rect x=\"" + num(x(lo) + bw * static_cast<double>(b)) + "\" y=\"" + num(top) +
               "\" width=\"" + num(bw) + "\" height=\"" + num(kHeight - kMargin - top) +
               "\" fill=\"#cfe2ff\" stroke=\"#333\"/>\n";
    }
    out += line(x(marker), kMargin, x(marker), kHeight - kMargin, "#c0392b", 2.0);
    out += "<text x=\"" + num(x(marker) + 4) + "\" y=\"" + num(kMargin + 12) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#c0392b\">center</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        out += "<text x=\"" + num(x(v)) + "\" y=\"" + num(kHeight - kMargin + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + num(v) +
               "</text>\n";
    }
    return out + "</svg>\n";
}

std::string loglog_svg(const std::string& title, const std::vector<double>& xs,
                       const std::vector<double>& ys, double slope, double intercept) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lx.push_back(std::log10(xs[i]));
        ly.push_back(std::log10(ys[i]));
    }
    const auto [lxmin, lxmax] = std::minmax_element(lx.begin(), lx.end());
    const auto [lymin, lymax] = std::minmax_element(ly.begin(), ly.end());
    const double padx = 0.2, pady = 0.2;
    const Scale x{*lxmin - padx, *lxmax + padx, kMargin, kWidth - 20};
    const Scale y{*lymin - pady, *lymax + pady, kHeight - kMargin, kMargin};

    std::string out = header(title);
    out += line(kMargin, kHeight - kMargin, kWidth - 20, kHeight - kMargin, "#333");
    out += line(kMargin, kMargin, kMargin, kHeight - kMargin, "#333");
    // Fitted line in natural-log space: log y = slope * log x + intercept.
    const double ln10 = std::log(10.0);
    const auto fit_ly = [&](double lx10) {
        return (slope * (lx10 * ln10) + intercept) / ln10;
    };
    out += line(x(*lxmin), y(fit_ly(*lxmin)), x(*lxmax), y(fit_ly(*lxmax)), "#c0392b", 1.5);
    for (std::size_t i = 0; i < lx.size(); ++i) {
        out += "<circle cx=\"" + num(x(lx[i])) + "\" cy=\"" + num(y(ly[i])) +
               "\" r=\"4\" fill=\"#1f4e9c\"/>\n";
    }
    out += "<text x=\"" + num(kWidth - 160) + "\" y=\"" + num(kMargin + 14) +
           "\" font-family=\"sans-serif\" font-size=\"11\">slope " + num(slope) + "</text>\n";
    return out + "</svg>\n";
}

}  // namespace limelens

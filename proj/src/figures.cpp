#include "csakit/figures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "csakit/corpus.hpp"

namespace csakit {

namespace {

const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3"};

std::string esc(const std::string& s) {
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

// Fixed two-decimal coordinates keep the output byte-stable.
std::string num(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << (std::abs(v) < 0.005 ? 0.0 : v);
    return os.str();
}

std::string header(double w, double h, const std::string& title) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\" font-family=\"sans-serif\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"" + num(w / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + esc(title) + "</text>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 11) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\" font-size=\"" +
           std::to_string(size) + "\">" + esc(s) + "</text>\n";
}

std::string rect(double x, double y, double w, double h, const char* fill) {
    return "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" fill=\"" + fill + "\"/>\n";
}

}  // namespace

bool bar_chart_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& bars,
                   const std::filesystem::path& out, std::ostream& warnings) {
    if (bars.empty()) {
        warnings << "warning: no data for figure " << out.string() << ", skipped\n";
        return false;
    }
    const double bw = 48, gap = 16, left = 50, top = 40, plot_h = 260;
    const double w = left + static_cast<double>(bars.size()) * (bw + gap) + 20;
    const double h = top + plot_h + 60;
    double max_v = 0;
    for (const auto& [label, v] : bars) max_v = std::max(max_v, v);
    if (max_v <= 0) max_v = 1;
    std::string svg = header(w, h, title);
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(w - 10) + "\" y2=\"" +
           num(top + plot_h) + "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double x = left + static_cast<double>(i) * (bw + gap) + gap / 2;
        const double bh = std::max(0.0, bars[i].second) / max_v * plot_h;
        svg += rect(x, top + plot_h - bh, bw, bh, kPalette[0]);
        svg += text(x + bw / 2, top + plot_h - bh - 4, format_double(bars[i].second), "middle", 10);
        svg += text(x + bw / 2, top + plot_h + 16, bars[i].first);
    }
    svg += "</svg>\n";
    write_text_file(out, svg);
    return true;
}

bool shift_chart_svg(const std::string& title, const ShiftSides& sides, const std::filesystem::path& out,
                     std::ostream& warnings) {
    if (sides.positive.empty() && sides.negative.empty()) {
        warnings << "warning: empty shift table, " << out.string() << " skipped\n";
        return false;
    }
    if (sides.positive.empty() || sides.negative.empty()) {
        warnings << "warning: shift table has only " << (sides.positive.empty() ? "negative" : "positive")
                 << " scores, rendering a one-sided chart\n";
    }
    const std::size_t rows = std::max(sides.positive.size(), sides.negative.size());
    const double row_h = 18, top = 50, half = 220, mid = 320;
    const double w = 2 * mid, h = top + static_cast<double>(rows) * row_h + 30;
    double max_v = 0;
    for (const auto& t : sides.positive) max_v = std::max(max_v, std::abs(t.score));
    for (const auto& t : sides.negative) max_v = std::max(max_v, std::abs(t.score));
    if (max_v <= 0) max_v = 1;
    std::string svg = header(w, h, title);
    svg += "<line x1=\"" + num(mid) + "\" y1=\"" + num(top - 10) + "\" x2=\"" + num(mid) + "\" y2=\"" +
           num(h - 20) + "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < sides.positive.size(); ++i) {
        const double y = top + static_cast<double>(i) * row_h;
        const double len = std::abs(sides.positive[i].score) / max_v * half;
        svg += rect(mid, y, len, row_h - 4, kPalette[1]);
        svg += text(mid + len + 4, y + row_h - 7, sides.positive[i].term, "start", 10);
    }
    for (std::size_t i = 0; i < sides.negative.size(); ++i) {
        const double y = top + static_cast<double>(i) * row_h;
        const double len = std::abs(sides.negative[i].score) / max_v * half;
        svg += rect(mid - len, y, len, row_h - 4, kPalette[0]);
        svg += text(mid - len - 4, y + row_h - 7, sides.negative[i].term, "end", 10);
    }
    svg += "</svg>\n";
    write_text_file(out, svg);
    return true;
}

bool wordcloud_svg(const std::string& title, const TermScoreTable& table, std::size_t max_words,
                   const std::filesystem::path& out, std::ostream& warnings) {
    std::vector<TermScore> rows;
    for (const auto& r : table.top(max_words).rows) {
        if (r.score > 0) rows.push_back(r);
    }
    if (rows.empty()) {
        warnings << "warning: no positive terms for word cloud " << out.string() << ", skipped\n";
        return false;
    }
    const double w = 640, h = 420, cx = w / 2, cy = h / 2 + 10;
    const double max_v = rows.front().score;
    struct Box {
        double x0, y0, x1, y1;
    };
    std::vector<Box> placed;
    std::string svg = header(w, h, title);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double size = 10 + 30 * std::sqrt(rows[i].score / max_v);
        const double bw = 0.6 * size * static_cast<double>(rows[i].term.size());
        const double bh = size;
        // Archimedean spiral from the centre until the box is free.
        for (int step = 0; step < 4000; ++step) {
            const double t = step * 0.15;
            const double x = cx + 3.0 * t * std::cos(t) - bw / 2;
            const double y = cy + 2.0 * t * std::sin(t);
            const Box b{x, y - bh, x + bw, y};
            if (b.x0 < 0 || b.x1 > w || b.y0 < 30 || b.y1 > h) continue;
            const bool clash = std::any_of(placed.begin(), placed.end(), [&](const Box& o) {
                return b.x0 < o.x1 && o.x0 < b.x1 && b.y0 < o.y1 && o.y0 < b.y1;
            });
            if (clash) continue;
            placed.push_back(b);
            svg += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) + "\" fill=\"" +
                   kPalette[i % 7] + "\">" + esc(rows[i].term) + "</text>\n";
            break;
        }
    }
    svg += "</svg>\n";
    write_text_file(out, svg);
    return true;
}

bool grouped_bar_svg(const std::string& title, const std::vector<std::string>& categories,
                     const std::map<std::string, std::vector<double>>& series,
                     const std::filesystem::path& out, std::ostream& warnings) {
    if (categories.empty() || series.empty()) {
        warnings << "warning: no data for figure " << out.string() << ", skipped\n";
        return false;
    }
    const double bw = 22, left = 50, top = 60, plot_h = 240;
    const double group_w = bw * static_cast<double>(series.size()) + 20;
    const double w = left + group_w * static_cast<double>(categories.size()) + 20;
    const double h = top + plot_h + 50;
    double max_v = 0;
    for (const auto& [name, values] : series) {
        for (double v : values) max_v = std::max(max_v, v);
    }
    if (max_v <= 0) max_v = 1;
    std::string svg = header(w, h, title);
    std::size_t s = 0;
    for (const auto& [name, values] : series) {
        svg += rect(left + 120 * static_cast<double>(s), 34, 10, 10, kPalette[s % 7]);
        svg += text(left + 120 * static_cast<double>(s) + 14, 43, name, "start", 11);
        for (std::size_t c = 0; c < categories.size() && c < values.size(); ++c) {
            const double x = left + group_w * static_cast<double>(c) + 10 + bw * static_cast<double>(s);
            const double bh = std::max(0.0, values[c]) / max_v * plot_h;
            svg += rect(x, top + plot_h - bh, bw - 2, bh, kPalette[s % 7]);
        }
        ++s;
    }
    for (std::size_t c = 0; c < categories.size(); ++c) {
        svg += text(left + group_w * (static_cast<double>(c) + 0.5), top + plot_h + 16, categories[c]);
    }
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(w - 10) + "\" y2=\"" +
           num(top + plot_h) + "\" stroke=\"black\"/>\n</svg>\n";
    write_text_file(out, svg);
    return true;
}

bool overlap_svg(const OverlapMatrix& m, const std::filesystem::path& out, std::ostream& warnings) {
    if (m.communities.empty()) {
        warnings << "warning: no communities for " << out.string() << ", skipped\n";
        return false;
    }
    const double w = 520, h = 520, cx = w / 2, cy = h / 2 + 10, r = 180;
    const std::size_t n = m.communities.size();
    std::size_t max_edge = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) max_edge = std::max(max_edge, m.counts[i][j]);
    }
    auto pos = [&](std::size_t i) {
        const double a = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n) - std::numbers::pi / 2;
        return std::pair{cx + r * std::cos(a), cy + r * std::sin(a)};
    };
    std::string svg = header(w, h, "Shared authors");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (m.counts[i][j] == 0) continue;
            const auto [x1, y1] = pos(i);
            const auto [x2, y2] = pos(j);
            const double sw = 1 + 9 * static_cast<double>(m.counts[i][j]) / static_cast<double>(max_edge);
            svg += "<path d=\"M " + num(x1) + " " + num(y1) + " Q " + num(cx) + " " + num(cy) + " " + num(x2) +
                   " " + num(y2) + "\" fill=\"none\" stroke=\"" + kPalette[i % 7] + "\" stroke-opacity=\"0.6\"" +
                   " stroke-width=\"" + num(sw) + "\"><title>" + esc(m.communities[i]) + " / " +
                   esc(m.communities[j]) + ": " + std::to_string(m.counts[i][j]) + "</title></path>\n";
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto [x, y] = pos(i);
        svg += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"8\" fill=\"" + kPalette[i % 7] + "\"/>\n";
        svg += text(x, y + (y < cy ? -14 : 22), m.communities[i] + " (" + std::to_string(m.diagonal[i]) + ")");
    }
    svg += "</svg>\n";
    write_text_file(out, svg);
    return true;
}

}  // namespace csakit

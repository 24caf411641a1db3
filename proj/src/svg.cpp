#include "renn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "renn/errors.hpp"

namespace renn {

namespace {

// Plot frame inside the 800 x 600 canvas.
constexpr double kLeft = 80.0;
constexpr double kTop = 50.0;
constexpr double kPlotWidth = 560.0;
constexpr double kPlotHeight = 480.0;

struct Rgb {
    double r, g, b;
};
constexpr Rgb kLow{68.0, 1.0, 84.0};     // purple: low
constexpr Rgb kHigh{94.0, 201.0, 98.0};  // green: high

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string label_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto mix = [t](double a, double b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", mix(kLow.r, kHigh.r), mix(kLow.g, kHigh.g), mix(kLow.b, kHigh.b));
    return buf;
}

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
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

std::string header(std::string_view comment) {
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(kSvgWidth) +
         "\" height=\"" + std::to_string(kSvgHeight) + "\" viewBox=\"0 0 " + std::to_string(kSvgWidth) + " " +
         std::to_string(kSvgHeight) + "\">\n";
    if (!comment.empty()) {
        std::string body(comment);
        // "--" is not allowed inside XML comments.
        for (std::size_t pos; (pos = body.find("--")) != std::string::npos;) {
            body.replace(pos, 2, "- -");
        }
        s += "<!-- " + body + " -->\n";
    }
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kSvgWidth) + "\" height=\"" + std::to_string(kSvgHeight) +
         "\" fill=\"white\"/>\n";
    return s;
}

std::string text(double x, double y, std::string_view content, std::string_view anchor = "middle", int size = 12) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           std::to_string(size) + "\" text-anchor=\"" + std::string(anchor) + "\">" + escape(content) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, std::string_view stroke = "black") {
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
           "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"1\"/>\n";
}

// Frame with 5 ticks per axis.
std::string axes(double x_lo, double x_hi, double y_lo, double y_hi, std::string_view x_label, std::string_view y_label) {
    std::string s;
    s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlotWidth) + "\" height=\"" +
         num(kPlotHeight) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double px = kLeft + f * kPlotWidth;
        const double py = kTop + kPlotHeight - f * kPlotHeight;
        s += line(px, kTop + kPlotHeight, px, kTop + kPlotHeight + 5);
        s += text(px, kTop + kPlotHeight + 20, label_num(x_lo + f * (x_hi - x_lo)));
        s += line(kLeft - 5, py, kLeft, py);
        s += text(kLeft - 8, py + 4, label_num(y_lo + f * (y_hi - y_lo)), "end");
    }
    s += text(kLeft + kPlotWidth / 2, kTop + kPlotHeight + 42, x_label, "middle", 14);
    s += "<text x=\"20\" y=\"" + num(kTop + kPlotHeight / 2) +
         "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         num(kTop + kPlotHeight / 2) + ")\">" + escape(y_label) + "</text>\n";
    return s;
}

}  // namespace

Channel parse_channel(std::string_view text) {
    if (text == "vacuity") return Channel::Vacuity;
    if (text == "dissonance") return Channel::Dissonance;
    if (text == "entropy") return Channel::Entropy;
    if (text == "class") return Channel::Class;
    throw ConfigError("unknown channel '" + std::string(text) + "' (expected vacuity, dissonance, entropy, class)");
}

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::Vacuity: return "vacuity";
        case Channel::Dissonance: return "dissonance";
        case Channel::Entropy: return "entropy";
        case Channel::Class: return "class";
    }
    return "vacuity";
}

std::string render_grid_svg(std::span<const GridRecord> records, Channel channel, std::size_t num_classes,
                            std::string_view title, std::string_view comment) {
    const auto res = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(records.size()))));
    if (res < 2 || res * res != records.size()) {
        throw DomainError("grid record count is not a square of at least 4");
    }
    if (num_classes < 2) {
        throw DomainError("grid rendering needs at least 2 classes");
    }
    double lo = 0.0;
    double hi = 1.0;
    if (channel == Channel::Entropy) {
        hi = std::log(static_cast<double>(num_classes));
    } else if (channel == Channel::Class) {
        hi = static_cast<double>(num_classes - 1);
    }
    auto value = [channel](const GridRecord& r) {
        switch (channel) {
            case Channel::Vacuity: return r.vacuity;
            case Channel::Dissonance: return r.dissonance;
            case Channel::Entropy: return r.entropy;
            case Channel::Class: return static_cast<double>(r.predicted_class);
        }
        return 0.0;
    };

    const double x_lo = records.front().x;
    const double y_lo = records.front().y;
    const double x_hi = records.back().x;
    const double y_hi = records.back().y;
    const double cw = kPlotWidth / static_cast<double>(res);
    const double ch = kPlotHeight / static_cast<double>(res);

    std::string s = header(comment);
    s += text(kSvgWidth / 2.0, 30, title.empty() ? std::string(to_string(channel)) : std::string(title), "middle", 16);
    s += "<g shape-rendering=\"crispEdges\">\n";
    for (std::size_t iy = 0; iy < res; ++iy) {
        const double py = kTop + kPlotHeight - static_cast<double>(iy + 1) * ch;
        for (std::size_t ix = 0; ix < res; ++ix) {
            const double v = value(records[iy * res + ix]);
            s += "<rect x=\"" + num(kLeft + static_cast<double>(ix) * cw) + "\" y=\"" + num(py) + "\" width=\"" +
                 num(cw) + "\" height=\"" + num(ch) + "\" fill=\"" + ramp((v - lo) / (hi - lo)) + "\"/>\n";
        }
    }
    s += "</g>\n";
    s += axes(x_lo, x_hi, y_lo, y_hi, "x", "y");

    // colour bar
    constexpr int kBarSteps = 20;
    const double bar_x = kLeft + kPlotWidth + 30;
    const double step_h = kPlotHeight / kBarSteps;
    for (int i = 0; i < kBarSteps; ++i) {
        const double f = (i + 0.5) / kBarSteps;
        s += "<rect x=\"" + num(bar_x) + "\" y=\"" + num(kTop + kPlotHeight - (i + 1) * step_h) +
             "\" width=\"20\" height=\"" + num(step_h) + "\" fill=\"" + ramp(f) + "\"/>\n";
    }
    s += text(bar_x + 26, kTop + kPlotHeight, label_num(lo), "start");
    s += text(bar_x + 26, kTop + 10, label_num(hi), "start");
    s += text(bar_x + 10, kTop - 8, to_string(channel), "middle");
    s += "</svg>\n";
    return s;
}

std::string render_cdf_svg(std::span<const CdfSeries> series, double max_value, std::string_view title,
                           std::string_view comment) {
    if (series.empty()) {
        throw DomainError("no CDF curves to render");
    }
    if (!(max_value > 0.0)) {
        throw DomainError("CDF range must be positive");
    }
    std::string s = header(comment);
    s += text(kSvgWidth / 2.0, 30, title.empty() ? "Empirical CDF of predictive entropy" : title, "middle", 16);
    s += axes(0.0, max_value, 0.0, 1.0, "entropy (nats)", "CDF");
    for (std::size_t k = 0; k < series.size(); ++k) {
        const CdfCurve& c = series[k].curve;
        if (c.thresholds.size() != c.cumulative.size()) {
            throw DomainError("CDF curve has mismatched lengths");
        }
        const std::string colour = ramp(series.size() == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(series.size() - 1));
        s += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
            if (i) s += ' ';
            s += num(kLeft + c.thresholds[i] / max_value * kPlotWidth) + "," +
                 num(kTop + kPlotHeight - c.cumulative[i] * kPlotHeight);
        }
        s += "\"/>\n";
        const double ly = kTop + 20 + 18 * static_cast<double>(k);
        s += line(kLeft + 12, ly - 4, kLeft + 36, ly - 4, colour);
        s += text(kLeft + 42, ly, series[k].label, "start");
    }
    s += "</svg>\n";
    return s;
}

}  // namespace renn

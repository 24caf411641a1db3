#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "renn/metrics.hpp"

namespace renn {

enum class Channel { Vacuity, Dissonance, Entropy, Class };

/// Accepts vacuity, dissonance, entropy, class. Throws ConfigError otherwise.
Channel parse_channel(std::string_view text);
std::string_view to_string(Channel channel);

inline constexpr int kSvgWidth = 800;
inline constexpr int kSvgHeight = 600;

/// Heatmap of one grid channel on the purple-to-green ramp. `comment` is embedded verbatim
/// as an XML comment (used for the effective-config echo).
std::string render_grid_svg(std::span<const GridRecord> records, Channel channel, std::size_t num_classes,
                            std::string_view title = {}, std::string_view comment = {});

struct CdfSeries {
    std::string label;
    CdfCurve curve;
};

/// Step-free polyline chart of entropy CDFs over [0, max_value] x [0, 1].
std::string render_cdf_svg(std::span<const CdfSeries> series, double max_value, std::string_view title = {},
                           std::string_view comment = {});

}  // namespace renn

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "comprate/compression.hpp"
#include "comprate/trajectory.hpp"

namespace comprate {

/// Incremental window-feature extraction over a live point stream. Buffers
/// only the current window plus the previous window's rate, so memory stays
/// bounded regardless of session length. Emits exactly the features that
/// windowed_features() would produce on the same point sequence.
class WindowStream {
  public:
    WindowStream(double window_s, CompressionConfig cfg) : window_s_(window_s), cfg_(cfg) {
        cfg_.validate();
        if (!(window_s_ > 0.0)) throw std::invalid_argument("WindowStream: window_s must be > 0");
    }

    struct FeedResult {
        std::vector<WindowFeature> closed;  // windows completed by this point
        bool rejected = false;              // point was out of order and dropped
    };

    /// Accepts the next point. Out-of-order points are rejected (flagged in
    /// the result) and the stream continues from the next valid point.
    FeedResult feed(const TrajPoint& p) {
        FeedResult result;
        if (last_t_ && !(p.t > *last_t_)) {
            result.rejected = true;
            return result;
        }
        last_t_ = p.t;
        if (!grid_t0_) {
            grid_t0_ = p.t;
            window_index_ = 0;
        }
        // Close every window that ends at or before this point's timestamp.
        while (p.t >= window_end()) {
            result.closed.push_back(close_current());
        }
        buffer_.points.push_back(p);
        return result;
    }

    /// Closes the final (partial) window at end of stream.
    std::vector<WindowFeature> finish() {
        std::vector<WindowFeature> out;
        if (grid_t0_) out.push_back(close_current());
        return out;
    }

  private:
    double window_end() const {
        return *grid_t0_ + static_cast<double>(window_index_ + 1) * window_s_;
    }

    WindowFeature close_current() {
        WindowFeature f;
        f.window_index = window_index_;
        f.t0 = *grid_t0_ + static_cast<double>(window_index_) * window_s_;
        f.t1 = window_end();
        f.point_count = buffer_.size();
        f.rate = buffer_.size() >= 2 ? compression_rate(stc_compress(buffer_, cfg_)) : 0.0;
        if (window_index_ > 0) f.delta = delta_rate(f.rate, prev_rate_, cfg_.delta_mode);
        prev_rate_ = f.rate;
        buffer_.points.clear();
        ++window_index_;
        return f;
    }

    double window_s_;
    CompressionConfig cfg_;
    std::optional<double> grid_t0_;
    std::optional<double> last_t_;
    std::size_t window_index_ = 0;
    double prev_rate_ = 0.0;
    Trajectory buffer_;
};

}  // namespace comprate

#include "wpnav/localizer.hpp"

#include <stdexcept>

namespace wpnav::loc {

Localizer::Localizer(std::shared_ptr<const refmap::ReferenceMap> map, const Pose2D& initial,
                     LocalizerConfig cfg)
    : map_(std::move(map)), cfg_(cfg), estimate_(initial) {
  if (!map_ || !map_->index) throw std::invalid_argument("localizer needs a built reference map");
  icp::validate(cfg_.icp);
  if (cfg_.correction_period < 1 || cfg_.streak_limit < 1) {
    throw std::invalid_argument("invalid localizer configuration");
  }
}

void Localizer::predict(const Pose2D& odom) {
  if (last_odom_) estimate_ = compose(estimate_, relative(*last_odom_, odom));
  last_odom_ = odom;
}

bool Localizer::correct(const sim::LidarScan& scan) {
  const int seen = scans_seen_++;
  if (seen % cfg_.correction_period != 0) return false;
  const auto hits = scan.hit_points();
  if (hits.empty()) {
    ++failure_streak_;
    return false;
  }
  last_ = icp::run_icp(hits, *map_->index, estimate_, cfg_.icp);
  if (last_.converged && is_finite(last_.transform)) {
    estimate_ = last_.transform;
    failure_streak_ = 0;
    return true;
  }
  ++failure_streak_;
  return false;
}

Localizer init_localizer(std::shared_ptr<const refmap::ReferenceMap> map, const Pose2D& initial,
                         LocalizerConfig cfg) {
  return Localizer(std::move(map), initial, cfg);
}

}  // namespace wpnav::loc

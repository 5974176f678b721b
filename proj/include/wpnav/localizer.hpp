#pragma once

#include <memory>
#include <optional>

#include "wpnav/geom.hpp"
#include "wpnav/icp.hpp"
#include "wpnav/refmap.hpp"
#include "wpnav/worldsim.hpp"

namespace wpnav::loc {

struct LocalizerConfig {
  icp::IcpConfig icp;
  int correction_period = 1;  // correct on every n-th scan
  int streak_limit = 10;      // consecutive failed corrections before "lost"
};

/// Prior-map tracker: odometry prediction followed by ICP against the reference map.
/// Holds the map by shared pointer; many localizers may share one map.
class Localizer {
 public:
  Localizer(std::shared_ptr<const refmap::ReferenceMap> map, const Pose2D& initial,
            LocalizerConfig cfg = {});

  void predict(const Pose2D& odom);
  /// Returns true if an ICP correction was applied.
  bool correct(const sim::LidarScan& scan);

  const Pose2D& estimate() const { return estimate_; }
  int failure_streak() const { return failure_streak_; }
  bool lost() const { return failure_streak_ >= cfg_.streak_limit; }
  const icp::IcpResult& last_result() const { return last_; }

 private:
  std::shared_ptr<const refmap::ReferenceMap> map_;
  LocalizerConfig cfg_;
  Pose2D estimate_;
  std::optional<Pose2D> last_odom_;
  int failure_streak_ = 0;
  int scans_seen_ = 0;
  icp::IcpResult last_;
};

Localizer init_localizer(std::shared_ptr<const refmap::ReferenceMap> map, const Pose2D& initial,
                         LocalizerConfig cfg = {});

}  // namespace wpnav::loc

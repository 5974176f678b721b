#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "wpnav/geom.hpp"
#include "wpnav/grid.hpp"
#include "wpnav/icp.hpp"
#include "wpnav/worldsim.hpp"

namespace wpnav::refmap {

using icp::PointCloud2D;

/// One step of the recorded mapping drive.
struct TeleopEntry {
  Pose2D odom;
  sim::LidarScan scan;
};

using TeleopLog = std::vector<TeleopEntry>;

/// Global point-cloud map with its nearest-neighbour index and static raster.
struct ReferenceMap {
  PointCloud2D points;
  double cell = 0.1;
  std::shared_ptr<const icp::NNIndex> index;
  OccupancyLayer grid;
};

/// Streaming voxel filter: one representative per cell, namely the point nearest
/// the cell's running centroid (the earlier point wins ties). Output order is the
/// order in which cells were first occupied.
class VoxelFilter {
 public:
  explicit VoxelFilter(double cell);
  void insert(Point2 p);
  PointCloud2D points() const;
  std::size_t size() const { return cells_.size(); }

 private:
  struct Slot {
    double sum_x = 0.0;
    double sum_y = 0.0;
    std::size_t count = 0;
    Point2 rep;
  };
  double cell_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
  std::vector<Slot> cells_;
};

PointCloud2D downsample(const PointCloud2D& points, double cell);

/// Occupancy raster over the points' bounding box padded by 1 m.
OccupancyLayer rasterize(const PointCloud2D& points, double resolution);

/// Builds index and raster for a point set.
ReferenceMap make_reference_map(PointCloud2D points, double cell, double raster_resolution);

struct AccumulateStats {
  std::size_t frames = 0;
  std::size_t icp_fallbacks = 0;
  std::vector<Pose2D> poses;
};

ReferenceMap accumulate(const TeleopLog& log, const icp::IcpConfig& cfg, double cell,
                        double raster_resolution = 0.1, AccumulateStats* stats = nullptr);

void write_refmap(std::ostream& out, const ReferenceMap& map);
void save_refmap(const ReferenceMap& map, const std::string& path);
ReferenceMap read_refmap(std::istream& in, double raster_resolution = 0.1);
ReferenceMap load_refmap(const std::string& path, double raster_resolution = 0.1);

/// Recorded command tape for the scripted mapping drive.
struct DriveTape {
  double dt = 0.1;
  std::vector<sim::VelocityCommand> commands;  // one per time step
};

DriveTape parse_tape(std::istream& in);
DriveTape load_tape(const std::string& path);

/// Replays a tape in the static part of a world (moving obstacles removed) and records
/// odometry plus scans at every step.
TeleopLog record_drive(const sim::World& world, const DriveTape& tape, const sim::LidarConfig& lidar,
                       const sim::MotionNoise& noise, std::uint64_t seed, double robot_radius = 0.2);

}  // namespace wpnav::refmap

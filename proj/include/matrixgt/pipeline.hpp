#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "matrixgt/annotator.hpp"
#include "matrixgt/kitti.hpp"
#include "matrixgt/scene.hpp"

namespace matrixgt {

/// 0 means "auto": MATRIXGT_WORKERS if set, else the hardware thread count.
unsigned resolve_workers(unsigned requested);

/// Runs task(i) for i in [0, count) on `workers` threads. Stops handing out new
/// frames after the first failure and rethrows the failure of the lowest frame index.
void run_frames(std::uint32_t count, unsigned workers, const std::function<void(std::uint32_t)>& task);

void generate_dataset(const ScenarioConfig& config, const std::filesystem::path& out_dir, unsigned workers = 1);

/// Annotates every frame of a dataset directory into `NNNNNN.txt` KITTI files.
/// Never opens `*_instance.mrb`.
void annotate_dataset(const std::filesystem::path& dataset_dir, const std::filesystem::path& labels_dir,
                      const RefinementParams& params = {}, unsigned workers = 1);

/// Reference labels from the instance oracle: per visible vehicle, the exact hull
/// of its oracle pixels; occlusion from visible over unoccluded pixel count.
std::vector<KittiLabel> oracle_frame_labels(const CameraModel& camera, const RasterU16& instance,
                                            const RasterU8& stencil, std::span<const EngineRecord> records);

void oracle_labels_dataset(const std::filesystem::path& dataset_dir, const std::filesystem::path& labels_dir,
                           unsigned workers = 1);

}  // namespace matrixgt

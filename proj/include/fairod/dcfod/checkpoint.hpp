#pragma once

#include <filesystem>

#include "fairod/dcfod/model.hpp"

namespace fairod::dcfod {

/// Binary parameter dump, version 1:
///   8-byte magic "FAIRODCK", uint32 version, uint32 header length, JSON header
///   (config echo, input width, subgroup count, discriminator flag), then every layer's weight
///   and bias (encoder, decoder, discriminator) and the centroid block as little-endian float64
///   (network parameters are float32 values widened on write).
struct Checkpoint {
  DcfodModel model;
  TrainConfig config;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const DcfodModel& model, const TrainConfig& config, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fairod::dcfod
